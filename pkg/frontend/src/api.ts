/** Typed client for the annotation service JSON API. */

export interface ImageEntry {
  image_id: string
  width: number
  height: number
  annotated: boolean
  warning?: string
}

export interface WireBox {
  class_id: number
  cx: number
  cy: number
  w: number
  h: number
}

export interface AnnotationRecord {
  image_id: string
  image_w: number
  image_h: number
  boxes: WireBox[]
}

export interface LabelEntry {
  name: string
  id: number
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`)
  }
}

type FetchLike = typeof fetch

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(`${this.base}${path}`, init)
    if (!resp.ok) {
      let detail = resp.statusText
      try {
        const body = (await resp.json()) as { detail?: string }
        if (body.detail) detail = body.detail
      } catch {
        /* non-JSON error body; keep the status text */
      }
      throw new ApiError(resp.status, detail)
    }
    return resp
  }

  async listImages(): Promise<ImageEntry[]> {
    return (await this.request("/api/images")).json()
  }

  async getLabelMap(): Promise<LabelEntry[]> {
    return (await this.request("/api/labelmap")).json()
  }

  async getAnnotation(imageId: string): Promise<AnnotationRecord> {
    return (await this.request(`/api/annotations/${imageId}`)).json()
  }

  async putAnnotation(imageId: string, boxes: WireBox[]): Promise<void> {
    await this.request(`/api/annotations/${imageId}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ boxes }),
    })
  }

  imageUrl(imageId: string): string {
    return `${this.base}/api/images/${imageId}`
  }
}
