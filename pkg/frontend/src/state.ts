/**
 * Annotator state machine, kept free of DOM so it is directly testable.
 *
 * Rules enforced here rather than in the rendering layer:
 *  - boxes are clamped and validated before any PUT leaves the client;
 *  - Save stays unavailable while any box lacks a class;
 *  - at most one PUT is in flight per image;
 *  - navigation wraps and asks before discarding unsaved work.
 */

import { ApiClient, ApiError, ImageEntry, LabelEntry, WireBox } from "./api.js"
import {
  CanvasBox,
  PixelRect,
  clampRect,
  isUsableRect,
  isValidNormalized,
  orderedRect,
  rectToNormalized,
} from "./geometry.js"

export type ConfirmFn = (message: string) => boolean

export class AnnotatorState {
  images: ImageEntry[] = []
  labels: LabelEntry[] = []
  index = 0
  boxes: CanvasBox[] = []
  selected: number | null = null
  dirty = false
  saving = false
  lastError: string | null = null
  draft: PixelRect | null = null

  constructor(
    private api: ApiClient,
    private confirmDiscard: ConfirmFn = () => true,
  ) {}

  get current(): ImageEntry | null {
    return this.images[this.index] ?? null
  }

  async init(): Promise<void> {
    this.labels = await this.api.getLabelMap()
    this.images = await this.api.listImages()
    if (this.images.length > 0) await this.loadCurrent()
  }

  async loadCurrent(): Promise<void> {
    const image = this.current
    if (!image) return
    const record = await this.api.getAnnotation(image.image_id)
    this.boxes = record.boxes.map((b) => ({
      rect: {
        x0: (b.cx - b.w / 2) * image.width,
        y0: (b.cy - b.h / 2) * image.height,
        x1: (b.cx + b.w / 2) * image.width,
        y1: (b.cy + b.h / 2) * image.height,
      },
      classId: b.class_id,
      dirty: false,
    }))
    this.selected = this.boxes.length ? this.boxes.length - 1 : null
    this.dirty = false
    this.draft = null
    this.lastError = null
  }

  // -- drawing ------------------------------------------------------------

  beginDraft(x: number, y: number): void {
    this.draft = { x0: x, y0: y, x1: x, y1: y }
  }

  dragDraft(x: number, y: number): void {
    if (this.draft) {
      this.draft = { ...this.draft, x1: x, y1: y }
    }
  }

  /** Commit the draft as a new box; ignores sub-pixel drags. */
  endDraft(): boolean {
    const image = this.current
    if (!this.draft || !image) return false
    const rect = orderedRect(this.draft)
    this.draft = null
    if (!isUsableRect(rect, image.width, image.height)) return false
    this.boxes.push({
      rect: clampRect(rect, image.width, image.height),
      classId: null,
      dirty: true,
    })
    this.selected = this.boxes.length - 1
    this.dirty = true
    return true
  }

  assignClass(classIndex: number): boolean {
    if (this.selected === null) return false
    if (classIndex < 0 || classIndex >= this.labels.length) return false
    this.boxes[this.selected].classId = classIndex
    this.boxes[this.selected].dirty = true
    this.dirty = true
    return true
  }

  deleteSelected(): void {
    if (this.selected === null) return
    this.boxes.splice(this.selected, 1)
    this.selected = this.boxes.length ? this.boxes.length - 1 : null
    this.dirty = true
  }

  // -- saving ---------------------------------------------------------------

  /** Save is allowed only when every box carries a class and no PUT is in flight. */
  canSave(): boolean {
    return !this.saving && this.boxes.every((b) => b.classId !== null)
  }

  toWire(): WireBox[] {
    const image = this.current
    if (!image) return []
    return this.boxes.map((b) => {
      const n = rectToNormalized(b.rect, image.width, image.height)
      return { class_id: b.classId as number, cx: n.cx, cy: n.cy, w: n.w, h: n.h }
    })
  }

  async save(): Promise<boolean> {
    const image = this.current
    if (!image || !this.canSave()) return false
    const wire = this.toWire()
    for (const box of wire) {
      if (!isValidNormalized(box)) {
        this.lastError = "box outside the image bounds"
        return false
      }
    }
    this.saving = true
    try {
      await this.api.putAnnotation(image.image_id, wire)
      this.dirty = false
      this.boxes.forEach((b) => (b.dirty = false))
      image.annotated = true
      this.lastError = null
      return true
    } catch (err) {
      // server rejection: keep the boxes on screen for correction
      this.lastError = err instanceof ApiError ? err.detail : String(err)
      return false
    } finally {
      this.saving = false
    }
  }

  // -- navigation ----------------------------------------------------------

  private async moveTo(index: number): Promise<boolean> {
    if (this.images.length === 0) return false
    if (this.dirty && !this.confirmDiscard("Discard unsaved boxes?")) {
      return false
    }
    this.index = ((index % this.images.length) + this.images.length) % this.images.length
    try {
      await this.loadCurrent()
      return true
    } catch (err) {
      this.lastError = `load failed, retry: ${err instanceof Error ? err.message : err}`
      return false
    }
  }

  async next(): Promise<boolean> {
    return this.moveTo(this.index + 1)
  }

  async prev(): Promise<boolean> {
    return this.moveTo(this.index - 1)
  }
}
