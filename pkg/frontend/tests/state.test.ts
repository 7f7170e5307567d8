import { beforeEach, describe, expect, it } from "vitest"

import type { AnnotationRecord, ImageEntry, LabelEntry, WireBox } from "../src/api.js"
import { ApiClient, ApiError } from "../src/api.js"
import { AnnotatorState } from "../src/state.js"

/** In-memory stand-in for the annotation service. */
class FakeApi extends ApiClient {
  images: ImageEntry[] = [
    { image_id: "a", width: 100, height: 100, annotated: false },
    { image_id: "b", width: 200, height: 50, annotated: false },
    { image_id: "c", width: 96, height: 96, annotated: false },
  ]
  store = new Map<string, WireBox[]>()
  puts: Array<{ id: string; boxes: WireBox[] }> = []
  failNextPut: { status: number; detail: string } | null = null
  putDelayMs = 0

  override async listImages(): Promise<ImageEntry[]> {
    return this.images.map((e) => ({ ...e }))
  }

  override async getLabelMap(): Promise<LabelEntry[]> {
    return [
      { name: "zero", id: 1 },
      { name: "one", id: 2 },
      { name: "two", id: 3 },
    ]
  }

  override async getAnnotation(imageId: string): Promise<AnnotationRecord> {
    const entry = this.images.find((e) => e.image_id === imageId)
    if (!entry) throw new ApiError(404, `unknown image '${imageId}'`)
    return {
      image_id: imageId,
      image_w: entry.width,
      image_h: entry.height,
      boxes: (this.store.get(imageId) ?? []).map((b) => ({ ...b })),
    }
  }

  override async putAnnotation(imageId: string, boxes: WireBox[]): Promise<void> {
    if (this.putDelayMs) await new Promise((r) => setTimeout(r, this.putDelayMs))
    if (this.failNextPut) {
      const { status, detail } = this.failNextPut
      this.failNextPut = null
      throw new ApiError(status, detail)
    }
    this.puts.push({ id: imageId, boxes })
    this.store.set(imageId, boxes.map((b) => ({ ...b })))
  }
}

describe("AnnotatorState", () => {
  let api: FakeApi
  let state: AnnotatorState
  let confirmations: string[]
  let confirmAnswer: boolean

  beforeEach(async () => {
    api = new FakeApi("")
    confirmations = []
    confirmAnswer = true
    state = new AnnotatorState(api, (msg) => {
      confirmations.push(msg)
      return confirmAnswer
    })
    await state.init()
  })

  it("draw, classify, save issues the normalized PUT", async () => {
    state.beginDraft(25, 25)
    state.dragDraft(75, 75)
    expect(state.endDraft()).toBe(true)
    expect(state.canSave()).toBe(false) // box has no class yet
    expect(state.assignClass(2)).toBe(true)
    expect(state.canSave()).toBe(true)
    expect(await state.save()).toBe(true)
    expect(api.puts).toHaveLength(1)
    const box = api.puts[0].boxes[0]
    expect(box.class_id).toBe(2)
    expect(box.cx).toBeCloseTo(0.5, 6)
    expect(box.cy).toBeCloseTo(0.5, 6)
    expect(box.w).toBeCloseTo(0.5, 6)
    expect(box.h).toBeCloseTo(0.5, 6)
    expect(state.dirty).toBe(false)
  })

  it("saving with no boxes sends an explicit empty list", async () => {
    expect(state.canSave()).toBe(true)
    state.dirty = true
    expect(await state.save()).toBe(true)
    expect(api.puts[0].boxes).toEqual([])
  })

  it("sub-pixel drags never become boxes", () => {
    state.beginDraft(10, 10)
    state.dragDraft(10.4, 10.2)
    expect(state.endDraft()).toBe(false)
    expect(state.boxes).toHaveLength(0)
    expect(state.dirty).toBe(false)
  })

  it("boxes drawn past the edge are clamped before the PUT", async () => {
    state.beginDraft(-40, -40)
    state.dragDraft(50, 50)
    state.endDraft()
    state.assignClass(0)
    expect(await state.save()).toBe(true)
    const box = api.puts[0].boxes[0]
    expect(box.cx - box.w / 2).toBeGreaterThanOrEqual(-1e-6)
    expect(box.cy - box.h / 2).toBeGreaterThanOrEqual(-1e-6)
  })

  it("server 400 keeps the box for correction and surfaces the message", async () => {
    state.beginDraft(10, 10)
    state.dragDraft(40, 40)
    state.endDraft()
    state.assignClass(1)
    api.failNextPut = { status: 400, detail: "boxes[0]: bad" }
    expect(await state.save()).toBe(false)
    expect(state.boxes).toHaveLength(1)
    expect(state.dirty).toBe(true)
    expect(state.lastError).toContain("boxes[0]")
  })

  it("reload after save re-renders boxes at identical pixels within 1px", async () => {
    state.beginDraft(20, 30)
    state.dragDraft(60, 80)
    state.endDraft()
    state.assignClass(1)
    await state.save()
    const drawn = state.boxes[0].rect
    await state.loadCurrent()
    const reloaded = state.boxes[0].rect
    expect(Math.abs(reloaded.x0 - drawn.x0)).toBeLessThanOrEqual(1)
    expect(Math.abs(reloaded.y0 - drawn.y0)).toBeLessThanOrEqual(1)
    expect(Math.abs(reloaded.x1 - drawn.x1)).toBeLessThanOrEqual(1)
    expect(Math.abs(reloaded.y1 - drawn.y1)).toBeLessThanOrEqual(1)
    expect(state.boxes[0].classId).toBe(1)
  })

  it("navigation wraps in both directions", async () => {
    expect(state.index).toBe(0)
    await state.next()
    await state.next()
    expect(state.index).toBe(2)
    await state.next()
    expect(state.index).toBe(0) // wrapped
    await state.prev()
    expect(state.index).toBe(2)
  })

  it("dirty state prompts before navigation and honors refusal", async () => {
    state.beginDraft(5, 5)
    state.dragDraft(30, 30)
    state.endDraft()
    confirmAnswer = false
    expect(await state.next()).toBe(false)
    expect(confirmations).toHaveLength(1)
    expect(state.index).toBe(0)
    confirmAnswer = true
    expect(await state.next()).toBe(true)
    expect(state.index).toBe(1)
  })

  it("wrap on a single-image list is a no-op", async () => {
    api.images = [{ image_id: "only", width: 64, height: 64, annotated: false }]
    const solo = new AnnotatorState(api)
    await solo.init()
    await solo.next()
    expect(solo.index).toBe(0)
    await solo.prev()
    expect(solo.index).toBe(0)
  })

  it("at most one save is in flight per image", async () => {
    state.beginDraft(10, 10)
    state.dragDraft(50, 50)
    state.endDraft()
    state.assignClass(0)
    api.putDelayMs = 20
    const first = state.save()
    const second = state.save() // rejected: a PUT is already in flight
    expect(await second).toBe(false)
    expect(await first).toBe(true)
    expect(api.puts).toHaveLength(1)
  })

  it("class assignment outside the label map is refused", () => {
    state.beginDraft(10, 10)
    state.dragDraft(40, 40)
    state.endDraft()
    expect(state.assignClass(7)).toBe(false)
    expect(state.boxes[0].classId).toBeNull()
  })

  it("delete removes the selected box", () => {
    state.beginDraft(10, 10)
    state.dragDraft(40, 40)
    state.endDraft()
    state.deleteSelected()
    expect(state.boxes).toHaveLength(0)
    expect(state.selected).toBeNull()
  })
})
