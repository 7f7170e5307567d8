/** DOM and canvas wiring around the AnnotatorState machine. */

import { ApiClient } from "./api.js"
import { AnnotatorState } from "./state.js"

const COLORS = ["#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#46f0f0",
                "#f032e6", "#bcf60c", "#fabebe", "#008080"]

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

class AnnotatorApp {
  private state = new AnnotatorState(new ApiClient(""), (msg) => window.confirm(msg))
  private canvas = el<HTMLCanvasElement>("canvas")
  private ctx = this.canvas.getContext("2d")!
  private image = new Image()
  private scale = 1
  private dragging = false

  async start(): Promise<void> {
    await this.state.init()
    this.bindEvents()
    this.renderLabelList()
    await this.showCurrent()
  }

  private bindEvents(): void {
    this.canvas.addEventListener("pointerdown", (e) => {
      const [x, y] = this.toImage(e)
      this.dragging = true
      this.state.beginDraft(x, y)
      this.canvas.setPointerCapture(e.pointerId)
    })
    this.canvas.addEventListener("pointermove", (e) => {
      if (!this.dragging) return
      const [x, y] = this.toImage(e)
      this.state.dragDraft(x, y)
      this.draw()
    })
    this.canvas.addEventListener("pointerup", () => {
      this.dragging = false
      this.state.endDraft()
      this.refreshControls()
      this.draw()
    })
    window.addEventListener("keydown", (e) => {
      if (e.key >= "0" && e.key <= "9") {
        this.state.assignClass(Number(e.key))
        this.refreshControls()
        this.draw()
      } else if (e.key === "ArrowRight") {
        void this.navigate(+1)
      } else if (e.key === "ArrowLeft") {
        void this.navigate(-1)
      } else if (e.key === "Delete" || e.key === "Backspace") {
        this.state.deleteSelected()
        this.refreshControls()
        this.draw()
      }
    })
    el("save").addEventListener("click", () => void this.save())
    el("next").addEventListener("click", () => void this.navigate(+1))
    el("prev").addEventListener("click", () => void this.navigate(-1))
  }

  private toImage(e: PointerEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect()
    return [(e.clientX - rect.left) / this.scale, (e.clientY - rect.top) / this.scale]
  }

  private async navigate(direction: number): Promise<void> {
    const moved = direction > 0 ? await this.state.next() : await this.state.prev()
    if (moved) await this.showCurrent()
    this.refreshControls()
  }

  private async save(): Promise<void> {
    await this.state.save()
    this.refreshControls()
    this.draw()
  }

  private async showCurrent(): Promise<void> {
    const image = this.state.current
    if (!image) {
      el("status").textContent = "no images in the dataset"
      return
    }
    await new Promise<void>((resolve, reject) => {
      this.image.onload = () => resolve()
      this.image.onerror = () => reject(new Error("image load failed"))
      this.image.src = new ApiClient("").imageUrl(image.image_id)
    })
    const maxSide = 640
    this.scale = Math.min(maxSide / image.width, maxSide / image.height, 8)
    this.canvas.width = Math.round(image.width * this.scale)
    this.canvas.height = Math.round(image.height * this.scale)
    this.refreshControls()
    this.draw()
  }

  private renderLabelList(): void {
    const list = el("labels")
    list.innerHTML = ""
    this.state.labels.forEach((label, index) => {
      const item = document.createElement("li")
      item.textContent = `[${index}] ${label.name} (id ${label.id})`
      item.style.color = COLORS[index % COLORS.length]
      item.addEventListener("click", () => {
        this.state.assignClass(index)
        this.refreshControls()
        this.draw()
      })
      list.appendChild(item)
    })
  }

  private refreshControls(): void {
    const image = this.state.current
    el("status").textContent = image
      ? `${this.state.index + 1}/${this.state.images.length} — ${image.image_id}` +
        (this.state.dirty ? " (unsaved)" : "")
      : ""
    const save = el<HTMLButtonElement>("save")
    save.disabled = !this.state.canSave() || !this.state.dirty
    el("error").textContent = this.state.lastError ?? ""
  }

  private draw(): void {
    const image = this.state.current
    if (!image) return
    this.ctx.clearRect(0, 0, this.canvas.width, this.canvas.height)
    this.ctx.drawImage(this.image, 0, 0, this.canvas.width, this.canvas.height)
    const boxes = this.state.draft
      ? [...this.state.boxes, { rect: this.state.draft, classId: null, dirty: true }]
      : this.state.boxes
    boxes.forEach((box, index) => {
      const r = box.rect
      const color = box.classId === null ? "#ffffff" : COLORS[box.classId % COLORS.length]
      this.ctx.strokeStyle = color
      this.ctx.lineWidth = index === this.state.selected ? 3 : 1.5
      this.ctx.strokeRect(
        Math.min(r.x0, r.x1) * this.scale,
        Math.min(r.y0, r.y1) * this.scale,
        Math.abs(r.x1 - r.x0) * this.scale,
        Math.abs(r.y1 - r.y0) * this.scale,
      )
      if (box.classId !== null) {
        const name = this.state.labels[box.classId]?.name ?? `#${box.classId}`
        this.ctx.fillStyle = color
        this.ctx.font = "12px sans-serif"
        this.ctx.fillText(name, Math.min(r.x0, r.x1) * this.scale + 2,
                          Math.min(r.y0, r.y1) * this.scale - 3)
      }
    })
  }
}

window.addEventListener("DOMContentLoaded", () => {
  new AnnotatorApp().start().catch((err) => {
    const banner = document.getElementById("error")
    if (banner) banner.textContent = `startup failed: ${err}`
  })
})
