/**
 * Box geometry: conversions between displayed pixels and the normalized
 * center/size coordinates the service persists.  Every box is clamped to
 * the image bounds before it leaves the client, so the server never sees
 * a record that violates the YOLO invariants.
 */

/** Rectangle in image pixel space (not screen space); corners inclusive of drag extent. */
export interface PixelRect {
  x0: number
  y0: number
  x1: number
  y1: number
}

/** Normalized center/size box as sent over the wire. */
export interface NormalizedBox {
  cx: number
  cy: number
  w: number
  h: number
}

/** A box being edited on the canvas. */
export interface CanvasBox {
  rect: PixelRect
  classId: number | null
  dirty: boolean
}

export function orderedRect(r: PixelRect): PixelRect {
  return {
    x0: Math.min(r.x0, r.x1),
    y0: Math.min(r.y0, r.y1),
    x1: Math.max(r.x0, r.x1),
    y1: Math.max(r.y0, r.y1),
  }
}

/** Clamp a rectangle into [0, imgW] x [0, imgH]. */
export function clampRect(r: PixelRect, imgW: number, imgH: number): PixelRect {
  const o = orderedRect(r)
  return {
    x0: Math.min(Math.max(o.x0, 0), imgW),
    y0: Math.min(Math.max(o.y0, 0), imgH),
    x1: Math.min(Math.max(o.x1, 0), imgW),
    y1: Math.min(Math.max(o.y1, 0), imgH),
  }
}

/** A drag of less than one pixel in either direction is not a box. */
export function isUsableRect(r: PixelRect, imgW: number, imgH: number): boolean {
  const c = clampRect(r, imgW, imgH)
  return c.x1 - c.x0 >= 1 && c.y1 - c.y0 >= 1
}

export function rectToNormalized(r: PixelRect, imgW: number, imgH: number): NormalizedBox {
  const c = clampRect(r, imgW, imgH)
  return {
    cx: (c.x0 + c.x1) / 2 / imgW,
    cy: (c.y0 + c.y1) / 2 / imgH,
    w: (c.x1 - c.x0) / imgW,
    h: (c.y1 - c.y0) / imgH,
  }
}

export function normalizedToRect(b: NormalizedBox, imgW: number, imgH: number): PixelRect {
  return clampRect(
    {
      x0: (b.cx - b.w / 2) * imgW,
      y0: (b.cy - b.h / 2) * imgH,
      x1: (b.cx + b.w / 2) * imgW,
      y1: (b.cy + b.h / 2) * imgH,
    },
    imgW,
    imgH,
  )
}

/** Client-side mirror of the server's validation, to block bad saves early. */
export function isValidNormalized(b: NormalizedBox): boolean {
  const tol = 1e-6
  if (!(b.cx >= 0 && b.cx <= 1 && b.cy >= 0 && b.cy <= 1)) return false
  if (!(b.w > 0 && b.w <= 1 && b.h > 0 && b.h <= 1)) return false
  if (b.cx - b.w / 2 < -tol || b.cx + b.w / 2 > 1 + tol) return false
  if (b.cy - b.h / 2 < -tol || b.cy + b.h / 2 > 1 + tol) return false
  return true
}
