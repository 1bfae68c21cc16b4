/**
 * Minimal deterministic RGBA raster: every operation is integer or
 * straight float arithmetic on a flat buffer, so identical inputs give
 * identical pixels on every run and platform.
 */

export type RGB = readonly [number, number, number]

export class Raster {
  readonly width: number
  readonly height: number
  readonly data: Uint8ClampedArray

  constructor(width: number, height: number, background: RGB = [255, 255, 255]) {
    if (!Number.isInteger(width) || !Number.isInteger(height) || width <= 0 || height <= 0) {
      throw new Error(`bad raster size ${width}x${height}`)
    }
    this.width = width
    this.height = height
    this.data = new Uint8ClampedArray(width * height * 4)
    this.fillRect(0, 0, width, height, background)
  }

  set(x: number, y: number, [r, g, b]: RGB): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return
    const i = (y * this.width + x) * 4
    this.data[i] = r
    this.data[i + 1] = g
    this.data[i + 2] = b
    this.data[i + 3] = 255
  }

  fillRect(x0: number, y0: number, w: number, h: number, rgb: RGB): void {
    const x1 = Math.min(this.width, x0 + w)
    const y1 = Math.min(this.height, y0 + h)
    for (let y = Math.max(0, y0); y < y1; y++) {
      for (let x = Math.max(0, x0); x < x1; x++) this.set(x, y, rgb)
    }
  }

  hline(x0: number, x1: number, y: number, rgb: RGB, dash = 0): void {
    const [a, b] = x0 <= x1 ? [x0, x1] : [x1, x0]
    for (let x = a; x <= b; x++) {
      if (dash > 0 && Math.floor((x - a) / dash) % 2 === 1) continue
      this.set(x, y, rgb)
    }
  }

  vline(x: number, y0: number, y1: number, rgb: RGB, dash = 0): void {
    const [a, b] = y0 <= y1 ? [y0, y1] : [y1, y0]
    for (let y = a; y <= b; y++) {
      if (dash > 0 && Math.floor((y - a) / dash) % 2 === 1) continue
      this.set(x, y, rgb)
    }
  }

  /** Bresenham segment. */
  line(x0: number, y0: number, x1: number, y1: number, rgb: RGB): void {
    let [x, y] = [x0, y0]
    const dx = Math.abs(x1 - x0)
    const dy = -Math.abs(y1 - y0)
    const sx = x0 < x1 ? 1 : -1
    const sy = y0 < y1 ? 1 : -1
    let err = dx + dy
    for (;;) {
      this.set(x, y, rgb)
      if (x === x1 && y === y1) break
      const e2 = 2 * err
      if (e2 >= dy) {
        err += dy
        x += sx
      }
      if (e2 <= dx) {
        err += dx
        y += sy
      }
    }
  }

  /** Thicker polyline drawn as unit-offset copies (keeps integer math). */
  polyline(pts: Array<readonly [number, number]>, rgb: RGB, thick = 1): void {
    for (let i = 1; i < pts.length; i++) {
      const [xa, ya] = pts[i - 1]!
      const [xb, yb] = pts[i]!
      for (let o = 0; o < thick; o++) {
        this.line(xa, ya + o, xb, yb + o, rgb)
        if (thick > 1) this.line(xa + o, ya, xb + o, yb, rgb)
      }
    }
  }

  marker(x: number, y: number, rgb: RGB, size = 2, hollow = false): void {
    for (let dy = -size; dy <= size; dy++) {
      for (let dx = -size; dx <= size; dx++) {
        const edge = Math.abs(dx) === size || Math.abs(dy) === size
        if (hollow ? edge : true) this.set(x + dx, y + dy, rgb)
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 5x7 bitmap font (uppercase + digits + punctuation); text is uppercased
// ---------------------------------------------------------------------------

const GLYPHS: Record<string, string[]> = {
  "0": [".XXX.", "X...X", "X..XX", "X.X.X", "XX..X", "X...X", ".XXX."],
  "1": ["..X..", ".XX..", "..X..", "..X..", "..X..", "..X..", ".XXX."],
  "2": [".XXX.", "X...X", "....X", "...X.", "..X..", ".X...", "XXXXX"],
  "3": ["XXXXX", "....X", "...X.", "..XX.", "....X", "X...X", ".XXX."],
  "4": ["...X.", "..XX.", ".X.X.", "X..X.", "XXXXX", "...X.", "...X."],
  "5": ["XXXXX", "X....", "XXXX.", "....X", "....X", "X...X", ".XXX."],
  "6": ["..XX.", ".X...", "X....", "XXXX.", "X...X", "X...X", ".XXX."],
  "7": ["XXXXX", "....X", "...X.", "..X..", ".X...", ".X...", ".X..."],
  "8": [".XXX.", "X...X", "X...X", ".XXX.", "X...X", "X...X", ".XXX."],
  "9": [".XXX.", "X...X", "X...X", ".XXXX", "....X", "...X.", ".XX.."],
  A: [".XXX.", "X...X", "X...X", "XXXXX", "X...X", "X...X", "X...X"],
  B: ["XXXX.", "X...X", "X...X", "XXXX.", "X...X", "X...X", "XXXX."],
  C: [".XXX.", "X...X", "X....", "X....", "X....", "X...X", ".XXX."],
  D: ["XXXX.", "X...X", "X...X", "X...X", "X...X", "X...X", "XXXX."],
  E: ["XXXXX", "X....", "X....", "XXXX.", "X....", "X....", "XXXXX"],
  F: ["XXXXX", "X....", "X....", "XXXX.", "X....", "X....", "X...."],
  G: [".XXX.", "X...X", "X....", "X.XXX", "X...X", "X...X", ".XXXX"],
  H: ["X...X", "X...X", "X...X", "XXXXX", "X...X", "X...X", "X...X"],
  I: [".XXX.", "..X..", "..X..", "..X..", "..X..", "..X..", ".XXX."],
  J: ["..XXX", "...X.", "...X.", "...X.", "...X.", "X..X.", ".XX.."],
  K: ["X...X", "X..X.", "X.X..", "XX...", "X.X..", "X..X.", "X...X"],
  L: ["X....", "X....", "X....", "X....", "X....", "X....", "XXXXX"],
  M: ["X...X", "XX.XX", "X.X.X", "X.X.X", "X...X", "X...X", "X...X"],
  N: ["X...X", "XX..X", "X.X.X", "X..XX", "X...X", "X...X", "X...X"],
  O: [".XXX.", "X...X", "X...X", "X...X", "X...X", "X...X", ".XXX."],
  P: ["XXXX.", "X...X", "X...X", "XXXX.", "X....", "X....", "X...."],
  Q: [".XXX.", "X...X", "X...X", "X...X", "X.X.X", "X..X.", ".XX.X"],
  R: ["XXXX.", "X...X", "X...X", "XXXX.", "X.X..", "X..X.", "X...X"],
  S: [".XXXX", "X....", "X....", ".XXX.", "....X", "....X", "XXXX."],
  T: ["XXXXX", "..X..", "..X..", "..X..", "..X..", "..X..", "..X.."],
  U: ["X...X", "X...X", "X...X", "X...X", "X...X", "X...X", ".XXX."],
  V: ["X...X", "X...X", "X...X", "X...X", ".X.X.", ".X.X.", "..X.."],
  W: ["X...X", "X...X", "X...X", "X.X.X", "X.X.X", "XX.XX", "X...X"],
  X: ["X...X", "X...X", ".X.X.", "..X..", ".X.X.", "X...X", "X...X"],
  Y: ["X...X", "X...X", ".X.X.", "..X..", "..X..", "..X..", "..X.."],
  Z: ["XXXXX", "....X", "...X.", "..X..", ".X...", "X....", "XXXXX"],
  " ": [".....", ".....", ".....", ".....", ".....", ".....", "....."],
  ".": [".....", ".....", ".....", ".....", ".....", ".XX..", ".XX.."],
  ",": [".....", ".....", ".....", ".....", ".....", "..X..", ".X..."],
  "-": [".....", ".....", ".....", ".XXX.", ".....", ".....", "....."],
  "+": [".....", "..X..", "..X..", "XXXXX", "..X..", "..X..", "....."],
  "=": [".....", ".....", "XXXXX", ".....", "XXXXX", ".....", "....."],
  ":": [".....", ".XX..", ".XX..", ".....", ".XX..", ".XX..", "....."],
  "(": ["...X.", "..X..", ".X...", ".X...", ".X...", "..X..", "...X."],
  ")": [".X...", "..X..", "...X.", "...X.", "...X.", "..X..", ".X..."],
  "/": ["....X", "...X.", "...X.", "..X..", ".X...", ".X...", "X...."],
  "%": ["XX...", "XX..X", "...X.", "..X..", ".X...", "X..XX", "...XX"],
  "<": ["...X.", "..X..", ".X...", "X....", ".X...", "..X..", "...X."],
  ">": [".X...", "..X..", "...X.", "....X", "...X.", "..X..", ".X..."],
  "[": [".XXX.", ".X...", ".X...", ".X...", ".X...", ".X...", ".XXX."],
  "]": [".XXX.", "...X.", "...X.", "...X.", "...X.", "...X.", ".XXX."],
  _: [".....", ".....", ".....", ".....", ".....", ".....", "XXXXX"],
}

export const CHAR_W = 6 // 5 px glyph + 1 px gap
export const CHAR_H = 8

/** Draw text (uppercased; unknown glyphs render as space). */
export function drawText(r: Raster, x: number, y: number, text: string, rgb: RGB): void {
  let cx = x
  for (const ch of text.toUpperCase()) {
    const rows = GLYPHS[ch] ?? GLYPHS[" "]!
    for (let gy = 0; gy < 7; gy++) {
      const row = rows[gy]!
      for (let gx = 0; gx < 5; gx++) {
        if (row[gx] === "X") r.set(cx + gx, y + gy, rgb)
      }
    }
    cx += CHAR_W
  }
}

export function textWidth(text: string): number {
  return text.length * CHAR_W
}

// ---------------------------------------------------------------------------
// sequential colormap: dark violet -> orange -> pale yellow, linear-sRGB
// interpolation of fixed anchors into a 256-entry lookup table
// ---------------------------------------------------------------------------

const ANCHORS: RGB[] = [
  [0, 0, 4],
  [40, 11, 84],
  [101, 21, 110],
  [159, 42, 99],
  [212, 72, 66],
  [245, 125, 21],
  [250, 193, 39],
  [252, 255, 164],
]

export const COLORMAP: RGB[] = (() => {
  const lut: RGB[] = []
  for (let i = 0; i < 256; i++) {
    const s = (i / 255) * (ANCHORS.length - 1)
    const k = Math.min(ANCHORS.length - 2, Math.floor(s))
    const t = s - k
    const a = ANCHORS[k]!
    const b = ANCHORS[k + 1]!
    lut.push([
      Math.round(a[0] + (b[0] - a[0]) * t),
      Math.round(a[1] + (b[1] - a[1]) * t),
      Math.round(a[2] + (b[2] - a[2]) * t),
    ])
  }
  return lut
})()

export function colorize(v: number): RGB {
  const i = Math.max(0, Math.min(255, Math.round(v * 255)))
  return COLORMAP[i]!
}
