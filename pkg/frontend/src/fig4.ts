/**
 * Width-sweep summary panel: non-diffracting range (left axis, um) and
 * launch lobe-current fraction (right axis) against initial beam width for
 * each launch family, with the critical and maximal widths marked.
 */
import { scaleLinear } from "d3-scale"

import type { SweepFamily, SweepSummary } from "./bundle.js"
import { CHAR_H, Raster, type RGB, drawText, textWidth } from "./raster.js"

const W = 880
const H = 520
const X0 = 68
const Y0 = 64
const PLOT_W = W - X0 - 76
const PLOT_H = H - Y0 - 64

const INK: RGB = [20, 20, 20]
const FRAME: RGB = [70, 70, 70]
const MARK: RGB = [120, 120, 120]

const FAMILY_COLORS: Record<string, RGB> = {
  "shape-preserving": [31, 90, 166],
  bessel: [186, 58, 48],
  gaussian: [120, 120, 120],
}

function familyColor(name: string): RGB {
  return FAMILY_COLORS[name] ?? [20, 120, 90]
}

function fmt(v: number, digits = 1): string {
  const s = v.toFixed(digits)
  return s.endsWith(".0") ? s.slice(0, -2) : s
}

export function renderFig4(sweep: SweepSummary): Raster {
  const r = new Raster(W, H)
  const res = sweep.results
  const families = Object.entries(res.families)
  if (families.length === 0) throw new Error("sweep has no families")

  let wLo = Infinity
  let wHi = -Infinity
  let ldHi = 0
  let lcHi = 0
  for (const [, fam] of families) {
    for (const w of fam.width_nm) {
      wLo = Math.min(wLo, w)
      wHi = Math.max(wHi, w)
    }
    for (const ld of fam.L_d_m) if (ld !== null) ldHi = Math.max(ldHi, ld * 1e6)
    for (const f of fam.lobe_current_fraction) lcHi = Math.max(lcHi, f)
  }
  if (!Number.isFinite(wLo)) throw new Error("sweep families are empty")
  const pad = 0.04 * (wHi - wLo || 1)

  const xs = scaleLinear().domain([wLo - pad, wHi + pad]).range([X0, X0 + PLOT_W - 1])
  const yl = scaleLinear().domain([0, ldHi * 1.08 || 1]).range([Y0 + PLOT_H - 1, Y0])
  const yr = scaleLinear()
    .domain([0, Math.min(1, lcHi * 1.15 || 1)])
    .range([Y0 + PLOT_H - 1, Y0])

  const px = (w: number) => Math.round(xs(w))
  const pyl = (v: number) => Math.round(yl(v))
  const pyr = (v: number) => Math.round(yr(v))

  // frame + ticks
  r.hline(X0 - 1, X0 + PLOT_W, Y0 + PLOT_H, FRAME)
  r.vline(X0 - 1, Y0 - 1, Y0 + PLOT_H, FRAME)
  r.vline(X0 + PLOT_W, Y0 - 1, Y0 + PLOT_H, FRAME)
  r.hline(X0 - 1, X0 + PLOT_W, Y0 - 1, FRAME)

  for (const t of xs.ticks(6)) {
    const tx = px(t)
    r.vline(tx, Y0 + PLOT_H, Y0 + PLOT_H + 3, FRAME)
    const lbl = fmt(t)
    drawText(r, tx - Math.floor(textWidth(lbl) / 2), Y0 + PLOT_H + 6, lbl, INK)
  }
  const xTitle = "INITIAL WIDTH (NM)"
  drawText(r, X0 + Math.floor((PLOT_W - textWidth(xTitle)) / 2),
           Y0 + PLOT_H + 8 + CHAR_H, xTitle, INK)

  for (const t of yl.ticks(5)) {
    const ty = pyl(t)
    r.hline(X0 - 4, X0 - 1, ty, FRAME)
    const lbl = fmt(t, 0)
    drawText(r, X0 - 6 - textWidth(lbl), ty - 3, lbl, INK)
  }
  drawText(r, 8, Y0 - 2 - CHAR_H, "LD (UM)", INK)

  for (const t of yr.ticks(4)) {
    const ty = pyr(t)
    r.hline(X0 + PLOT_W, X0 + PLOT_W + 3, ty, FRAME)
    drawText(r, X0 + PLOT_W + 6, ty - 3, fmt(t, 2), INK)
  }
  const rTitle = "LOBE CURRENT FRACTION"
  drawText(r, W - textWidth(rTitle) - 8, Y0 - 2 - CHAR_H, rTitle, INK)

  // width markers
  const markers: Array<[number | null, string]> = [
    [res.critical_width_nm, "WCRIT"],
    [res.maximal_width_nm, "WMAX"],
  ]
  for (const [wv, tag] of markers) {
    if (wv === null || wv < wLo - pad || wv > wHi + pad) continue
    const mx = px(wv)
    r.vline(mx, Y0, Y0 + PLOT_H - 1, MARK, 4)
    drawText(r, mx - Math.floor(textWidth(tag) / 2), Y0 + 4, tag, MARK)
  }

  // series: solid line + filled marker for LD, dashed + hollow for lobe current
  for (const [name, fam] of families) {
    const color = familyColor(name)
    drawLd(r, fam, color, px, pyl, Y0 + 4)
    if (name !== "gaussian") drawLobe(r, fam, color, px, pyr)
  }

  // legend
  let lx = X0 + 10
  const ly = Y0 + PLOT_H - 2 * CHAR_H - 8
  for (const [name] of families) {
    const color = familyColor(name)
    r.hline(lx, lx + 14, ly + 3, color)
    r.hline(lx, lx + 14, ly + 4, color)
    drawText(r, lx + 18, ly, name, color)
    lx += 18 + textWidth(name) + 16
  }
  drawText(r, X0 + 10, ly + CHAR_H + 2,
           "SOLID: LD   DASHED: LOBE CURRENT   OPEN AT TOP: CENSORED", INK)

  drawText(r, 10, 8, "NON-DIFFRACTING RANGE AND LOBE CURRENT VS INITIAL WIDTH", INK)
  const sub = `PROFILE=${sweep.profile}  V=${fmt(sweep.scenario.physics.voltage / 1e3, 0)}KV`
  drawText(r, 10, 8 + CHAR_H + 2, sub, MARK)
  return r
}

function drawLd(r: Raster, fam: SweepFamily, color: RGB,
                px: (w: number) => number, py: (v: number) => number,
                yTop: number): void {
  let prev: readonly [number, number] | null = null
  fam.width_nm.forEach((w, i) => {
    const ld = fam.L_d_m[i]
    if (ld === null || ld === undefined) {
      // censored: pinned open marker at the top edge
      r.marker(px(w), yTop, color, 3, true)
      prev = null
      return
    }
    const pt = [px(w), py(ld * 1e6)] as const
    if (prev) r.polyline([prev, pt], color, 2)
    r.marker(pt[0], pt[1], color, 2)
    prev = pt
  })
}

function drawLobe(r: Raster, fam: SweepFamily, color: RGB,
                  px: (w: number) => number, py: (v: number) => number): void {
  let prev: readonly [number, number] | null = null
  fam.width_nm.forEach((w, i) => {
    const f = fam.lobe_current_fraction[i]
    if (f === undefined) return
    const pt = [px(w), py(f)] as const
    if (prev) dashedSegment(r, prev, pt, color)
    r.marker(pt[0], pt[1], color, 2, true)
    prev = pt
  })
}

function dashedSegment(r: Raster, a: readonly [number, number],
                       b: readonly [number, number], color: RGB): void {
  const steps = Math.max(Math.abs(b[0] - a[0]), Math.abs(b[1] - a[1]))
  for (let s = 0; s <= steps; s++) {
    if (Math.floor(s / 4) % 2 === 1) continue
    const x = Math.round(a[0] + ((b[0] - a[0]) * s) / (steps || 1))
    const y = Math.round(a[1] + ((b[1] - a[1]) * s) / (steps || 1))
    r.set(x, y, color)
  }
}
