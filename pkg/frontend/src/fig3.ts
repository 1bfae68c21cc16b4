/**
 * Six-panel survival map: each panel is the azimuthally averaged density of
 * one run as a function of propagation distance (horizontal, um) and signed
 * radius (vertical, nm, mirrored about the axis).  Intensity is per-panel
 * sqrt-normalized; a dashed line marks the measured non-diffracting range.
 */
import { scaleLinear } from "d3-scale"

import type { RunData } from "./bundle.js"
import { CHAR_H, Raster, type RGB, colorize, drawText, textWidth } from "./raster.js"

const PANEL_W = 372
const PANEL_H = 282
const PLOT_X = 56
const PLOT_Y = 26
const PLOT_W = 300
const PLOT_H = 204
const COLS = 3

const FRAME: RGB = [70, 70, 70]
const INK: RGB = [20, 20, 20]
const GUIDE: RGB = [255, 255, 255]

const LETTERS = ["A", "B", "C", "D", "E", "F"]

/** Largest radius index holding any signal above `frac` of the panel peak. */
function cropIndex(density: Float64Array[], frac: number): number {
  let vmax = 0
  for (const row of density) for (const v of row) vmax = Math.max(vmax, v)
  const cut = frac * vmax
  let idx = 8
  for (const row of density) {
    for (let i = row.length - 1; i > idx; i--) {
      if (row[i]! >= cut) {
        idx = i
        break
      }
    }
  }
  return Math.min(density[0]!.length - 1, Math.ceil(idx * 1.25))
}

function fmt(v: number, digits = 1): string {
  const s = v.toFixed(digits)
  return s.endsWith(".0") ? s.slice(0, -2) : s
}

function drawPanel(r: Raster, px: number, py: number, run: RunData, letter: string,
                   bottomRow: boolean, leftCol: boolean): void {
  const { summary, map } = run
  const nz = map.z.length
  const iCut = cropIndex(map.density, 1e-3)
  const rMax = map.radii[iCut]!

  let vmax = 0
  for (const row of map.density) {
    for (let i = 0; i <= iCut; i++) vmax = Math.max(vmax, row[i]!)
  }
  if (vmax <= 0) vmax = 1

  const x0 = px + PLOT_X
  const y0 = py + PLOT_Y
  const zMin = map.z[0]!
  const zMax = map.z[nz - 1]!
  const cy = y0 + (PLOT_H - 1) / 2

  for (let yy = 0; yy < PLOT_H; yy++) {
    const rho = (Math.abs(yy - (PLOT_H - 1) / 2) / ((PLOT_H - 1) / 2)) * rMax
    let ri = Math.round((rho / rMax) * iCut)
    if (ri > iCut) ri = iCut
    for (let xx = 0; xx < PLOT_W; xx++) {
      const zi = Math.min(nz - 1, Math.round((xx / (PLOT_W - 1)) * (nz - 1)))
      const v = map.density[zi]![ri]! / vmax
      r.set(x0 + xx, y0 + yy, colorize(Math.sqrt(Math.max(0, v))))
    }
  }

  // frame
  r.hline(x0 - 1, x0 + PLOT_W, y0 - 1, FRAME)
  r.hline(x0 - 1, x0 + PLOT_W, y0 + PLOT_H, FRAME)
  r.vline(x0 - 1, y0 - 1, y0 + PLOT_H, FRAME)
  r.vline(x0 + PLOT_W, y0 - 1, y0 + PLOT_H, FRAME)

  // non-diffracting range marker
  const ld = summary.results.L_d_m
  if (ld !== null && ld > zMin && ld < zMax) {
    const lx = x0 + Math.round(((ld - zMin) / (zMax - zMin)) * (PLOT_W - 1))
    r.vline(lx, y0, y0 + PLOT_H - 1, GUIDE, 4)
    const tag = `LD=${fmt(ld * 1e6, 0)}UM`
    drawText(r, Math.min(lx + 4, x0 + PLOT_W - textWidth(tag) - 2), y0 + 3, tag, GUIDE)
  } else if (summary.results.nd_range_censored) {
    const tag = `LD>${fmt(zMax * 1e6, 0)}UM`
    drawText(r, x0 + PLOT_W - textWidth(tag) - 3, y0 + 3, tag, GUIDE)
  }

  // x ticks (um)
  const zScale = scaleLinear().domain([zMin * 1e6, zMax * 1e6]).range([0, PLOT_W - 1])
  for (const t of zScale.ticks(4)) {
    const tx = x0 + Math.round(zScale(t))
    r.vline(tx, y0 + PLOT_H, y0 + PLOT_H + 3, FRAME)
    const lbl = fmt(t, 0)
    drawText(r, tx - Math.floor(textWidth(lbl) / 2), y0 + PLOT_H + 6, lbl, INK)
  }
  if (bottomRow) {
    const title = "Z (UM)"
    drawText(r, x0 + Math.floor((PLOT_W - textWidth(title)) / 2),
             y0 + PLOT_H + 8 + CHAR_H, title, INK)
  }

  // y ticks (nm), mirrored
  const rScale = scaleLinear().domain([0, rMax * 1e9]).range([0, (PLOT_H - 1) / 2])
  for (const t of rScale.ticks(3)) {
    for (const sign of t === 0 ? [1] : [1, -1]) {
      const ty = Math.round(cy - sign * rScale(t))
      r.hline(x0 - 4, x0 - 1, ty, FRAME)
      const lbl = (sign < 0 ? "-" : "") + fmt(t, 0)
      drawText(r, x0 - 6 - textWidth(lbl), ty - 3, lbl, INK)
    }
  }
  if (leftCol) drawText(r, px + 2, py + 6, "R (NM)", INK)

  // panel title: letter, family, launch width
  let title = `(${letter}) ${summary.scenario.kind}`
  const w0 = summary.results.initial_width_nm
  if (w0 !== undefined) title += ` W0=${fmt(w0)}NM`
  const noise = summary.scenario.physics.noise_ratio
  if (noise !== undefined && noise > 0) title += ` +${fmt(noise * 100, 0)}% NOISE`
  drawText(r, x0, py + 6, title.slice(0, Math.floor(PLOT_W / 6)), INK)
}

export function renderFig3(runs: RunData[]): Raster {
  if (runs.length !== 6) throw new Error(`survival map needs 6 runs, got ${runs.length}`)
  const rows = Math.ceil(runs.length / COLS)
  const r = new Raster(COLS * PANEL_W + 8, rows * PANEL_H + 30)
  drawText(r, 10, 8, "SURVIVAL MAP: AZIMUTHAL DENSITY VS PROPAGATION DISTANCE", INK)
  runs.forEach((run, i) => {
    const col = i % COLS
    const row = Math.floor(i / COLS)
    drawPanel(r, 4 + col * PANEL_W, 26 + row * PANEL_H, run, LETTERS[i]!,
              row === rows - 1, col === 0)
  })
  return r
}
