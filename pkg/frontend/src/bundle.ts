/**
 * Loaders for the simulation bundle consumed by the figure renderers.
 *
 * A bundle directory holds one subdirectory per propagation run, each with
 * the run's `summary.json` and `radial_map.csv`, plus a sweep directory
 * with `sweep_summary.json`.  Everything is read from disk — the renderer
 * has no other coupling to the simulation code.
 */
import { readFileSync } from "node:fs"
import { join } from "node:path"

import Papa from "papaparse"
import { z } from "zod"

// ---------------------------------------------------------------------------
// run summary (the subset the figures use)
// ---------------------------------------------------------------------------

const runSummarySchema = z.object({
  schema_version: z.string(),
  profile: z.string(),
  seed: z.number(),
  scenario: z.object({
    name: z.string(),
    kind: z.string(),
    physics: z.object({
      voltage: z.number(),
      current: z.number(),
      noise_ratio: z.number().optional(),
    }),
  }),
  resolved: z.object({
    width_target_nm: z.number().nullish(),
    z_unit_m: z.number(),
  }),
  results: z.object({
    L_d_m: z.number().nullable(),
    final_z_m: z.number(),
    initial_width_nm: z.number().optional(),
    nd_range_censored: z.boolean().optional(),
    lobe_fraction_launch: z.number().optional(),
  }),
})

export type RunSummary = z.infer<typeof runSummarySchema>

// ---------------------------------------------------------------------------
// sweep summary
// ---------------------------------------------------------------------------

const familySchema = z.object({
  width_nm: z.array(z.number()),
  L_d_m: z.array(z.number().nullable()),
  lobe_current_fraction: z.array(z.number()),
  kT_a0: z.array(z.number().nullable()),
})

const sweepSummarySchema = z.object({
  schema_version: z.string(),
  profile: z.string(),
  scenario: z.object({
    name: z.string(),
    physics: z.object({ voltage: z.number(), current: z.number() }),
  }),
  results: z.object({
    families: z.record(z.string(), familySchema),
    maximal_width_nm: z.number(),
    critical_width_nm: z.number().nullable(),
    merge_excess_fraction: z.number(),
    peak_range_ratio: z.number().nullable(),
    bessel_turn_width_nm: z.number().nullable(),
    failures: z.array(z.object({}).passthrough()),
  }),
})

export type SweepSummary = z.infer<typeof sweepSummarySchema>
export type SweepFamily = z.infer<typeof familySchema>

// ---------------------------------------------------------------------------
// radial map (z-by-radius density matrix)
// ---------------------------------------------------------------------------

export interface RadialMap {
  /** propagation distances, m (one per row) */
  z: Float64Array
  /** sample radii, m (one per column) */
  radii: Float64Array
  /** density rows, row-major [z][radius], each row's own units */
  density: Float64Array[]
}

export function parseRadialMapCsv(text: string): RadialMap {
  const parsed = Papa.parse<string[]>(text.trim(), {
    delimiter: ",",
    skipEmptyLines: true,
  })
  if (parsed.errors.length > 0) {
    throw new Error(`radial map parse failed: ${parsed.errors[0]!.message}`)
  }
  const rows = parsed.data
  const header = rows[0]
  if (!header || header[0] !== "z_m" || header.length < 2) {
    throw new Error("radial map must start with a z_m,<radii...> header")
  }
  const radii = Float64Array.from(header.slice(1), Number)
  const z = new Float64Array(rows.length - 1)
  const density: Float64Array[] = []
  for (let i = 1; i < rows.length; i++) {
    const row = rows[i]!
    if (row.length !== header.length) {
      throw new Error(
        `radial map row ${i} has ${row.length} fields, expected ${header.length}`,
      )
    }
    z[i - 1] = Number(row[0])
    density.push(Float64Array.from(row.slice(1), Number))
  }
  if (density.some((r) => r.some((v) => !Number.isFinite(v)))) {
    throw new Error("radial map contains non-finite densities")
  }
  return { z, radii, density }
}

// ---------------------------------------------------------------------------
// bundle assembly
// ---------------------------------------------------------------------------

export interface RunData {
  summary: RunSummary
  map: RadialMap
}

export function loadRun(dir: string): RunData {
  const summary = runSummarySchema.parse(
    JSON.parse(readFileSync(join(dir, "summary.json"), "utf8")),
  )
  const map = parseRadialMapCsv(readFileSync(join(dir, "radial_map.csv"), "utf8"))
  if (map.z.length === 0) {
    throw new Error(`${dir}: radial map has no snapshots`)
  }
  return { summary, map }
}

export function loadSweep(dir: string): SweepSummary {
  return sweepSummarySchema.parse(
    JSON.parse(readFileSync(join(dir, "sweep_summary.json"), "utf8")),
  )
}

/** The six survival-map runs, in panel order. */
export const SURVIVAL_RUNS = [
  "fig3a",
  "fig3b",
  "fig3c",
  "fig3d",
  "fig3e",
  "fig3f",
] as const

export interface Bundle {
  runs: RunData[]
  sweep: SweepSummary
}

export function loadBundle(root: string): Bundle {
  return {
    runs: SURVIVAL_RUNS.map((name) => loadRun(join(root, name))),
    sweep: loadSweep(join(root, "fig4")),
  }
}
