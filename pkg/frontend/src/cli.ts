#!/usr/bin/env node
/**
 * Render the survival-map and width-sweep figures from a simulation bundle.
 *
 *   node dist/cli.js --bundle data/sample --out out
 */
import { mkdirSync } from "node:fs"
import { join } from "node:path"
import { parseArgs } from "node:util"

import { loadBundle } from "./bundle.js"
import { renderFig3 } from "./fig3.js"
import { renderFig4 } from "./fig4.js"
import { writePng } from "./png.js"

function main(): void {
  const { values } = parseArgs({
    options: {
      bundle: { type: "string" },
      out: { type: "string" },
      only: { type: "string" },
    },
  })
  if (!values.bundle || !values.out) {
    console.error("usage: cli --bundle <dir> --out <dir> [--only fig3|fig4]")
    process.exitCode = 2
    return
  }
  const only = values.only
  if (only !== undefined && only !== "fig3" && only !== "fig4") {
    console.error(`unknown figure ${JSON.stringify(only)}`)
    process.exitCode = 2
    return
  }

  const bundle = loadBundle(values.bundle)
  mkdirSync(values.out, { recursive: true })

  if (only === undefined || only === "fig3") {
    const path = join(values.out, "fig3.png")
    writePng(path, renderFig3(bundle.runs))
    console.log(path)
  }
  if (only === undefined || only === "fig4") {
    const path = join(values.out, "fig4.png")
    writePng(path, renderFig4(bundle.sweep))
    console.log(path)
  }
}

main()
