import { PNG } from "pngjs"
import { writeFileSync } from "node:fs"
import type { Raster } from "./raster.js"

/**
 * Encode a raster as PNG bytes. Fixed filter/compression settings keep the
 * byte stream identical for identical pixels, which the determinism check
 * relies on.
 */
export function encodePng(r: Raster): Buffer {
  const png = new PNG({
    width: r.width,
    height: r.height,
    colorType: 6,
    deflateLevel: 9,
    deflateStrategy: 0,
    filterType: 0,
  })
  png.data.set(r.data)
  return PNG.sync.write(png, { deflateLevel: 9, deflateStrategy: 0, filterType: 0 })
}

export function writePng(path: string, r: Raster): void {
  writeFileSync(path, encodePng(r))
}
