/**
 * Client-side decoding of run-length-encoded masks.
 *
 * Counts alternate zero-run / one-run over the row-major pixel scan and
 * always begin with the zero-run (possibly 0), so run parity alone fixes
 * the value of every run.
 */

export function decodeCounts(counts: number[], width: number, height: number): Uint8Array {
  const total = width * height;
  let sum = 0;
  for (const run of counts) {
    if (!Number.isInteger(run) || run < 0) {
      throw new Error(`bad run length: ${run}`);
    }
    sum += run;
  }
  if (sum !== total) {
    throw new Error(`counts cover ${sum} pixels, grid has ${total}`);
  }
  const flags = new Uint8Array(total);
  let at = 0;
  let inside = false;
  for (const run of counts) {
    if (inside) {
      flags.fill(1, at, at + run);
    }
    at += run;
    inside = !inside;
  }
  return flags;
}

export interface MaskColor {
  r: number;
  g: number;
  b: number;
  a: number;
}

/**
 * Paint the set pixels of a decoded mask into an RGBA byte buffer.
 *
 * Pass the same buffer for several masks to compose them; unset pixels
 * are left untouched, so disjoint masks never fight over a byte.
 */
export function maskToRgba(
  flags: Uint8Array,
  color: MaskColor,
  out?: Uint8ClampedArray,
): Uint8ClampedArray {
  const rgba = out ?? new Uint8ClampedArray(flags.length * 4);
  if (rgba.length !== flags.length * 4) {
    throw new Error(`buffer holds ${rgba.length / 4} pixels, mask has ${flags.length}`);
  }
  for (let i = 0; i < flags.length; i++) {
    if (!flags[i]) {
      continue;
    }
    const o = i * 4;
    rgba[o] = color.r;
    rgba[o + 1] = color.g;
    rgba[o + 2] = color.b;
    rgba[o + 3] = color.a;
  }
  return rgba;
}
