import { describe, expect, it } from "vitest";

import { decodeCounts, maskToRgba } from "../src/rle.js";
import { boxRuns } from "./mockservice.js";

function fillBox(width: number, height: number, box: [number, number, number, number]): Uint8Array {
  const flags = new Uint8Array(width * height);
  for (let y = box[1]; y < box[3]; y++) {
    for (let x = box[0]; x < box[2]; x++) {
      flags[y * width + x] = 1;
    }
  }
  return flags;
}

describe("decodeCounts", () => {
  it("decodes the all-empty and all-full grids", () => {
    expect(Array.from(decodeCounts([6], 3, 2))).toEqual([0, 0, 0, 0, 0, 0]);
    expect(Array.from(decodeCounts([0, 6], 3, 2))).toEqual([1, 1, 1, 1, 1, 1]);
  });

  it("walks the scan in row-major order", () => {
    // pixels 2 and 3 of a 3-wide grid are (2, 0) and (0, 1)
    expect(Array.from(decodeCounts([2, 2, 2], 3, 2))).toEqual([0, 0, 1, 1, 0, 0]);
  });

  it("places a single center pixel", () => {
    expect(Array.from(decodeCounts([4, 1, 4], 3, 3))).toEqual([0, 0, 0, 0, 1, 0, 0, 0, 0]);
  });

  it("rejects counts that do not cover the grid", () => {
    expect(() => decodeCounts([5], 3, 2)).toThrow(/counts cover 5 pixels/);
    expect(() => decodeCounts([4, 3], 3, 2)).toThrow(/grid has 6/);
  });

  it("rejects negative and fractional runs", () => {
    expect(() => decodeCounts([-1, 7], 3, 2)).toThrow(/bad run length/);
    expect(() => decodeCounts([0.5, 5.5], 3, 2)).toThrow(/bad run length/);
  });
});

describe("boxRuns", () => {
  const cases: Array<[number, number, [number, number, number, number]]> = [
    [8, 5, [0, 0, 8, 5]],
    [8, 5, [3, 2, 4, 3]],
    [8, 5, [2, 1, 7, 4]],
    [640, 480, [200, 80, 420, 360]],
  ];

  it.each(cases)("matches a direct fill on %ix%i box %j", (width, height, box) => {
    const decoded = decodeCounts(boxRuns(width, height, box), width, height);
    expect(decoded).toEqual(fillBox(width, height, box));
  });

  it("leads with the zero-run the service emits", () => {
    // 80 full rows plus 200 pixels before the box corner
    expect(boxRuns(640, 480, [200, 80, 420, 360])[0]).toBe(51400);
  });
});

describe("maskToRgba", () => {
  it("writes color bytes only under set pixels", () => {
    const flags = Uint8Array.from([0, 1, 1, 0]);
    const rgba = maskToRgba(flags, { r: 10, g: 20, b: 30, a: 40 });
    expect(Array.from(rgba.slice(0, 4))).toEqual([0, 0, 0, 0]);
    expect(Array.from(rgba.slice(4, 8))).toEqual([10, 20, 30, 40]);
    expect(Array.from(rgba.slice(8, 12))).toEqual([10, 20, 30, 40]);
    expect(Array.from(rgba.slice(12))).toEqual([0, 0, 0, 0]);
  });

  it("composes disjoint masks into a shared buffer", () => {
    const buffer = new Uint8ClampedArray(4 * 4);
    maskToRgba(Uint8Array.from([1, 0, 0, 0]), { r: 1, g: 1, b: 1, a: 255 }, buffer);
    maskToRgba(Uint8Array.from([0, 0, 1, 0]), { r: 2, g: 2, b: 2, a: 255 }, buffer);
    expect(Array.from(buffer)).toEqual([1, 1, 1, 255, 0, 0, 0, 0, 2, 2, 2, 255, 0, 0, 0, 0]);
  });

  it("rejects a buffer sized for a different mask", () => {
    expect(() =>
      maskToRgba(Uint8Array.from([1, 0]), { r: 0, g: 0, b: 0, a: 0 }, new Uint8ClampedArray(4)),
    ).toThrow(/buffer holds 1 pixels/);
  });
});
