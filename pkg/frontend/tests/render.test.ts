import { describe, expect, it } from "vitest";
import { normalizePointer } from "../src/input.js";
import { DEFAULT_GEOMETRY, isGreyscale, mmToCanvas, PALETTE } from "../src/render.js";

describe("palette", () => {
  it("contains no hue-dependent colors", () => {
    for (const color of Object.values(PALETTE)) {
      expect(isGreyscale(color), `${color} is not greyscale`).toBe(true);
    }
  });
});

describe("coordinate mapping", () => {
  it("maps the screen centre to the canvas centre", () => {
    expect(mmToCanvas(0, 0, DEFAULT_GEOMETRY, 915, 515)).toEqual([457.5, 257.5]);
  });

  it("maps y up in mm to y down in pixels", () => {
    const [, topPy] = mmToCanvas(0, DEFAULT_GEOMETRY.screenHeight / 2, DEFAULT_GEOMETRY, 915, 515);
    expect(topPy).toBe(0);
    const [, bottomPy] = mmToCanvas(0, -DEFAULT_GEOMETRY.screenHeight / 2, DEFAULT_GEOMETRY, 915, 515);
    expect(bottomPy).toBe(515);
  });

  it("scales with the canvas size", () => {
    const [px] = mmToCanvas(915 / 2, 0, DEFAULT_GEOMETRY, 450, 253);
    expect(px).toBe(450);
  });
});

describe("pointer normalization", () => {
  const rect = { left: 100, top: 50, width: 800, height: 450 };

  it("maps the canvas centre to (0.5, 0.5)", () => {
    expect(normalizePointer(500, 275, rect)).toEqual([0.5, 0.5]);
  });

  it("clamps positions outside the canvas", () => {
    expect(normalizePointer(0, 0, rect)).toEqual([0, 0]);
    expect(normalizePointer(2000, 2000, rect)).toEqual([1, 1]);
  });
});
