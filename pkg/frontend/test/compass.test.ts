import { describe, expect, it } from "vitest";

import {
  ELEVATION_MAX,
  ELEVATION_MIN,
  angleDelta,
  clampToSector,
  lightToPointer,
  pointerToLight,
  sectorWedgePath,
  withinSector,
} from "../src/compass.js";
import type { SectorArc } from "../src/types.js";

const SECTOR: SectorArc = { center: 150, halfWidth: 30 };

describe("angle helpers", () => {
  it("signed circular delta", () => {
    expect(angleDelta(160, 150)).toBe(10);
    expect(angleDelta(140, 150)).toBe(-10);
    expect(angleDelta(350, 10)).toBe(-20);
  });

  it("clamps across the wrap", () => {
    expect(clampToSector(200, SECTOR)).toBe(180);
    expect(clampToSector(90, SECTOR)).toBe(120);
    expect(clampToSector(160, SECTOR)).toBe(160);
    const wrap: SectorArc = { center: 10, halfWidth: 30 };
    expect(clampToSector(300, wrap)).toBe(340);
    expect(clampToSector(355, wrap)).toBe(355);
  });
});

describe("pointerToLight", () => {
  const C = 100;
  const R = 70;

  it("east pointer means azimuth 0, north pointer 90", () => {
    const free: SectorArc = { center: 0, halfWidth: 180 };
    expect(pointerToLight(C + 50, C, C, C, R, free).azimuth).toBeCloseTo(0, 9);
    expect(pointerToLight(C, C - 50, C, C, R, free).azimuth).toBeCloseTo(90, 9);
  });

  it("pins the azimuth at the sector boundary", () => {
    // pointer straight down = azimuth 270, far outside [120, 180]
    const light = pointerToLight(C, C + 50, C, C, R, SECTOR);
    expect(withinSector(light.azimuth, SECTOR)).toBe(true);
    expect([120, 180]).toContain(Math.round(light.azimuth));
  });

  it("never produces an out-of-arc azimuth anywhere on the disc", () => {
    for (let i = 0; i < 360; i += 7) {
      const x = C + 60 * Math.cos((i * Math.PI) / 180);
      const y = C + 60 * Math.sin((i * Math.PI) / 180);
      const light = pointerToLight(x, y, C, C, R, SECTOR);
      expect(withinSector(light.azimuth, SECTOR)).toBe(true);
    }
  });

  it("radius maps outward to grazing elevation", () => {
    const center = pointerToLight(C, C, C, C, R, SECTOR);
    expect(center.elevation).toBeCloseTo(ELEVATION_MAX, 9);
    const rim = pointerToLight(C + R, C, C, C, R, SECTOR);
    expect(rim.elevation).toBeCloseTo(ELEVATION_MIN, 9);
    const beyond = pointerToLight(C + 3 * R, C, C, C, R, SECTOR);
    expect(beyond.elevation).toBeCloseTo(ELEVATION_MIN, 9);
    const mid = pointerToLight(C + R / 2, C, C, C, R, SECTOR);
    expect(mid.elevation).toBeGreaterThan(rim.elevation);
    expect(mid.elevation).toBeLessThan(center.elevation);
  });

  it("round-trips through lightToPointer", () => {
    for (const az of [125, 150, 175]) {
      for (const el of [20, 45, 80]) {
        const p = lightToPointer(az, el, C, C, R);
        const back = pointerToLight(p.x, p.y, C, C, R, SECTOR);
        expect(back.azimuth).toBeCloseTo(az, 6);
        expect(back.elevation).toBeCloseTo(el, 6);
      }
    }
  });

  it("wedge path is a closed svg path", () => {
    const d = sectorWedgePath(100, 100, 70, SECTOR);
    expect(d.startsWith("M ")).toBe(true);
    expect(d.endsWith("Z")).toBe(true);
  });
});
