/**
 * Pure geometry for the per-cluster light widget: a draggable point on a
 * compass disc. Pointer angle maps to azimuth (engine convention: 0 = east,
 * counterclockwise, north = screen up), clamped into the cluster's sector
 * arc; pointer radius maps to elevation, grazing at the rim.
 */

import type { SectorArc } from "./types.js";

export const ELEVATION_MAX = 85;
export const ELEVATION_MIN = 15;

export function normalizeAngle(deg: number): number {
  return ((deg % 360) + 360) % 360;
}

/** Signed circular distance from `center` to `deg`, in (-180, 180]. */
export function angleDelta(deg: number, center: number): number {
  const d = normalizeAngle(deg - center + 180) - 180;
  return d === -180 ? 180 : d;
}

export function clampToSector(azimuth: number, sector: SectorArc): number {
  const d = angleDelta(azimuth, sector.center);
  const clamped = Math.max(-sector.halfWidth, Math.min(sector.halfWidth, d));
  return normalizeAngle(sector.center + clamped);
}

export function withinSector(azimuth: number, sector: SectorArc): boolean {
  return Math.abs(angleDelta(azimuth, sector.center)) <= sector.halfWidth + 1e-9;
}

/** Pointer position (screen coords, y down) to a sector-clamped light. */
export function pointerToLight(
  x: number,
  y: number,
  cx: number,
  cy: number,
  radius: number,
  sector: SectorArc,
): { azimuth: number; elevation: number } {
  const dx = x - cx;
  const dy = y - cy;
  const raw = (Math.atan2(-dy, dx) * 180) / Math.PI;
  const azimuth = clampToSector(normalizeAngle(raw), sector);
  const dist = Math.min(Math.hypot(dx, dy) / radius, 1);
  const elevation = ELEVATION_MAX - dist * (ELEVATION_MAX - ELEVATION_MIN);
  return { azimuth, elevation };
}

/** Inverse mapping used to draw the widget at its acknowledged state. */
export function lightToPointer(
  azimuth: number,
  elevation: number,
  cx: number,
  cy: number,
  radius: number,
): { x: number; y: number } {
  const bounded = Math.max(ELEVATION_MIN, Math.min(ELEVATION_MAX, elevation));
  const dist = ((ELEVATION_MAX - bounded) / (ELEVATION_MAX - ELEVATION_MIN)) * radius;
  const rad = (azimuth * Math.PI) / 180;
  return { x: cx + dist * Math.cos(rad), y: cy - dist * Math.sin(rad) };
}

/** SVG path of the permissible-arc wedge, for drawing the shaded sector. */
export function sectorWedgePath(cx: number, cy: number, radius: number, sector: SectorArc): string {
  const a0 = ((sector.center - sector.halfWidth) * Math.PI) / 180;
  const a1 = ((sector.center + sector.halfWidth) * Math.PI) / 180;
  const x0 = cx + radius * Math.cos(a0);
  const y0 = cy - radius * Math.sin(a0);
  const x1 = cx + radius * Math.cos(a1);
  const y1 = cy - radius * Math.sin(a1);
  const large = sector.halfWidth > 90 ? 1 : 0;
  if (sector.halfWidth >= 180) {
    return `M ${cx - radius} ${cy} A ${radius} ${radius} 0 1 0 ${cx + radius} ${cy} A ${radius} ${radius} 0 1 0 ${cx - radius} ${cy}`;
  }
  // sweep flag 0: CCW in math orientation (y flipped in screen space)
  return `M ${cx} ${cy} L ${x0} ${y0} A ${radius} ${radius} 0 ${large} 0 ${x1} ${y1} Z`;
}
