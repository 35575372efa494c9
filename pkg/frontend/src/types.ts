/** Shared types mirroring the engine's HTTP contract. */

export interface UiParams {
  mu: number;
  sigma: number;
  eta: number;
  phi: number;
  kernel: number;
}

export interface SectorArc {
  /** Azimuth of the sector center, degrees, engine convention (0 = east, CCW, north up). */
  center: number;
  /** Half width of the permissible arc, degrees. */
  halfWidth: number;
}

export interface ClusterLightState {
  azimuth: number;
  elevation: number;
  sector: SectorArc;
}

export interface Meta {
  grid: [number, number];
  lines: number;
  clusters: number[];
  outlierness_histogram: number[];
  epoch: number;
  params: Record<string, number | string>;
}

export type ConnectionStatus = "connecting" | "ok" | "error";

export const PARAM_KEYS: (keyof UiParams)[] = ["mu", "sigma", "eta", "phi", "kernel"];

export const PARAM_RANGES: Record<keyof UiParams, [number, number]> = {
  mu: [0, 1],
  sigma: [0, 1],
  eta: [0.1, 10],
  phi: [-40, 0],
  kernel: [1, 9],
};
