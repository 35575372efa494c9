/**
 * Mirror of the server-side render state. A displayed value is always either
 * the last acknowledged server state or a visibly pending local edit; stale
 * image responses are discarded by epoch.
 */

import type { ClusterLightState, ConnectionStatus, UiParams } from "./types.js";

export type Listener = () => void;

export class UiStore {
  acknowledged: UiParams;
  pending: Partial<UiParams> = {};
  epoch = 0;
  /** Epoch whose PNG the image panel currently shows. */
  imageEpoch: number | null = null;
  imageUrl: string | null = null;
  connection: ConnectionStatus = "connecting";
  lights = new Map<number, ClusterLightState>();
  private listeners: Listener[] = [];

  constructor(initial: UiParams) {
    this.acknowledged = { ...initial };
  }

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  /** Value a control should display right now. */
  displayValue(key: keyof UiParams): number {
    const pending = this.pending[key];
    return pending === undefined ? this.acknowledged[key] : pending;
  }

  isPending(key: keyof UiParams): boolean {
    return this.pending[key] !== undefined;
  }

  setPending(key: keyof UiParams, value: number): void {
    this.pending[key] = value;
    this.emit();
  }

  /** Server accepted a delta: fold it into the acknowledged state. */
  acknowledge(delta: Partial<UiParams>, epoch: number): void {
    for (const [k, v] of Object.entries(delta) as [keyof UiParams, number][]) {
      this.acknowledged[k] = v;
      if (this.pending[k] === v) delete this.pending[k];
    }
    this.epoch = epoch;
    this.emit();
  }

  /** Server rejected a delta: drop the pending edits so controls snap back. */
  reject(keys: (keyof UiParams)[]): void {
    for (const k of keys) delete this.pending[k];
    this.emit();
  }

  setConnection(status: ConnectionStatus): void {
    if (this.connection !== status) {
      this.connection = status;
      this.emit();
    }
  }

  /** Swap the image panel only for a fresh epoch; stale responses are ignored. */
  showImage(epoch: number, url: string): boolean {
    if (epoch !== this.epoch) return false;
    this.imageEpoch = epoch;
    this.imageUrl = url;
    this.emit();
    return true;
  }

  setLight(cluster: number, state: ClusterLightState): void {
    this.lights.set(cluster, state);
    this.emit();
  }
}
