/**
 * Binds slider and light-widget input streams to the service: debounced
 * parameter posts, epoch-gated image swaps, snap-back on rejections, and
 * retrying with backoff while the connection is down.
 */

import { ApiClient, ApiError } from "./client.js";
import { clampToSector, withinSector } from "./compass.js";
import { debounce, Debounced } from "./debounce.js";
import { UiStore } from "./state.js";
import type { SectorArc, UiParams } from "./types.js";

export const DEBOUNCE_MS = 150;
const BACKOFF_BASE_MS = 500;
const BACKOFF_MAX_MS = 8000;

export interface ImageSink {
  /** Called with PNG bytes acknowledged for the given epoch. */
  (epoch: number, png: Uint8Array): void;
}

export class ParamController {
  private readonly flusher: Debounced<void>;
  private dirty = new Set<keyof UiParams>();
  private retryTimer: ReturnType<typeof setTimeout> | undefined;
  private backoff = BACKOFF_BASE_MS;
  /** Total POST /params requests issued (drives the debounce-cap test). */
  postCount = 0;

  constructor(
    readonly store: UiStore,
    private readonly client: ApiClient,
    private readonly imageSink: ImageSink | null = null,
    debounceMs: number = DEBOUNCE_MS,
  ) {
    this.flusher = debounce(() => void this.flush(), debounceMs);
  }

  /** Slider edit: record the pending value and schedule a debounced post. */
  onSliderInput(key: keyof UiParams, value: number): void {
    this.store.setPending(key, value);
    this.dirty.add(key);
    this.flusher(undefined);
  }

  /** Force out the pending delta immediately (e.g. on slider release). */
  flushNow(): void {
    this.flusher.flush();
  }

  private async flush(): Promise<void> {
    if (this.dirty.size === 0) return;
    const keys = [...this.dirty];
    this.dirty.clear();
    const delta: Partial<UiParams> = {};
    for (const k of keys) delta[k] = this.store.displayValue(k);
    this.postCount += 1;
    try {
      const epoch = await this.client.postParams(delta);
      this.store.acknowledge(delta, epoch);
      this.store.setConnection("ok");
      this.backoff = BACKOFF_BASE_MS;
      await this.refreshImage(epoch);
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) {
        // Out-of-range edit: restore the last valid value.
        this.store.reject(keys);
        this.store.setConnection("ok");
      } else {
        // Network trouble: keep edits pending, retry with backoff.
        for (const k of keys) this.dirty.add(k);
        this.store.setConnection("error");
        this.scheduleRetry();
      }
    }
  }

  private scheduleRetry(): void {
    if (this.retryTimer !== undefined) return;
    this.retryTimer = setTimeout(() => {
      this.retryTimer = undefined;
      void this.flush();
    }, this.backoff);
    this.backoff = Math.min(this.backoff * 2, BACKOFF_MAX_MS);
  }

  private async refreshImage(epoch: number): Promise<void> {
    try {
      const png = await this.client.fetchRender(epoch);
      if (png !== null && this.store.epoch === epoch) {
        this.store.imageEpoch = epoch;
        if (this.imageSink) this.imageSink(epoch, png);
      }
    } catch {
      this.store.setConnection("error");
    }
  }
}

export class LightController {
  constructor(
    readonly store: UiStore,
    private readonly client: ApiClient,
    private readonly paramController: ParamController | null = null,
  ) {}

  /**
   * Pointer release on a cluster's compass: post the sector-clamped light.
   * The clamp guarantees the request can never leave the permitted arc.
   */
  async release(
    cluster: number,
    azimuth: number,
    elevation: number,
    sector: SectorArc,
  ): Promise<boolean> {
    const safe = clampToSector(azimuth, sector);
    if (!withinSector(safe, sector)) return false; // defensive; clamp guarantees this
    try {
      const epoch = await this.client.postLight({
        cluster,
        azimuth: safe,
        elevation,
        center: sector.center,
        sector: sector.halfWidth,
      });
      this.store.epoch = epoch;
      this.store.setLight(cluster, { azimuth: safe, elevation, sector });
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) {
        // Snap back: acknowledged state already holds the last valid light.
        this.store.setConnection("ok");
        return false;
      }
      this.store.setConnection("error");
      return false;
    }
  }
}
