/**
 * Thin HTTP wrapper over the engine service. The fetch implementation is
 * injected so tests can run against a scripted transport; network failures
 * surface as thrown errors and are retried by the controller with backoff.
 */

import type { Meta } from "./types.js";

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  arrayBuffer(): Promise<ArrayBuffer>;
}>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: { field?: string; error?: string },
  ) {
    super(body.error ?? `HTTP ${status}`);
  }
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike,
    private readonly base = "",
  ) {}

  async getMeta(): Promise<Meta> {
    const res = await this.fetchFn(`${this.base}/meta`);
    if (!res.ok) throw new ApiError(res.status, (await res.json()) as { error?: string });
    return (await res.json()) as Meta;
  }

  /** Post a parameter delta; resolves to the new render epoch. */
  async postParams(delta: Record<string, number | string>): Promise<number> {
    const res = await this.fetchFn(`${this.base}/params`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(delta),
    });
    const body = (await res.json()) as { epoch?: number; field?: string; error?: string };
    if (!res.ok) throw new ApiError(res.status, body);
    return body.epoch as number;
  }

  async postLight(body: {
    cluster: number;
    azimuth: number;
    elevation?: number;
    center?: number;
    sector?: number;
  }): Promise<number> {
    const res = await this.fetchFn(`${this.base}/light`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    const payload = (await res.json()) as { epoch?: number; field?: string; error?: string };
    if (!res.ok) throw new ApiError(res.status, payload);
    return payload.epoch as number;
  }

  /** Fetch the rendered PNG for an epoch; a 409 means the epoch went stale. */
  async fetchRender(epoch: number): Promise<Uint8Array | null> {
    const res = await this.fetchFn(`${this.base}/render.png?epoch=${epoch}`);
    if (res.status === 409) return null;
    if (!res.ok) throw new ApiError(res.status, (await res.json()) as { error?: string });
    return new Uint8Array(await res.arrayBuffer());
  }
}
