/**
 * Scripted-session round trip against engine-rendered fixtures: the bytes
 * the panel shows after setting sigma must equal the engine's own render
 * for that sigma (fixtures produced by frontend/scripts/make_fixtures.py).
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/client.js";
import { ParamController } from "../src/controller.js";
import { UiStore } from "../src/state.js";
import type { UiParams } from "../src/types.js";
import { makeMockService } from "./mockservice.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");
const SIGMA0 = new Uint8Array(readFileSync(join(FIXTURES, "sigma0.png")));
const SIGMA1 = new Uint8Array(readFileSync(join(FIXTURES, "sigma1.png")));
const META = JSON.parse(readFileSync(join(FIXTURES, "meta.json"), "utf-8"));

const INITIAL: UiParams = { mu: 0.5, sigma: 0.5, eta: 1.0, phi: 0, kernel: 3 };

function engineBytes(params: Record<string, number | string>): Uint8Array {
  if (params.phi === -20 && params.sigma === 0) return SIGMA0;
  if (params.phi === -20 && params.sigma === 1) return SIGMA1;
  return new Uint8Array([0]);
}

describe("UI round trip", () => {
  it("shows the engine's sigma=0 and sigma=1 renders for a scripted session", async () => {
    const mock = makeMockService(META, engineBytes, META.clusters);
    const client = new ApiClient(mock.fetch);
    const store = new UiStore(INITIAL);
    const shown: Uint8Array[] = [];
    const controller = new ParamController(store, client, (_epoch, png) => shown.push(png));

    const meta = await client.getMeta();
    expect(meta.lines).toBe(META.lines);

    controller.onSliderInput("phi", -20);
    controller.flushNow();
    await new Promise((r) => setTimeout(r, 0));
    controller.onSliderInput("sigma", 0);
    controller.flushNow();
    await new Promise((r) => setTimeout(r, 0));
    controller.onSliderInput("sigma", 1);
    controller.flushNow();
    await new Promise((r) => setTimeout(r, 0));

    expect(shown).toHaveLength(3);
    expect(Buffer.from(shown[1]).equals(Buffer.from(SIGMA0))).toBe(true);
    expect(Buffer.from(shown[2]).equals(Buffer.from(SIGMA1))).toBe(true);
    // fixtures are genuinely different renders
    expect(Buffer.from(SIGMA0).equals(Buffer.from(SIGMA1))).toBe(false);
  });

  it("discards a stale render when params changed mid-flight", async () => {
    const mock = makeMockService(META, engineBytes, META.clusters);
    const client = new ApiClient(mock.fetch);
    const store = new UiStore(INITIAL);
    const shown: number[] = [];
    const controller = new ParamController(store, client, (epoch) => shown.push(epoch));

    controller.onSliderInput("sigma", 0);
    controller.flushNow();
    await new Promise((r) => setTimeout(r, 0));
    // bump the server epoch without the controller knowing
    await client.postParams({ mu: 0.2 });
    const stale = await client.fetchRender(store.epoch);
    expect(stale).toBeNull(); // 409 surfaced as null, nothing displayed
    expect(shown).toEqual([1]);
  });
});
