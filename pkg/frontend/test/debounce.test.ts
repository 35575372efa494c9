import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { debounce } from "../src/debounce.js";

describe("debounce", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("delivers the trailing value once the window closes", () => {
    const got: number[] = [];
    const d = debounce<number>((v) => got.push(v), 150);
    d(1);
    d(2);
    d(3);
    expect(got).toEqual([]);
    vi.advanceTimersByTime(150);
    expect(got).toEqual([3]);
  });

  it("caps a one-second continuous drag at <= 10 posts", () => {
    const got: number[] = [];
    const d = debounce<number>((v) => got.push(v), 150);
    for (let t = 0; t < 1000; t += 20) {
      d(t);
      vi.advanceTimersByTime(20);
    }
    expect(got.length).toBeLessThanOrEqual(10);
    expect(got.length).toBeGreaterThanOrEqual(5); // still responsive mid-drag
    vi.advanceTimersByTime(200);
    expect(got[got.length - 1]).toBe(980); // final value always lands
  });

  it("fires nothing after cancel", () => {
    const got: number[] = [];
    const d = debounce<number>((v) => got.push(v), 150);
    d(1);
    d.cancel();
    vi.advanceTimersByTime(500);
    expect(got).toEqual([]);
  });

  it("flush forces the pending value immediately", () => {
    const got: number[] = [];
    const d = debounce<number>((v) => got.push(v), 150);
    d(7);
    d.flush();
    expect(got).toEqual([7]);
    vi.advanceTimersByTime(500);
    expect(got).toEqual([7]);
  });
});
