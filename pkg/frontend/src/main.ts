/** DOM wiring: sliders, live image panel, status banner, light widgets. */

import { ApiClient } from "./client.js";
import { lightToPointer, pointerToLight, sectorWedgePath } from "./compass.js";
import { LightController, ParamController } from "./controller.js";
import { UiStore } from "./state.js";
import type { Meta, SectorArc, UiParams } from "./types.js";
import { PARAM_KEYS, PARAM_RANGES } from "./types.js";

const COMPASS_SIZE = 160;
const COMPASS_RADIUS = 70;

const SLIDER_STEP: Record<keyof UiParams, number> = {
  mu: 0.01,
  sigma: 0.01,
  eta: 0.1,
  phi: 0.5,
  kernel: 2,
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  parent?: Element,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  parent?.appendChild(node);
  return node;
}

async function boot(): Promise<void> {
  const root = document.getElementById("app")!;
  const client = new ApiClient((url, init) => fetch(url, init), "..");
  let meta: Meta;
  try {
    meta = await client.getMeta();
  } catch {
    root.textContent = "engine unreachable - start the service and reload";
    return;
  }

  const initial: UiParams = {
    mu: Number(meta.params.mu),
    sigma: Number(meta.params.sigma),
    eta: Number(meta.params.eta),
    phi: Number(meta.params.phi),
    kernel: Number(meta.params.kernel),
  };
  const store = new UiStore(initial);
  store.epoch = meta.epoch;

  const banner = el("div", { class: "banner" }, root);
  const layout = el("div", { class: "layout" }, root);
  const panel = el("div", { class: "panel" }, layout);
  const image = el("img", { class: "plot", alt: "illuminated density plot" }, panel);
  image.src = `../render.png?epoch=${meta.epoch}`;
  const controls = el("div", { class: "controls" }, layout);

  let lastUrl: string | null = null;
  const controller = new ParamController(store, client, (epoch, png) => {
    const copy = new Uint8Array(png).buffer as ArrayBuffer;
    const url = URL.createObjectURL(new Blob([copy], { type: "image/png" }));
    if (lastUrl) URL.revokeObjectURL(lastUrl);
    lastUrl = url;
    store.showImage(epoch, url);
  });

  const sliders = new Map<keyof UiParams, [HTMLInputElement, HTMLElement]>();
  for (const key of PARAM_KEYS) {
    const row = el("label", { class: "row" }, controls);
    el("span", { class: "name" }, row).textContent = key;
    const input = el("input", { type: "range" }, row);
    const [lo, hi] = PARAM_RANGES[key];
    input.min = String(lo);
    input.max = String(hi);
    input.step = String(SLIDER_STEP[key]);
    input.value = String(initial[key]);
    const value = el("span", { class: "value" }, row);
    value.textContent = String(initial[key]);
    input.addEventListener("input", () => controller.onSliderInput(key, Number(input.value)));
    input.addEventListener("change", () => controller.flushNow());
    sliders.set(key, [input, value]);
  }

  const lightBox = el("div", { class: "lights" }, controls);
  const lightController = new LightController(store, client, controller);
  for (const cluster of meta.clusters) {
    buildCompass(lightBox, cluster, store, lightController, () => image);
  }

  store.subscribe(() => {
    banner.textContent = store.connection === "error" ? "connection lost - retrying" : "";
    banner.className = `banner ${store.connection}`;
    for (const [key, [input, value]] of sliders) {
      const shown = store.displayValue(key);
      if (document.activeElement !== input) input.value = String(shown);
      value.textContent = `${shown}${store.isPending(key) ? " *" : ""}`;
    }
    if (store.imageUrl) image.src = store.imageUrl;
  });
}

function buildCompass(
  parent: Element,
  cluster: number,
  store: UiStore,
  lights: LightController,
  getImage: () => HTMLImageElement,
): void {
  const sector: SectorArc = { center: 135, halfWidth: 60 };
  const box = el("div", { class: "compass" }, parent);
  el("div", {}, box).textContent = `cluster ${cluster} light`;
  const svgNs = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNs, "svg");
  svg.setAttribute("width", String(COMPASS_SIZE));
  svg.setAttribute("height", String(COMPASS_SIZE));
  box.appendChild(svg);
  const c = COMPASS_SIZE / 2;

  const disc = document.createElementNS(svgNs, "circle");
  disc.setAttribute("cx", String(c));
  disc.setAttribute("cy", String(c));
  disc.setAttribute("r", String(COMPASS_RADIUS));
  disc.setAttribute("class", "disc");
  svg.appendChild(disc);

  const wedge = document.createElementNS(svgNs, "path");
  wedge.setAttribute("d", sectorWedgePath(c, c, COMPASS_RADIUS, sector));
  wedge.setAttribute("class", "wedge");
  svg.appendChild(wedge);

  const knob = document.createElementNS(svgNs, "circle");
  knob.setAttribute("r", "6");
  knob.setAttribute("class", "knob");
  svg.appendChild(knob);

  const draw = (azimuth: number, elevation: number) => {
    const p = lightToPointer(azimuth, elevation, c, c, COMPASS_RADIUS);
    knob.setAttribute("cx", String(p.x));
    knob.setAttribute("cy", String(p.y));
  };
  draw(sector.center, 60);

  let dragging = false;
  let current = { azimuth: sector.center, elevation: 60 };
  const track = (ev: PointerEvent) => {
    const rect = svg.getBoundingClientRect();
    current = pointerToLight(ev.clientX - rect.left, ev.clientY - rect.top, c, c, COMPASS_RADIUS, sector);
    draw(current.azimuth, current.elevation);
  };
  svg.addEventListener("pointerdown", (ev) => {
    dragging = true;
    svg.setPointerCapture(ev.pointerId);
    track(ev);
  });
  svg.addEventListener("pointermove", (ev) => {
    if (dragging) track(ev);
  });
  svg.addEventListener("pointerup", async (ev) => {
    if (!dragging) return;
    dragging = false;
    track(ev);
    const ok = await lights.release(cluster, current.azimuth, current.elevation, sector);
    const acked = store.lights.get(cluster);
    if (!ok && acked) {
      draw(acked.azimuth, acked.elevation); // snap back to the last valid light
    } else if (ok) {
      getImage().src = `../render.png?epoch=${store.epoch}`;
    }
  });
}

boot();
