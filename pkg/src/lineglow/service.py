"""Local HTTP service: load a dataset once, re-render on parameter changes.

The outlierness index is computed at load time and reused for every render;
only dataset, bandwidth or kernel changes rebuild it. Renders are serialized
behind a lock and keyed by a monotonically increasing epoch, so rapid
parameter updates invalidate stale render requests (409) instead of queueing
obsolete work. All responses are pure functions of (dataset, params).
"""

from __future__ import annotations

import threading
from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import pngio
from .model import ClusterLight, IngestError, Polyline, RenderParams, within_sector
from .outlierness import score_histogram
from .pipeline import PreparedDataset, RenderResult, prepare, render

_COLORMAPS = {"multi": "multi_hue", "single": "single_hue_per_cluster"}
_SHADINGS = {"lab": "luminance_only", "rgb-baseline": "direct_rgb_baseline"}


class ParamError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


def parse_lighting(raw: str) -> tuple[str, float, float]:
    """'adaptive' | 'fixed:AZ:EL' | 'manual' -> (mode, azimuth, elevation)."""
    if raw == "adaptive":
        return "adaptive", 135.0, 60.0
    if raw == "manual":
        return "per_cluster_manual", 135.0, 60.0
    if raw.startswith("fixed"):
        parts = raw.split(":")
        az = float(parts[1]) if len(parts) > 1 else 135.0
        el = float(parts[2]) if len(parts) > 2 else 60.0
        return "fixed_global", az, el
    raise ParamError("lighting", f"unknown lighting {raw!r}")


def lighting_label(params: RenderParams) -> str:
    if params.lighting == "adaptive":
        return "adaptive"
    if params.lighting == "per_cluster_manual":
        return "manual"
    return f"fixed:{params.global_azimuth:g}:{params.global_elevation:g}"


def apply_param_delta(params: RenderParams, delta: dict) -> RenderParams:
    """Validate and apply a JSON parameter delta; raises ParamError."""
    kw: dict = {}
    for field, value in delta.items():
        if field == "mu":
            v = _num(field, value)
            if not 0.0 <= v <= 1.0:
                raise ParamError(field, "mu must be in [0, 1]")
            kw["mu"] = v
        elif field == "sigma":
            v = _num(field, value)
            if not 0.0 <= v <= 1.0:
                raise ParamError(field, "sigma must be in [0, 1]")
            kw["sigma"] = v
        elif field == "eta":
            v = _num(field, value)
            if v <= 0:
                raise ParamError(field, "eta must be > 0")
            kw["eta"] = v
        elif field == "phi":
            v = _num(field, value)
            if v > 0:
                raise ParamError(field, "phi must be <= 0")
            kw["phi"] = v
        elif field == "kernel":
            v = int(_num(field, value))
            if v < 1 or v % 2 == 0:
                raise ParamError(field, "kernel must be an odd integer >= 1")
            kw["kernel_n"] = v
        elif field == "bandwidth":
            v = _num(field, value)
            if v <= 0:
                raise ParamError(field, "bandwidth must be > 0")
            kw["bandwidth_h"] = v
        elif field == "colormap":
            if value not in _COLORMAPS:
                raise ParamError(field, "colormap must be 'multi' or 'single'")
            kw["colormap"] = _COLORMAPS[value]
        elif field == "shading":
            if value not in _SHADINGS:
                raise ParamError(field, "shading must be 'lab' or 'rgb-baseline'")
            kw["shading_space"] = _SHADINGS[value]
        elif field == "lighting":
            mode, az, el = parse_lighting(str(value))
            kw["lighting"] = mode
            kw["global_azimuth"] = az
            kw["global_elevation"] = el
        elif field == "density_scale":
            if value not in ("log", "linear"):
                raise ParamError(field, "density_scale must be 'log' or 'linear'")
            kw["density_scale"] = value
        else:
            raise ParamError(field, f"unknown parameter {field!r}")
    try:
        return replace(params, **kw)
    except ValueError as exc:
        raise ParamError(next(iter(kw)), str(exc)) from None


def _num(field: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParamError(field, "expected a number")
    return float(value)


class Session:
    """Dataset, cached pipeline state and the render epoch."""

    def __init__(self, polylines: list[Polyline], grid_w: int, grid_h: int,
                 params: RenderParams | None = None, dataset: str = "dataset"):
        self.polylines = polylines
        self.dataset = dataset
        self.grid_w = grid_w
        self.grid_h = grid_h
        self.params = params or RenderParams()
        self.epoch = 0
        self.lock = threading.Lock()
        self.outlierness_runs = 0
        self._render_cache: tuple[int, RenderResult, bytes] | None = None
        self.prep = self._prepare(self.params)

    def _prepare(self, params: RenderParams) -> PreparedDataset:
        self.outlierness_runs += 1
        return prepare(self.polylines, self.grid_w, self.grid_h,
                       params.kernel_n, params.bandwidth_h)

    def update_params(self, delta: dict) -> int:
        with self.lock:
            new = apply_param_delta(self.params, delta)
            if (new.kernel_n != self.params.kernel_n
                    or new.bandwidth_h != self.params.bandwidth_h):
                self.prep = self._prepare(new)
            self.params = new
            self.epoch += 1
            self._render_cache = None
            return self.epoch

    def set_light(self, cluster: int, azimuth: float, elevation: float,
                  center: float, half_width: float) -> int:
        with self.lock:
            lights = dict(self.params.cluster_lights)
            lights[cluster] = ClusterLight(
                azimuth=azimuth, elevation=elevation,
                sector_center=center, sector_half_width=half_width,
            )
            self.params = replace(self.params, cluster_lights=lights,
                                  lighting="per_cluster_manual")
            self.epoch += 1
            self._render_cache = None
            return self.epoch

    def _render_locked(self) -> tuple[int, RenderResult, bytes]:
        if self._render_cache is None or self._render_cache[0] != self.epoch:
            result = render(self.prep, self.params)
            png = pngio.encode_png(result.image.pixels)
            self._render_cache = (self.epoch, result, png)
        return self._render_cache

    def current_result(self) -> RenderResult:
        """Render (or reuse) the result for whatever epoch is current."""
        with self.lock:
            return self._render_locked()[1]

    def png_for(self, epoch: int) -> bytes | None:
        """PNG bytes for ``epoch``; None when the epoch has gone stale."""
        with self.lock:
            if epoch != self.epoch:
                return None
            return self._render_locked()[2]


def create_app(session: Session, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="lineglow", docs_url=None, redoc_url=None)

    @app.get("/meta")
    def meta() -> JSONResponse:
        params = session.params
        return JSONResponse(
            {
                "dataset": session.dataset,
                "grid": [session.grid_w, session.grid_h],
                "lines": len(session.prep.lines),
                "clusters": session.prep.clusters,
                "outlierness_histogram": score_histogram(session.prep.index, bins=20),
                "epoch": session.epoch,
                "params": {
                    "mu": params.mu,
                    "sigma": params.sigma,
                    "eta": params.eta,
                    "phi": params.phi,
                    "kernel": params.kernel_n,
                    "bandwidth": params.bandwidth_h,
                    "colormap": "single" if params.colormap == "single_hue_per_cluster" else "multi",
                    "lighting": lighting_label(params),
                    "shading": "rgb-baseline" if params.shading_space == "direct_rgb_baseline" else "lab",
                },
                "lights": {
                    str(cid): {
                        "azimuth": cl.azimuth,
                        "elevation": cl.elevation,
                        "center": cl.sector_center,
                        "sector": cl.sector_half_width,
                    }
                    for cid, cl in sorted(session.params.cluster_lights.items())
                },
            }
        )

    @app.post("/params")
    async def post_params(request: Request) -> JSONResponse:
        try:
            delta = await request.json()
        except Exception:
            return JSONResponse({"error": "invalid JSON body"}, status_code=400)
        if not isinstance(delta, dict):
            return JSONResponse({"error": "expected a JSON object"}, status_code=400)
        try:
            epoch = session.update_params(delta)
        except ParamError as exc:
            return JSONResponse({"field": exc.field, "error": str(exc)}, status_code=400)
        return JSONResponse({"epoch": epoch})

    @app.post("/light")
    async def post_light(request: Request) -> JSONResponse:
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"error": "invalid JSON body"}, status_code=400)
        cluster = body.get("cluster")
        if not isinstance(cluster, int) or cluster not in session.prep.clusters:
            return JSONResponse({"error": f"unknown cluster {cluster!r}"}, status_code=404)
        prev = session.params.cluster_lights.get(cluster)
        center = float(body.get("center", prev.sector_center if prev else 135.0))
        half_width = float(body.get("sector", prev.sector_half_width if prev else 180.0))
        azimuth = body.get("azimuth")
        if not isinstance(azimuth, (int, float)) or isinstance(azimuth, bool):
            return JSONResponse({"field": "azimuth", "error": "expected a number"}, status_code=400)
        elevation = float(body.get("elevation", prev.elevation if prev else 60.0))
        if not 0.0 < elevation <= 90.0:
            return JSONResponse({"field": "elevation", "error": "elevation must be in (0, 90]"}, status_code=400)
        if not within_sector(float(azimuth), center, half_width):
            return JSONResponse(
                {"field": "azimuth", "error": "azimuth outside the permitted sector"},
                status_code=400,
            )
        epoch = session.set_light(cluster, float(azimuth), elevation, center, half_width)
        return JSONResponse({"epoch": epoch})

    @app.get("/render.png")
    def render_png(epoch: int) -> Response:
        png = session.png_for(epoch)
        if png is None:
            return JSONResponse(
                {"error": "stale epoch", "epoch": session.epoch}, status_code=409
            )
        return Response(content=png, media_type="image/png")

    @app.get("/layers/normals.png")
    def normals_png() -> Response:
        result = session.current_result()
        return Response(
            content=pngio.encode_png(pngio.encode_normal_map(result.normal_map.normals)),
            media_type="image/png",
        )

    @app.get("/layers/intensity.png")
    def intensity_png() -> Response:
        result = session.current_result()
        return Response(
            content=pngio.encode_png(pngio.encode_intensity(result.intensity_map.grid.data)),
            media_type="image/png",
        )

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def serve(
    path: str | Path,
    port: int = 8650,
    grid_w: int = 512,
    grid_h: int = 512,
    params: RenderParams | None = None,
    ui_dir: str | Path | None = None,
    format: str | None = None,
) -> None:
    """Load a dataset and run the HTTP service until interrupted."""
    import uvicorn

    from .model import ingest

    polylines, _ = ingest(path, format=format, grid_w=grid_w, grid_h=grid_h)
    if not polylines:
        raise IngestError(f"no usable lines in {path}")
    session = Session(polylines, grid_w, grid_h, params, dataset=str(path))
    app = create_app(session, ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
