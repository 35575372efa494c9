"""Command-line entry points: render, outlierness, fidelity, bench, serve."""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import pngio
from .metrics import bench_scaling, fidelity_sweep, mean_delta_e
from .model import ClusterLight, IngestError, RenderParams, ingest
from .pipeline import prepare, render
from .service import parse_lighting


def _add_common_render_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="CSV or JSON polyline dataset")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--margin", type=float, default=0.02)
    p.add_argument("--kernel", type=int, default=3)
    p.add_argument("--bandwidth", type=float, default=1.0)


def _build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(prog="lineglow")
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render one illuminated density plot")
    _add_common_render_flags(p)
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--eta-high", type=float, default=None)
    p.add_argument("--phi", type=float, default=-20.0)
    p.add_argument("--colormap", choices=["multi", "single"], default="multi")
    p.add_argument("--colormap-file", default=None,
                   help="JSON colormap stop table overriding the default")
    p.add_argument("--lighting", default="adaptive",
                   help="adaptive | fixed:AZ:EL | manual")
    p.add_argument("--shading", choices=["lab", "rgb-baseline"], default="lab")
    p.add_argument("--density-scale", choices=["log", "linear"], default="log")
    p.add_argument("--clusters", default=None,
                   help="CSV of line_id,cluster overriding dataset labels")
    p.add_argument("--light", action="append", default=[],
                   metavar="CLUSTER:AZ:EL:CENTER:HALFWIDTH",
                   help="manual per-cluster light (repeatable)")
    p.add_argument("--dump-normals", default=None)
    p.add_argument("--dump-intensity", default=None)
    p.add_argument("--dump-provenance", default=None)
    p.add_argument("--dump-density", default=None,
                   help="raw float32 dump of the density field")
    p.add_argument("--report-fidelity", action="store_true")

    p = sub.add_parser("outlierness", help="emit per-line outlierness CSV")
    _add_common_render_flags(p)
    p.add_argument("--out", default="-", help="CSV path, or - for stdout")

    p = sub.add_parser("fidelity", help="CIEDE2000 sweep over phi")
    _add_common_render_flags(p)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--phis", default="0,-5,-10,-15,-20,-25,-30,-35,-40")
    p.add_argument("--out", default="-", help="CSV path, or - for stdout")
    p.add_argument("--chart", default=None, help="optional summary chart PNG")

    p = sub.add_parser("bench", help="stage-runtime scaling benchmark")
    p.add_argument("--counts", default="100,500,1000,2000,5000")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--out", default="-", help="CSV path, or - for stdout")
    p.add_argument("--chart", default=None, help="optional summary chart PNG")

    p = sub.add_parser("serve", help="run the local HTTP service")
    _add_common_render_flags(p)
    p.add_argument("--port", type=int, default=8650)
    p.add_argument("--ui", default="frontend/dist", help="static UI directory")
    p.add_argument("--config", default=None, help="JSON file of default params")

    return root


def _apply_cluster_file(polylines, path: str):
    mapping: dict[int, int] = {}
    with open(path, newline="") as fh:
        for row_no, row in enumerate(csv.reader(fh), start=1):
            if not row or (row_no == 1 and row[0].strip().lower() == "line_id"):
                continue
            if len(row) != 2:
                raise IngestError(f"{path}: row {row_no}: expected line_id,cluster")
            mapping[int(row[0])] = int(row[1])
    from dataclasses import replace

    return [replace(ln, cluster=mapping.get(ln.id, ln.cluster)) for ln in polylines]


def _params_from_args(args: argparse.Namespace) -> RenderParams:
    mode, az, el = parse_lighting(args.lighting)
    cluster_lights = {}
    for raw in args.light:
        parts = raw.split(":")
        if len(parts) < 2:
            raise ValueError(f"bad --light value {raw!r}")
        cid = int(parts[0])
        light_az = float(parts[1])
        light_el = float(parts[2]) if len(parts) > 2 else 60.0
        center = float(parts[3]) if len(parts) > 3 else light_az
        half = float(parts[4]) if len(parts) > 4 else 180.0
        cluster_lights[cid] = ClusterLight(
            azimuth=light_az, elevation=light_el,
            sector_center=center, sector_half_width=half,
        )
    return RenderParams(
        mu=args.mu,
        sigma=args.sigma,
        eta=args.eta,
        eta_high=getattr(args, "eta_high", None),
        phi=args.phi,
        kernel_n=args.kernel,
        bandwidth_h=args.bandwidth,
        colormap="single_hue_per_cluster" if args.colormap == "single" else "multi_hue",
        lighting=mode,
        global_azimuth=az,
        global_elevation=el,
        shading_space="direct_rgb_baseline" if args.shading == "rgb-baseline" else "luminance_only",
        density_scale=args.density_scale,
        cluster_lights=cluster_lights,
    )


def _cmd_render(args: argparse.Namespace) -> int:
    polylines, _ = ingest(args.input, format=args.format, grid_w=args.width,
                          grid_h=args.height, margin=args.margin)
    if args.clusters:
        polylines = _apply_cluster_file(polylines, args.clusters)
    params = _params_from_args(args)
    cmap = None
    if args.colormap_file:
        from .colorize import load_colormap

        cmap = load_colormap(args.colormap_file)
    prep = prepare(polylines, args.width, args.height, params.kernel_n, params.bandwidth_h)
    result = render(prep, params, cmap)
    pngio.write_png(args.out, result.image.pixels)
    if args.dump_normals:
        pngio.write_png(args.dump_normals, pngio.encode_normal_map(result.normal_map.normals))
    if args.dump_intensity:
        pngio.write_png(args.dump_intensity, pngio.encode_intensity(result.intensity_map.grid.data))
    if args.dump_provenance:
        pngio.write_png(args.dump_provenance, pngio.encode_provenance(result.normal_map.provenance))
    if args.dump_density:
        prep.density.dump_f32(args.dump_density)
    summary = {
        "lines": len(prep.lines),
        "f_max": round(prep.density.f_max, 6),
        "i_min": round(result.intensity_map.i_min, 6),
        "out": str(args.out),
    }
    if args.report_fidelity:
        summary["mean_delta_e"] = round(mean_delta_e(result.base, result.image), 6)
    print(json.dumps(summary))
    return 0


def _cmd_outlierness(args: argparse.Namespace) -> int:
    polylines, _ = ingest(args.input, format=args.format, grid_w=args.width,
                          grid_h=args.height, margin=args.margin)
    prep = prepare(polylines, args.width, args.height, args.kernel, args.bandwidth)
    rows = [
        (lid, prep.index.scores[lid], prep.index.ranks[lid], prep.index.normalized[lid])
        for lid in sorted(prep.index.scores)
    ]
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        w = csv.writer(out)
        w.writerow(["line_id", "score", "rank", "normalized"])
        for lid, score, rank, norm in rows:
            w.writerow([lid, f"{score:.9f}", rank, f"{norm:.9f}"])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_fidelity(args: argparse.Namespace) -> int:
    polylines, _ = ingest(args.input, format=args.format, grid_w=args.width,
                          grid_h=args.height, margin=args.margin)
    prep = prepare(polylines, args.width, args.height, args.kernel, args.bandwidth)
    params = RenderParams(mu=args.mu, sigma=args.sigma, eta=args.eta,
                          kernel_n=args.kernel, bandwidth_h=args.bandwidth)
    phis = [float(v) for v in args.phis.split(",") if v.strip()]
    report = fidelity_sweep(prep, params, phis)
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        w = csv.writer(out)
        w.writerow(["phi", "ours_mean_de00", "baseline_mean_de00"])
        for phi, ours, base in report.rows():
            w.writerow([phi, f"{ours:.6f}", f"{base:.6f}"])
    finally:
        if out is not sys.stdout:
            out.close()
    if args.chart:
        chart = pngio.line_chart(
            [-p for p in report.phi_values],
            {"ours": report.ours, "baseline": report.baseline},
        )
        pngio.write_png(args.chart, chart)
    crossing = "never" if report.crossing_phi is None else f"{report.crossing_phi:.3f}"
    print(json.dumps({"threshold": report.threshold, "crossing_phi": crossing}))
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    counts = [int(v) for v in args.counts.split(",") if v.strip()]
    report = bench_scaling(counts, repeats=args.repeats, grid=args.grid)
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        w = csv.writer(out)
        w.writerow(["count", "outlierness_s", "normal_map_s", "lighting_s"])
        for i, n in enumerate(report.counts):
            w.writerow([
                n,
                f"{report.times['outlierness'][i]:.6f}",
                f"{report.times['normal_map'][i]:.6f}",
                f"{report.times['lighting'][i]:.6f}",
            ])
    finally:
        if out is not sys.stdout:
            out.close()
    if args.chart:
        chart = pngio.line_chart(
            [float(c) for c in report.counts],
            {k: v for k, v in report.times.items()},
        )
        pngio.write_png(args.chart, chart)
    fits = {k: {"slope": v[0], "intercept": v[1], "r2": round(v[2], 5)}
            for k, v in report.fits.items()}
    print(json.dumps({"fits": fits}))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    params = None
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        from .service import apply_param_delta

        params = apply_param_delta(RenderParams(), cfg)
    serve(
        args.input,
        port=args.port,
        grid_w=args.width,
        grid_h=args.height,
        params=params,
        ui_dir=args.ui,
        format=args.format,
    )
    return 0


_COMMANDS = {
    "render": _cmd_render,
    "outlierness": _cmd_outlierness,
    "fidelity": _cmd_fidelity,
    "bench": _cmd_bench,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (IngestError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
