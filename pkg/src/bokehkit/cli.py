"""Command-line entry point.

Subcommands: prepare | render | evaluate | bench | study-serve |
study-aggregate | report.  Exit codes: 0 success, 1 validation/usage error,
2 runtime or I/O error.  Diagnostics go to stderr; machine-readable output
goes to files or stdout only.  Flag values take precedence over config-file
values, which take precedence over built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import align, bench, metrics
from .errors import EstimationError, FormatError, RunnerError, StageError
from .image import load_depth_map, load_image, save_image
from .jsonio import canonical_json
from .mos.service import StudyServer, create_app
from .mos.store import RatingStore, aggregate_mos, import_ratings, load_study_config
from .render import RenderConfig, render_bokeh

OPERATOR_TOKEN_ENV = "BOKEHKIT_OPERATOR_TOKEN"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract reserves 2 for
    # runtime failures and uses 1 for validation problems.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bokehkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", parents=[], help="align wide/shallow pairs under a dataset root")
    p.add_argument("--root", required=True, help="dataset root with wide/ and shallow/")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-keypoints", type=int, default=2000)
    p.add_argument("--ransac-iterations", type=int, default=2000)
    p.add_argument("--inlier-px", type=float, default=3.0)
    p.add_argument("--target-height", type=int, default=1024)

    p = sub.add_parser("render", help="render a bokeh image from an input and a depth map")
    p.add_argument("--input", required=True)
    p.add_argument("--depth", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON file with RenderConfig fields")
    p.add_argument("--focus", type=float, help="focus depth in (0, 1]")
    p.add_argument("--max-radius", type=float, help="largest blur radius in pixels")
    p.add_argument("--layers", type=int, help="number of defocus layers")
    p.add_argument("--gamma", type=float, help="radiance weight exponent")
    p.add_argument("--fg-threshold", type=float)
    p.add_argument("--fg-softness", type=float)
    p.add_argument("--work-scale", type=float, help="1, 0.5 or 0.25")

    p = sub.add_parser("evaluate", help="metrics for a directory of predictions vs ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out", required=True, help="aggregate JSON path")
    p.add_argument("--csv", help="per-image CSV path (default: alongside --out)")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("bench", help="time a runner over input images and report")
    p.add_argument("--runner", required=True, help="runner spec JSON")
    p.add_argument("--inputs", required=True, help="directory of input images")
    p.add_argument("--gt", help="ground-truth directory for fidelity metrics")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--workdir", help="where runner outputs go (default: <out>.outputs)")

    p = sub.add_parser("study-serve", help="serve the rating study API and UI")
    p.add_argument("--config", required=True, help="study config JSON")
    p.add_argument("--listen", default="127.0.0.1:8000", help="host:port")
    p.add_argument("--static", help="directory with the rating UI bundle")
    p.add_argument("--ratings", help="rating log path (default: ratings.ndjson next to config)")

    p = sub.add_parser("study-aggregate", help="aggregate MOS from a rating log")
    p.add_argument("--ratings", required=True, help="ratings.ndjson path")
    p.add_argument("--out", help="output JSON path (default: stdout)")

    p = sub.add_parser("report", help="leaderboard files from benchmark entries")
    p.add_argument("--entries", required=True, help="JSON file with an entries list")
    p.add_argument("--mos", help="MOS results JSON to merge by method name")
    p.add_argument("--out-dir", required=True)
    return parser


def _cmd_prepare(args) -> int:
    config = align.PrepareConfig(
        max_keypoints=args.max_keypoints,
        ransac_iterations=args.ransac_iterations,
        inlier_px=args.inlier_px,
        seed=args.seed,
        target_height=args.target_height,
    )
    done = align.prepare_directory(args.root, config, jobs=args.jobs)
    print(f"aligned {len(done)} pairs under {args.root}", file=sys.stderr)
    return 0


def _cmd_render(args) -> int:
    file_cfg = {}
    if args.config:
        file_cfg = json.loads(Path(args.config).read_text())
    defaults = RenderConfig(focus_depth=0.5, max_radius=8.0)

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return file_cfg.get(key, default)

    cfg = RenderConfig(
        focus_depth=pick(args.focus, "focus_depth", defaults.focus_depth),
        max_radius=pick(args.max_radius, "max_radius", defaults.max_radius),
        num_layers=pick(args.layers, "num_layers", defaults.num_layers),
        radiance_gamma=pick(args.gamma, "radiance_gamma", defaults.radiance_gamma),
        fg_threshold=pick(args.fg_threshold, "fg_threshold", defaults.fg_threshold),
        fg_softness=pick(args.fg_softness, "fg_softness", defaults.fg_softness),
        work_scale=pick(args.work_scale, "work_scale", defaults.work_scale),
    )
    img = load_image(args.input)
    depth = load_depth_map(args.depth)
    save_image(render_bokeh(img, depth, cfg), args.out)
    return 0


def _metric_row(report: metrics.MetricReport) -> dict:
    return {
        "psnr": report.psnr,
        "ssim": report.ssim,
        "ms_ssim": report.ms_ssim,
        "l1": report.l1,
        "charbonnier": report.charbonnier,
        "sobel": report.sobel,
        "gray_l1": report.gray_l1,
    }


def _cmd_evaluate(args) -> int:
    pred_dir, gt_dir = Path(args.pred), Path(args.gt)
    pred_ids = {p.stem for p in pred_dir.glob("*.png")}
    gt_ids = {p.stem for p in gt_dir.glob("*.png")}
    if pred_ids != gt_ids:
        missing_pred = sorted(gt_ids - pred_ids)
        missing_gt = sorted(pred_ids - gt_ids)
        parts = []
        if missing_pred:
            parts.append(f"missing predictions: {', '.join(missing_pred)}")
        if missing_gt:
            parts.append(f"missing ground truth: {', '.join(missing_gt)}")
        raise ValueError("; ".join(parts) or "no images found")
    ids = sorted(pred_ids)
    if not ids:
        raise ValueError(f"no PNG images in {pred_dir}")

    def one(image_id: str):
        pred = load_image(pred_dir / f"{image_id}.png")
        gt = load_image(gt_dir / f"{image_id}.png")
        return image_id, metrics.evaluate_pair(pred, gt)

    if args.jobs <= 1:
        rows = [one(i) for i in ids]
    else:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(one, ids))

    columns = ["psnr", "ssim", "ms_ssim", "l1", "charbonnier", "sobel", "gray_l1"]
    csv_path = Path(args.csv) if args.csv else Path(args.out).with_suffix(".csv")
    lines = ["id," + ",".join(columns)]
    for image_id, report in rows:
        row = _metric_row(report)
        cells = [image_id]
        for col in columns:
            value = row[col]
            if value is None:
                cells.append("")
            elif math.isinf(value):
                cells.append("inf")
            else:
                cells.append(f"{value:.6g}")
        lines.append(",".join(cells))
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text("\n".join(lines) + "\n")

    aggregate = {"count": len(rows)}
    for col in columns:
        values = [_metric_row(r)[col] for _, r in rows if _metric_row(r)[col] is not None]
        aggregate[col] = sum(values) / len(values) if values else None
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(canonical_json(aggregate))
    return 0


def _cmd_bench(args) -> int:
    spec = bench.load_runner_spec(args.runner)
    inputs_dir = Path(args.inputs)
    inputs = sorted(inputs_dir.glob("*.png"))
    if not inputs:
        raise ValueError(f"no PNG inputs in {inputs_dir}")
    workdir = Path(args.workdir) if args.workdir else Path(args.out).with_suffix(".outputs")
    medians = bench.time_runner(spec, inputs, workdir)

    report = {
        "team": spec.team,
        "kind": spec.kind,
        "avg_runtime_s": sum(medians) / len(medians),
        "per_image": {p.stem: m for p, m in zip(inputs, medians)},
    }
    if args.gt:
        gt_dir = Path(args.gt)
        psnrs, ssims = [], []
        for p in inputs:
            out_img = load_image(workdir / p.name)
            gt_img = load_image(gt_dir / p.name)
            psnrs.append(metrics.psnr(out_img, gt_img))
            ssims.append(metrics.ssim(out_img, gt_img))
        report["psnr"] = sum(psnrs) / len(psnrs)
        report["ssim"] = sum(ssims) / len(ssims)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(canonical_json(report))
    return 0


def _cmd_study_serve(args) -> int:
    import uvicorn

    config_path = Path(args.config)
    config = load_study_config(config_path)
    ratings = Path(args.ratings) if args.ratings else config_path.parent / "ratings.ndjson"
    store = RatingStore(ratings)
    server = StudyServer(config, store, base_dir=config_path.parent)
    app = create_app(
        server,
        operator_token=os.environ.get(OPERATOR_TOKEN_ENV),
        static_dir=args.static,
    )
    host, _, port = args.listen.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def _cmd_study_aggregate(args) -> int:
    text = Path(args.ratings).read_text()
    results = aggregate_mos(import_ratings(text))
    payload = {
        "results": [
            {
                "method": r.method,
                "mos": r.mos,
                "per_image": r.per_image,
                "rating_count": r.rating_count,
            }
            for r in results
        ]
    }
    if args.out:
        Path(args.out).write_text(canonical_json(payload))
    else:
        sys.stdout.write(canonical_json(payload))
    return 0


def _cmd_report(args) -> int:
    data = json.loads(Path(args.entries).read_text())
    rows = data["entries"] if isinstance(data, dict) else data
    mos_by_method = {}
    if args.mos:
        mos_data = json.loads(Path(args.mos).read_text())
        for r in mos_data.get("results", []):
            mos_by_method[r["method"]] = r["mos"]
    entries = []
    for row in rows:
        entry = bench.BenchmarkEntry(
            team=row["team"],
            framework=row.get("framework", ""),
            avg_runtime_s=row.get("avg_runtime_s"),
            psnr=row.get("psnr"),
            ssim=row.get("ssim"),
            mos=row.get("mos", mos_by_method.get(row["team"])),
        )
        entries.append(entry)
    ordered = bench.make_leaderboard(entries)
    json_path, csv_path = bench.write_report(ordered, args.out_dir)
    print(f"wrote {json_path} and {csv_path}", file=sys.stderr)
    return 0


_COMMANDS = {
    "prepare": _cmd_prepare,
    "render": _cmd_render,
    "evaluate": _cmd_evaluate,
    "bench": _cmd_bench,
    "study-serve": _cmd_study_serve,
    "study-aggregate": _cmd_study_aggregate,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, RunnerError, EstimationError, StageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
