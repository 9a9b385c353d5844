"""Runtime benchmarking of pluggable bokeh renderers and leaderboard output.

Runners are either the builtin renderer or an arbitrary external command with
{input} {depth} {output} placeholders, so heterogeneous implementations plug
into one harness.  Timed runs are strictly sequential; the per-image figure
is the median of the timed runs (robust to scheduler noise), and the
aggregate is the mean of the per-image medians.  External-command timings
include process launch overhead.
"""

from __future__ import annotations

import json
import shlex
import statistics
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import RunnerError
from .image import load_depth_map, load_image, save_image
from .jsonio import canonical_json, parse_float
from .render import RenderConfig, render_bokeh

CSV_HEADER = "team,framework,avg_runtime_s,psnr,ssim,mos"


@dataclass
class BenchmarkEntry:
    """One leaderboard row; optional fields are None when unmeasured."""

    team: str
    framework: str = ""
    avg_runtime_s: float | None = None
    psnr: float | None = None
    ssim: float | None = None
    mos: float | None = None

    def __post_init__(self) -> None:
        if self.avg_runtime_s is not None and not self.avg_runtime_s > 0:
            raise ValueError(f"avg_runtime_s must be > 0, got {self.avg_runtime_s}")
        if self.mos is not None and not 1.0 <= self.mos <= 5.0:
            raise ValueError(f"mos must be in [1, 5], got {self.mos}")


@dataclass
class RunnerSpec:
    """How to execute one candidate renderer."""

    kind: str  # "builtin-render" | "external-command"
    team: str = "builtin"
    command: str = ""
    warmup_runs: int = 1
    timed_runs: int = 3
    depth_dir: str | None = None
    render: RenderConfig | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("builtin-render", "external-command"):
            raise ValueError(f"unknown runner kind {self.kind!r}")
        if self.timed_runs < 1:
            raise ValueError(f"timed_runs must be >= 1, got {self.timed_runs}")
        if self.warmup_runs < 0:
            raise ValueError(f"warmup_runs must be >= 0, got {self.warmup_runs}")
        if self.kind == "external-command" and not self.command:
            raise ValueError("external-command runner needs a command template")


def load_runner_spec(path: str | Path) -> RunnerSpec:
    data = json.loads(Path(path).read_text())
    render_cfg = None
    if "render" in data:
        render_cfg = RenderConfig(**data.pop("render"))
    return RunnerSpec(render=render_cfg, **data)


def _external_run(spec: RunnerSpec, input_path: Path, depth_path: Path | None, output_path: Path) -> float:
    mapping = {
        "input": str(input_path),
        "depth": str(depth_path) if depth_path else "",
        "output": str(output_path),
    }
    argv = [token.format(**mapping) for token in shlex.split(spec.command)]
    start = time.perf_counter()
    proc = subprocess.run(argv, capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    if proc.returncode != 0:
        raise RunnerError(
            f"command {argv[0]!r} exited {proc.returncode} on {input_path.name}: "
            f"{proc.stderr.strip()[:500]}"
        )
    return elapsed


def _builtin_run(spec: RunnerSpec, img, depth, output_path: Path) -> float:
    cfg = spec.render or RenderConfig(focus_depth=0.5, max_radius=0.0, work_scale=1.0)
    start = time.perf_counter()
    result = render_bokeh(img, depth, cfg)
    elapsed = time.perf_counter() - start
    save_image(result, output_path)
    return elapsed


def time_runner(
    spec: RunnerSpec, inputs: list[str | Path], out_dir: str | Path
) -> list[float]:
    """Median wall-clock seconds per input image; outputs land in `out_dir`.

    Warmup runs execute first and are discarded.  The builtin runner times
    only the render call (I/O excluded); external commands are timed
    end-to-end including process launch.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    input_paths = [Path(p) for p in inputs]
    for p in input_paths:
        if not p.is_file():
            raise RunnerError(f"input file missing: {p}")

    medians = []
    for input_path in input_paths:
        output_path = out / input_path.name
        depth_path = None
        if spec.depth_dir:
            depth_path = Path(spec.depth_dir) / input_path.name
            if not depth_path.is_file():
                raise RunnerError(f"depth file missing: {depth_path}")

        if spec.kind == "builtin-render":
            img = load_image(input_path)
            if depth_path is not None:
                depth = load_depth_map(depth_path)
            else:
                # no depth available: constant in-focus scene (identity render)
                cfg = spec.render or RenderConfig(focus_depth=0.5, max_radius=0.0)
                depth = np.full(img.shape[:2], cfg.focus_depth)
            runner = lambda: _builtin_run(spec, img, depth, output_path)
        else:
            runner = lambda: _external_run(spec, input_path, depth_path, output_path)

        for _ in range(spec.warmup_runs):
            runner()
        timings = [runner() for _ in range(spec.timed_runs)]
        if not output_path.is_file():
            raise RunnerError(f"runner produced no output for {input_path.name}")
        medians.append(statistics.median(timings))
    return medians


def make_leaderboard(entries: list[BenchmarkEntry]) -> list[BenchmarkEntry]:
    """Order entries by descending MOS; rows without MOS go last in input order.

    MOS ties break by descending PSNR, then descending SSIM, then team name.
    """
    ranked = [e for e in entries if e.mos is not None]
    unranked = [e for e in entries if e.mos is None]

    def key(e: BenchmarkEntry):
        psnr = e.psnr if e.psnr is not None else float("-inf")
        ssim = e.ssim if e.ssim is not None else float("-inf")
        return (-e.mos, -psnr, -ssim, e.team)

    return sorted(ranked, key=key) + unranked


def _entry_to_dict(e: BenchmarkEntry) -> dict:
    return {
        "team": e.team,
        "framework": e.framework,
        "avg_runtime_s": e.avg_runtime_s,
        "psnr": e.psnr,
        "ssim": e.ssim,
        "mos": e.mos,
    }


def write_report(entries: list[BenchmarkEntry], out_dir: str | Path) -> tuple[Path, Path]:
    """Write leaderboard.json and leaderboard.csv; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "leaderboard.json"
    csv_path = out / "leaderboard.csv"
    json_path.write_text(canonical_json({"entries": [_entry_to_dict(e) for e in entries]}))

    def cell(value) -> str:
        if value is None:
            return ""
        if isinstance(value, float):
            return f"{value:.6g}"
        return str(value)

    lines = [CSV_HEADER]
    for e in entries:
        lines.append(
            ",".join(
                cell(v)
                for v in (e.team, e.framework, e.avg_runtime_s, e.psnr, e.ssim, e.mos)
            )
        )
    csv_path.write_text("\n".join(lines) + "\n")
    return json_path, csv_path


def read_report(json_path: str | Path) -> list[BenchmarkEntry]:
    data = json.loads(Path(json_path).read_text())
    entries = []
    for row in data["entries"]:
        entries.append(
            BenchmarkEntry(
                team=row["team"],
                framework=row.get("framework", ""),
                avg_runtime_s=None if row["avg_runtime_s"] is None else parse_float(row["avg_runtime_s"]),
                psnr=None if row["psnr"] is None else parse_float(row["psnr"]),
                ssim=None if row["ssim"] is None else parse_float(row["ssim"]),
                mos=None if row["mos"] is None else parse_float(row["mos"]),
            )
        )
    return entries
