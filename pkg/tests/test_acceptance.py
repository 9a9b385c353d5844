"""Acceptance suite: one test per release criterion, each at its stated
tolerance, printing one PASS line per criterion (run with -s to see them)."""

import sys
import textwrap

import numpy as np
import pytest

from bokehkit.align import PrepareConfig, _project, estimate_homography_ransac, prepare_pair, warp_perspective
from bokehkit.bench import BenchmarkEntry, RunnerSpec, make_leaderboard, time_runner
from bokehkit.image import convolve2d, disc_kernel
from bokehkit.metrics import charbonnier, psnr, sobel_loss, ssim
from bokehkit.mos.store import RatingRecord, RatingStore, aggregate_mos
from bokehkit.render import layer_masks, layer_radii, render_layered
from bokehkit.wavelet import dwt2_haar, idwt2_haar

from conftest import CPU_TRACK_ROWS, dead_leaves
from test_metrics import ssim_reference
from test_mos import two_stage_mean_oracle


def _report(name: str) -> None:
    print(f"[ACCEPTANCE] {name}: PASS")


def test_leaderboard_reproduction():
    entries = [
        BenchmarkEntry(team=t, framework=f, avg_runtime_s=rt, psnr=p, ssim=s, mos=m)
        for t, f, rt, p, s, m in CPU_TRACK_ROWS
    ]
    ordered = make_leaderboard(entries)
    teams = [e.team for e in ordered]
    # published MOS ordering with MOS-less rows last
    assert teams == [
        "Airia-bokeh",
        "AIA-Smart",
        "CET_SP",
        "Team Horizon",
        "CET_CVLab",
        "IPCV_IITM",
        "CET21_CV",
        "CET_ECE",
        "xuehuapiaopiao-team",
        "Terminator",
    ]
    # documented divergence: the printed table lists CET_CVLab above Team
    # Horizon at the 3.2 tie; the declared PSNR tie rule (23.27 > 23.05)
    # places Team Horizon first.
    assert teams.index("Team Horizon") < teams.index("CET_CVLab")
    mos_values = [e.mos for e in ordered if e.mos is not None]
    assert mos_values == sorted(mos_values, reverse=True)
    assert all(e.mos is None for e in ordered[8:])
    _report("leaderboard reproduction")


def test_metric_oracles():
    local = np.random.default_rng(100)
    a = local.random((64, 64, 3))
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-9)

    flat = np.full((32, 32, 3), 0.5)
    assert psnr(flat, flat + 1 / 255) == pytest.approx(48.131, abs=1e-3)

    assert charbonnier(a, a) == 1e-3

    assert sobel_loss(np.full((16, 16, 3), 0.1), np.full((16, 16, 3), 0.8)) == 0.0

    for k in range(20):
        pair_rng = np.random.default_rng(200 + k)
        x = pair_rng.random((32, 32, 1))
        y = np.clip(x + pair_rng.normal(0, 0.08, x.shape), 0, 1)
        assert ssim(x, y) == pytest.approx(ssim_reference(x[:, :, 0], y[:, :, 0]), abs=1e-6)
    _report("metric oracles")


def test_wavelet_suite():
    local = np.random.default_rng(7)
    for _ in range(100):
        h = 2 * int(local.integers(2, 17))
        w = 2 * int(local.integers(2, 17))
        c = int(local.integers(1, 4))
        x = local.random((h, w, c))
        bands = dwt2_haar(x)
        rec = idwt2_haar(bands)
        assert np.abs(rec - x).max() <= 1e-6

        energy_in = float(np.sum(x * x))
        energy_out = sum(
            float(np.sum(b * b)) for b in (bands.ll, bands.lh, bands.hl, bands.hh)
        )
        assert abs(energy_out - energy_in) <= 1e-6 * energy_in

        y = local.random((h, w, c))
        alpha, beta = 1.7, -0.4
        lhs = dwt2_haar(alpha * x + beta * y)
        rx, ry = dwt2_haar(x), dwt2_haar(y)
        for combined, bx, by in (
            (lhs.ll, rx.ll, ry.ll),
            (lhs.lh, rx.lh, ry.lh),
            (lhs.hl, rx.hl, ry.hl),
            (lhs.hh, rx.hh, ry.hh),
        ):
            assert np.abs(combined - (alpha * bx + beta * by)).max() <= 1e-6
    _report("wavelet suite")


def test_renderer_oracle_equivalence():
    local = np.random.default_rng(21)
    size = 256
    img = local.random((size, size, 3))
    ones = np.ones((size, size))

    d = 4.0
    out = render_layered(img, np.full((size, size), d), ones, 8)
    direct = convolve2d(img, disc_kernel(d))
    margin = int(np.ceil(d))
    assert np.abs(out - direct)[margin:-margin, margin:-margin].max() <= 1e-4

    out0 = render_layered(img, np.zeros((size, size)), ones, 8)
    assert np.abs(out0 - img).max() <= 1e-6

    defocus = local.random((size, size)) * 9.0
    masks = layer_masks(defocus, layer_radii(defocus, 8))
    assert np.abs(np.sum(masks, axis=0) - 1.0).max() <= 1e-6

    d2 = 6.0
    two_plane = np.zeros((size, size))
    two_plane[:, size // 2 :] = d2
    out2 = render_layered(img, two_plane, ones, 8)
    fg = slice(0, size // 2 - int(np.ceil(d2)))
    assert np.abs(out2[:, fg] - img[:, fg]).max() <= 2 / 255
    _report("renderer oracle equivalence")


def test_alignment_suite():
    successes = 0
    for trial in range(100):
        local = np.random.default_rng(5000 + trial)
        h_true = np.eye(3)
        h_true[:2, :2] += local.normal(0, 0.08, (2, 2))
        h_true[:2, 2] = local.normal(0, 40, 2)
        h_true[2, :2] = local.normal(0, 1e-4, 2)
        n, n_in = 100, 60
        src = local.uniform(0, 800, (n, 2))
        dst = _project(h_true, src)
        dst[:n_in] += local.normal(0, 0.5, (n_in, 2))
        dst[n_in:] = local.uniform(0, 800, (n - n_in, 2))
        h_est, _ = estimate_homography_ransac(
            np.hstack([src, dst]), iterations=600, inlier_px=3.0, seed=trial
        )
        held = local.uniform(50, 750, (50, 2))
        err = np.linalg.norm(_project(h_est, held) - _project(h_true, held), axis=1)
        if err.max() <= 1.0:
            successes += 1
    assert successes >= 95

    img = dead_leaves(320, 420, seed=7, n=250)
    angle = np.deg2rad(1.2)
    c, s = np.cos(angle), np.sin(angle)
    h_pair = np.array([[c, -s, 9.0], [s, c, -5.0], [0, 0, 1.0]])
    shallow, _ = warp_perspective(img, h_pair, 320, 420)
    pair = prepare_pair(img, shallow, PrepareConfig(seed=1, ransac_iterations=500))
    assert np.mean(np.abs(pair.wide - pair.shallow)) < np.mean(np.abs(img - shallow))
    assert pair.wide.shape[0] == 1024 and pair.shallow.shape[0] == 1024
    _report("alignment suite")


def test_bench_harness(tmp_path):
    from bokehkit.image import save_image

    inputs_dir = tmp_path / "inputs"
    inputs_dir.mkdir()
    save_image(np.random.default_rng(0).random((16, 16, 3)), inputs_dir / "one.png")
    inputs = [inputs_dir / "one.png"]

    def sleep_spec(seconds, name):
        script = tmp_path / f"{name}.py"
        script.write_text(
            textwrap.dedent(
                f"""
                import shutil, sys, time
                time.sleep({seconds})
                shutil.copyfile(sys.argv[1], sys.argv[2])
                """
            )
        )
        return RunnerSpec(
            kind="external-command",
            command=f"{sys.executable} {script} {{input}} {{output}}",
            warmup_runs=1,
            timed_runs=3,
        )

    base = time_runner(sleep_spec(0.2, "base"), inputs, tmp_path / "o1")[0]
    assert 0.2 <= base <= 0.3

    slowed = time_runner(sleep_spec(0.3, "slow"), inputs, tmp_path / "o2")[0]
    assert slowed >= base + 0.08
    _report("bench harness")


def test_mos_aggregation(tmp_path):
    worked = [
        RatingRecord("s1", "m", "img1", 5, 0.0),
        RatingRecord("s2", "m", "img1", 4, 1.0),
        RatingRecord("s1", "m", "img2", 3, 2.0),
    ]
    result = aggregate_mos(worked)[0]
    assert result.per_image == {"img1": 4.5, "img2": 3.0}
    assert result.mos == pytest.approx(3.75, abs=1e-12)

    local = np.random.default_rng(17)
    records = [
        RatingRecord(
            session_id=f"s{local.integers(40)}-{k}",
            method=f"m{local.integers(5)}",
            image_id=f"img{local.integers(10)}",
            level=int(local.integers(1, 6)),
            timestamp=float(k),
        )
        for k in range(1000)
    ]
    oracle = two_stage_mean_oracle(records)
    for res in aggregate_mos(records):
        assert res.mos == pytest.approx(oracle[res.method], abs=1e-9)

    shuffled = records[:]
    np.random.default_rng(3).shuffle(shuffled)
    assert [
        (r.method, r.mos) for r in aggregate_mos(shuffled)
    ] == [(r.method, r.mos) for r in aggregate_mos(records)]

    # durability across a process restart (fresh store instance, same log);
    # session ids carry a unique -k suffix so no append is a duplicate
    store = RatingStore(tmp_path / "ratings.ndjson")
    for rec in records[:50]:
        store.append(rec)
    reopened = RatingStore(tmp_path / "ratings.ndjson")
    assert reopened.records() == store.records()
    assert [
        (r.method, r.mos) for r in aggregate_mos(reopened.records())
    ] == [(r.method, r.mos) for r in aggregate_mos(store.records())]
    _report("MOS aggregation")
