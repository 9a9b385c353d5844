#!/usr/bin/env python3
"""Rank historical challenge results into leaderboard files.

Rows are sorted by MOS (subjective quality); entries that were never rated
by the study stay at the bottom, and MOS ties resolve by PSNR.
"""

from pathlib import Path

from bokehkit import BenchmarkEntry, make_leaderboard, write_report

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

rows = [
    ("Airia-bokeh", "TensorFlow", 5.52, 23.58, 0.8770, 4.2),
    ("AIA-Smart", "PyTorch", 1.71, 23.56, 0.8829, 3.8),
    ("CET_SP", "TensorFlow", 1.17, 21.91, 0.8201, 3.3),
    ("CET_CVLab", "TensorFlow", 1.17, 23.05, 0.8591, 3.2),
    ("Team Horizon", "PyTorch", 19.27, 23.27, 0.8818, 3.2),
    ("IPCV_IITM", "PyTorch", 27.24, 23.77, 0.8866, 2.5),
    ("CET21_CV", "TensorFlow", 0.74, 22.80, 0.8628, 1.3),
    ("CET_ECE", "TensorFlow", 0.74, 22.85, 0.8629, 1.2),
    ("xuehuapiaopiao-team", "TensorFlow", None, 22.98, 0.8758, None),
    ("Terminator", "TensorFlow", None, 23.04, 0.8756, None),
]
entries = [
    BenchmarkEntry(team=t, framework=f, avg_runtime_s=rt, psnr=p, ssim=s, mos=m)
    for t, f, rt, p, s, m in rows
]

ordered = make_leaderboard(entries)
print(f"{'#':>2}  {'team':<22} {'runtime':>8} {'psnr':>6} {'ssim':>7} {'mos':>4}")
for i, e in enumerate(ordered, 1):
    rt = f"{e.avg_runtime_s:.2f}" if e.avg_runtime_s else "-"
    mos = f"{e.mos:.1f}" if e.mos else "-"
    print(f"{i:>2}  {e.team:<22} {rt:>8} {e.psnr:>6.2f} {e.ssim:>7.4f} {mos:>4}")

json_path, csv_path = write_report(ordered, OUT)
print(f"\nwrote {json_path} and {csv_path}")
print("note: the PSNR tie rule places Team Horizon above CET_CVLab at MOS 3.2")
