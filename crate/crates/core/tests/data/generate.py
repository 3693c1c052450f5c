"""Regenerates the synthetic fixtures in this directory (numpy, seed 1950)."""
import numpy as np

rng = np.random.default_rng(1950)
rows = []
close = 16.66
for k in range(792):
    y, m = 1950 + k // 12, k % 12 + 1
    o = close * np.exp(rng.normal(0, 0.002))
    steps = rng.normal(0.0003, 0.009, 21)
    path = o * np.exp(np.cumsum(steps))
    hi = max(o, path.max()); lo = min(o, path.min()); c = path[-1]
    rows.append(f"{y:04d}-{m:02d},{o:.4f},{hi:.4f},{lo:.4f},{c:.4f}")
    close = float(f"{c:.4f}")
open("monthly_ohlc.csv", "w").write("date,open,high,low,close\n" + "\n".join(rows) + "\n")

prow = []
for k in range(792):
    y, m = 1950 + k // 12, k % 12 + 1
    bm = 0.5 + 0.2 * np.sin(k / 60) + rng.normal(0, 0.02)
    tbl = max(0.0, 0.04 + 0.03 * np.sin(k / 90) + rng.normal(0, 0.002))
    bm_s = "" if k == 400 else f"{bm:.5f}"
    prow.append(f"{y:04d}{m:02d},{bm_s},{tbl:.5f}")
open("predictors.csv", "w").write("yyyymm,BM,TBL\n" + "\n".join(prow) + "\n")
