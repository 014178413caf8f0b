"""Fit and comparison statistics used by the figure reports."""

from __future__ import annotations

import math

import numpy as np


def line_fit(x, y) -> dict:
    """Least squares line with slope standard error, r^2 and a 95% CI."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two points to fit")
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0.0:
        raise ValueError("degenerate fit: all x identical")
    slope = float(((x - xm) * (y - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    ss_res = float((resid ** 2).sum())
    ss_tot = float(((y - ym) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    stderr = math.sqrt(ss_res / max(n - 2, 1) / sxx)
    return {
        "slope": slope,
        "intercept": intercept,
        "stderr_slope": stderr,
        "r2": r2,
        "n": n,
        "ci95_low": slope - 1.96 * stderr,
        "ci95_high": slope + 1.96 * stderr,
    }


def loglog_fit(x, y) -> dict:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    mask = (x > 0) & (y > 0)
    out = line_fit(np.log(x[mask]), np.log(y[mask]))
    out["n_dropped"] = int((~mask).sum())
    return out


def ks_two_sample(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.shape[0]
    fb = np.searchsorted(b, grid, side="right") / b.shape[0]
    return float(np.max(np.abs(fa - fb)))
