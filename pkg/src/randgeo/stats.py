"""Small statistics helpers shared by the test suite, the CLI and exports."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def ks_two_sample(x, y) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    grid = np.concatenate([x, y])
    fx = np.searchsorted(x, grid, side="right") / x.shape[0]
    fy = np.searchsorted(y, grid, side="right") / y.shape[0]
    return float(np.max(np.abs(fx - fy)))


def ks_to_cdf(x, cdf) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a callable CDF."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    n = x.shape[0]
    theo = np.asarray(cdf(x), dtype=np.float64)
    upper = np.max(np.abs(np.arange(1, n + 1) / n - theo))
    lower = np.max(np.abs(theo - np.arange(n) / n))
    return float(max(upper, lower))


def tv_distance(counts_a: dict, counts_b: dict) -> float:
    """Total variation distance between two empirical label distributions."""
    na = sum(counts_a.values())
    nb = sum(counts_b.values())
    keys = set(counts_a) | set(counts_b)
    return 0.5 * sum(abs(counts_a.get(k, 0) / na - counts_b.get(k, 0) / nb)
                     for k in keys)


@dataclass(frozen=True)
class FitResult:
    """Least-squares line fit in whatever coordinates were handed in."""

    slope: float
    intercept: float
    stderr_slope: float
    r2: float
    n: int

    @property
    def ci95(self) -> tuple[float, float]:
        return (self.slope - 1.96 * self.stderr_slope,
                self.slope + 1.96 * self.stderr_slope)

    def as_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "stderr_slope": self.stderr_slope, "r2": self.r2, "n": self.n,
                "ci95_low": self.ci95[0], "ci95_high": self.ci95[1]}


def line_fit(x, y) -> FitResult:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two points to fit a line")
    xm = x.mean()
    ym = y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0.0:
        raise ValueError("degenerate fit: all x identical")
    slope = float(((x - xm) * (y - ym)).sum() / sxx)
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    ss_res = float((resid ** 2).sum())
    ss_tot = float(((y - ym) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    stderr = math.sqrt(ss_res / max(n - 2, 1) / sxx)
    return FitResult(slope=slope, intercept=float(intercept),
                     stderr_slope=stderr, r2=r2, n=n)


def loglog_fit(x, y) -> FitResult:
    """Line fit of log y against log x (positive data only)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    mask = (x > 0) & (y > 0)
    return line_fit(np.log(x[mask]), np.log(y[mask]))
