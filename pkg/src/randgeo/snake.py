"""Discretized Brownian map.

A grid excursion codes the random tree, tree-indexed Gaussian labels code
distances to a base point, the one-step functional of the labels gives the
distance upper bound, and chain minimization over grid representatives
gives the metric itself. Grid point m is identified with 0; every other
grid point is its own representative almost surely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels, range_min, sparse_min_table
from ._rng import as_generator


@dataclass
class DiscretizedExcursion:
    """Nonnegative walk on the uniform grid of [0, 1], zero exactly at the
    two endpoints and positive in between."""

    values: np.ndarray
    _rmq: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def m(self) -> int:
        return self.values.shape[0] - 1

    def validate(self) -> None:
        v = self.values
        if v[0] != 0.0 or v[-1] != 0.0:
            raise ValueError("excursion must vanish at both endpoints")
        if v.shape[0] > 2 and float(v[1:-1].min()) <= 0.0:
            raise ValueError("excursion must be positive in the interior")
        if not np.all(np.isfinite(v)):
            raise ValueError("excursion values must be finite")

    def rmq(self):
        if self._rmq is None:
            self._rmq = sparse_min_table(self.values)
        return self._rmq


def sample_bridge(m: int, rng: np.random.Generator) -> np.ndarray:
    """Standard Brownian bridge on the grid: a Gaussian walk with the linear
    correction that pins the endpoint at zero (exact in law at grid points)."""
    steps = rng.standard_normal(m) * np.sqrt(1.0 / m)
    walk = np.concatenate(([0.0], np.cumsum(steps)))
    return walk - (np.arange(m + 1) / m) * walk[m]


def vervaat(bridge: np.ndarray) -> np.ndarray:
    """Minimum re-rooting: rotate the bridge so its first minimum becomes the
    time origin, turning it into an excursion-like nonnegative walk."""
    m = bridge.shape[0] - 1
    k = int(np.argmin(bridge[:m]))
    out = bridge[(k + np.arange(m + 1)) % m] - bridge[k]
    out[0] = 0.0
    out[m] = 0.0
    return out


def sample_excursion(m: int, seed) -> DiscretizedExcursion:
    """Grid approximation of the normalized excursion: bridge plus minimum
    re-rooting; deterministic given seed."""
    if m < 2:
        raise ValueError("m must be at least 2")
    rng = as_generator(seed)
    exc = DiscretizedExcursion(vervaat(sample_bridge(m, rng)))
    exc.validate()
    return exc


def sample_bridge_sequential(m: int, rng: np.random.Generator) -> np.ndarray:
    """Second, independent bridge construction (the conditional one-step
    recursion); used only as a distributional oracle for sample_excursion."""
    walk = np.zeros(m + 1)
    for k in range(1, m):
        remaining = m - k
        mean = walk[k - 1] * remaining / (remaining + 1)
        var = (1.0 / m) * remaining / (remaining + 1)
        walk[k] = mean + rng.standard_normal() * np.sqrt(var)
    return walk


def tree_distance(exc: DiscretizedExcursion, i: int, j: int) -> float:
    """Distance in the tree coded by the excursion: e_i + e_j minus twice the
    running minimum between them; O(1) after preprocessing."""
    m = exc.m
    if not (0 <= i <= m and 0 <= j <= m):
        raise ValueError("grid index out of range")
    lo, hi = (i, j) if i <= j else (j, i)
    table, logt = exc.rmq()
    return float(exc.values[i] + exc.values[j] - 2.0 * range_min(table, logt, lo, hi))


@dataclass
class SnakeGrid:
    """Excursion plus tree-indexed Gaussian labels on the grid."""

    excursion: DiscretizedExcursion
    Z: np.ndarray
    _rmq2: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def m(self) -> int:
        return self.excursion.m

    @property
    def rho_star(self) -> int:
        """Representative with minimal label, smallest index on ties."""
        return int(np.argmin(self.Z[:self.m]))

    @property
    def z_star(self) -> float:
        return float(self.Z[self.rho_star])

    def rep(self, i: int) -> int:
        """Canonical representative of grid index i (collapses m onto 0)."""
        return int(i) % self.m

    def rmq2(self):
        """Range-minimum table over the doubled label array, for cyclic
        interval minima."""
        if self._rmq2 is None:
            z = self.Z[:self.m]
            self._rmq2 = sparse_min_table(np.concatenate([z, z]))
        return self._rmq2

    def validate(self) -> None:
        self.excursion.validate()
        if self.Z.shape[0] != self.m + 1:
            raise ValueError("one label per grid point required")
        if self.Z[0] != 0.0 or self.Z[self.m] != 0.0:
            raise ValueError("labels must vanish at the contour origin")


def build_snake(exc: DiscretizedExcursion, seed) -> SnakeGrid:
    """Gaussian labels along the excursion's tree: independent centered
    increments with variance equal to branch length, read back along the
    contour. Equivalent grid times (zero tree distance) share their label."""
    rng = as_generator(seed)
    normals = rng.standard_normal(exc.m)
    Z = np.asarray(kernels.snake_labels(exc.values, normals))
    return SnakeGrid(excursion=exc, Z=Z)


def sample_snake(m: int, seed) -> SnakeGrid:
    """Excursion and labels from one seed (split into two streams)."""
    rng = as_generator(seed)
    exc = sample_excursion(m, rng)
    return build_snake(exc, rng)


def d_zero(s: SnakeGrid, i: int, j: int) -> float:
    """One-step label functional: Z_i + Z_j - 2 max(cyclic interval minima on
    the two sides). An upper bound for the map distance."""
    m = s.m
    i = s.rep(i)
    j = s.rep(j)
    if i == j:
        return 0.0
    table, logt = s.rmq2()
    fwd = range_min(table, logt, i, j if j >= i else j + m)
    bwd = range_min(table, logt, j, i if i >= j else i + m)
    return float(s.Z[i] + s.Z[j] - 2.0 * max(float(fwd), float(bwd)))


@dataclass(frozen=True)
class MetricField:
    """Single-source distances over representatives with predecessor chain."""

    source: int
    D: np.ndarray
    pred: np.ndarray

    def validate(self) -> None:
        if self.D[self.source] != 0.0:
            raise ValueError("distance to the source must be zero")
        if not np.all(np.isfinite(self.D)) or float(self.D.min()) < 0.0:
            raise ValueError("distances must be finite and nonnegative")

    def chain_to_source(self, j: int) -> list[int]:
        path = [int(j)]
        while path[-1] != self.source:
            path.append(int(self.pred[path[-1]]))
        return path


def metric_field(s: SnakeGrid, source: int) -> MetricField:
    """Exact chain infimum at grid resolution: single-source shortest path
    over the implicit complete graph on representatives weighted by the
    one-step functional (O(1) evaluations after preprocessing, O(m^2) total,
    O(m) memory)."""
    source = s.rep(source)
    table, logt = s.rmq2()
    D, pred = kernels.dijkstra_dzero(s.Z[:s.m], table, logt, source, True)
    return MetricField(source=source, D=np.asarray(D), pred=np.asarray(pred))


def brute_force_field(s: SnakeGrid, source: int) -> np.ndarray:
    """All-pairs relaxation to a fixed point (the oracle for metric_field);
    O(m^3) per sweep, so keep m small."""
    m = s.m
    idx = np.arange(m)
    table, logt = s.rmq2()
    fwd_hi = np.where(idx[None, :] >= idx[:, None], idx[None, :], idx[None, :] + m)
    min_fwd = range_min(table, logt, np.broadcast_to(idx[:, None], (m, m)), fwd_hi)
    weight = s.Z[:m, None] + s.Z[None, :m] - 2.0 * np.maximum(min_fwd, min_fwd.T)
    np.fill_diagonal(weight, 0.0)
    dist = weight.copy()
    while True:
        trial = np.min(dist[:, :, None] + dist[None, :, :], axis=1)
        new = np.minimum(dist, trial)
        if np.array_equal(new, dist):
            break
        dist = new
    return dist[s.rep(source)]


def simple_geodesic(s: SnakeGrid, t_index: int) -> np.ndarray:
    """Grid simple geodesic: scanning clockwise from t (wrapping through the
    contour origin), record every index whose label is a new running
    minimum, stopping at the label minimizer. Consecutive one-step distances
    telescope to Z_t - Z_*."""
    m = s.m
    t = s.rep(t_index)
    z = s.Z[:m]
    idx = (t + np.arange(m)) % m
    zz = z[idx]
    running = np.minimum.accumulate(zz)
    is_record = zz <= np.concatenate(([np.inf], running[:-1]))
    stop = int(np.flatnonzero(idx == s.rho_star)[0])
    keep = is_record[:stop + 1]
    return idx[:stop + 1][keep]


@dataclass(frozen=True)
class BallVolumeCurve:
    """Fraction of grid time within distance r of the source, as a step
    function of r (one single-source field gives the whole curve)."""

    source: int
    sorted_D: np.ndarray

    @property
    def radius(self) -> float:
        return float(self.sorted_D[-1])

    def volume(self, r) -> np.ndarray | float:
        counts = np.searchsorted(self.sorted_D, r, side="right")
        return counts / self.sorted_D.shape[0]

    def fit_window(self, lo_frac: float = 0.05, hi_frac: float = 0.3):
        """(log r, log volume) points with r in [lo_frac, hi_frac] * radius."""
        r = self.sorted_D
        lo = lo_frac * self.radius
        hi = hi_frac * self.radius
        mask = (r >= lo) & (r <= hi) & (r > 0)
        vols = (np.arange(r.shape[0]) + 1) / r.shape[0]
        return np.log(r[mask]), np.log(vols[mask])


def ball_volume_curve(s: SnakeGrid, field: MetricField) -> BallVolumeCurve:
    return BallVolumeCurve(source=field.source, sorted_D=np.sort(field.D))


def sample_two_point(m: int, seed) -> float:
    """One continuum two-point distance: a fresh snake and two independent
    uniform grid points."""
    rng = as_generator(seed)
    s = sample_snake(m, rng)
    u1, u2 = (int(x) for x in rng.integers(m, size=2))
    return float(metric_field(s, u1).D[u2])
