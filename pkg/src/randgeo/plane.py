"""Brownian plane constructions.

A two-sided radial process (norms of two independent 3-d Brownian paths)
codes the infinite tree on a truncated window, tree-indexed Gaussian labels
give the truncated metric, and the hull-volume process is simulated through
the 3/2-stable continuous-state branching process conditioned to die at
time zero, with closed forms (Laplace transform of hull volumes, the
branching ODE flow) serving as oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels, range_min, sparse_min_table
from ._rng import as_generator, stream

# branching mechanism constant: psi(u) = PSI_COEFF * u**1.5
PSI_COEFF = math.sqrt(8.0 / 3.0)

# jump measure of the 3/2-stable branching process: JUMP_COEFF * x**-2.5 dx
JUMP_COEFF = math.sqrt(3.0 / (2.0 * math.pi))


# ---------------------------------------------------------------------------
# Window sketch of the plane
# ---------------------------------------------------------------------------

@dataclass
class PlaneSketch:
    """Radial process and labels on the grid of [-T, T].

    Index k in [0, 2m] is time (k - m) * T / m; index m is the origin.
    """

    T: float
    Y: np.ndarray
    Z: np.ndarray
    _rmq: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def m(self) -> int:
        return (self.Y.shape[0] - 1) // 2

    @property
    def origin(self) -> int:
        return self.m

    def times(self) -> np.ndarray:
        m = self.m
        return (np.arange(2 * m + 1) - m) * (self.T / m)

    def rmq(self):
        if self._rmq is None:
            self._rmq = sparse_min_table(self.Z)
        return self._rmq

    def validate(self) -> None:
        if self.Y[self.origin] != 0.0 or self.Z[self.origin] != 0.0:
            raise ValueError("radial process and labels must vanish at the origin")
        if float(self.Y.min()) < 0.0:
            raise ValueError("radial process must be nonnegative")


def _bessel3_path(m: int, dt: float, rng: np.random.Generator) -> np.ndarray:
    """Norm of a 3-d Brownian path on the grid (exact in law at grid points);
    entry 0 is the origin."""
    steps = rng.standard_normal((m, 3)) * math.sqrt(dt)
    path = np.vstack([np.zeros(3), np.cumsum(steps, axis=0)])
    return np.linalg.norm(path, axis=1)


def interval_min_y(sk: PlaneSketch, i: int, j: int) -> float:
    """Two-sided interval minimum of Y: the plain interval when i and j sit
    on the same side of the origin, otherwise the union of the two outer
    window segments (the window edges stand in for the far side)."""
    i, j = int(i), int(j)
    lo, hi = min(i, j), max(i, j)
    o = sk.origin
    if lo >= o or hi <= o:
        return float(sk.Y[lo:hi + 1].min())
    left = float(sk.Y[:lo + 1].min())
    right = float(sk.Y[hi:].min())
    return min(left, right)


def sample_plane_sketch(T: float, m: int, seed) -> PlaneSketch:
    """Radial process from two independent 3-d Brownian norms and labels with
    conditional covariance equal to the two-sided interval minimum of Y.

    The labels are built by one stack pass over the walk that goes from the
    origin out to +T and then continues from -T back to the origin, which
    realizes exactly the two-sided interval convention above.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if m < 2:
        raise ValueError("m must be at least 2")
    rng = as_generator(seed)
    dt = T / m
    right = _bessel3_path(m, dt, rng)
    left = _bessel3_path(m, dt, rng)
    Y = np.concatenate([left[::-1][:m], [0.0], right[1:]])
    walk_order = np.concatenate([np.arange(m, 2 * m + 1), np.arange(0, m)])
    normals = rng.standard_normal(2 * m)
    walk_z = np.asarray(kernels.snake_labels(Y[walk_order], normals))
    Z = np.empty(2 * m + 1)
    Z[walk_order] = walk_z
    sk = PlaneSketch(T=float(T), Y=Y, Z=Z)
    sk.validate()
    return sk


@dataclass(frozen=True)
class TruncatedField:
    """Single-source truncated distances over a window (an upper bound on
    the plane distance: chains cannot leave the window)."""

    source: int
    window: tuple[int, int]
    D: np.ndarray
    pred: np.ndarray


def truncated_distance_field(sk: PlaneSketch, source: int,
                             window: tuple[int, int] | None = None) -> TruncatedField:
    """Chain infimum of the one-step functional over window representatives.

    The one-step functional on the line uses the plain interval minimum (no
    cyclic second side). Restricting the window shrinks the chain set, so a
    larger window never increases distances.
    """
    n = sk.Z.shape[0]
    lo, hi = (0, n - 1) if window is None else (int(window[0]), int(window[1]))
    if not (0 <= lo <= source <= hi <= n - 1):
        raise ValueError("source must lie inside the window")
    z = sk.Z[lo:hi + 1]
    table, logt = sparse_min_table(z)
    D, pred = kernels.dijkstra_dzero(z, table, logt, source - lo, False)
    return TruncatedField(source=source, window=(lo, hi), D=np.asarray(D),
                          pred=np.asarray(pred))


def truncated_d_infinity(sk: PlaneSketch, i: int, j: int) -> float:
    """Truncated distance between two grid indices (upper bound semantics)."""
    field_ = truncated_distance_field(sk, int(i))
    return float(field_.D[int(j)])


def d_zero_infinity(sk: PlaneSketch, i: int, j: int) -> float:
    """One-step functional on the line: Z_i + Z_j - 2 min over [i, j]."""
    i, j = int(i), int(j)
    if i == j:
        return 0.0
    lo, hi = min(i, j), max(i, j)
    table, logt = sk.rmq()
    return float(sk.Z[i] + sk.Z[j] - 2.0 * range_min(table, logt, lo, hi))


# ---------------------------------------------------------------------------
# Closed forms: branching flow and hull Laplace transform
# ---------------------------------------------------------------------------

def psi(u):
    """Branching mechanism sqrt(8/3) u^(3/2)."""
    u = np.asarray(u, dtype=np.float64)
    out = PSI_COEFF * u ** 1.5
    return out if out.shape else float(out)


def csbp_u(t, lam):
    """Flow u_t(lam) of du/dt = -psi(u), u_0 = lam, in closed form:
    (lam^(-1/2) + sqrt(2/3) t)^(-2)."""
    t = np.asarray(t, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    if np.any(lam <= 0):
        raise ValueError("lam must be positive")
    out = (lam ** -0.5 + math.sqrt(2.0 / 3.0) * t) ** -2.0
    return out if out.shape else float(out)


def hull_laplace(lam, r):
    """Laplace transform of the hull volume at radius r:
    3^(3/2) cosh((2 lam)^(1/4) r) / (cosh^2((2 lam)^(1/4) r) + 2)^(3/2).

    Evaluated in log space so large arguments do not overflow.
    """
    lam = np.asarray(lam, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if np.any(lam < 0) or np.any(r < 0):
        raise ValueError("lam and r must be nonnegative")
    h = (2.0 * lam) ** 0.25 * r
    log_cosh = np.abs(h) + np.log1p(np.exp(-2.0 * np.abs(h))) - math.log(2.0)
    log_den = 2.0 * log_cosh + np.log1p(2.0 * np.exp(-2.0 * log_cosh))
    out = np.exp(1.5 * math.log(3.0) + log_cosh - 1.5 * log_den)
    return out if out.shape else float(out)


def expected_hull_volume(r, step: float = 1e-6):
    """Mean hull volume from the Laplace transform: the one-sided difference
    quotient -(F(step) - F(0)) / step at lam -> 0."""
    r = np.asarray(r, dtype=np.float64)
    out = -(np.asarray(hull_laplace(step, r)) - 1.0) / step
    return out if out.shape else float(out)


def xi_density(x):
    """Density of the volume mark: (2 pi)^(-1/2) x^(-5/2) exp(-1/(2x))."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = (2.0 * math.pi) ** -0.5 * x[pos] ** -2.5 * np.exp(-0.5 / x[pos])
    return out if out.shape else float(out)


def sample_xi(rng_or_seed, size=None):
    """Exact sampler of the volume mark: the reciprocal of a Gamma(3/2,
    rate 1/2) variable has exactly the stated density (change of variables
    x -> 1/x on the Gamma density)."""
    rng = as_generator(rng_or_seed)
    return 1.0 / rng.gamma(shape=1.5, scale=2.0, size=size)


def extinction_time_cdf(t, x0: float):
    """P(extinction <= t) = exp(-(3/2) x0 / t^2) for the branching process
    started at x0 (large-lam limit of the flow); the dynamics oracle for the
    hull simulator."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.5 * x0 / t[pos] ** 2)
    return out if out.shape else float(out)


# ---------------------------------------------------------------------------
# Hull process simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HullFidelity:
    """Knobs and diagnostics of the hull-process approximation, reported
    alongside every run."""

    x0: float
    dt_coarse: float
    dt_fine: float
    x_switch: float
    kappa: float
    step_budget: int
    n_requested: int
    n_extinct: int
    n_rejected: int
    small_jump_compensation: bool

    def as_dict(self) -> dict:
        return {
            "x0": self.x0, "dt_coarse": self.dt_coarse, "dt_fine": self.dt_fine,
            "x_switch": self.x_switch, "kappa": self.kappa,
            "step_budget": self.step_budget, "n_requested": self.n_requested,
            "n_extinct": self.n_extinct, "n_rejected": self.n_rejected,
            "small_jump_compensation": self.small_jump_compensation,
        }


class _CsbpState:
    """Lockstep simulation of the 3/2-stable branching process from x0 until
    extinction: Euler steps of the time change of the spectrally positive
    stable driver. Per step of length dt the driver runs for tau = X dt,
    decomposed into explicit jumps above the cutoff kappa tau^(2/3)
    (Poisson counts, Pareto sizes), a Gaussian stand-in for the compensated
    small jumps, and the compensating drift. Steps are coarse until X first
    drops below x_switch, fine afterwards.

    The consumed random stream depends only on the constructor arguments,
    so a second instance with an identical generator replays the same paths
    (the recording hooks draw nothing from this stream).
    """

    def __init__(self, n, x0, dt_coarse, dt_fine, x_switch, kappa, rng):
        self.kwargs = dict(x0=x0, dt_coarse=dt_coarse, dt_fine=dt_fine,
                           x_switch=x_switch, kappa=kappa)
        self.n = n
        self.dt_coarse = dt_coarse
        self.dt_fine = dt_fine
        self.x_switch = x_switch
        self.kappa = kappa
        self.rng = rng
        self.X = np.full(n, float(x0))
        self.t = np.zeros(n)
        self.alive = np.ones(n, dtype=bool)
        self.T_ext = np.full(n, np.nan)

    def step(self, jump_hook=None, mass_hook=None) -> bool:
        """Advance every live path by one step. jump_hook(owner, t_jump,
        sizes) sees the recorded jumps; mass_hook(owner, t_after, missed)
        sees the per-step mean of the sub-cutoff marked mass. Returns False
        once every path is extinct."""
        idx = np.flatnonzero(self.alive)
        if idx.size == 0:
            return False
        rng = self.rng
        x = self.X[idx]
        # fine steps below x_switch (where the recording window lives),
        # coarse steps stretching with X above it, so very long-lived paths
        # (the extinction time has a heavy tail) do not dominate the run;
        # far from extinction only the extinction time matters and it is
        # validated against the closed-form law
        dt = np.where(x <= self.x_switch, self.dt_fine,
                      self.dt_coarse * np.clip(x / self.x_switch, 1.0, 100.0))
        tau = x * dt
        cut = self.kappa * tau ** (2.0 / 3.0)
        rate = JUMP_COEFF * (2.0 / 3.0) * tau * cut ** -1.5
        counts = rng.poisson(rate)
        gauss = rng.standard_normal(idx.size)
        total = int(counts.sum())
        jump_sum = np.zeros(idx.size)
        if total:
            owner_local = np.repeat(np.arange(idx.size), counts)
            sizes = np.repeat(cut, counts) * rng.random(total) ** (-2.0 / 3.0)
            np.add.at(jump_sum, owner_local, sizes)
            if jump_hook is not None:
                jump_hook(idx[owner_local],
                          self.t[idx[owner_local]] + dt[owner_local], sizes)
        sigma = np.sqrt(2.0 * JUMP_COEFF * tau * np.sqrt(cut))
        drift = 2.0 * JUMP_COEFF * tau / np.sqrt(cut)
        x_new = x + jump_sum + sigma * gauss - drift
        self.t[idx] += dt
        if mass_hook is not None:
            mass_hook(idx, self.t[idx], 2.0 * JUMP_COEFF * np.sqrt(cut) * tau)
        died = x_new <= 0.0
        if np.any(died):
            dead = idx[died]
            frac = x[died] / (x[died] - x_new[died])
            self.T_ext[dead] = self.t[dead] - dt[died] * (1.0 - frac)
            self.alive[dead] = False
            x_new = np.where(died, 0.0, x_new)
        self.X[idx] = x_new
        return bool(self.alive.any())


def _default_fidelity_args(overrides: dict) -> dict:
    args = dict(x0=100.0, dt_coarse=0.02, dt_fine=5e-4, x_switch=30.0, kappa=0.4)
    args.update(overrides)
    return args


def _seed_path(seed) -> tuple:
    if isinstance(seed, tuple):
        return seed
    return (seed,)


def simulate_hull_batch(n_paths: int, seed, r_values,
                        step_budget: int = 300_000,
                        r_margin: float = 0.25,
                        compensate_small_jumps: bool = True,
                        mark_mode: str = "sampled",
                        **fidelity_overrides):
    """Hull volumes W_r for a batch of paths at the requested radii.

    Two passes over one replayed random stream: the first locates the
    extinction times, the second records the marked jumps inside the window
    before extinction and accumulates xi * jump^2 per requested radius,
    plus the mean of the sub-cutoff jump mass (reported in the manifest).
    Paths not extinct within the step budget, or extinct too early for the
    window, are dropped and counted in the manifest.

    mark_mode "sampled" draws one mark per jump (the full law of W);
    "mean" replaces every mark by its exact mean 1, a variance-reduced and
    still unbiased estimator of E[W_r] (the marks have infinite variance,
    so plain averages converge slowly).

    Returns (W, fidelity) with W of shape (n_kept, len(r_values)).
    """
    if mark_mode not in ("sampled", "mean"):
        raise ValueError("mark_mode must be 'sampled' or 'mean'")
    r_values = np.asarray(r_values, dtype=np.float64)
    r_max = float(r_values.max())
    fid_args = _default_fidelity_args(fidelity_overrides)

    state = _CsbpState(n_paths, rng=stream(*_seed_path(seed), 1), **fid_args)
    steps = 0
    while state.step() and steps < step_budget:
        steps += 1
    t_ext = state.T_ext.copy()
    ok = np.isfinite(t_ext) & (t_ext > r_max + r_margin)
    n_extinct = int(np.isfinite(t_ext).sum())

    kept = np.flatnonzero(ok)
    remap = np.full(n_paths, -1, dtype=np.int64)
    remap[kept] = np.arange(kept.shape[0])
    W = np.zeros((kept.shape[0], r_values.shape[0]))
    rng_xi = stream(*_seed_path(seed), 2)
    n_recorded = 0

    def jump_hook(owner, t_jump, sizes):
        nonlocal n_recorded
        u = t_jump - t_ext[owner]
        keep = ok[owner] & (u >= -(r_max + r_margin)) & (u <= 0.0)
        if not np.any(keep):
            return
        ow = remap[owner[keep]]
        uu = u[keep]
        contrib = sizes[keep] ** 2
        if mark_mode == "sampled":
            contrib = sample_xi(rng_xi, size=int(keep.sum())) * contrib
        n_recorded += contrib.shape[0]
        for col, rv in enumerate(r_values):
            sel = uu >= -rv
            np.add.at(W[:, col], ow[sel], contrib[sel])

    def mass_hook(owner, t_after, missed):
        if not compensate_small_jumps:
            return
        u = t_after - t_ext[owner]
        keep = ok[owner] & (u <= 0.0)
        if not np.any(keep):
            return
        ow = remap[owner[keep]]
        uu = u[keep]
        mm = missed[keep]
        for col, rv in enumerate(r_values):
            sel = uu >= -rv
            np.add.at(W[:, col], ow[sel], mm[sel])

    state2 = _CsbpState(n_paths, rng=stream(*_seed_path(seed), 1), **fid_args)
    steps = 0
    while state2.step(jump_hook=jump_hook, mass_hook=mass_hook) and steps < step_budget:
        steps += 1

    fidelity = HullFidelity(
        x0=fid_args["x0"], dt_coarse=fid_args["dt_coarse"],
        dt_fine=fid_args["dt_fine"], x_switch=fid_args["x_switch"],
        kappa=fid_args["kappa"], step_budget=step_budget,
        n_requested=n_paths, n_extinct=n_extinct,
        n_rejected=n_paths - kept.shape[0],
        small_jump_compensation=compensate_small_jumps)
    return W, fidelity


@dataclass(frozen=True)
class HullProcessPath:
    """One boundary-length path near extinction: marked jumps plus the
    running hull volume they generate.

    times[k] <= 0 is the jump time before extinction, jumps[k] its size and
    xi[k] its mark; comp[j] is the accumulated sub-cutoff mean mass at
    comp_r[j]. W(r) sums xi * jump^2 over times >= -r plus compensation.
    """

    times: np.ndarray
    jumps: np.ndarray
    xi: np.ndarray
    comp: np.ndarray
    comp_r: np.ndarray
    fidelity: HullFidelity

    def W(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=np.float64))
        out = np.empty(r.shape[0])
        for i, rv in enumerate(r):
            sel = self.times >= -rv
            out[i] = float(self.xi[sel] @ self.jumps[sel] ** 2)
        out += np.interp(r, self.comp_r, self.comp)
        return out if out.shape[0] > 1 else float(out[0])


def simulate_hull_process(r_max: float, seed, n_radii: int = 129,
                          step_budget: int = 300_000,
                          attempt_budget: int = 64,
                          r_margin: float = 0.25,
                          **fidelity_overrides) -> HullProcessPath:
    """One path of the jump-decorated hull process on [0, r_max], with the
    explicit jump decoration retained."""
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    fid_args = _default_fidelity_args(fidelity_overrides)
    r_grid = np.linspace(0.0, r_max, n_radii)

    n_rejected = 0
    for attempt in range(attempt_budget):
        state = _CsbpState(1, rng=stream(*_seed_path(seed), 1, attempt), **fid_args)
        steps = 0
        while state.step() and steps < step_budget:
            steps += 1
        t_ext = state.T_ext.copy()
        if np.isfinite(t_ext[0]) and t_ext[0] > r_max + r_margin:
            break
        n_rejected += 1
    else:
        raise RuntimeError("hull process rejection budget exceeded")

    us: list[np.ndarray] = []
    sizes: list[np.ndarray] = []
    comp = np.zeros(r_grid.shape[0])

    def jump_hook(owner, t_jump, size):
        u = t_jump - t_ext[owner]
        keep = (u >= -(r_max + r_margin)) & (u <= 0.0)
        if np.any(keep):
            us.append(u[keep])
            sizes.append(size[keep])

    def mass_hook(owner, t_after, missed):
        u = float(t_after[0] - t_ext[0])
        if u <= 0.0:
            comp[r_grid >= -u] += float(missed[0])

    state2 = _CsbpState(1, rng=stream(*_seed_path(seed), 1, attempt), **fid_args)
    steps = 0
    while state2.step(jump_hook=jump_hook, mass_hook=mass_hook) and steps < step_budget:
        steps += 1

    u = np.concatenate(us) if us else np.empty(0)
    size = np.concatenate(sizes) if sizes else np.empty(0)
    keep = u >= -r_max
    u, size = u[keep], size[keep]
    order = np.argsort(u)
    u, size = u[order], size[order]
    xi = sample_xi(stream(*_seed_path(seed), 2), size=size.shape[0])
    fidelity = HullFidelity(
        x0=fid_args["x0"], dt_coarse=fid_args["dt_coarse"],
        dt_fine=fid_args["dt_fine"], x_switch=fid_args["x_switch"],
        kappa=fid_args["kappa"], step_budget=step_budget, n_requested=1,
        n_extinct=1, n_rejected=n_rejected, small_jump_compensation=True)
    return HullProcessPath(times=u, jumps=size, xi=xi, comp=comp,
                           comp_r=r_grid, fidelity=fidelity)
