"""Figure rendering: one image plus one JSON fit report per invocation.

Usage:
    mapfigs --kind ball-volume --input out/ball_volume.csv \
            --image fig.png --report fit.json [--fit-lo 0.05 --fit-hi 0.3]

Kinds and their inputs (all produced by the randgeo runner):
    profile-hist        profile_*.csv            (distance, count)
    two-point-ks        --input discrete csv, --input-b continuum csv
    ball-volume         ball_volume.csv          (r, volume)
    hull-laplace        hull_laplace.csv         (lambda, r, closed_form,
                                                  monte_carlo, stderr)
    component-exponent  components_*.csv         (replica, source, r,
                                                  epsilon, count)
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import FIGURE_KINDS, __version__
from .fits import ks_two_sample, loglog_fit
from .io import ManifestError, load_input, write_report


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[Path, ...]
    image: Path
    report: Path
    fit_lo: float = 0.05
    fit_hi: float = 0.3
    require_manifest: bool = True

    def validate(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if self.kind == "two-point-ks":
            if len(self.inputs) != 2:
                raise ValueError("two-point-ks needs two inputs")
        elif len(self.inputs) != 1:
            raise ValueError(f"{self.kind} takes exactly one input")
        if not 0 <= self.fit_lo < self.fit_hi:
            raise ValueError("fit range must satisfy 0 <= lo < hi")


def _save(fig, spec: FigureSpec) -> None:
    fig.savefig(spec.image, dpi=110, metadata={"Software": None})
    plt.close(fig)


def render_profile_hist(spec: FigureSpec) -> dict:
    cols = load_input(spec.inputs[0], spec.require_manifest)
    dist = np.asarray(cols["distance"])
    count = np.asarray(cols["count"])
    total = float(count.sum())
    mean = float((dist * count).sum() / total)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(dist, count, width=0.9, color="#33658a")
    ax.set_xlabel("graph distance from base vertex")
    ax.set_ylabel("vertices")
    ax.set_title("distance profile")
    _save(fig, spec)
    return {
        "total_mass": total,
        "mean_distance": mean,
        "mode": int(dist[int(np.argmax(count))]),
        "max_distance": int(dist[count > 0][-1]),
    }


def render_two_point_ks(spec: FigureSpec) -> dict:
    a = np.asarray(load_input(spec.inputs[0], spec.require_manifest)["value"])
    b = np.asarray(load_input(spec.inputs[1], spec.require_manifest)["value"])
    ks = ks_two_sample(a, b)
    fig, ax = plt.subplots(figsize=(6, 4))
    for data, label, color in ((a, "sample A", "#33658a"), (b, "sample B", "#f26419")):
        xs = np.sort(data)
        ax.step(xs, np.arange(1, xs.shape[0] + 1) / xs.shape[0],
                where="post", label=label, color=color)
    ax.set_xlabel("rescaled two-point distance")
    ax.set_ylabel("empirical CDF")
    ax.legend()
    ax.set_title(f"two-point comparison, KS = {ks:.4f}")
    _save(fig, spec)
    return {
        "ks": ks,
        "n_a": int(a.shape[0]),
        "n_b": int(b.shape[0]),
        "mean_a": float(a.mean()),
        "mean_b": float(b.mean()),
    }


def render_ball_volume(spec: FigureSpec) -> dict:
    cols = load_input(spec.inputs[0], spec.require_manifest)
    r = np.asarray(cols["r"])
    vol = np.asarray(cols["volume"])
    radius = float(r[-1])
    lo, hi = spec.fit_lo * radius, spec.fit_hi * radius
    window = (r >= lo) & (r <= hi) & (r > 0) & (vol > 0)
    if int(window.sum()) < 2:
        raise ValueError("fit range leaves fewer than two points")
    fit = loglog_fit(r[window], vol[window])
    fig, ax = plt.subplots(figsize=(6, 4))
    pos = (r > 0) & (vol > 0)
    ax.loglog(r[pos], vol[pos], ".", color="#33658a", ms=3, label="ball volume")
    xs = np.array([lo, hi])
    ax.loglog(xs, np.exp(fit["intercept"]) * xs ** fit["slope"], "-",
              color="#f26419", label=f"slope {fit['slope']:.2f}")
    ax.set_xlabel("r")
    ax.set_ylabel("volume fraction")
    ax.legend()
    ax.set_title("ball volume growth")
    _save(fig, spec)
    return fit | {"fit_lo": spec.fit_lo, "fit_hi": spec.fit_hi, "radius": radius}


def render_hull_laplace(spec: FigureSpec) -> dict:
    cols = load_input(spec.inputs[0], spec.require_manifest)
    lam = np.asarray(cols["lambda"])
    r = np.asarray(cols["r"])
    closed = np.asarray(cols["closed_form"])
    mc = np.asarray(cols["monte_carlo"])
    err = np.asarray(cols["stderr"])
    rel = np.abs(mc - closed) / closed
    fig, ax = plt.subplots(figsize=(6, 4))
    for rv in np.unique(r):
        sel = r == rv
        order = np.argsort(lam[sel])
        ax.plot(lam[sel][order], closed[sel][order], "-", label=f"closed form r={rv:g}")
        ax.errorbar(lam[sel][order], mc[sel][order], yerr=2 * err[sel][order],
                    fmt="o", ms=4, capsize=3, label=f"Monte Carlo r={rv:g}")
    ax.set_xlabel("lambda")
    ax.set_ylabel("E[exp(-lambda W_r)]")
    ax.legend(fontsize=8)
    ax.set_title("hull volume Laplace transform")
    _save(fig, spec)
    return {
        "max_rel_err": float(rel.max()),
        "mean_rel_err": float(rel.mean()),
        "n_points": int(lam.shape[0]),
    }


def render_component_exponent(spec: FigureSpec) -> dict:
    cols = load_input(spec.inputs[0], spec.require_manifest)
    eps = np.asarray(cols["epsilon"])
    count = np.asarray(cols["count"])
    levels = np.unique(eps)
    means = np.array([count[eps == e].mean() for e in levels])
    fit = loglog_fit(levels, means)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(levels, means, "o", color="#33658a", label="mean count")
    ax.loglog(levels, np.exp(fit["intercept"]) * levels ** fit["slope"], "-",
              color="#f26419", label=f"slope {fit['slope']:.2f}")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("components beyond r + epsilon")
    ax.legend()
    ax.set_title("complement component counts")
    _save(fig, spec)
    return fit | {"epsilons": levels.tolist(), "mean_counts": means.tolist()}


RENDERERS = {
    "profile-hist": render_profile_hist,
    "two-point-ks": render_two_point_ks,
    "ball-volume": render_ball_volume,
    "hull-laplace": render_hull_laplace,
    "component-exponent": render_component_exponent,
}


def render(spec: FigureSpec) -> dict:
    """Render the figure and write the JSON fit report; returns the report."""
    spec.validate()
    report = RENDERERS[spec.kind](spec)
    report = {"kind": spec.kind, "inputs": [p.name for p in spec.inputs],
              "mapfigs_version": __version__} | report
    write_report(spec.report, report)
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mapfigs", description=__doc__)
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--input", required=True, type=Path)
    parser.add_argument("--input-b", type=Path, default=None,
                        help="second input (two-point-ks only)")
    parser.add_argument("--image", required=True, type=Path)
    parser.add_argument("--report", required=True, type=Path)
    parser.add_argument("--fit-lo", type=float, default=0.05)
    parser.add_argument("--fit-hi", type=float, default=0.3)
    parser.add_argument("--no-manifest-check", action="store_true",
                        help="skip manifest validation (ad hoc inputs)")
    args = parser.parse_args(argv)
    inputs = (args.input,) if args.input_b is None else (args.input, args.input_b)
    spec = FigureSpec(kind=args.kind, inputs=inputs, image=args.image,
                      report=args.report, fit_lo=args.fit_lo, fit_hi=args.fit_hi,
                      require_manifest=not args.no_manifest_check)
    try:
        render(spec)
    except (ManifestError, FileNotFoundError, ValueError) as exc:
        print(f"mapfigs: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
