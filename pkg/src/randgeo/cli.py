"""Command-line experiment runner.

Every subcommand is a pure function of its configuration and seed: a root
seed is split into per-replica streams, outputs are plain CSV files plus a
JSON manifest (config echo, package version, SHA-256 of every file), and
rerunning a command with the same flags reproduces the files byte for byte.

Exit codes: 0 success, 2 configuration error, 3 contract violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, cvs, maps, plane, snake, trees
from ._rng import stream

CONFIG_ERROR = 2
CONTRACT_VIOLATION = 3


class ConfigError(ValueError):
    pass


class ContractViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated run configuration; the manifest echoes it verbatim."""

    command: str
    seed: int
    replicas: int = 1
    n: int | None = None
    m: int | None = None
    grid_T: float | None = None
    rmax: float | None = None
    fidelity: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args) -> "ExperimentConfig":
        known = {"command", "seed", "replicas", "n", "m", "grid_T", "rmax"}
        values = {k: v for k, v in vars(args).items()
                  if k not in ("func", "out")}
        fidelity = {k: values.pop(k) for k in list(values)
                    if k.startswith("fidelity_")}
        base = {k: values.pop(k) for k in list(values) if k in known}
        return cls(fidelity=fidelity, extra=values, **base)

    def validate(self) -> None:
        if self.seed is None:
            raise ConfigError("--seed is required")
        for name in ("n", "m", "replicas"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ConfigError(f"--{name} must be positive")
        for name in ("grid_T", "rmax"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")

    def as_dict(self) -> dict:
        out = {"command": self.command, "seed": self.seed,
               "replicas": self.replicas}
        for name in ("n", "m", "grid_T", "rmax"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        out.update(self.fidelity)
        out.update(self.extra)
        return out


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(int(value))


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fp:
        fp.write(",".join(header) + "\n")
        for row in rows:
            fp.write(",".join(_fmt(v) for v in row) + "\n")


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def write_manifest(out: Path, command: str, config: dict) -> None:
    files = {p.name: sha256(p) for p in sorted(out.iterdir())
             if p.is_file() and p.name != "manifest.json"}
    manifest = {
        "command": command,
        "config": config,
        "version": __version__,
        "files": files,
    }
    with open(out / "manifest.json", "w") as fp:
        json.dump(manifest, fp, indent=2, sort_keys=True)
        fp.write("\n")


def _config(args) -> dict:
    # the output directory is not part of the reproducible configuration
    return ExperimentConfig.from_args(args).as_dict()


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def sample_quadrangulation(n: int, seed) -> tuple[maps.PlanarMapGraph, trees.LabeledTree]:
    """Tree, labels, shift to the minimum, encode. Used for every large-n
    map workflow (the exact rejection sampler is impractical beyond small n)."""
    rng = stream(seed) if not isinstance(seed, np.random.Generator) else seed
    tree = trees.sample_plane_tree(n, rng)
    lt = trees.attach_labels(tree, trees.LabelVariant.FREE_ROOT_ZERO, rng)
    wl = trees.reroot_shift(lt)
    return cvs.encode(wl), wl


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_oracle(args) -> None:
    out = _outdir(args)
    if args.n > trees.MAX_ENUM_EDGES:
        raise ConfigError(f"oracle enumeration supports n <= {trees.MAX_ENUM_EDGES}")
    report: dict = {"enumeration": {}, "encode_image": {}, "closed_form": {}}
    for k in range(1, args.n + 1):
        pool = trees.enumerate_well_labeled(k)
        codes = {maps.canonical_code(cvs.encode(lt)) for lt in pool}
        report["enumeration"][str(k)] = len(pool)
        report["encode_image"][str(k)] = len(codes)
        report["closed_form"][str(k)] = trees.count_well_labeled(k)
    worst = 0.0
    for rep in range(args.replicas):
        s = snake.sample_snake(args.m, stream(args.seed, rep))
        src = int(stream(args.seed, rep, 1).integers(args.m))
        field = snake.metric_field(s, src)
        brute = snake.brute_force_field(s, src)
        worst = max(worst, float(np.abs(field.D - brute).max()))
    report["chain_infimum_max_abs_diff"] = worst
    report["chain_infimum_grid"] = {"m": args.m, "replicas": args.replicas}
    with open(out / "oracle.json", "w") as fp:
        json.dump(report, fp, indent=2, sort_keys=True)
        fp.write("\n")
    write_manifest(out, "oracle", _config(args))


def cmd_sample_quad(args) -> None:
    out = _outdir(args)
    for rep in range(args.replicas):
        g, wl = sample_quadrangulation(args.n, stream(args.seed, rep))
        check = cvs.verify_distance_identity(wl, g)
        if not check:
            raise ContractViolation(
                f"distance identity failed at replica {rep}, vertex {check.witness}")
        if args.write_maps:
            maps.dump_map(g, out / f"map_{rep:04d}.txt")
        if args.write_distances:
            maps.dump_distances(out / f"distances_{rep:04d}.csv",
                                g.bfs_distances(g.pointed))
        profile = maps.distance_profile(g, g.pointed)
        write_csv(out / f"profile_{rep:04d}.csv", ["distance", "count"],
                  enumerate(profile.counts.tolist()))
        if args.with_components:
            rng = stream(args.seed, rep, 1)
            rows = []
            for src_ix in range(args.component_sources):
                u = int(rng.integers(g.n_vertices))
                dist = g.bfs_distances(u)
                r = max(2, int(round(0.7 * int(dist.max()))))
                maxd = maps.complement_component_maxdist(g, u, r)
                for eps in (5, 7, 10, 14):
                    rows.append((rep, src_ix, r, eps, int((maxd > r + eps).sum())))
            write_csv(out / f"components_{rep:04d}.csv",
                      ["replica", "source", "r", "epsilon", "count"], rows)
    write_manifest(out, "sample-quad", _config(args))


def _two_point_replica(task):
    kind, size, seed, rep = task
    rng = stream(seed, rep)
    if kind == "discrete":
        g, _ = sample_quadrangulation(size, rng)
        v1, v2 = (int(x) for x in rng.integers(g.n_vertices, size=2))
        return maps.TWO_POINT_SCALE * size ** -0.25 * int(g.bfs_distances(v1)[v2])
    return snake.sample_two_point(size, rng)


def cmd_two_point(args) -> None:
    out = _outdir(args)
    size = args.n if args.kind == "discrete" else args.m
    tasks = [(args.kind, size, args.seed, rep) for rep in range(args.replicas)]
    if args.workers > 1:
        # replicas own disjoint streams, so the outcome is identical to the
        # sequential run regardless of scheduling
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            values = list(pool.map(_two_point_replica, tasks, chunksize=16))
    else:
        values = [_two_point_replica(t) for t in tasks]
    write_csv(out / f"twopoint_{args.kind}.csv", ["replica", "value"],
              enumerate(values))
    write_manifest(out, "two-point", _config(args) | {"size": size})


def cmd_brownian_map(args) -> None:
    out = _outdir(args)
    rng = stream(args.seed)
    s = snake.sample_snake(args.m, rng)
    source = s.rho_star if args.source == "rho_star" else int(rng.integers(args.m))
    field = snake.metric_field(s, source)
    field.validate()
    m = args.m
    write_csv(out / "snake.csv", ["index", "e", "Z", "representative"],
              ((i, s.excursion.values[i], s.Z[i], s.rep(i)) for i in range(m + 1)))
    write_csv(out / "metric.csv", ["representative", "D"],
              enumerate(field.D.tolist()))
    curve = snake.ball_volume_curve(s, field)
    radii = np.linspace(0.0, curve.radius, 201)
    write_csv(out / "ball_volume.csv", ["r", "volume"],
              zip(radii.tolist(), np.atleast_1d(curve.volume(radii)).tolist()))
    geo = snake.simple_geodesic(s, int(rng.integers(args.m)))
    write_csv(out / "geodesic.csv", ["step", "representative", "D_to_base"],
              ((k, int(v), float(s.Z[v] - s.z_star)) for k, v in enumerate(geo)))
    write_manifest(out, "brownian-map", _config(args))


def cmd_brownian_plane(args) -> None:
    out = _outdir(args)
    sk = plane.sample_plane_sketch(args.grid_T, args.m, stream(args.seed, 0))
    write_csv(out / "sketch.csv", ["index", "t", "Y", "Z"],
              ((i, t, y, z) for i, (t, y, z)
               in enumerate(zip(sk.times().tolist(), sk.Y.tolist(), sk.Z.tolist()))))
    path = plane.simulate_hull_process(
        args.rmax, (args.seed, 1), x0=args.fidelity_x0,
        dt_fine=args.fidelity_dt)
    r_grid = np.linspace(0.0, args.rmax, 101)
    write_csv(out / "hull_path.csv", ["r", "W"],
              zip(r_grid.tolist(), np.atleast_1d(path.W(r_grid)).tolist()))
    lam_grid = [0.25, 0.5, 1.0]
    r_values = sorted({args.rmax * f for f in (0.5, 1.0)})
    W, fidelity = plane.simulate_hull_batch(
        args.replicas, (args.seed, 2), r_values,
        x0=args.fidelity_x0, dt_fine=args.fidelity_dt)
    rows = []
    for j, r in enumerate(r_values):
        for lam in lam_grid:
            samples = np.exp(-lam * W[:, j])
            stderr = (float(samples.std(ddof=1) / np.sqrt(samples.shape[0]))
                      if samples.shape[0] > 1 else 0.0)
            rows.append((lam, r, plane.hull_laplace(lam, r),
                         float(samples.mean()), stderr))
    write_csv(out / "hull_laplace.csv",
              ["lambda", "r", "closed_form", "monte_carlo", "stderr"], rows)
    with open(out / "fidelity.json", "w") as fp:
        json.dump(fidelity.as_dict() | {"single_path": path.fidelity.as_dict()},
                  fp, indent=2, sort_keys=True)
        fp.write("\n")
    write_manifest(out, "brownian-plane", _config(args))


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randgeo",
        description="Seeded experiments on random quadrangulations, the "
                    "discretized Brownian map and the Brownian plane.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n=False, m=False, grid=False):
        p.add_argument("--seed", type=int, required=True,
                       help="root seed; replicas use split streams")
        p.add_argument("--out", type=str, required=True, help="output directory")
        p.add_argument("--replicas", type=int, default=1)
        if n:
            p.add_argument("--n", type=int, default=1000, help="edge/face count")
        if m:
            p.add_argument("--m", type=int, default=3000, help="grid size")
        if grid:
            p.add_argument("--grid-T", dest="grid_T", type=float, default=1.0,
                           help="window half width")
            p.add_argument("--rmax", type=float, default=1.0)
            p.add_argument("--fidelity-x0", dest="fidelity_x0", type=float,
                           default=100.0)
            p.add_argument("--fidelity-dt", dest="fidelity_dt", type=float,
                           default=1e-3)

    p = sub.add_parser("oracle", help="small-n enumeration and brute-force checks")
    common(p, n=True, m=True)
    p.set_defaults(func=cmd_oracle, n=3, m=60, replicas=10)

    p = sub.add_parser("sample-quad", help="sample maps, write edge lists and profiles")
    common(p, n=True)
    p.add_argument("--write-maps", action="store_true")
    p.add_argument("--write-distances", action="store_true",
                   help="also write per-vertex base distances as CSV")
    p.add_argument("--with-components", action="store_true",
                   help="also write complement-component counts")
    p.add_argument("--component-sources", type=int, default=3)
    p.set_defaults(func=cmd_sample_quad)

    p = sub.add_parser("two-point", help="batch of rescaled two-point distances")
    common(p, n=True, m=True)
    p.add_argument("--kind", choices=["discrete", "continuum"], default="discrete")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel replica workers (same outputs as sequential)")
    p.set_defaults(func=cmd_two_point)

    p = sub.add_parser("brownian-map", help="snake, metric field, volumes, geodesic")
    common(p, m=True)
    p.add_argument("--source", choices=["rho_star", "uniform"], default="rho_star")
    p.set_defaults(func=cmd_brownian_map)

    p = sub.add_parser("brownian-plane", help="sketch, hull process, Laplace check")
    common(p, m=True, grid=True)
    p.set_defaults(func=cmd_brownian_plane, m=400)
    return parser


def _validate(args) -> None:
    ExperimentConfig.from_args(args).validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        args.func(args)
    except ConfigError as exc:
        json.dump({"error": str(exc), "code": CONFIG_ERROR}, sys.stderr)
        sys.stderr.write("\n")
        return CONFIG_ERROR
    except (ContractViolation, trees.BudgetExceededError) as exc:
        json.dump({"error": str(exc), "code": CONTRACT_VIOLATION}, sys.stderr)
        sys.stderr.write("\n")
        return CONTRACT_VIOLATION
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
