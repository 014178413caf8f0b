"""Regenerate the canned CSV fixtures and the expected fit numbers.

Development-time script: runs the randgeo CLI (the primary package's
external interface) to produce small output directories, then computes the
reference fit numbers with the primary's statistics helpers and freezes
them into expected_reports.json. The figure tests compare the mapfigs
reports against these frozen numbers to 1e-6.

Run from the figures/ directory:  python3 scripts/make_fixtures.py
"""

import json
import shutil
import sys
from pathlib import Path

import numpy as np

from randgeo import cli, stats

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def run_cli(args):
    rc = cli.main([str(a) for a in args])
    if rc != 0:
        sys.exit(f"randgeo {args} failed with {rc}")


def read_csv(path):
    rows = path.read_text().splitlines()
    header = rows[0].split(",")
    data = {h: [] for h in header}
    for row in rows[1:]:
        for h, v in zip(header, row.split(",")):
            data[h].append(float(v))
    return {h: np.asarray(v) for h, v in data.items()}


def main():
    if FIXTURES.exists():
        shutil.rmtree(FIXTURES)
    FIXTURES.mkdir(parents=True)

    run_cli(["sample-quad", "--n", "500", "--seed", "21",
             "--out", FIXTURES / "profile"])
    run_cli(["two-point", "--kind", "discrete", "--n", "800", "--replicas", "40",
             "--seed", "22", "--out", FIXTURES / "twopoint_discrete"])
    run_cli(["two-point", "--kind", "continuum", "--m", "400", "--replicas", "40",
             "--seed", "23", "--out", FIXTURES / "twopoint_continuum"])
    run_cli(["brownian-map", "--m", "600", "--seed", "24",
             "--out", FIXTURES / "ballvolume"])
    run_cli(["brownian-plane", "--m", "80", "--seed", "25", "--replicas", "400",
             "--rmax", "1.0", "--fidelity-x0", "25",
             "--out", FIXTURES / "laplace"])
    run_cli(["sample-quad", "--n", "30000", "--seed", "26", "--with-components",
             "--component-sources", "3", "--out", FIXTURES / "components"])

    expected = {}

    prof = read_csv(FIXTURES / "profile" / "profile_0000.csv")
    total = float(prof["count"].sum())
    expected["profile-hist"] = {
        "total_mass": total,
        "mean_distance": float((prof["distance"] * prof["count"]).sum() / total),
        "mode": int(prof["distance"][int(np.argmax(prof["count"]))]),
    }

    a = read_csv(FIXTURES / "twopoint_discrete" / "twopoint_discrete.csv")["value"]
    b = read_csv(FIXTURES / "twopoint_continuum" / "twopoint_continuum.csv")["value"]
    expected["two-point-ks"] = {
        "ks": stats.ks_two_sample(a, b),
        "mean_a": float(a.mean()),
        "mean_b": float(b.mean()),
    }

    bv = read_csv(FIXTURES / "ballvolume" / "ball_volume.csv")
    r, vol = bv["r"], bv["volume"]
    radius = float(r[-1])
    window = (r >= 0.05 * radius) & (r <= 0.3 * radius) & (r > 0) & (vol > 0)
    fit = stats.loglog_fit(r[window], vol[window])
    expected["ball-volume"] = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "stderr_slope": fit.stderr_slope,
        "r2": fit.r2,
    }

    lap = read_csv(FIXTURES / "laplace" / "hull_laplace.csv")
    rel = np.abs(lap["monte_carlo"] - lap["closed_form"]) / lap["closed_form"]
    expected["hull-laplace"] = {
        "max_rel_err": float(rel.max()),
        "mean_rel_err": float(rel.mean()),
    }

    comp = read_csv(FIXTURES / "components" / "components_0000.csv")
    levels = np.unique(comp["epsilon"])
    means = np.array([comp["count"][comp["epsilon"] == e].mean() for e in levels])
    cfit = stats.loglog_fit(levels, means)
    expected["component-exponent"] = {
        "slope": cfit.slope,
        "intercept": cfit.intercept,
        "stderr_slope": cfit.stderr_slope,
    }

    with open(FIXTURES / "expected_reports.json", "w") as fp:
        json.dump(expected, fp, indent=2, sort_keys=True)
        fp.write("\n")
    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
