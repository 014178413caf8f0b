"""Compare the compiled kernels against the NumPy fallback.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from randgeo import _kernels_py
from randgeo import snake, trees
from randgeo._rng import stream

try:
    from randgeo import _kernels_cy
except ImportError:
    _kernels_cy = None


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def row(name, py_time, cy_time):
    speedup = "" if cy_time is None else f"{py_time / cy_time:6.1f}x"
    cy = "   n/a" if cy_time is None else f"{cy_time * 1e3:9.2f}"
    print(f"{name:<24} {py_time * 1e3:9.2f} {cy} {speedup:>8}")


def main():
    rng = stream(0)
    n = 100_000
    steps = trees.sample_dyck_steps(n, rng)
    tree = trees.sample_plane_tree(n, stream(1))
    lt = trees.attach_labels(tree, trees.LabelVariant.FREE_ROOT_ZERO, stream(2))
    wl = trees.reroot_shift(lt)
    corner_labels = wl.labels[wl.tree.corners()]

    from randgeo import cvs
    g = cvs.encode(wl)

    m = 1500
    exc = snake.sample_excursion(m, stream(3))
    normals = stream(4).standard_normal(m)
    z = snake.build_snake(exc, stream(5)).Z[:m]
    table2, logt2 = _kernels_py.sparse_min_table(np.concatenate([z, z]))

    cases = [
        ("dyck -> tree (n=1e5)", lambda k: k.build_tree_from_dyck(steps)),
        ("corner successors", lambda k: k.cvs_successor(corner_labels)),
        ("bfs (V=1e5+2)", lambda k: k.bfs_csr(g.xadj, g.end_vertex, 0)),
        ("snake labels (m=1500)", lambda k: k.snake_labels(exc.values, normals)),
        ("metric field (m=1500)",
         lambda k: k.dijkstra_dzero(z, table2, logt2, 0, True)),
    ]

    print(f"{'kernel':<24} {'numpy ms':>9} {'cython ms':>9} {'speedup':>8}")
    for name, call in cases:
        py_t = timeit(call, _kernels_py)
        cy_t = timeit(call, _kernels_cy) if _kernels_cy is not None else None
        row(name, py_t, cy_t)
    if _kernels_cy is None:
        print("\ncompiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
