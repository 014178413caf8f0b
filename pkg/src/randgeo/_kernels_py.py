"""NumPy implementations of the hot kernels.

randgeo._kernels_cy provides compiled versions of the same functions;
randgeo._backend picks whichever imports. Both backends are exact (same
floating point formulas in the same order), so they can be tested for
equality against each other.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


# ---------------------------------------------------------------------------
# Dyck word -> plane tree
# ---------------------------------------------------------------------------

def build_tree_from_dyck(steps: np.ndarray):
    """Decode a balanced Dyck word into (parent, contour).

    steps: array of +1/-1 with nonnegative partial sums and total 0.
    Vertices are numbered in depth-first preorder (root 0, one new vertex per
    up step). contour[i] is the vertex reached after i contour moves, so it
    has length 2n+1 and visits each edge twice.

    Matching of up and down steps uses the level trick: sorted by (edge
    level, position), the moves of one level strictly alternate up, down,
    up, down, so consecutive pairs after one lexsort are the matched pairs.
    """
    steps = np.asarray(steps, dtype=np.int64)
    two_n = steps.shape[0]
    n = two_n // 2
    if n == 0:
        return np.array([-1], dtype=np.int64), np.zeros(1, dtype=np.int64)
    h = np.cumsum(steps)
    up = steps == 1
    up_pos = np.flatnonzero(up)
    vertex_at = np.zeros(two_n, dtype=np.int64)
    vertex_at[up_pos] = np.arange(1, n + 1)

    level = np.where(up, h, h + 1)  # level of the edge being traversed
    order = np.lexsort((np.arange(two_n), level))
    pairs = order.reshape(-1, 2)  # column 0 up positions, column 1 down
    match_up_of_down = np.zeros(two_n, dtype=np.int64)
    match_up_of_down[pairs[:, 1]] = pairs[:, 0]

    parent = np.empty(n + 1, dtype=np.int64)
    parent[0] = -1
    lev_of_up = h[up_pos]
    max_lev = int(lev_of_up.max())
    counts = np.bincount(lev_of_up, minlength=max_lev + 1)
    offs = np.concatenate(([0], np.cumsum(counts)))
    by_level = up_pos[np.argsort(lev_of_up, kind="stable")]
    parent[vertex_at[by_level[offs[1]:offs[2]]]] = 0
    for lev in range(2, max_lev + 1):
        cur = by_level[offs[lev]:offs[lev + 1]]
        below = by_level[offs[lev - 1]:offs[lev]]
        j = np.searchsorted(below, cur) - 1
        parent[vertex_at[cur]] = vertex_at[below[j]]

    contour = np.empty(two_n + 1, dtype=np.int64)
    contour[0] = 0
    contour[1:] = np.where(up, vertex_at, parent[vertex_at[match_up_of_down]])
    return parent, contour


# ---------------------------------------------------------------------------
# Corner successors for the tree -> quadrangulation encoding
# ---------------------------------------------------------------------------

def cvs_successor(corner_labels: np.ndarray) -> np.ndarray:
    """Successor of every corner: the next corner clockwise whose label is one
    less. Corners with the minimum label 1 get successor -1 (they connect to
    the extra vertex)."""
    lab = np.asarray(corner_labels, dtype=np.int64)
    m = lab.shape[0]
    succ = np.full(m, -1, dtype=np.int64)
    order = np.argsort(lab, kind="stable")  # grouped by label, positions ascending
    counts = np.bincount(lab)
    offs = np.concatenate(([0], np.cumsum(counts)))
    for value in range(2, counts.shape[0]):
        if counts[value] == 0:
            continue
        cur = order[offs[value]:offs[value + 1]]
        below = order[offs[value - 1]:offs[value]]
        j = np.searchsorted(below, cur, side="right")
        succ[cur] = below[j % below.shape[0]]
    return succ


# ---------------------------------------------------------------------------
# BFS over a CSR adjacency
# ---------------------------------------------------------------------------

def bfs_csr(xadj: np.ndarray, nbr: np.ndarray, source: int) -> np.ndarray:
    """Graph distances from source; -1 where unreachable."""
    n_vertices = xadj.shape[0] - 1
    dist = np.full(n_vertices, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        starts = xadj[frontier]
        counts = xadj[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        base = np.repeat(starts, counts)
        within = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        cand = nbr[base + within]
        cand = cand[dist[cand] < 0]
        if cand.size == 0:
            break
        frontier = np.unique(cand)
        d += 1
        dist[frontier] = d
    return dist


# ---------------------------------------------------------------------------
# Range-minimum machinery and the chain-infimum shortest path
# ---------------------------------------------------------------------------

def sparse_min_table(values: np.ndarray):
    """Sparse table for O(1) inclusive range-minimum queries.

    Returns (table, logt): table[k, i] = min of values[i : i + 2**k],
    logt[s] = floor(log2(s)).
    """
    v = np.asarray(values, dtype=np.float64)
    length = v.shape[0]
    n_levels = max(1, int(np.floor(np.log2(length))) + 1)
    table = np.full((n_levels, length), np.inf)
    table[0] = v
    for k in range(1, n_levels):
        half = 1 << (k - 1)
        span = length - (1 << k) + 1
        if span <= 0:
            break
        table[k, :span] = np.minimum(table[k - 1, :span], table[k - 1, half:half + span])
    logt = np.zeros(length + 1, dtype=np.int64)
    if length >= 1:
        logt[1:] = np.frexp(np.arange(1, length + 1))[1] - 1
    return table, logt


def range_min(table: np.ndarray, logt: np.ndarray, a, b):
    """Minimum over the inclusive index range [a, b]; a <= b, arrays allowed."""
    k = logt[b - a + 1]
    return np.minimum(table[k, a], table[k, b - np.left_shift(1, k) + 1])


def dijkstra_dzero(Z: np.ndarray, table: np.ndarray, logt: np.ndarray,
                   source: int, circular: bool):
    """Single-source shortest path over the implicit complete graph whose edge
    weight is the one-step label functional of Z.

    circular=True: weight(u, j) = Z[u] + Z[j] - 2 max(min over the forward
    cyclic index interval u..j, min over j..u); table must cover Z doubled.
    circular=False: weight(u, j) = Z[u] + Z[j] - 2 min over [u, j] (line
    intervals); table covers Z itself.

    Returns (dist, pred).
    """
    Z = np.asarray(Z, dtype=np.float64)
    m = Z.shape[0]
    dist = np.full(m, np.inf)
    dist[source] = 0.0
    pred = np.full(m, -1, dtype=np.int64)
    done = np.zeros(m, dtype=bool)
    idx = np.arange(m)
    for _ in range(m):
        cand = np.where(done, np.inf, dist)
        u = int(np.argmin(cand))
        if not np.isfinite(cand[u]):
            break
        done[u] = True
        if circular:
            fwd_hi = np.where(idx >= u, idx, idx + m)
            min_fwd = range_min(table, logt, u, fwd_hi)
            bwd_hi = np.where(u >= idx, u, u + m)
            min_bwd = range_min(table, logt, idx, bwd_hi)
            row = Z[u] + Z - 2.0 * np.maximum(min_fwd, min_bwd)
        else:
            lo = np.minimum(idx, u)
            hi = np.maximum(idx, u)
            row = Z[u] + Z - 2.0 * range_min(table, logt, lo, hi)
        row[u] = 0.0
        trial = dist[u] + row
        better = (trial < dist) & ~done
        pred[better] = u
        dist = np.where(better, trial, dist)
    return dist, pred


# ---------------------------------------------------------------------------
# Tree-indexed Gaussian labels along a height walk
# ---------------------------------------------------------------------------

def snake_labels(heights: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Labels of the tree coded by a piecewise-linear height walk.

    Walk step i consumes normals[i - 1]. Going up extends the current branch
    with an independent Gaussian increment of variance equal to the height
    gain; going down returns to the ancestor at the new height, sampling a
    Brownian bridge point between the surrounding stored breakpoints. Exact
    returns to a stored breakpoint reuse its label, so equivalent walk points
    get identical labels.
    """
    heights = np.asarray(heights, dtype=np.float64)
    normals = np.asarray(normals, dtype=np.float64)
    length = heights.shape[0]
    out = np.empty(length)
    out[0] = 0.0
    stack_h = [heights[0]]
    stack_z = [0.0]
    for i in range(1, length):
        h = heights[i]
        top = stack_h[-1]
        if h > top:
            z = stack_z[-1] + normals[i - 1] * np.sqrt(h - top)
            stack_h.append(h)
            stack_z.append(z)
        elif h == top:
            z = stack_z[-1]
        else:
            hi_h = stack_h.pop()
            hi_z = stack_z.pop()
            while stack_h and stack_h[-1] > h:
                hi_h = stack_h.pop()
                hi_z = stack_z.pop()
            if stack_h and stack_h[-1] == h:
                z = stack_z[-1]
            else:
                lo_h = stack_h[-1]
                lo_z = stack_z[-1]
                frac = (h - lo_h) / (hi_h - lo_h)
                z = lo_z + (hi_z - lo_z) * frac + normals[i - 1] * np.sqrt(
                    (h - lo_h) * (hi_h - h) / (hi_h - lo_h))
                stack_h.append(h)
                stack_z.append(z)
        out[i] = z
    return out
