"""Planar map graphs: CSR adjacency plus a rotation system.

The rotation system (clockwise cyclic order of edge ends around every
vertex) is what distinguishes a rooted map from a rooted graph; canonical
codes, local ball censuses and face counts all need it. Plain metric
statistics (BFS, profiles, hulls, component counts) only use the CSR view.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ._backend import kernels
from ._rng import as_generator

#: rescaling constant for two-point distances in quadrangulations,
#: (9 / (p (p - 2)))^(1/4) at p = 4
TWO_POINT_SCALE = (9.0 / 8.0) ** 0.25


@dataclass(frozen=True)
class PlanarMapGraph:
    """Multigraph with root edge and rotation system.

    Slot s is an edge end: it sits at vertex owner(s), leads to
    end_vertex[s], belongs to edge end_edge[s], and end_twin[s] is the other
    end of the same edge. Slots of one vertex are stored consecutively
    (xadj offsets) in clockwise rotation order.
    """

    xadj: np.ndarray
    end_vertex: np.ndarray
    end_edge: np.ndarray
    end_twin: np.ndarray
    root_end: int
    pointed: int | None = None
    n_faces: int | None = None

    @property
    def n_vertices(self) -> int:
        return self.xadj.shape[0] - 1

    @property
    def n_edges(self) -> int:
        return self.end_vertex.shape[0] // 2

    def slot_owner(self, slot) -> np.ndarray | int:
        out = np.searchsorted(self.xadj, slot, side="right") - 1
        return out

    @property
    def root_tail(self) -> int:
        return int(self.slot_owner(self.root_end))

    @property
    def root_head(self) -> int:
        return int(self.end_vertex[self.root_end])

    def degree(self, v: int) -> int:
        return int(self.xadj[v + 1] - self.xadj[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.end_vertex[self.xadj[v]:self.xadj[v + 1]]

    # -- construction -------------------------------------------------------

    @classmethod
    def from_edges(cls, n_vertices: int, edges, root_edge=(0, None),
                   pointed=None, n_faces=None) -> "PlanarMapGraph":
        """Build from an edge list; the rotation at each vertex is the order
        in which its ends appear in the list."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        n_edges = edges.shape[0]
        ends_owner = np.empty(2 * n_edges, dtype=np.int64)
        ends_other = np.empty(2 * n_edges, dtype=np.int64)
        ends_edge = np.repeat(np.arange(n_edges, dtype=np.int64), 2)
        ends_owner[0::2] = edges[:, 0]
        ends_other[0::2] = edges[:, 1]
        ends_owner[1::2] = edges[:, 1]
        ends_other[1::2] = edges[:, 0]
        order = np.argsort(ends_owner, kind="stable")
        rank = np.empty_like(order)
        rank[order] = np.arange(order.shape[0])
        xadj = np.concatenate(([0], np.cumsum(np.bincount(ends_owner, minlength=n_vertices))))
        twin_raw = np.arange(2 * n_edges, dtype=np.int64) ^ 1
        end_twin = rank[twin_raw][order]
        tail, head = root_edge
        if head is None:
            root_end = int(xadj[tail])
        else:
            mask = (ends_owner[order] == tail) & (ends_other[order] == head)
            root_end = int(np.flatnonzero(mask)[0])
        return cls(xadj=xadj, end_vertex=ends_other[order], end_edge=ends_edge[order],
                   end_twin=end_twin, root_end=root_end, pointed=pointed,
                   n_faces=n_faces)

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        two_e = self.end_vertex.shape[0]
        if two_e % 2:
            raise ValueError("odd number of edge ends")
        slots = np.arange(two_e)
        if not np.array_equal(self.end_twin[self.end_twin], slots):
            raise ValueError("end_twin is not an involution")
        owners = np.repeat(np.arange(self.n_vertices),
                           np.diff(self.xadj).astype(np.int64))
        if not np.array_equal(owners[self.end_twin], self.end_vertex):
            raise ValueError("end_vertex inconsistent with twins")
        if not np.array_equal(self.end_edge, self.end_edge[self.end_twin]):
            raise ValueError("edge ids inconsistent with twins")
        dist = self.bfs_distances(self.root_tail)
        if int(dist.min()) < 0:
            raise ValueError("map is not connected")
        if self.n_faces is not None:
            euler = self.n_vertices - self.n_edges + self.n_faces
            if euler != 2:
                raise ValueError(f"V - E + F = {euler}, expected 2")
            if self.face_count() != self.n_faces:
                raise ValueError("declared face count disagrees with rotation system")

    def face_count(self) -> int:
        return face_degrees(self).shape[0]

    # -- metric statistics --------------------------------------------------

    def bfs_distances(self, source: int) -> np.ndarray:
        """Exact graph distances from source (-1 marks unreachable)."""
        if not 0 <= source < self.n_vertices:
            raise ValueError("source out of range")
        return np.asarray(kernels.bfs_csr(self.xadj, self.end_vertex, source))


def face_degrees(g: PlanarMapGraph) -> np.ndarray:
    """Degrees of all faces, from orbits of (next slot in rotation of twin)."""
    two_e = g.end_vertex.shape[0]
    owners = np.repeat(np.arange(g.n_vertices), np.diff(g.xadj).astype(np.int64))
    nxt_in_rot = np.arange(two_e, dtype=np.int64) + 1
    last = g.xadj[owners + 1] - 1
    wrap = nxt_in_rot > last
    nxt_in_rot[wrap] = g.xadj[owners[wrap]]
    face_next = nxt_in_rot[g.end_twin]
    seen = np.zeros(two_e, dtype=bool)
    degrees = []
    for s in range(two_e):
        if seen[s]:
            continue
        d = 0
        cur = s
        while not seen[cur]:
            seen[cur] = True
            cur = face_next[cur]
            d += 1
        degrees.append(d)
    return np.array(degrees, dtype=np.int64)


@dataclass(frozen=True)
class DistanceProfile:
    """Histogram of graph distances from a source vertex."""

    source: int
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def validate(self, g: PlanarMapGraph) -> None:
        if self.total != g.n_vertices:
            raise ValueError("profile mass must equal the vertex count")
        if int(self.counts[0]) != 1:
            raise ValueError("exactly one vertex at distance 0")


def distance_profile(g: PlanarMapGraph, source: int) -> DistanceProfile:
    dist = g.bfs_distances(source)
    return DistanceProfile(source=source, counts=np.bincount(dist))


def farthest_vertex(g: PlanarMapGraph, source: int) -> int:
    """Vertex maximizing distance from source, smallest index on ties."""
    return int(np.argmax(g.bfs_distances(source)))


def _component_labels(g: PlanarMapGraph, keep: np.ndarray):
    """Connected component labels of the subgraph induced by the keep mask;
    label -1 outside."""
    owners = np.repeat(np.arange(g.n_vertices), np.diff(g.xadj).astype(np.int64))
    inside = keep[owners] & keep[g.end_vertex]
    sub = csr_matrix(
        (np.ones(int(inside.sum()), dtype=np.int8),
         (owners[inside], g.end_vertex[inside])),
        shape=(g.n_vertices, g.n_vertices))
    n_comp, labels = connected_components(sub, directed=False)
    labels = labels.astype(np.int64)
    labels[~keep] = -1
    return labels


def hull(g: PlanarMapGraph, source: int, r: int,
         far_vertex: int | None = None) -> np.ndarray:
    """Ball of radius r around source plus every component of its complement
    that does not contain far_vertex (the finite stand-in for infinity).

    far_vertex defaults to the vertex farthest from source and must lie
    outside the ball.
    """
    dist = g.bfs_distances(source)
    if far_vertex is None:
        far_vertex = int(np.argmax(dist))
    if dist[far_vertex] <= r:
        raise ValueError("far_vertex lies inside the ball")
    outside = dist > r
    labels = _component_labels(g, outside)
    in_hull = ~outside | (labels != labels[far_vertex])
    return np.flatnonzero(in_hull)


def complement_component_maxdist(g: PlanarMapGraph, source: int, r: int) -> np.ndarray:
    """Max distance from source within each component of the complement of
    the radius-r ball. Empty when the ball covers the map."""
    dist = g.bfs_distances(source)
    outside = dist > r
    if not bool(outside.any()):
        return np.empty(0, dtype=np.int64)
    labels = _component_labels(g, outside)
    n_comp = int(labels.max()) + 1
    out = np.full(n_comp, -1, dtype=np.int64)
    np.maximum.at(out, labels[outside], dist[outside])
    return out[out >= 0]


def complement_component_count(g: PlanarMapGraph, source: int, r: int,
                               eps: int) -> int:
    """Number of connected components of the complement of B(source, r) that
    intersect the complement of B(source, r + eps)."""
    if r < 1 or eps < 1:
        raise ValueError("r and eps must be at least 1")
    maxd = complement_component_maxdist(g, source, r)
    return int(np.count_nonzero(maxd > r + eps))


def two_point_sample(g: PlanarMapGraph, seed) -> float:
    """Rescaled distance between two independent uniform vertices:
    (9/8)^(1/4) n^(-1/4) d(v1, v2) where n is the face count."""
    if g.n_faces is None:
        raise ValueError("two_point_sample needs a recorded face count")
    rng = as_generator(seed)
    v1, v2 = (int(x) for x in rng.integers(g.n_vertices, size=2))
    d = int(g.bfs_distances(v1)[v2])
    return TWO_POINT_SCALE * g.n_faces ** -0.25 * d


# ---------------------------------------------------------------------------
# Canonical codes and the local census
# ---------------------------------------------------------------------------

def canonical_code(g: PlanarMapGraph) -> bytes:
    """Complete invariant of the rooted map.

    Breadth-first relabeling from the root end; every vertex lists the edge
    numbers of its ends in clockwise rotation starting from the end through
    which it was discovered (the root end for the root vertex). Edge numbers
    are assigned in first-scan order, so the code reconstructs the map and
    two rooted maps are isomorphic exactly when their codes agree.
    """
    n = g.n_vertices
    xadj = g.xadj
    vertex_id = np.full(n, -1, dtype=np.int64)
    ref_end = np.full(n, -1, dtype=np.int64)
    edge_id = np.full(g.n_edges, -1, dtype=np.int64)
    root = g.root_tail
    vertex_id[root] = 0
    ref_end[root] = g.root_end
    queue = [root]
    head_ptr = 0
    n_seen = 1
    n_edge_seen = 0
    chunks = []
    while head_ptr < len(queue):
        v = queue[head_ptr]
        head_ptr += 1
        base = int(xadj[v])
        deg = int(xadj[v + 1]) - base
        start = int(ref_end[v])
        words = []
        for k in range(deg):
            slot = base + (start - base + k) % deg
            e = int(g.end_edge[slot])
            if edge_id[e] < 0:
                edge_id[e] = n_edge_seen
                n_edge_seen += 1
            w = int(g.end_vertex[slot])
            if vertex_id[w] < 0:
                vertex_id[w] = n_seen
                ref_end[w] = int(g.end_twin[slot])
                n_seen += 1
                queue.append(w)
            words.append(str(edge_id[e]))
        chunks.append(",".join(words))
    return ("|".join(chunks)).encode()


def _submap(g: PlanarMapGraph, keep_vertex: np.ndarray, root_end: int) -> PlanarMapGraph:
    """Induced sub-map on a vertex mask, rotations restricted in place.

    root_end must survive the restriction.
    """
    owners = np.repeat(np.arange(g.n_vertices), np.diff(g.xadj).astype(np.int64))
    keep_slot = keep_vertex[owners] & keep_vertex[g.end_vertex]
    new_slot = np.cumsum(keep_slot) - 1
    old_slots = np.flatnonzero(keep_slot)
    vmap = np.cumsum(keep_vertex) - 1
    kept_edges = np.unique(g.end_edge[old_slots])
    emap = np.full(g.n_edges, -1, dtype=np.int64)
    emap[kept_edges] = np.arange(kept_edges.shape[0])
    new_owner = vmap[owners[old_slots]]
    xadj = np.concatenate(([0], np.cumsum(np.bincount(
        new_owner, minlength=int(keep_vertex.sum())))))
    return PlanarMapGraph(
        xadj=xadj,
        end_vertex=vmap[g.end_vertex[old_slots]],
        end_edge=emap[g.end_edge[old_slots]],
        end_twin=new_slot[g.end_twin[old_slots]],
        root_end=int(new_slot[root_end]),
        pointed=None, n_faces=None)


def local_ball_census(g: PlanarMapGraph, k: int) -> bytes:
    """Canonical code of the radius-k ball around the root vertex (vertices
    at distance <= k and all edges between them, rotations inherited)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    root = g.root_tail
    if k == 0:
        return b"0"
    dist = g.bfs_distances(root)
    keep = (dist >= 0) & (dist <= k)
    return canonical_code(_submap(g, keep, g.root_end))


# ---------------------------------------------------------------------------
# Edge-list serialization (graph part only; rotations are reconstructed as
# file order, which is documented to drop the embedding)
# ---------------------------------------------------------------------------

def dump_distances(fp, dist: np.ndarray) -> None:
    """Distance vector as CSV with a header row, exact integers."""
    close = False
    if isinstance(fp, (str, bytes, os.PathLike)):
        fp = open(fp, "w")
        close = True
    try:
        fp.write("vertex,distance\n")
        fp.write("\n".join(f"{v},{int(d)}" for v, d in enumerate(dist)))
        fp.write("\n")
    finally:
        if close:
            fp.close()


def dump_map(g: PlanarMapGraph, fp) -> None:
    close = False
    if isinstance(fp, (str, bytes, os.PathLike)):
        fp = open(fp, "w")
        close = True
    try:
        faces = -1 if g.n_faces is None else g.n_faces
        pointed = -1 if g.pointed is None else g.pointed
        fp.write(f"{g.n_vertices} {g.n_edges} {faces} "
                 f"{g.root_tail} {g.root_head} {pointed}\n")
        owners = np.repeat(np.arange(g.n_vertices), np.diff(g.xadj).astype(np.int64))
        order = np.argsort(g.end_edge, kind="stable")
        first = order[0::2]  # lower slot of each edge
        tails = owners[first]
        heads = g.end_vertex[first]
        fp.write("\n".join(f"{int(t)} {int(h)}" for t, h in zip(tails, heads)))
        fp.write("\n")
    finally:
        if close:
            fp.close()


def load_map(fp) -> PlanarMapGraph:
    close = False
    if isinstance(fp, (str, bytes, os.PathLike)):
        fp = open(fp)
        close = True
    try:
        lines = [line.strip() for line in fp.read().splitlines() if line.strip()]
    finally:
        if close:
            fp.close()
    n_vertices, n_edges, faces, tail, head, pointed = (int(x) for x in lines[0].split())
    edges = np.array([[int(a) for a in line.split()] for line in lines[1:n_edges + 1]],
                     dtype=np.int64)
    return PlanarMapGraph.from_edges(
        n_vertices, edges, root_edge=(tail, head),
        pointed=None if pointed < 0 else pointed,
        n_faces=None if faces < 0 else faces)
