"""Plane trees and labeled plane trees.

Vertices are numbered in depth-first preorder, so the ordered children of a
vertex are exactly its children sorted by index. The contour walk (root,
clockwise, each edge twice) is stored explicitly; corner i of the tree is
contour position i for i in [0, 2n).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import product

import numpy as np

from ._backend import kernels
from ._rng import as_generator


class BudgetExceededError(RuntimeError):
    """A rejection sampler ran out of its configured attempt budget."""


class LabelVariant(Enum):
    FREE_ROOT_ZERO = "free_root_zero"
    WELL_LABELED = "well_labeled"


@dataclass(frozen=True)
class PlaneTree:
    """Rooted ordered tree with explicit contour walk."""

    parent: np.ndarray   # parent[v]; parent[0] = -1
    contour: np.ndarray  # 2*n_edges + 1 vertex indices

    @property
    def n_edges(self) -> int:
        return self.parent.shape[0] - 1

    @property
    def n_vertices(self) -> int:
        return self.parent.shape[0]

    def corners(self) -> np.ndarray:
        """Vertex at each cyclic corner position (length 2*n_edges)."""
        return self.contour[:-1]

    def first_visit(self) -> np.ndarray:
        """First contour position of each vertex."""
        _, first = np.unique(self.contour, return_index=True)
        return first

    def children(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for v in range(1, self.n_vertices):
            out[int(self.parent[v])].append(v)
        return out

    @classmethod
    def from_parents(cls, parent) -> "PlaneTree":
        """Build the tree (and its contour) from a preorder parent array."""
        parent = np.asarray(parent, dtype=np.int64)
        n = parent.shape[0] - 1
        if parent[0] != -1:
            raise ValueError("parent[0] must be -1")
        if n and not np.all(parent[1:] < np.arange(1, n + 1)):
            raise ValueError("parent array is not in preorder")
        kids: list[list[int]] = [[] for _ in range(n + 1)]
        for v in range(1, n + 1):
            kids[int(parent[v])].append(v)
        contour = np.empty(2 * n + 1, dtype=np.int64)
        contour[0] = 0
        pos = 1
        stack = [(0, 0)]  # (vertex, next child rank)
        while stack:
            v, k = stack[-1]
            if k < len(kids[v]):
                stack[-1] = (v, k + 1)
                c = kids[v][k]
                contour[pos] = c
                pos += 1
                stack.append((c, 0))
            else:
                stack.pop()
                if stack:
                    contour[pos] = stack[-1][0]
                    pos += 1
        tree = cls(parent=parent, contour=contour)
        return tree

    def validate(self) -> None:
        n = self.n_edges
        if self.contour.shape[0] != 2 * n + 1:
            raise ValueError("contour length must be 2*n_edges + 1")
        if self.contour[0] != 0 or self.contour[-1] != 0:
            raise ValueError("contour must start and end at the root")
        # each step of the walk crosses one tree edge
        a = self.contour[:-1]
        b = self.contour[1:]
        ok = (self.parent[a] == b) | (self.parent[b] == a)
        if not bool(np.all(ok)):
            raise ValueError("contour step between non-adjacent vertices")
        counts = np.zeros(n + 1, dtype=np.int64)
        np.add.at(counts, np.maximum(a, b), 1)  # an edge is named by its child
        if n and not bool(np.all(counts[1:] == 2)):
            raise ValueError("contour must traverse each edge exactly twice")
        # preorder consistency: first visits appear in vertex order
        first = self.first_visit()
        if not bool(np.all(np.diff(first) > 0)):
            raise ValueError("vertex numbering is not the contour preorder")


@dataclass(frozen=True)
class LabeledTree:
    """Plane tree with one integer label per vertex."""

    tree: PlaneTree
    labels: np.ndarray
    variant: LabelVariant

    @property
    def n_edges(self) -> int:
        return self.tree.n_edges

    def corner_labels(self) -> np.ndarray:
        return self.labels[self.tree.corners()]

    def validate(self) -> None:
        self.tree.validate()
        if self.labels.shape[0] != self.tree.n_vertices:
            raise ValueError("one label per vertex required")
        par = self.tree.parent[1:]
        if par.size:
            diffs = np.abs(self.labels[1:] - self.labels[par])
            if int(diffs.max(initial=0)) > 1:
                raise ValueError("adjacent labels must differ by at most 1")
        if self.variant is LabelVariant.FREE_ROOT_ZERO:
            if self.labels[0] != 0:
                raise ValueError("free-root-zero labeling must have root label 0")
        else:
            if self.labels[0] != 1:
                raise ValueError("well-labeled tree must have root label 1")
            if int(self.labels.min()) < 1:
                raise ValueError("well-labeled tree must have positive labels")

    def key(self) -> tuple:
        """Hashable identity (parents, labels), used by the uniformity tests."""
        return (tuple(self.tree.parent[1:].tolist()), tuple(self.labels.tolist()))


@dataclass(frozen=True)
class TreeInterval:
    """Contour segment from v to v' in clockwise order.

    walk is the full vertex sequence along the segment (consecutive entries
    are contour-adjacent); vertices keeps the first occurrence of each.
    """

    walk: np.ndarray
    positions: np.ndarray

    @property
    def vertices(self) -> list[int]:
        _, first = np.unique(self.walk, return_index=True)
        return [int(self.walk[i]) for i in np.sort(first)]

    def min_label(self, labels: np.ndarray) -> int:
        return int(labels[self.walk].min())


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_dyck_steps(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform Dyck word of length 2n via the cycle lemma.

    A uniform arrangement of n up steps and n+1 down steps has exactly one
    rotation that stays nonnegative until the final step; dropping that final
    down step leaves a uniform Dyck word.
    """
    steps = np.concatenate([np.ones(n, dtype=np.int64), -np.ones(n + 1, dtype=np.int64)])
    rng.shuffle(steps)
    walk = np.cumsum(steps)
    k = int(np.argmin(walk))  # first minimum; rotate to start right after it
    rotated = np.roll(steps, -(k + 1))
    return rotated[:-1]


def sample_plane_tree(n: int, seed) -> PlaneTree:
    """Uniform plane tree with n edges; deterministic given seed."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = as_generator(seed)
    steps = sample_dyck_steps(n, rng)
    parent, contour = kernels.build_tree_from_dyck(steps)
    return PlaneTree(parent=np.asarray(parent), contour=np.asarray(contour))


def labels_from_increments(tree: PlaneTree, delta: np.ndarray) -> np.ndarray:
    """Root label 0 plus the per-edge increments delta[1:] summed along root
    paths, evaluated by one cumulative sum along the contour."""
    contour = tree.contour
    first = tree.first_visit()
    after = contour[1:]
    is_up = first[after] == np.arange(1, contour.shape[0])
    inc = np.where(is_up, delta[after], -delta[contour[:-1]])
    walk = np.concatenate(([0], np.cumsum(inc)))
    return walk[first]


def attach_labels(tree: PlaneTree, variant: LabelVariant, seed,
                  attempt_budget: int = 10 ** 6) -> LabeledTree:
    """Random labels on a fixed tree.

    FREE_ROOT_ZERO: root label 0 and independent uniform {-1, 0, +1}
    increments per edge, exactly uniform over labelings of the tree.
    WELL_LABELED: rejection over the same measure, conditioned on labels
    staying positive after the +1 shift (uniform over well-labelings of this
    tree; may need many attempts on deep trees, hence the budget).
    """
    rng = as_generator(seed)
    n = tree.n_edges
    if variant is LabelVariant.FREE_ROOT_ZERO:
        delta = np.concatenate(([0], rng.integers(-1, 2, size=n)))
        return LabeledTree(tree, labels_from_increments(tree, delta), variant)
    for _ in range(attempt_budget):
        delta = np.concatenate(([0], rng.integers(-1, 2, size=n)))
        labels = labels_from_increments(tree, delta)
        if int(labels.min()) >= 0:
            return LabeledTree(tree, labels + 1, LabelVariant.WELL_LABELED)
    raise BudgetExceededError("well-labeled rejection budget exceeded")


def reroot_at_corner(tree: PlaneTree, corner: int,
                     labels: np.ndarray | None = None):
    """Re-root the plane tree at the given cyclic corner.

    The embedded tree is unchanged; the contour walk now starts at that
    corner. Returns (tree, relabeled labels) with vertices renumbered in the
    new preorder.
    """
    two_n = 2 * tree.n_edges
    old_walk = tree.contour[(corner + np.arange(two_n + 1)) % two_n]
    _, first = np.unique(old_walk, return_index=True)  # by old vertex id
    order = np.argsort(first)                          # old ids by first visit
    new_id = np.empty(tree.n_vertices, dtype=np.int64)
    new_id[order] = np.arange(tree.n_vertices)
    new_contour = new_id[old_walk]
    new_parent = np.empty(tree.n_vertices, dtype=np.int64)
    new_parent[0] = -1
    old_nonroot = order[1:]
    new_parent[new_id[old_nonroot]] = new_id[old_walk[first[old_nonroot] - 1]]
    new_tree = PlaneTree(parent=new_parent, contour=new_contour)
    if labels is None:
        return new_tree, None
    new_labels = np.empty_like(labels)
    new_labels[new_id] = labels
    return new_tree, new_labels


def reroot_shift(lt: LabeledTree) -> LabeledTree:
    """Shift a free-root-zero labeling so the minimum becomes 1 and re-root at
    the first minimal-label corner in contour order."""
    if lt.variant is not LabelVariant.FREE_ROOT_ZERO:
        raise ValueError("reroot_shift expects a free-root-zero labeling")
    low = int(lt.labels.min())
    corner_labels = lt.corner_labels()
    corner = int(np.flatnonzero(corner_labels == low)[0])
    tree, labels = reroot_at_corner(lt.tree, corner, lt.labels - low + 1)
    return LabeledTree(tree, labels, LabelVariant.WELL_LABELED)


def sample_well_labeled(n: int, mode: str, seed,
                        attempt_budget: int = 10 ** 6) -> LabeledTree:
    """Exactly uniform well-labeled tree with n edges.

    mode="rejection": uniform tree plus free-root-zero labels, accepted when
    every label is nonnegative (the root then attains the minimum), shifted
    by +1. mode="enumeration": index uniformly into the exhaustive list
    (n <= 6 only).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = as_generator(seed)
    if mode == "enumeration":
        pool = enumerate_well_labeled(n)
        return pool[int(rng.integers(len(pool)))]
    if mode != "rejection":
        raise ValueError(f"unknown mode {mode!r}")
    for _ in range(attempt_budget):
        tree = sample_plane_tree(n, rng)
        delta = np.concatenate(([0], rng.integers(-1, 2, size=n)))
        labels = labels_from_increments(tree, delta)
        low = int(labels.min())
        if low >= 0 and labels[0] == low:
            return LabeledTree(tree, labels + 1, LabelVariant.WELL_LABELED)
    raise BudgetExceededError("well-labeled rejection budget exceeded")


# ---------------------------------------------------------------------------
# Exhaustive enumeration (the small-n oracle)
# ---------------------------------------------------------------------------

MAX_ENUM_EDGES = 6


@lru_cache(maxsize=None)
def _forests(n: int) -> tuple:
    """All ordered forests with n edges, as nested tuples of child shapes."""
    if n == 0:
        return ((),)
    out = []
    for k in range(n):
        for head in _forests(k):
            for tail in _forests(n - 1 - k):
                out.append((head,) + tail)
    return tuple(out)


def _shape_to_parents(shape) -> np.ndarray:
    parent = [-1]
    stack = [(child, 0) for child in reversed(shape)]
    while stack:
        node, pid = stack.pop()
        vid = len(parent)
        parent.append(pid)
        for child in reversed(node):
            stack.append((child, vid))
    return np.array(parent, dtype=np.int64)


def enumerate_plane_trees(n: int) -> list[PlaneTree]:
    """All plane trees with n edges, sorted by their preorder child-count
    sequence (a canonical, reproducible order)."""
    if not 1 <= n <= MAX_ENUM_EDGES:
        raise ValueError(f"enumeration supports 1 <= n <= {MAX_ENUM_EDGES}")
    trees = [PlaneTree.from_parents(_shape_to_parents(s)) for s in _forests(n)]
    trees.sort(key=lambda t: tuple(len(c) for c in t.children()))
    return trees


def enumerate_well_labeled(n: int) -> list[LabeledTree]:
    """All well-labeled trees with n edges, duplicate free, canonical order:
    trees by child-count sequence, labelings lexicographic in the per-edge
    increments."""
    out: list[LabeledTree] = []
    for tree in enumerate_plane_trees(n):
        par = tree.parent
        for deltas in product((-1, 0, 1), repeat=n):
            labels = np.empty(n + 1, dtype=np.int64)
            labels[0] = 1
            ok = True
            for v in range(1, n + 1):
                labels[v] = labels[par[v]] + deltas[v - 1]
                if labels[v] < 1:
                    ok = False
                    break
            if ok:
                out.append(LabeledTree(tree, labels.copy(), LabelVariant.WELL_LABELED))
    return out


def count_well_labeled(n: int) -> int:
    """Closed-form count 2 * 3^n * Catalan(n) / (n + 2); equals the number of
    rooted quadrangulations with n faces."""
    catalan = 1
    for i in range(n):
        catalan = catalan * 2 * (2 * i + 1) // (i + 2)
    return 2 * 3 ** n * catalan // (n + 2)


# ---------------------------------------------------------------------------
# Contour intervals
# ---------------------------------------------------------------------------

def tree_interval(tree: PlaneTree, v: int, v_prime: int) -> TreeInterval:
    """Vertices visited going from v to v' clockwise around the tree.

    Among all pairs of contour visits of v and v', the pair spanning the
    shortest forward cyclic segment is used (ties to the earliest start),
    matching the smallest-interval convention of the continuous coding.
    """
    n_vertices = tree.n_vertices
    if not (0 <= v < n_vertices and 0 <= v_prime < n_vertices):
        raise ValueError("vertex out of range")
    corners = tree.corners()
    two_n = corners.shape[0]
    pos_v = np.flatnonzero(corners == v)
    pos_w = np.flatnonzero(corners == v_prime)
    gaps = (pos_w[None, :] - pos_v[:, None]) % two_n
    flat = int(np.argmin(gaps))
    i = int(pos_v[flat // pos_w.shape[0]])
    span = int(gaps.flat[flat])
    positions = (i + np.arange(span + 1)) % two_n
    return TreeInterval(walk=corners[positions], positions=positions)


# ---------------------------------------------------------------------------
# Serialization: line based text format
# ---------------------------------------------------------------------------

def dump_tree(obj: PlaneTree | LabeledTree, fp) -> None:
    """Write the line format: n_edges, parents of vertices 1..n, and for
    labeled trees a third line with the n+1 labels."""
    close = False
    if isinstance(fp, (str, bytes, os.PathLike)):
        fp = open(fp, "w")
        close = True
    try:
        tree = obj.tree if isinstance(obj, LabeledTree) else obj
        fp.write(f"{tree.n_edges}\n")
        fp.write(" ".join(str(int(p)) for p in tree.parent[1:]) + "\n")
        if isinstance(obj, LabeledTree):
            fp.write(" ".join(str(int(x)) for x in obj.labels) + "\n")
    finally:
        if close:
            fp.close()


def load_tree(fp) -> PlaneTree | LabeledTree:
    close = False
    if isinstance(fp, (str, bytes, os.PathLike)):
        fp = open(fp)
        close = True
    try:
        lines = [line.strip() for line in fp.read().splitlines() if line.strip()]
    finally:
        if close:
            fp.close()
    n = int(lines[0])
    parent = np.array([-1] + [int(x) for x in lines[1].split()] if n else [-1],
                      dtype=np.int64)
    tree = PlaneTree.from_parents(parent)
    if len(lines) < 3:
        return tree
    labels = np.array([int(x) for x in lines[2].split()], dtype=np.int64)
    variant = (LabelVariant.FREE_ROOT_ZERO if labels[0] == 0
               else LabelVariant.WELL_LABELED)
    lt = LabeledTree(tree, labels, variant)
    lt.validate()
    return lt
