"""Forward tree-to-quadrangulation encoding.

Every corner of a well-labeled tree emits one edge: corners with label 1
connect to an extra vertex, every other corner connects to the next corner
clockwise whose label is one less. The result is a rooted quadrangulation
with n faces whose distances from the extra vertex equal the tree labels;
that identity and the interval distance bound are exposed as checkable
contracts.

Clockwise means the contour order of randgeo.trees; flipping the global
orientation would produce the mirror image of every encoded map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._backend import kernels
from .maps import PlanarMapGraph
from .trees import LabeledTree, LabelVariant, tree_interval


@dataclass(frozen=True)
class CornerSequence:
    """Cyclic clockwise corner list of a labeled tree."""

    vertices: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def validate(self, lt: LabeledTree) -> None:
        degrees = np.bincount(np.concatenate(
            [lt.tree.parent[1:], np.arange(1, lt.tree.n_vertices)]),
            minlength=lt.tree.n_vertices)
        if not np.array_equal(np.bincount(self.vertices, minlength=lt.tree.n_vertices),
                              degrees):
            raise ValueError("each vertex must appear degree-many times")
        if not np.array_equal(self.labels, lt.labels[self.vertices]):
            raise ValueError("corner labels must match tree labels")


def corner_sequence(lt: LabeledTree) -> CornerSequence:
    corners = lt.tree.corners()
    return CornerSequence(vertices=corners, labels=lt.labels[corners])


def encode(lt: LabeledTree) -> PlanarMapGraph:
    """Quadrangulation of a well-labeled tree with n edges: n faces, n + 2
    vertices, 2n edges, pointed at the extra vertex, rooted at the edge from
    the first root corner to the extra vertex (extra vertex as root).

    Edge k is emitted by corner k; successors come from one bucket sweep of
    the cyclic corner sequence, O(n) total. The clockwise rotation around
    each vertex is reconstructed so the output is a genuine map: incoming
    ends of a corner sector nest by source distance (nearest first),
    followed by the sector's outgoing end.
    """
    if lt.variant is not LabelVariant.WELL_LABELED:
        raise ValueError("encode expects a well-labeled tree")
    lt.validate()
    tree = lt.tree
    n = tree.n_edges
    corners = tree.corners()
    clab = lt.labels[corners]
    two_n = corners.shape[0]
    succ = np.asarray(kernels.cvs_successor(clab))
    extra = tree.n_vertices  # the added vertex

    to_extra = succ < 0
    heads = np.where(to_extra, extra, corners[succ])

    # Edge k has an out end (at corners[k], sector k) and an in end (at
    # heads[k], sector succ[k] or the extra vertex). Slots sort by
    # (owner, sector, rank in sector); the out end closes its sector.
    owner = np.concatenate([corners, heads])
    sector = np.concatenate([np.arange(two_n),
                             np.where(to_extra, 0, succ)])
    within = np.concatenate([
        np.full(two_n, two_n + 1, dtype=np.int64),
        np.where(to_extra,
                 (two_n - np.arange(two_n)) % two_n,
                 (succ - np.arange(two_n)) % two_n)])
    edge_of_end = np.concatenate([np.arange(two_n), np.arange(two_n)])

    order = np.lexsort((within, sector, owner))
    rank = np.empty_like(order)
    rank[order] = np.arange(order.shape[0])

    degrees = np.bincount(owner, minlength=extra + 1)
    xadj = np.concatenate(([0], np.cumsum(degrees)))
    other = np.concatenate([heads, corners])
    twin_raw = (np.arange(2 * two_n) + two_n) % (2 * two_n)

    g = PlanarMapGraph(
        xadj=xadj,
        end_vertex=other[order],
        end_edge=edge_of_end[order],
        end_twin=rank[twin_raw][order],
        root_end=int(rank[two_n]),  # in end of edge 0, at the extra vertex
        pointed=extra,
        n_faces=n)
    return g


class IdentityCheck(NamedTuple):
    """Truthy when distances from the extra vertex equal the labels."""

    ok: bool
    witness: int | None

    def __bool__(self) -> bool:
        return self.ok


def verify_distance_identity(lt: LabeledTree, g: PlanarMapGraph) -> IdentityCheck:
    """Check d(extra, v) == label(v) for every tree vertex; on failure the
    witness is the smallest offending vertex."""
    dist = g.bfs_distances(g.pointed)
    tree_part = dist[:lt.tree.n_vertices]
    bad = np.flatnonzero(tree_part != lt.labels)
    if bad.size:
        return IdentityCheck(False, int(bad[0]))
    return IdentityCheck(True, None)


def distance_upper_bound(lt: LabeledTree, v: int, v_prime: int) -> int:
    """label(v) + label(v') - 2 max(min label over [v, v'], min label over
    [v', v]) + 2; an upper bound for the graph distance in the encoding."""
    labels = lt.labels
    fwd = tree_interval(lt.tree, v, v_prime)
    bwd = tree_interval(lt.tree, v_prime, v)
    best_min = max(fwd.min_label(labels), bwd.min_label(labels))
    return int(labels[v] + labels[v_prime] - 2 * best_min + 2)


def discrete_geodesic_to_root(lt: LabeledTree, g: PlanarMapGraph,
                              corner: int) -> list[int]:
    """Successor chain from the given corner down to the extra vertex.

    Labels drop by one per step, so the path length equals the label of the
    starting corner's vertex, and every step is an edge of the encoding.
    """
    corners = lt.tree.corners()
    if not 0 <= corner < corners.shape[0]:
        raise ValueError("corner out of range")
    succ = np.asarray(kernels.cvs_successor(lt.labels[corners]))
    path = [int(corners[corner])]
    cur = corner
    while succ[cur] >= 0:
        cur = int(succ[cur])
        path.append(int(corners[cur]))
    path.append(g.pointed)
    return path
