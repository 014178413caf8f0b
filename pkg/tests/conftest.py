import numpy as np
import pytest

from randgeo import cvs, trees
from randgeo._rng import stream


@pytest.fixture(scope="session")
def paper_tree():
    """The eight-vertex example tree: preorder parents [-1,0,1,2,3,2,1,6],
    labels (1,2,3,2,1,3,1,2). Vertex ids in word notation:
    0 = root, 1 = first child, 2 = 11, 3 = 111, 4 = 1111, 5 = 112,
    6 = 12, 7 = 121."""
    tree = trees.PlaneTree.from_parents([-1, 0, 1, 2, 3, 2, 1, 6])
    labels = np.array([1, 2, 3, 2, 1, 3, 1, 2])
    return trees.LabeledTree(tree, labels, trees.LabelVariant.WELL_LABELED)


@pytest.fixture(scope="session")
def paper_map(paper_tree):
    return cvs.encode(paper_tree)


def pipeline_map(n, seed):
    """Large-n sampling route: uniform tree, free labels, shift to the
    minimum, encode."""
    rng = seed if isinstance(seed, np.random.Generator) else stream(seed)
    tree = trees.sample_plane_tree(n, rng)
    lt = trees.attach_labels(tree, trees.LabelVariant.FREE_ROOT_ZERO, rng)
    wl = trees.reroot_shift(lt)
    return cvs.encode(wl), wl
