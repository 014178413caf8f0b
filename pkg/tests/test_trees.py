import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randgeo import trees
from randgeo._rng import stream
from randgeo.trees import LabelVariant


class TestSamplePlaneTree:
    def test_one_edge_tree_is_unique(self):
        t = trees.sample_plane_tree(1, 0)
        assert t.n_edges == 1
        assert t.parent.tolist() == [-1, 0]
        assert t.contour.tolist() == [0, 1, 0]

    def test_rejects_degenerate_size(self):
        with pytest.raises(ValueError):
            trees.sample_plane_tree(0, 0)

    @pytest.mark.parametrize("n", [1, 2, 5, 17])
    def test_contour_length(self, n):
        t = trees.sample_plane_tree(n, 123 + n)
        t.validate()
        assert t.contour.shape[0] == 2 * n + 1

    def test_three_edge_frequencies(self):
        # 5 plane trees with 3 edges, each frequency 0.2 +- 0.01 over 1e5 draws
        rng = stream(42)
        counts = {}
        draws = 100_000
        for _ in range(draws):
            t = trees.sample_plane_tree(3, rng)
            key = tuple(t.parent[1:].tolist())
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 5
        for c in counts.values():
            assert abs(c / draws - 0.2) < 0.01

    def test_uniformity_five_sigma_n4(self):
        # every plane tree with 4 edges within 5 sigma of uniform
        rng = stream(43)
        draws = 100_000
        counts = {}
        for _ in range(draws):
            t = trees.sample_plane_tree(4, rng)
            key = tuple(t.parent[1:].tolist())
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 14
        p = 1 / 14
        sigma = (draws * p * (1 - p)) ** 0.5
        for c in counts.values():
            assert abs(c - draws * p) < 5 * sigma

    def test_deterministic_given_seed(self):
        a = trees.sample_plane_tree(50, 7)
        b = trees.sample_plane_tree(50, 7)
        assert np.array_equal(a.parent, b.parent)
        assert np.array_equal(a.contour, b.contour)


class TestAttachLabels:
    def test_one_edge_three_labelings_uniform(self):
        tree = trees.sample_plane_tree(1, 0)
        rng = stream(44)
        draws = 100_000
        counts = {-1: 0, 0: 0, 1: 0}
        for _ in range(draws):
            lt = trees.attach_labels(tree, LabelVariant.FREE_ROOT_ZERO, rng)
            counts[int(lt.labels[1])] += 1
        for c in counts.values():
            assert abs(c / draws - 1 / 3) < 0.01

    def test_adjacent_differences_bounded(self):
        rng = stream(45)
        for _ in range(50):
            tree = trees.sample_plane_tree(int(rng.integers(1, 40)), rng)
            lt = trees.attach_labels(tree, LabelVariant.FREE_ROOT_ZERO, rng)
            lt.validate()

    def test_path_tree_nine_labelings(self):
        # n=2 path tree: 3^2 increment choices, all equally likely
        tree = trees.PlaneTree.from_parents([-1, 0, 1])
        rng = stream(46)
        draws = 90_000
        counts = {}
        for _ in range(draws):
            lt = trees.attach_labels(tree, LabelVariant.FREE_ROOT_ZERO, rng)
            counts[tuple(lt.labels.tolist())] = counts.get(tuple(lt.labels.tolist()), 0) + 1
        assert len(counts) == 9
        for c in counts.values():
            assert abs(c / draws - 1 / 9) < 0.01

    def test_well_labeled_rejection_variant(self):
        tree = trees.PlaneTree.from_parents([-1, 0, 1, 1])
        lt = trees.attach_labels(tree, LabelVariant.WELL_LABELED, 5)
        lt.validate()
        assert lt.variant is LabelVariant.WELL_LABELED


class TestRerootShift:
    def test_pure_shift_case(self):
        # root already minimal at its first corner: labels shift by 1 - min
        tree = trees.PlaneTree.from_parents([-1, 0, 0])
        lt = trees.LabeledTree(tree, np.array([0, 1, 1]), LabelVariant.FREE_ROOT_ZERO)
        out = trees.reroot_shift(lt)
        assert out.labels.tolist() == [1, 2, 2]
        assert np.array_equal(out.tree.parent, tree.parent)

    def test_one_edge_negative_label(self):
        tree = trees.PlaneTree.from_parents([-1, 0])
        lt = trees.LabeledTree(tree, np.array([0, -1]), LabelVariant.FREE_ROOT_ZERO)
        out = trees.reroot_shift(lt)
        out.validate()
        assert out.labels.tolist() == [1, 2]

    def test_always_valid_and_min_is_one(self):
        rng = stream(47)
        for _ in range(300):
            tree = trees.sample_plane_tree(int(rng.integers(1, 30)), rng)
            lt = trees.attach_labels(tree, LabelVariant.FREE_ROOT_ZERO, rng)
            out = trees.reroot_shift(lt)
            out.validate()
            assert int(out.labels.min()) == 1

    def test_covers_all_54_well_labeled_trees(self):
        target = {lt.key() for lt in trees.enumerate_well_labeled(3)}
        seen = set()
        rng = stream(48)
        for _ in range(20_000):
            tree = trees.sample_plane_tree(3, rng)
            lt = trees.attach_labels(tree, LabelVariant.FREE_ROOT_ZERO, rng)
            seen.add(trees.reroot_shift(lt).key())
        assert seen == target


class TestSampleWellLabeled:
    def test_one_edge_two_trees_uniform(self):
        rng = stream(49)
        draws = 10_000
        counts = {}
        for _ in range(draws):
            lt = trees.sample_well_labeled(1, "rejection", rng)
            counts[lt.key()] = counts.get(lt.key(), 0) + 1
        assert len(counts) == 2
        for c in counts.values():
            assert abs(c / draws - 0.5) < 0.02

    @pytest.mark.parametrize("n,count", [(2, 9), (3, 54)])
    def test_uniform_over_enumeration(self, n, count):
        rng = stream(50 + n)
        draws = 100_000
        counts = {}
        for _ in range(draws):
            lt = trees.sample_well_labeled(n, "rejection", rng)
            counts[lt.key()] = counts.get(lt.key(), 0) + 1
        assert len(counts) == count
        p = 1 / count
        sigma = (draws * p * (1 - p)) ** 0.5
        for c in counts.values():
            assert abs(c - draws * p) < 5 * sigma

    def test_uniform_n4_five_sigma(self):
        # all 378 well-labeled trees with 4 edges within 5 sigma of uniform
        rng = stream(54)
        draws = 100_000
        counts = {}
        for _ in range(draws):
            lt = trees.sample_well_labeled(4, "rejection", rng)
            counts[lt.key()] = counts.get(lt.key(), 0) + 1
        assert len(counts) == 378
        p = 1 / 378
        sigma = (draws * p * (1 - p)) ** 0.5
        for c in counts.values():
            assert abs(c - draws * p) < 5 * sigma

    def test_enumeration_mode_matches(self):
        lt = trees.sample_well_labeled(3, "enumeration", 1)
        lt.validate()
        keys = {x.key() for x in trees.enumerate_well_labeled(3)}
        assert lt.key() in keys

    def test_budget_guard(self):
        with pytest.raises(trees.BudgetExceededError):
            trees.sample_well_labeled(40, "rejection", 0, attempt_budget=1)


class TestEnumeration:
    @pytest.mark.parametrize("n,count", [(1, 2), (2, 9), (3, 54)])
    def test_counts(self, n, count):
        pool = trees.enumerate_well_labeled(n)
        assert len(pool) == count
        assert len({lt.key() for lt in pool}) == count

    def test_counts_match_closed_form(self):
        for n in range(1, 6):
            assert len(trees.enumerate_well_labeled(n)) == trees.count_well_labeled(n)

    def test_guard_on_large_n(self):
        with pytest.raises(ValueError):
            trees.enumerate_well_labeled(7)

    def test_all_valid(self):
        for lt in trees.enumerate_well_labeled(3):
            lt.validate()


class TestTreeInterval:
    def test_paper_interval_forward(self, paper_tree):
        iv = trees.tree_interval(paper_tree.tree, 3, 6)
        assert iv.vertices == [3, 2, 5, 1, 6]  # 111, 11, 112, 1, 12

    def test_paper_interval_backward(self, paper_tree):
        iv = trees.tree_interval(paper_tree.tree, 6, 3)
        assert iv.vertices == [6, 1, 0, 2, 3]  # 12, 1, root, 11, 111

    def test_adjacent_parent_child(self):
        # u = parent(w), u right after w in contour: [w, u] begins (w, u)
        tree = trees.PlaneTree.from_parents([-1, 0, 1])
        iv = trees.tree_interval(tree, 2, 1)
        assert iv.vertices[:2] == [2, 1]
        assert iv.walk.shape[0] == 2

    def test_walk_is_contour_adjacent(self):
        rng = stream(52)
        for _ in range(30):
            tree = trees.sample_plane_tree(int(rng.integers(2, 25)), rng)
            v, w = (int(x) for x in rng.integers(tree.n_vertices, size=2))
            iv = trees.tree_interval(tree, v, w)
            assert iv.walk[0] == v and iv.walk[-1] == w
            for a, b in zip(iv.walk[:-1], iv.walk[1:]):
                assert a == b or tree.parent[a] == b or tree.parent[b] == a

    def test_endpoints_out_of_range(self):
        tree = trees.sample_plane_tree(3, 0)
        with pytest.raises(ValueError):
            trees.tree_interval(tree, 0, 99)

    def test_complementary_positions_cover_cycle(self):
        # the two position ranges chosen for [v,w] and [w,v] need not tile
        # the contour (the smallest-interval convention), but each one,
        # continued to the other's start, does; check the weaker sound
        # property: both intervals contain v and w
        rng = stream(53)
        for _ in range(30):
            tree = trees.sample_plane_tree(int(rng.integers(2, 20)), rng)
            v, w = (int(x) for x in rng.integers(tree.n_vertices, size=2))
            a = set(trees.tree_interval(tree, v, w).vertices)
            b = set(trees.tree_interval(tree, w, v).vertices)
            assert {v, w} <= a and {v, w} <= b


class TestSerialization:
    def test_round_trip_plane(self):
        t = trees.sample_plane_tree(12, 3)
        buf = io.StringIO()
        trees.dump_tree(t, buf)
        buf.seek(0)
        back = trees.load_tree(buf)
        assert isinstance(back, trees.PlaneTree)
        assert np.array_equal(back.parent, t.parent)
        assert np.array_equal(back.contour, t.contour)

    def test_round_trip_labeled(self):
        lt = trees.sample_well_labeled(4, "rejection", 9)
        buf = io.StringIO()
        trees.dump_tree(lt, buf)
        buf.seek(0)
        back = trees.load_tree(buf)
        assert isinstance(back, trees.LabeledTree)
        assert back.variant is LabelVariant.WELL_LABELED
        assert back.key() == lt.key()

    def test_exact_integer_format(self):
        tree = trees.PlaneTree.from_parents([-1, 0, 0])
        lt = trees.LabeledTree(tree, np.array([0, -1, 1]), LabelVariant.FREE_ROOT_ZERO)
        buf = io.StringIO()
        trees.dump_tree(lt, buf)
        assert buf.getvalue() == "2\n0 0\n0 -1 1\n"


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=25), st.integers(min_value=0, max_value=10**6))
def test_sampled_trees_always_valid(n, seed):
    t = trees.sample_plane_tree(n, seed)
    t.validate()
    lt = trees.attach_labels(t, LabelVariant.FREE_ROOT_ZERO, seed)
    lt.validate()
