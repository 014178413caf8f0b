import io

import numpy as np
import pytest

from randgeo import cvs, maps, trees
from randgeo._rng import stream
from tests.conftest import pipeline_map


def path_graph(k):
    """Path with k edges, rooted at its first edge."""
    return maps.PlanarMapGraph.from_edges(k + 1, [(i, i + 1) for i in range(k)],
                                          root_edge=(0, 1))


def cycle_graph(k):
    edges = [(i, (i + 1) % k) for i in range(k)]
    return maps.PlanarMapGraph.from_edges(k, edges, root_edge=(0, 1))


class TestBfs:
    def test_source_distance_zero(self):
        g = path_graph(4)
        assert g.bfs_distances(2)[2] == 0

    def test_path_graph_distances(self):
        g = path_graph(6)
        assert g.bfs_distances(0).tolist() == list(range(7))

    def test_paper_map_distances_equal_labels(self, paper_tree, paper_map):
        dist = paper_map.bfs_distances(paper_map.pointed)
        assert np.array_equal(dist[:8], paper_tree.labels)

    def test_symmetric_on_sampled_pairs(self):
        g, _ = pipeline_map(400, 1)
        rng = stream(2)
        for _ in range(20):
            u, v = (int(x) for x in rng.integers(g.n_vertices, size=2))
            assert g.bfs_distances(u)[v] == g.bfs_distances(v)[u]

    def test_triangle_inequality_sampled(self):
        g, _ = pipeline_map(400, 3)
        rng = stream(4)
        for _ in range(20):
            u, v, w = (int(x) for x in rng.integers(g.n_vertices, size=3))
            du = g.bfs_distances(u)
            dv = g.bfs_distances(v)
            assert du[w] <= du[v] + dv[w]

    def test_source_out_of_range(self):
        with pytest.raises(ValueError):
            path_graph(3).bfs_distances(99)


class TestDistanceProfile:
    def test_paper_profile(self, paper_map):
        prof = maps.distance_profile(paper_map, paper_map.pointed)
        assert prof.counts.tolist() == [1, 3, 3, 2]

    def test_total_mass(self):
        g, _ = pipeline_map(250, 5)
        prof = maps.distance_profile(g, 0)
        prof.validate(g)
        assert prof.total == g.n_vertices

    def test_single_edge_profile(self):
        g = path_graph(1)
        assert maps.distance_profile(g, 0).counts.tolist() == [1, 1]


class TestHull:
    def test_radius_zero(self):
        g, _ = pipeline_map(100, 6)
        dist = g.bfs_distances(0)
        far = int(np.argmax(dist))
        h = maps.hull(g, 0, 0, far)
        assert 0 in h and far not in h

    def test_near_maximal_radius(self):
        g = path_graph(5)
        h = maps.hull(g, 0, 4, far_vertex=5)
        assert h.tolist() == [0, 1, 2, 3, 4]

    def test_far_vertex_inside_ball_rejected(self):
        g = path_graph(5)
        with pytest.raises(ValueError):
            maps.hull(g, 0, 4, far_vertex=3)

    def test_contains_ball_and_monotone(self):
        for seed in range(20):
            g, _ = pipeline_map(500, 40 + seed)
            dist = g.bfs_distances(0)
            far = int(np.argmax(dist))
            ecc = int(dist[far])
            prev = None
            for r in range(0, min(ecc - 1, 6)):
                h = maps.hull(g, 0, r, far)
                assert set(np.flatnonzero(dist <= r)) <= set(h.tolist())
                if prev is not None:
                    assert set(prev.tolist()) <= set(h.tolist())
                prev = h

    def test_complement_of_hull_connected_to_far(self):
        g, _ = pipeline_map(300, 77)
        dist = g.bfs_distances(0)
        far = int(np.argmax(dist))
        h = maps.hull(g, 0, 2, far)
        outside = np.setdiff1d(np.arange(g.n_vertices), h)
        labels = maps._component_labels(g, np.isin(np.arange(g.n_vertices), outside))
        assert outside.size == 0 or len(set(labels[outside].tolist())) == 1


class TestComplementComponents:
    def test_zero_beyond_eccentricity(self):
        g, _ = pipeline_map(120, 8)
        ecc = int(g.bfs_distances(0).max())
        assert maps.complement_component_count(g, 0, ecc, 1) == 0

    def test_cycle_eight(self):
        g = cycle_graph(8)
        assert maps.complement_component_count(g, 0, 1, 1) == 1

    def test_monotone_in_eps(self):
        g, _ = pipeline_map(100_000, 9)
        u = 123
        dist = g.bfs_distances(u)
        r = max(2, int(round(0.5 * dist.max())))
        counts = [maps.complement_component_count(g, u, r, e) for e in (1, 2, 3, 5)]
        assert counts == sorted(counts, reverse=True)

    def test_guards(self):
        g = cycle_graph(8)
        with pytest.raises(ValueError):
            maps.complement_component_count(g, 0, 0, 1)


class TestCanonicalCode:
    def test_identical_maps_identical_codes(self):
        a, _ = pipeline_map(40, 10)
        b, _ = pipeline_map(40, 10)
        assert maps.canonical_code(a) == maps.canonical_code(b)

    def test_code_reflects_rooting(self):
        # path rooted at an end vs at the middle: different rooted maps
        g1 = maps.PlanarMapGraph.from_edges(3, [(0, 1), (1, 2)], root_edge=(0, 1))
        g2 = maps.PlanarMapGraph.from_edges(3, [(0, 1), (1, 2)], root_edge=(1, 0))
        assert maps.canonical_code(g1) != maps.canonical_code(g2)

    def test_code_independent_of_vertex_names(self):
        g1 = maps.PlanarMapGraph.from_edges(3, [(0, 1), (1, 2)], root_edge=(0, 1))
        g2 = maps.PlanarMapGraph.from_edges(3, [(2, 1), (1, 0)], root_edge=(2, 1))
        assert maps.canonical_code(g1) == maps.canonical_code(g2)


class TestLocalCensus:
    def test_radius_zero_single_vertex(self, paper_map):
        assert maps.local_ball_census(paper_map, 0) == b"0"

    def test_deterministic(self):
        a, _ = pipeline_map(200, 11)
        b, _ = pipeline_map(200, 11)
        for k in (1, 2):
            assert maps.local_ball_census(a, k) == maps.local_ball_census(b, k)

    def test_radius_one_ball_is_star(self):
        # quadrangulations are bipartite, so the radius-1 ball around the
        # base vertex has no edges between neighbors: code lists only edges
        # touching the root
        g, _ = pipeline_map(500, 12)
        code = maps.local_ball_census(g, 1)
        deg = g.degree(g.root_tail)
        root_words = code.split(b"|")[0].split(b",")
        assert len(root_words) == deg

    def test_full_radius_recovers_map(self, paper_map):
        ecc = int(paper_map.bfs_distances(paper_map.root_tail).max())
        assert maps.local_ball_census(paper_map, ecc) == maps.canonical_code(paper_map)


class TestTwoPoint:
    def test_same_vertex_zero(self):
        g, _ = pipeline_map(100, 13)
        # find a seed where the two uniform draws collide
        for s in range(2000):
            rng = stream(14, s)
            v = rng.integers(g.n_vertices, size=2)
            if v[0] == v[1]:
                assert maps.two_point_sample(g, stream(14, s)) == 0.0
                break
        else:
            pytest.fail("no colliding pair found")

    def test_scale_constant(self):
        assert abs(maps.TWO_POINT_SCALE - 1.0298835) < 1e-6

    def test_bounded_by_diameter(self):
        g, _ = pipeline_map(200, 15)
        diam_bound = maps.TWO_POINT_SCALE * 200 ** -0.25 * int(g.bfs_distances(0).max() * 2)
        for s in range(10):
            v = maps.two_point_sample(g, stream(16, s))
            assert 0.0 <= v <= diam_bound

    def test_needs_face_count(self):
        g = path_graph(3)
        with pytest.raises(ValueError):
            maps.two_point_sample(g, 0)


class TestSerialization:
    def test_round_trip(self):
        g, _ = pipeline_map(60, 17)
        buf = io.StringIO()
        maps.dump_map(g, buf)
        buf.seek(0)
        back = maps.load_map(buf)
        assert back.n_vertices == g.n_vertices
        assert back.n_edges == g.n_edges
        assert back.n_faces == g.n_faces
        assert back.pointed == g.pointed
        assert (back.root_tail, back.root_head) == (g.root_tail, g.root_head)
        # the graph metric survives (rotations are reconstructed as file
        # order and may differ; distances must not)
        assert np.array_equal(back.bfs_distances(back.pointed),
                              g.bfs_distances(g.pointed))

    def test_header_format(self):
        g = path_graph(2)
        buf = io.StringIO()
        maps.dump_map(g, buf)
        header = buf.getvalue().splitlines()[0]
        assert header == "3 2 -1 0 1 -1"

    def test_validate_catches_bad_face_count(self):
        g, _ = pipeline_map(30, 18)
        bad = maps.PlanarMapGraph(xadj=g.xadj, end_vertex=g.end_vertex,
                                  end_edge=g.end_edge, end_twin=g.end_twin,
                                  root_end=g.root_end, pointed=g.pointed,
                                  n_faces=g.n_faces + 1)
        with pytest.raises(ValueError):
            bad.validate()
