import math
import random

import numpy as np
import pytest

from linksentinel.graph import (
    INFINITY,
    Digraph,
    Edge,
    ParseError,
    adjacency,
    cycle_digraph,
    distance,
    enumerate_walks,
    in_degree,
    integer_matrix_power,
    laplacian,
    parse_edge_list,
    random_digraph,
    remove_edge,
    star_digraph,
    walk_count,
    walk_weight_sum,
    with_self_loops,
)


def oracle_distance(g, src, dst):
    """Independent shortest-walk oracle: smallest k with a nonzero count."""
    if src == dst:
        return 0
    for k in range(1, g.n + 1):
        if walk_count(g, src, dst, k):
            return k
    return INFINITY


class TestDigraph:
    def test_rejects_out_of_range_edges(self):
        with pytest.raises(ValueError):
            Digraph(2, [(1, 3)])
        with pytest.raises(ValueError):
            Digraph(2, [(0, 1)])

    def test_rejects_duplicate_edges(self):
        with pytest.raises(ValueError):
            Digraph(3, [(1, 2), (1, 2)])

    def test_rejects_empty_vertex_set(self):
        with pytest.raises(ValueError):
            Digraph(0, [])

    def test_self_loops_representable(self):
        g = Digraph(2, [(1, 1)])
        assert g.has_self_loops()

    def test_canonical_edge_order_is_lexicographic(self):
        g = Digraph(3, [(3, 1), (1, 2), (2, 1)])
        assert g.canonical_edges() == ((1, 2), (2, 1), (3, 1))


class TestAdjacency:
    def test_single_edge(self):
        g = Digraph(2, [(1, 2)])
        assert adjacency(g).tolist() == [[0, 0], [1, 0]]

    def test_empty_graph_is_zero(self):
        assert adjacency(Digraph(3)).tolist() == [[0] * 3] * 3

    def test_cycle_matches_distance_oracle(self, five_cycle):
        # The cycle must realize the reference distance pattern: from i the
        # distance to j is (j - i) mod 5; cross-checked with the walk-count
        # oracle rather than the BFS used by distance().
        a = adjacency(five_cycle)
        assert a.sum() == 5
        for i in range(1, 6):
            for j in range(1, 6):
                assert oracle_distance(five_cycle, i, j) == (j - i) % 5

    def test_self_loop_hits_diagonal(self):
        g = Digraph(2, [(1, 1), (1, 2)])
        assert adjacency(g).tolist() == [[1, 0], [1, 0]]


class TestInDegree:
    def test_cycle_every_vertex_one(self, five_cycle):
        assert [in_degree(five_cycle, v) for v in five_cycle.vertices] == [1] * 5

    def test_star_hub(self, star5):
        assert in_degree(star5, 5) == 4

    def test_isolated_vertex(self):
        assert in_degree(Digraph(3, [(1, 2)]), 3) == 0

    def test_self_loop_not_counted(self):
        assert in_degree(Digraph(2, [(2, 2)]), 2) == 0

    def test_out_of_range(self, five_cycle):
        with pytest.raises(IndexError):
            in_degree(five_cycle, 6)


class TestLaplacian:
    def test_single_edge(self):
        g = Digraph(2, [(1, 2)])
        assert laplacian(g).tolist() == [[0, 0], [-1, 1]]

    def test_empty_graph(self):
        assert laplacian(Digraph(3)).tolist() == [[0] * 3] * 3

    def test_cycle_is_identity_minus_shift(self, five_cycle):
        lap = laplacian(five_cycle)
        assert np.array_equal(lap, np.eye(5, dtype=int) - adjacency(five_cycle))
        assert lap.sum(axis=1).tolist() == [0] * 5

    def test_row_sums_zero_and_diagonal_is_in_degree(self):
        rng = random.Random(3)
        for _ in range(20):
            g = random_digraph(rng.randint(2, 8), 0.4, rng)
            lap = laplacian(g)
            assert lap.sum(axis=1).tolist() == [0] * g.n
            for v in g.vertices:
                assert lap[v - 1, v - 1] == in_degree(g, v)


class TestDistance:
    def test_cycle_reference_value(self, five_cycle):
        assert distance(five_cycle, 3, 2) == 4

    def test_diagonal_zero(self, five_cycle, star5):
        for g in (five_cycle, star5):
            for v in g.vertices:
                assert distance(g, v, v) == 0

    def test_star_leaves_unreachable(self, star5):
        assert distance(star5, 1, 2) == INFINITY
        assert distance(star5, 5, 1) == INFINITY

    def test_matches_walk_count_oracle(self):
        rng = random.Random(11)
        for _ in range(25):
            g = random_digraph(rng.randint(2, 7), 0.3, rng)
            for s in g.vertices:
                for t in g.vertices:
                    assert distance(g, s, t) == oracle_distance(g, s, t)


class TestWalkCount:
    def test_length_zero_convention(self, five_cycle):
        for v in five_cycle.vertices:
            assert walk_count(five_cycle, v, v, 0) == 1
        assert walk_count(five_cycle, 1, 2, 0) == 0

    def test_cycle_wraparound(self, five_cycle):
        assert walk_count(five_cycle, 3, 2, 4) == 1

    def test_single_edge(self):
        assert walk_count(Digraph(2, [(1, 2)]), 1, 2, 1) == 1

    def test_counts_are_exact_ints(self):
        # Dense graph and a long walk: counts overflow 64-bit quickly.
        g = Digraph(
            6, [(i, j) for i in range(1, 7) for j in range(1, 7) if i != j]
        )
        total = walk_count(with_self_loops(g), 1, 1, 30)
        assert isinstance(total, int)
        assert total == integer_matrix_power(adjacency(with_self_loops(g)), 30)[0][0]
        assert total > 2**63

    def test_negative_length_rejected(self, five_cycle):
        with pytest.raises(ValueError):
            walk_count(five_cycle, 1, 2, -1)


class TestEnumerateWalks:
    def test_cycle_single_walk(self, five_cycle):
        walks = enumerate_walks(five_cycle, 3, 2, 4)
        assert len(walks) == 1
        (walk,) = walks
        assert walk.edges == ((3, 4), (4, 5), (5, 1), (1, 2))

    def test_length_zero(self, five_cycle):
        assert enumerate_walks(five_cycle, 1, 2, 0) == set()
        (trivial,) = enumerate_walks(five_cycle, 2, 2, 0)
        assert trivial.length == 0 and trivial.start == trivial.end == 2

    def test_walks_chain(self):
        rng = random.Random(5)
        g = random_digraph(5, 0.5, rng)
        for walk in enumerate_walks(with_self_loops(g), 1, 3, 4):
            assert walk.edges[0].tail == 1 and walk.edges[-1].head == 3
            for a, b in zip(walk.edges, walk.edges[1:]):
                assert a.head == b.tail

    def test_first_edge_filter_is_a_subset(self, five_cycle):
        g = with_self_loops(five_cycle)
        walks = enumerate_walks(g, 1, 2, 3)
        starting_with_loop = {w for w in walks if w.edges[0] == (1, 1)}
        assert starting_with_loop <= walks
        assert all(w.edges[0].tail == 1 for w in walks)

    def test_cardinality_matches_walk_count(self):
        rng = random.Random(7)
        for _ in range(12):
            g = random_digraph(rng.randint(2, 6), 0.4, rng)
            for k in range(7):
                for s in g.vertices:
                    for t in g.vertices:
                        assert len(enumerate_walks(g, s, t, k)) == walk_count(
                            g, s, t, k
                        )

    def test_enumeration_cap(self, five_cycle):
        with pytest.raises(ValueError):
            enumerate_walks(five_cycle, 1, 1, 13)


class TestWalkWeightSum:
    def test_empty_set_is_zero(self):
        assert walk_weight_sum(set(), np.zeros((3, 3))) == 0

    def test_cycle_single_edge_weight(self, five_cycle):
        g = with_self_loops(five_cycle)
        weights = -laplacian(five_cycle)
        walks = enumerate_walks(g, 1, 2, 1)
        assert walk_weight_sum(walks, weights) == 1

    def test_matches_matrix_power(self):
        # The weighted walk sum over all s-to-p walks of length k must equal
        # the (p, s) entry of the k-th matrix power, exactly.
        rng = random.Random(13)
        for _ in range(8):
            g = random_digraph(rng.randint(2, 5), 0.4, rng)
            looped = with_self_loops(g)
            weights = (-laplacian(g)).tolist()
            for k in range(6):
                powered = integer_matrix_power(weights, k)
                for s in looped.vertices:
                    for p in looped.vertices:
                        total = walk_weight_sum(
                            enumerate_walks(looped, s, p, k), weights
                        )
                        assert total == powered[p - 1][s - 1]

    def test_random_integer_in_weighting(self):
        # Any in-weighting works, not just Laplacians: random integer
        # weights on the looped graph's edges.
        rng = random.Random(17)
        g = with_self_loops(random_digraph(4, 0.5, rng))
        weights = [[0] * 4 for _ in range(4)]
        for t, h in g.edges:
            weights[h - 1][t - 1] = rng.randint(-3, 3)
        for k in range(5):
            powered = integer_matrix_power(weights, k)
            for s in g.vertices:
                for p in g.vertices:
                    assert (
                        walk_weight_sum(enumerate_walks(g, s, p, k), weights)
                        == powered[p - 1][s - 1]
                    )


class TestRemoveEdge:
    def test_cycle_becomes_path(self, five_cycle):
        g2 = remove_edge(five_cycle, (1, 2))
        assert distance(g2, 1, 2) == INFINITY
        assert len(g2.edges) == 4

    def test_star_head_degree_drops(self, star5):
        assert in_degree(remove_edge(star5, (1, 5)), 5) == 3

    def test_input_unchanged_and_readd_restores(self, five_cycle):
        g2 = remove_edge(five_cycle, (1, 2))
        assert Edge(1, 2) in five_cycle.edges
        g3 = Digraph(g2.n, g2.edges | {Edge(1, 2)})
        assert g3 == five_cycle

    def test_absent_edge_rejected(self, five_cycle):
        with pytest.raises(ValueError):
            remove_edge(five_cycle, (2, 1))

    def test_untouched_walks_survive(self):
        rng = random.Random(19)
        for _ in range(10):
            g = random_digraph(5, 0.5, rng)
            if not g.edges:
                continue
            e = sorted(g.edges)[0]
            g2 = remove_edge(g, e)
            for k in range(5):
                surviving = {
                    w for w in enumerate_walks(g, 1, 2, k) if e not in w.edges
                }
                assert surviving == enumerate_walks(g2, 1, 2, k)


class TestParser:
    def test_round_trip(self, five_cycle):
        text = "n 5\n" + "\n".join(f"{t} {h}" for t, h in five_cycle.canonical_edges())
        assert parse_edge_list(text) == five_cycle

    def test_comments_and_blank_lines(self):
        text = """
        # the reference two-node graph
        n 2
        1 2   # tail head
        """
        assert parse_edge_list(text) == Digraph(2, [(1, 2)])

    def test_duplicate_edge_line_rejected(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_edge_list("n 2\n1 2\n1 2\n")

    def test_directive_must_come_first(self):
        with pytest.raises(ParseError):
            parse_edge_list("1 2\nn 2\n")

    def test_repeated_directive_rejected(self):
        with pytest.raises(ParseError, match="repeated"):
            parse_edge_list("n 2\nn 2\n")

    def test_out_of_range_edge_rejected(self):
        with pytest.raises(ParseError, match="range"):
            parse_edge_list("n 2\n1 3\n")

    def test_missing_directive_rejected(self):
        with pytest.raises(ParseError):
            parse_edge_list("# nothing\n")


class TestGenerators:
    def test_cycle_shape(self):
        g = cycle_digraph(4)
        assert g.canonical_edges() == ((1, 2), (2, 3), (3, 4), (4, 1))

    def test_star_shape(self):
        g = star_digraph(4)
        assert all(h == 4 for _, h in g.edges)
        assert len(g.edges) == 3

    def test_random_digraph_deterministic(self):
        assert random_digraph(6, 0.3, 42) == random_digraph(6, 0.3, 42)
        assert not random_digraph(6, 0.5, 1).has_self_loops()


class TestIntegerMatrixPower:
    def test_identity_at_zero(self):
        assert integer_matrix_power([[2, 1], [0, 3]], 0) == [[1, 0], [0, 1]]

    def test_against_numpy_small(self):
        m = [[1, -2], [3, 0]]
        expected = np.linalg.matrix_power(np.array(m, dtype=object), 7)
        assert integer_matrix_power(m, 7) == expected.tolist()

    def test_negative_exponent_rejected(self):
        with pytest.raises(ValueError):
            integer_matrix_power([[1]], -1)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            integer_matrix_power([[1, 2]], 2)
