import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ugrm_gft.graph import (
    DirectedGraph,
    ProductShape,
    UgrmParams,
    cartesian_product,
    derive_matrices,
    kron_sum,
    kronecker,
    ugrm,
    unvec,
    vec,
)

from conftest import directed_cycle, random_digraph

GRID = [i / 10 for i in range(11)]


def product_by_enumeration(g1, g2):
    """Weight function of the Cartesian product, one vertex pair at a time."""
    n1, n2 = g1.n, g2.n
    w = np.zeros((n1 * n2, n1 * n2))
    for i1 in range(n1):
        for i2 in range(n2):
            for j1 in range(n1):
                for j2 in range(n2):
                    w[i1 * n2 + i2, j1 * n2 + j2] = (
                        g1.weights[i1, j1] * (i2 == j2) + (i1 == j1) * g2.weights[i2, j2]
                    )
    return w


class TestDirectedGraph:
    def test_rejects_self_loops(self):
        with pytest.raises(ValueError, match="self-loops"):
            DirectedGraph([[1.0, 0.0], [0.0, 0.0]])

    def test_rejects_negative_weights(self):
        with pytest.raises(ValueError, match="nonnegative"):
            DirectedGraph([[0.0, -1.0], [0.0, 0.0]])

    @pytest.mark.parametrize("w", [np.zeros((0, 0)), np.zeros((2, 3)), [[0.0, np.nan], [0, 0]]])
    def test_rejects_malformed(self, w):
        with pytest.raises(ValueError):
            DirectedGraph(w)

    def test_from_edges_orientation(self):
        g = DirectedGraph.from_edges(2, [(0, 1, 2.5)])
        assert g.weights[1, 0] == 2.5
        assert g.weights[0, 1] == 0.0

    def test_weights_are_read_only(self):
        g = DirectedGraph(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            g.weights[0, 1] = 1.0


class TestDeriveMatrices:
    def test_empty_graph(self):
        m = derive_matrices(DirectedGraph(np.zeros((2, 2))))
        for mat in (m.adjacency, m.in_degree, m.laplacian, m.signless_laplacian):
            np.testing.assert_array_equal(mat, np.zeros((2, 2)))

    def test_single_edge(self):
        # edge 1 -> 2 in 1-based terms
        m = derive_matrices(DirectedGraph.from_edges(2, [(0, 1)]))
        np.testing.assert_array_equal(m.in_degree, np.diag([0.0, 1.0]))
        np.testing.assert_array_equal(m.laplacian, [[0.0, 0.0], [-1.0, 1.0]])

    def test_cycle_in_degree(self):
        np.testing.assert_array_equal(derive_matrices(directed_cycle(4)).in_degree, np.eye(4))

    def test_laplacian_rows_and_l_plus_q(self, rng):
        for _ in range(10):
            m = derive_matrices(random_digraph(rng, 7))
            assert np.abs(m.laplacian.sum(axis=1)).max() <= 1e-12
            np.testing.assert_array_equal(m.laplacian + m.signless_laplacian, 2 * m.in_degree)
            assert np.all(np.diag(m.in_degree) >= 0)

    def test_by_kind(self):
        m = derive_matrices(directed_cycle(3))
        assert m.by_kind("L") is m.laplacian
        with pytest.raises(ValueError):
            m.by_kind("P")


class TestUgrm:
    @pytest.mark.parametrize("alpha,k", [(-0.1, 0.5), (0.5, 1.01), (np.nan, 0.0)])
    def test_params_out_of_range(self, alpha, k):
        with pytest.raises(ValueError):
            UgrmParams(alpha, k)

    def test_degenerate_points(self, rng):
        g = random_digraph(rng, 6)
        m = derive_matrices(g)
        for k in GRID:
            np.testing.assert_array_equal(ugrm(g, UgrmParams(1.0, k)), m.in_degree)
        np.testing.assert_array_equal(ugrm(g, UgrmParams(0.5, 1.0)), 0.5 * m.laplacian)
        np.testing.assert_array_equal(ugrm(g, UgrmParams(0.0, 0.0)), m.adjacency)
        np.testing.assert_array_equal(ugrm(g, UgrmParams(0.5, 0.0)), 0.5 * m.signless_laplacian)

    def test_formula(self, rng):
        g = random_digraph(rng, 5)
        m = derive_matrices(g)
        p = ugrm(g, UgrmParams(0.3, 0.8))
        expected = 0.3 * m.in_degree + (2 * 0.8 - 1) * (0.3 - 1) * m.adjacency
        np.testing.assert_allclose(p, expected, rtol=0, atol=1e-15)


class TestKronecker:
    def test_identity(self):
        np.testing.assert_array_equal(kronecker(np.eye(2), np.eye(2)), np.eye(4))

    def test_hand_example(self):
        np.testing.assert_array_equal(kronecker([[1, 2]], [[3], [4]]), [[3, 6], [4, 8]])

    def test_shape(self):
        assert kronecker(np.ones((2, 3)), np.ones((4, 5))).shape == (8, 15)

    def test_matches_numpy(self, rng):
        a, b = rng.standard_normal((3, 2)), rng.standard_normal((2, 4))
        np.testing.assert_array_equal(kronecker(a, b), np.kron(a, b))

    def test_mixed_product(self, rng):
        for shape in (2, 3):
            a, b, c, d = (rng.standard_normal((shape, shape)) for _ in range(4))
            lhs = kronecker(a, b) @ kronecker(c, d)
            rhs = kronecker(a @ c, b @ d)
            assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(rhs)


class TestKronSum:
    def test_zero(self):
        np.testing.assert_array_equal(kron_sum(np.zeros((2, 2)), np.zeros((3, 3))), np.zeros((6, 6)))

    def test_diagonal(self):
        out = kron_sum(np.diag([1.0, 2.0]), np.diag([10.0, 20.0]))
        np.testing.assert_array_equal(out, np.diag([11.0, 21.0, 12.0, 22.0]))

    def test_non_square(self):
        with pytest.raises(ValueError, match="square"):
            kron_sum(np.zeros((2, 3)), np.eye(2))

    def test_product_ugrm_is_kron_sum(self, rng):
        g1, g2 = random_digraph(rng, 3), random_digraph(rng, 4)
        g = cartesian_product(g1, g2)
        for alpha in GRID:
            for k in GRID:
                p = UgrmParams(alpha, k)
                np.testing.assert_allclose(
                    ugrm(g, p), kron_sum(ugrm(g1, p), ugrm(g2, p)), rtol=0, atol=1e-12
                )


class TestCartesianProduct:
    def test_two_paths(self):
        p2 = DirectedGraph.from_edges(2, [(0, 1)])
        g = cartesian_product(p2, p2)
        # flat index i1 * 2 + i2; edges copy each factor's direction
        expected = {(0, 2), (1, 3), (0, 1), (2, 3)}
        got = {(j, i) for i, j in zip(*np.nonzero(g.weights))}
        assert got == expected
        assert np.all(g.weights[np.nonzero(g.weights)] == 1.0)

    def test_single_vertex_factor(self, rng):
        g = random_digraph(rng, 5)
        one = DirectedGraph(np.zeros((1, 1)))
        np.testing.assert_array_equal(cartesian_product(g, one).weights, g.weights)
        np.testing.assert_array_equal(cartesian_product(one, g).weights, g.weights)

    def test_matches_enumeration_and_kron_sum(self, rng):
        for _ in range(5):
            g1, g2 = random_digraph(rng, 3), random_digraph(rng, 4)
            g = cartesian_product(g1, g2)
            np.testing.assert_array_equal(g.weights, product_by_enumeration(g1, g2))
            np.testing.assert_allclose(g.weights, kron_sum(g1.weights, g2.weights), atol=0)

    def test_labels(self):
        g1 = DirectedGraph(np.zeros((2, 2)), ["a", "b"])
        g2 = DirectedGraph(np.zeros((2, 2)), ["x", "y"])
        assert cartesian_product(g1, g2).labels == ("a|x", "a|y", "b|x", "b|y")


class TestVec:
    def test_column_stacking(self):
        np.testing.assert_array_equal(vec([[1, 3], [2, 4]]), [1, 2, 3, 4])

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)),
                  elements=st.floats(-1e6, 1e6)))
    def test_roundtrip(self, x):
        shape = ProductShape(x.shape[1], x.shape[0])
        np.testing.assert_array_equal(unvec(vec(x), shape), x)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            unvec(np.zeros(5), ProductShape(2, 2))

    def test_kron_sum_vec_identity(self, rng):
        p1, p2 = rng.standard_normal((2, 2)), rng.standard_normal((3, 3))
        x = rng.standard_normal((3, 2))
        np.testing.assert_allclose(
            kron_sum(p1, p2) @ vec(x), vec(p2 @ x + x @ p1.T), rtol=1e-12, atol=1e-12
        )
