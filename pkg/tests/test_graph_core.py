import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smcluster.graph_core import (
    GraphError,
    SparseGraph,
    apply_laplacian,
    build_probabilistic_neighbor_graph,
    degrees,
    neighbor_weights,
    normalize,
)


def test_degrees_single_edge(single_edge):
    np.testing.assert_array_equal(degrees(single_edge), [1, 1])


def test_degrees_triangle(triangle):
    np.testing.assert_array_equal(degrees(triangle), [2, 2, 2])


def test_degrees_isolated_node():
    G = SparseGraph.from_edges(3, [(0, 1, 1.0)])
    np.testing.assert_array_equal(degrees(G), [1, 1, 0])


def test_normalize_single_edge(single_edge):
    op = normalize(single_edge)
    np.testing.assert_array_equal(op.S.toarray(), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(op.laplacian_dense(), [[1, -1], [-1, 1]])


def test_normalize_triangle(triangle):
    op = normalize(triangle)
    A = triangle.to_dense()
    np.testing.assert_allclose(op.S.toarray(), A / 2, atol=1e-15)
    np.testing.assert_allclose(op.laplacian_dense(), np.eye(3) - A / 2, atol=1e-15)


def test_normalize_empty_graph():
    op = normalize(SparseGraph.from_edges(3, []))
    np.testing.assert_array_equal(op.S.toarray(), np.zeros((3, 3)))
    np.testing.assert_array_equal(op.laplacian_dense(), np.eye(3))


def test_isolated_rows_are_zero():
    G = SparseGraph.from_edges(4, [(0, 1, 2.0), (1, 2, 1.0)])
    S = normalize(G).S.toarray()
    assert not S[3].any() and not S[:, 3].any()


def test_laplacian_of_constant_on_triangle(triangle):
    out = apply_laplacian(normalize(triangle), np.ones((3, 1)))
    np.testing.assert_allclose(out, 0, atol=1e-15)


def test_laplacian_empty_graph_is_identity(rng):
    X = rng.standard_normal((3, 2))
    np.testing.assert_array_equal(apply_laplacian(normalize(SparseGraph.from_edges(3, [])), X), X)


def test_laplacian_single_edge(single_edge):
    out = apply_laplacian(normalize(single_edge), np.array([[1.0], [0.0]]))
    np.testing.assert_array_equal(out, [[1], [-1]])


def test_laplacian_shape_mismatch(single_edge):
    with pytest.raises(ValueError):
        apply_laplacian(normalize(single_edge), np.ones((3, 1)))


@pytest.mark.parametrize("seed", range(5))
def test_spectrum_and_nullspace(seed, make_graph):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 200))
    G = make_graph(rng, n, p=5 / n)
    op = normalize(G)
    S = op.S.toarray()
    assert np.abs(S - S.T).max() == 0.0
    assert np.abs(np.linalg.eigvalsh(S)).max() <= 1 + 1e-10
    L = op.laplacian_dense()
    assert np.linalg.eigvalsh(L).min() >= -1e-10
    v = np.sqrt(degrees(G))[:, None]
    assert np.linalg.norm(apply_laplacian(op, v)) <= 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_apply_laplacian_matches_dense(seed, make_graph):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(2, 100))
    G = make_graph(rng, n, p=0.1, connect=False)
    A = G.to_dense()
    d = A.sum(1)
    inv = np.where(d > 0, 1 / np.sqrt(np.where(d > 0, d, 1)), 0.0)
    L = np.eye(n) - inv[:, None] * A * inv[None, :]
    X = rng.standard_normal((n, 4))
    assert np.linalg.norm(apply_laplacian(normalize(G), X) - L @ X) <= 1e-12


def test_from_matrix_rejects_asymmetric():
    with pytest.raises(GraphError):
        SparseGraph.from_matrix(np.array([[0, 1.0], [0, 0]]))


def test_from_matrix_rejects_negative():
    with pytest.raises(GraphError):
        SparseGraph.from_matrix(np.array([[0, -1.0], [-1.0, 0]]))


def test_from_edges_rejects_duplicates():
    with pytest.raises(GraphError):
        SparseGraph.from_edges(3, [(0, 1, 1.0), (1, 0, 1.0)])


# ---- probabilistic neighbor graph -------------------------------------------


def _pn_row_oracle(x, i, k):
    """Closed-form row, computed with plain Python lists."""
    d = sorted(((sum((a - b) ** 2 for a, b in zip(x[i], x[j])), j) for j in range(len(x)) if j != i))
    e = [v for v, _ in d]
    denom = k * e[k] - sum(e[:k])
    row = [0.0] * len(x)
    for h in range(k):
        row[d[h][1]] = (e[k] - e[h]) / denom if denom > 0 else 1.0 / k
    return row


def test_neighbor_graph_collinear():
    X = np.array([[0.0], [1.0], [10.0]])
    W = neighbor_weights(X, 1).toarray()
    np.testing.assert_array_equal(W[0], [0, 1, 0])
    G = build_probabilistic_neighbor_graph(X, 1)
    assert G.to_dense()[0, 1] >= 0.5


def test_neighbor_graph_k1_distinct(rng):
    X = rng.standard_normal((30, 3))
    W = neighbor_weights(X, 1).toarray()
    assert ((W > 0).sum(1) == 1).all()
    np.testing.assert_array_equal(W.max(1), 1.0)


def test_neighbor_graph_duplicates_uniform():
    X = np.zeros((4, 2))
    W = neighbor_weights(X, 2).toarray()
    assert np.all(np.isfinite(W))
    np.testing.assert_allclose(W.sum(1), 1.0)
    # ties broken by lower index
    np.testing.assert_array_equal(W[0], [0, 0.5, 0.5, 0])
    np.testing.assert_array_equal(W[3], [0.5, 0.5, 0, 0])


def test_neighbor_graph_matches_oracle(rng):
    X = rng.standard_normal((25, 4))
    for k in (1, 3, 6):
        W = neighbor_weights(X, k).toarray()
        expected = np.array([_pn_row_oracle(X.tolist(), i, k) for i in range(25)])
        np.testing.assert_allclose(W, expected, rtol=1e-12, atol=1e-15)


def test_neighbor_graph_k_equal_n_minus_1(rng):
    W = neighbor_weights(rng.standard_normal((4, 2)), 3).toarray()
    np.testing.assert_allclose(W, (1 - np.eye(4)) / 3)


@pytest.mark.parametrize("k", [0, 5])
def test_neighbor_graph_bad_k(k):
    with pytest.raises(ValueError):
        neighbor_weights(np.zeros((5, 2)), k)


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(3, 40),
    k=st.integers(1, 8),
    seed=st.integers(0, 2**31),
    dup=st.booleans(),
)
def test_neighbor_graph_properties(n, k, seed, dup):
    k = min(k, n - 1)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 3))
    if dup:
        X[: n // 2] = X[0]
    W = neighbor_weights(X, k)
    assert (np.diff(W.indptr) <= k).all()
    assert (W.data >= 0).all()
    np.testing.assert_allclose(np.asarray(W.sum(1)).ravel(), 1.0, atol=1e-12)
    G = build_probabilistic_neighbor_graph(X, k)
    A = G.to_dense()
    np.testing.assert_array_equal(A, A.T)
