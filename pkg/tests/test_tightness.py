import itertools

import numpy as np
import pytest

from bellexcess import CorrelationCore, circulant, embed_core, evaluate, lhv_value, paley_hadamard, sylvester
from bellexcess.lhv import Strategy
from bellexcess.tightness import (
    PRIMES,
    Vertex,
    _mulmod,
    affine_rank,
    bareiss_rank,
    collect_vertices,
    difference_matrix,
    modular_basis,
    modular_rank,
    tightness_report,
)

from conftest import H2


def vertex_oracle(H: np.ndarray) -> set[tuple]:
    """All distinct a b^T attaining the maximum, by enumerating every sign pair."""
    m = len(H)
    best, pts = None, set()
    for a in itertools.product((1, -1), repeat=m):
        for b in itertools.product((1, -1), repeat=m):
            v = int(np.array(a) @ H @ np.array(b))
            pt = tuple(np.outer(a, b).ravel())
            if best is None or v > best:
                best, pts = v, {pt}
            elif v == best:
                pts.add(pt)
    return pts


def as_points(vs) -> set[tuple]:
    return {tuple(int(x) for x in row) for row in vs.signs}


def test_chsh_vertices():
    vs = collect_vertices(np.array(H2))
    expect = {(1, 1, 1, 1), (1, -1, 1, -1), (1, 1, -1, -1), (-1, 1, 1, -1)}
    assert as_points(vs) == expect
    assert affine_rank(vs) == 3


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_vertices_match_brute_force(rng, m):
    for _ in range(5):
        H = rng.integers(-2, 3, size=(m, m))
        assert as_points(collect_vertices(H)) == vertex_oracle(H)


def test_zero_column_sums_expand_bob():
    H = np.array([[1, 1], [1, 1]])
    assert as_points(collect_vertices(H)) == vertex_oracle(H)
    Z = np.zeros((2, 2), dtype=int)
    assert len(collect_vertices(Z)) == 8


def test_vertex_packing_round_trip():
    a, b = [1, -1, 1], [-1, -1, 1]
    v = Vertex.from_signs(a, b)
    assert np.array_equal(v.matrix(), np.outer(a, b))
    assert Vertex.from_signs([-x for x in a], [-x for x in b]) == v


def test_every_vertex_attains_value():
    for H in (sylvester(3), paley_hadamard(11)):
        C = lhv_value(CorrelationCore.from_entries(H.tolist())).value
        M = embed_core(H.tolist())
        vs = collect_vertices(H)
        assert all(int(np.sum(row * H.ravel())) == C for row in vs.signs.astype(np.int64))
        # spot check through the strategy evaluation of the generic path
        for row in vs.signs[:5]:
            V = row.reshape(len(H), len(H)).astype(int)
            a = V[:, 0] * V[0, 0]
            b = V[0] * a[0]
            assert evaluate(M, Strategy.from_signs(a, b)) == C


def test_small_table_rows():
    rep = tightness_report(np.array(H2))
    assert (rep.vertex_count, rep.affine_rank, rep.tight, rep.regular_equivalent) == (4, 3, True, False)
    rep = tightness_report(circulant([-1, 1, 1, 1]))
    assert (rep.lhv_value, rep.vertex_count, rep.affine_rank, rep.tight, rep.regular_equivalent) == (8, 4, 3, False, True)
    rep = tightness_report(sylvester(3))
    assert (rep.lhv_value, rep.vertex_count, rep.affine_rank, rep.tight) == (20, 64, 63, True)
    assert rep.row() == (8, 64, 63, "Tight")
    assert rep.as_dict()["affine_rank"] == 63


def test_order_twelve_row():
    rep = tightness_report(paley_hadamard(11))
    assert (rep.lhv_value, rep.vertex_count, rep.affine_rank, rep.tight) == (36, 2640, 143, True)


def test_affine_rank_examples(rng):
    assert affine_rank([np.ones(4, dtype=int)]) == 0
    V = np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [-1, 1, 1, -1]])
    assert affine_rank(V) == 3
    with pytest.raises(ValueError):
        difference_matrix([])


def test_affine_rank_matches_bareiss(rng):
    for _ in range(20):
        k, d = int(rng.integers(2, 30)), int(rng.integers(2, 20))
        S = rng.choice([-1, 1], size=(k, d))
        # repeat some combinations so that the rank is deficient
        S = np.vstack([S, S[:3]])
        D = difference_matrix(S)
        assert affine_rank(S) == bareiss_rank(D) == np.linalg.matrix_rank(D)
        assert modular_rank(S) == bareiss_rank(D)


def test_bareiss_rank_examples():
    assert bareiss_rank([[1, 2], [2, 4]]) == 1
    assert bareiss_rank([[0, 0], [0, 0]]) == 0
    assert bareiss_rank([[2, 1, 0], [0, 1, 1], [2, 2, 1]]) == 2
    assert bareiss_rank([]) == 0


def test_mulmod_is_exact(rng):
    p = PRIMES[0]
    X = rng.integers(0, p, size=(7, 5))
    B = rng.integers(0, p, size=(5, 6))
    expect = (X.astype(object).dot(B.astype(object))) % p
    assert np.array_equal(_mulmod(X, B, p).astype(object), expect)


def test_modular_basis_spans(rng):
    A = rng.integers(-1, 2, size=(8, 12))
    V = np.vstack([A, A[:4] + A[4:], 2 * A[1:3]])
    sel = modular_basis(V, PRIMES[0], chunk=3)
    assert len(sel) == np.linalg.matrix_rank(A)
    assert np.linalg.matrix_rank(V[sel]) == len(sel)


def _equivalent(H, rng):
    m = len(H)
    P, Q = rng.permutation(m), rng.permutation(m)
    d1, d2 = rng.choice([-1, 1], size=m), rng.choice([-1, 1], size=m)
    return (d1[:, None] * H[P][:, Q] * d2[None, :]).astype(np.int64)


def test_equivalence_invariance(rng):
    for H in (np.array(H2), sylvester(2), circulant([-1, 1, 1, 1]), sylvester(3)):
        base = tightness_report(H)
        for _ in range(3):
            rep = tightness_report(_equivalent(H, rng))
            assert (rep.lhv_value, rep.vertex_count, rep.affine_rank) == (base.lhv_value, base.vertex_count, base.affine_rank)


def test_rejects_non_q2_core():
    c = CorrelationCore.from_entries(np.eye(4, dtype=int).tolist(), m=2, q=3)
    with pytest.raises(ValueError):
        collect_vertices(c)
