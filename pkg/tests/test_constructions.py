import numpy as np
import pytest

from bellexcess import (
    CorrelationCore,
    MquwmParams,
    apply_relabeling,
    circulant,
    constant_row_sum,
    fourier_square,
    game_matrix_from_tensor,
    gyni_tensor,
    is_conference,
    is_hadamard,
    is_skew_type,
    lhv_value,
    mquwm_check,
    paley_hadamard,
    sylvester,
    weighing_weight,
    Relabeling,
)
from bellexcess.catalog import pairing_fixture, strategy_fixture
from bellexcess.constructions import H2, as_sign_matrix


def test_sylvester():
    assert sylvester(0).tolist() == [[1]]
    assert np.array_equal(sylvester(1), H2)
    for k in range(5):
        assert is_hadamard(sylvester(k))
    assert lhv_value(CorrelationCore.from_entries(sylvester(3).tolist())).value == 20
    with pytest.raises(ValueError):
        sylvester(-1)


@pytest.mark.parametrize("ell", [3, 7, 11, 19, 23, 31, 43])
def test_paley_is_hadamard(ell):
    H = paley_hadamard(ell)
    assert H.shape == (ell + 1, ell + 1) and is_hadamard(H)


def test_paley_values_and_errors():
    assert lhv_value(CorrelationCore.from_entries(paley_hadamard(11).tolist())).value == 36
    for bad in (5, 9, 13, 15):
        with pytest.raises(ValueError):
            paley_hadamard(bad)


def test_circulant_examples():
    C4 = circulant([-1, 1, 1, 1])
    assert is_hadamard(C4)
    assert constant_row_sum(CorrelationCore.from_entries(C4.tolist())) == 2
    C3 = circulant([0, -1, 1])
    assert np.array_equal(C3.T, -C3)
    assert circulant([1]).tolist() == [[1]]
    assert C3[1].tolist() == [1, 0, -1]
    with pytest.raises(ValueError):
        circulant([])


@pytest.mark.parametrize("q", range(2, 8))
def test_fourier_square_unitary(q):
    A = fourier_square(q).to_complex()
    assert np.allclose(A @ A.conj().T, q * q * np.eye(q * q))


def test_fourier_square_values_and_entry():
    M = fourier_square(2)
    assert M.is_real()
    assert M.to_complex()[2 * 1 + 1, 2 * 1 + 1] == 1
    assert lhv_value(M).value == 8
    assert lhv_value(fourier_square(3)).value == pytest.approx(27)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_gyni_matches_fourier_square(q):
    G = game_matrix_from_tensor(gyni_tensor(q))
    # negate Alice's outcome label a -> -a on every setting
    flip = [(-np.arange(q)) % q] * q
    Gr = game_matrix_from_tensor(apply_relabeling(gyni_tensor(q), Relabeling.build(q, q, a_perms=dict(enumerate(flip)))))
    target = fourier_square(q).to_complex() / q**2
    assert np.allclose(Gr.to_complex(), target, atol=1e-12)
    assert np.allclose(G.to_complex(), target, atol=1e-12) == (q == 2)
    assert lhv_value(G).value * q**2 == pytest.approx(q**3)


def test_predicates():
    assert is_conference(np.array([[0, 1], [1, 0]]))
    assert not is_conference(np.array(H2))
    C6 = np.array([[0, 1, 1, 1, 1, 1],
                   [1, 0, 1, -1, -1, 1],
                   [1, 1, 0, 1, -1, -1],
                   [1, -1, 1, 0, 1, -1],
                   [1, -1, -1, 1, 0, 1],
                   [1, 1, -1, -1, 1, 0]])
    assert is_conference(C6)
    S = np.eye(4, dtype=int) + np.array([[0, 1, 1, 1], [-1, 0, 1, -1], [-1, -1, 0, 1], [-1, 1, -1, 0]])
    assert is_skew_type(S)
    assert not is_skew_type(sylvester(2))
    assert weighing_weight(H2) == 2
    assert weighing_weight(C6) == 5
    assert weighing_weight(np.array([[1, 1], [1, 1]])) is None
    assert not is_hadamard(np.array([[1, 1], [1, 1]]))
    with pytest.raises(ValueError):
        as_sign_matrix([[1, 2], [1, 1]])
    assert as_sign_matrix([[0, 1], [1, 0]], allow_zero=True).dtype == np.int64


def test_mquwm_params_validation():
    MquwmParams(8, 8, 4, 16)
    with pytest.raises(ValueError):
        MquwmParams(8, 8, 16, 16)
    with pytest.raises(ValueError):
        MquwmParams(2, 0, 1, 0)


def test_mquwm_order_two():
    W1, W2 = strategy_fixture(2, "A")
    res = mquwm_check(W1, W2, 4)
    assert res.ok and res.params == MquwmParams(2, 2, 1, 4)


def test_mquwm_self_pair_counterexample():
    # H2 H2^T = 2 I, whose nonzero entries square to 4, so a = 4 passes with l = 1
    assert mquwm_check(H2, H2, 4).ok
    res = mquwm_check(H2, H2, 2)
    assert not res.ok and res.l is None and "not 0" in res.reason


def test_mquwm_order_eight_all_pairs():
    for party in ("A", "B"):
        W = strategy_fixture(8, party)
        assert len(W) == 8 and all(weighing_weight(w) == 8 for w in W)
        for i in range(8):
            for j in range(i + 1, 8):
                res = mquwm_check(W[i], W[j], 16)
                assert res.ok and res.params == MquwmParams(8, 8, 4, 16)
                assert not mquwm_check(W[i], W[j], 4).ok


def test_mquwm_errors():
    with pytest.raises(ValueError):
        mquwm_check(H2, sylvester(2), 4)
    with pytest.raises(ValueError):
        mquwm_check(np.array([[1, 1], [1, 1]]), H2, 4)
    assert not mquwm_check(H2, H2, 3).ok


def test_strategy_fixtures_are_optimal():
    for order in (2, 4, 8):
        H = sylvester(order.bit_length() - 1)
        C = lhv_value(CorrelationCore.from_entries(H.tolist())).value
        A, B = strategy_fixture(order, "A"), strategy_fixture(order, "B")
        for WA, WB in zip(A, B):
            for a in WA:
                assert np.abs(a @ H).sum() == C
            for b in WB:
                assert np.abs(H @ b).sum() == C


def test_pairings_link_optimal_rows():
    A, B = strategy_fixture(8, "A"), strategy_fixture(8, "B")
    H = sylvester(3)
    pairs = pairing_fixture()
    assert len(pairs) == 64 and len(set(pairs)) == 64
    assert {(i, j) for i, j, _, _ in pairs} == {(i, j) for i in range(1, 9) for j in range(1, 9)}
    for i, j, k, l in pairs:
        assert int(A[j - 1][i - 1] @ H @ B[l - 1][k - 1]) == 20
