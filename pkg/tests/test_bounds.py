import math
from fractions import Fraction

import numpy as np
import pytest

from bellexcess import (
    CorrelationCore,
    Strategy,
    bounds_report,
    best_bounds,
    circulant,
    conference_excess_bound,
    embed_core,
    evaluate,
    fourier_square,
    hermitian_eigen,
    is_normal,
    lhv_value,
    normalize_to_allplus,
    numerical_radius,
    nu,
    nu_saturated,
    paley_hadamard,
    quadratic_residue_family_excess,
    quantum_witness,
    rotated_observable,
    skew_conference_family_excess,
    spectral_norm,
    spectral_radius,
    sylvester,
)
from bellexcess.bounds import bell_operator

from conftest import H2, chsh_matrix

SQRT2 = math.sqrt(2)


def test_best_bounds_examples():
    assert best_bounds(4) == (6, 8)
    lo, hi = best_bounds(2)
    assert lo == 2 and hi == pytest.approx(2 * SQRT2)
    lo, hi = best_bounds(16)
    assert hi == 64 and isinstance(hi, int)
    assert lo == Fraction(256 * math.comb(16, 8), 2**16)
    with pytest.raises(ValueError):
        best_bounds(5)


def test_best_bounds_large_order_is_float():
    lo, _ = best_bounds(600)
    exact = Fraction(600**2 * math.comb(600, 300), 2**600)
    assert isinstance(lo, float) and lo == pytest.approx(float(exact), rel=1e-12)


def test_hermitian_eigen_examples():
    assert np.allclose(hermitian_eigen(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])
    assert np.allclose(hermitian_eigen(np.array(H2, dtype=float)), [-SQRT2, SQRT2])
    H = paley_hadamard(11)
    assert np.allclose(hermitian_eigen(H @ H.T / 12), 1.0)
    with pytest.raises(ValueError):
        hermitian_eigen(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        hermitian_eigen(np.eye(2), method="qr")


@pytest.mark.parametrize("n", [1, 2, 5, 17, 40])
def test_jacobi_matches_lapack(rng, n):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = X + X.conj().T
    jac = hermitian_eigen(H, method="jacobi")
    assert np.allclose(jac, np.linalg.eigvalsh(H), atol=1e-10)
    assert abs(jac.sum() - np.trace(H).real) <= 1e-10 * np.linalg.norm(H)


def test_spectral_norm_examples():
    for k in (1, 2, 3):
        assert spectral_norm(sylvester(k)) == pytest.approx(math.sqrt(2**k))
    for q in (2, 3, 4, 5):
        assert spectral_norm(fourier_square(q)) == pytest.approx(q)
    assert spectral_norm(circulant([0, -1, 1])) == pytest.approx(math.sqrt(3))


def test_spectral_radius_only_for_normal():
    assert spectral_radius(np.array(H2)) == pytest.approx(SQRT2)
    J = np.array([[0, 1], [0, 0]])
    assert not is_normal(J) and spectral_radius(J) is None


def test_numerical_radius_examples(rng):
    assert numerical_radius(np.array(H2)) == pytest.approx(SQRT2, abs=1e-6)
    assert numerical_radius(np.array([[0, 1], [0, 0]])) == pytest.approx(0.5, abs=1e-6)
    X = rng.normal(size=(6, 6))
    H = X + X.T
    assert numerical_radius(H) == pytest.approx(np.abs(np.linalg.eigvalsh(H)).max(), abs=1e-6)


def test_numerical_radius_chain(rng):
    for _ in range(10):
        A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        r = numerical_radius(A)
        assert spectral_norm(A) / 2 - 1e-9 <= r <= spectral_norm(A) + 1e-9
        assert r >= abs(A.sum()) / 5 - 1e-9
        assert r >= np.abs(np.linalg.eigvals(A)).max() - 1e-6


def test_nu_examples():
    M = chsh_matrix()
    assert nu(M) == pytest.approx(2)
    assert not nu_saturated(M).saturated
    C4 = CorrelationCore.from_entries(circulant([-1, 1, 1, 1]).tolist())
    sat = nu_saturated(C4)
    assert sat.saturated and sat.gamma == 2
    assert math.sqrt(4) * nu(C4) == pytest.approx(8)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_normalized_fourier_square_saturates(q):
    opt = Strategy(tuple(range(q)), tuple((-y) % q for y in range(q)), q)
    N = normalize_to_allplus(fourier_square(q), opt)
    sat = nu_saturated(N)
    assert sat.saturated
    g = sat.gamma
    g = complex(*map(float, g)) if isinstance(g, tuple) else complex(g)
    assert g == pytest.approx(q)
    assert N.n * abs(g) == pytest.approx(q**3)


def test_quantum_witness_circulant_three():
    M = embed_core(circulant([0, -1, 1]).tolist())
    A = [rotated_observable(a) for a in (0, 2 * np.pi / 3, np.pi / 3)]
    B = [rotated_observable(b) for b in (np.pi / 4, 7 * np.pi / 12, 11 * np.pi / 12)]
    assert quantum_witness(M, A, B) == pytest.approx(3 * math.sqrt(3), abs=1e-9)
    assert lhv_value(M).value == 4


def test_quantum_witness_tsirelson():
    Z = np.diag([1.0, -1.0])
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    B = [(Z + X) / SQRT2, (Z - X) / SQRT2]
    assert quantum_witness(chsh_matrix(), [Z, X], B) == pytest.approx(2 * SQRT2, abs=1e-9)


def test_quantum_witness_commuting_diagonal_case(rng):
    q = 3
    M = fourier_square(q)
    w = np.exp(2j * np.pi / q)
    s = Strategy((0, 1, 2), (0, 2, 1), q)
    A = [np.diag([w**a]) for a in s.alice]
    B = [np.diag([w**b]) for b in s.bob]
    assert quantum_witness(M, A, B) == pytest.approx(evaluate(M, s))


def test_bell_operator_validation():
    M = chsh_matrix()
    Z = np.diag([1.0, -1.0])
    with pytest.raises(ValueError):
        bell_operator(M, [Z], [Z, Z])
    with pytest.raises(ValueError):
        bell_operator(M, [Z, np.array([[1.0, 1.0], [0.0, 1.0]])], [Z, Z])
    with pytest.raises(ValueError):
        bell_operator(M, [Z, np.diag([1j, 1.0])], [Z, Z])


def test_skew_conference_family():
    assert skew_conference_family_excess(2) == (8, 20)
    assert skew_conference_family_excess(4) == (48, 324)
    assert skew_conference_family_excess(6) == (120, 1300)
    assert lhv_value(CorrelationCore.from_entries(sylvester(3).tolist())).value == 20
    with pytest.raises(ValueError):
        skew_conference_family_excess(3)


def test_conference_excess_bound():
    assert conference_excess_bound(6) == 12
    assert conference_excess_bound(10) == 30
    assert conference_excess_bound(2) == 2


def test_quadratic_residue_family():
    r = quadratic_residue_family_excess(3)
    assert (r.order, r.k, r.t, r.s, r.excess) == (4, 2, 2, 4, 8)
    r = quadratic_residue_family_excess(11)
    assert (r.order, r.k, r.t, r.s, r.excess) == (12, 2, 0, 3, 36)
    assert lhv_value(CorrelationCore.from_entries(paley_hadamard(11).tolist())).value == 36
    r = quadratic_residue_family_excess(27)
    assert (r.order, r.k, r.excess) == (28, 4, 140)
    for bad in (5, 13, 51):
        with pytest.raises(ValueError):
            quadratic_residue_family_excess(bad)


def test_bounds_report_hadamard():
    rep = bounds_report(circulant([-1, 1, 1, 1]))
    assert rep.best_lower == 6 and rep.best_upper == 8
    assert rep.sigma_bound == pytest.approx(8)
    assert rep.saturated and rep.gamma_bound == pytest.approx(8)
    assert rep.rho <= rep.radius_bound / rep.n + 1e-9 <= rep.sigma + 2e-9
    assert rep.nu_bound <= rep.sigma_bound + 1e-9
    d = rep.as_dict()
    assert d["excess"] == 8 and d["normalized"] is False


def test_bounds_report_non_hadamard_has_no_best_bounds():
    rep = bounds_report(chsh_matrix())
    assert rep.best_lower is None and rep.best_upper is None
