"""Upper and lower bounds on the LHV value and the excess, plus a fixed-observable quantum value.

For a matrix ``M`` of order ``n``:

* ``n * r(M)`` with ``r`` the numerical radius,
* ``sqrt(n) * nu(M)`` where ``nu`` is the norm of the row-sum vector,
* ``n * sigma(M)`` with ``sigma`` the spectral norm.

The first two bound the LHV value of a maximal-excess representative; the last one also
bounds the quantum value.  Best's bounds on the maximal excess of Hadamard matrices and
three closed-form excess formulas complete the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (
    CorrelationCore,
    GameMatrix,
    check_symmetry,
    constant_row_sum,
    excess,
)

JACOBI_MAX_ORDER = 64
RADIUS_GRID = 720


# ---------------------------------------------------------------------------
# Best's bounds
# ---------------------------------------------------------------------------

def best_bounds(n: int) -> tuple[Fraction | float, int | float]:
    """Lower and upper bounds on the maximal excess of a Hadamard matrix of order ``n``.

    lower = n**2 2**-n binom(n, n/2), upper = n**1.5.  The lower bound is an exact
    Fraction for n <= 512 and a float beyond; the upper bound is an int when n is a
    perfect square.
    """
    if n < 2 or n % 2:
        raise ValueError(f"order must be even and positive, got {n}")
    if n <= 512:
        lower: Fraction | float = Fraction(n * n * math.comb(n, n // 2), 2**n)
    else:
        log = 2 * math.log(n) - n * math.log(2) + math.lgamma(n + 1) - 2 * math.lgamma(n // 2 + 1)
        lower = math.exp(log)
    r = math.isqrt(n)
    upper: int | float = n * r if r * r == n else n * math.sqrt(n)
    return lower, upper


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------

def _as_array(M) -> np.ndarray:
    if isinstance(M, (GameMatrix, CorrelationCore)):
        return M.to_complex()
    return np.asarray(M, dtype=complex)


def _jacobi(A: np.ndarray, tol: float, max_sweeps: int = 60) -> np.ndarray:
    A = A.astype(complex).copy()
    n = A.shape[0]
    fro = np.linalg.norm(A)
    if n < 2 or fro == 0:
        return np.sort(np.diag(A).real)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off < tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                tau = (A[q, q].real - A[p, p].real) / (2 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1 + tau * tau))
                c = 1 / math.sqrt(1 + t * t)
                s = t * c
                # A <- V^H A V with V = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q)
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * np.conj(phase) * cq
                A[:, q] = s * cp + c * np.conj(phase) * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * phase * rq
                A[q, :] = s * rp + c * phase * rq
                A[p, q] = A[q, p] = 0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.sort(np.diag(A).real)


def hermitian_eigen(H, tol: float = 1e-12, method: str = "auto", herm_tol: float = 1e-9) -> np.ndarray:
    """Sorted eigenvalues of a Hermitian matrix.

    ``method="jacobi"`` runs cyclic complex Jacobi rotations until the off-diagonal norm is
    below ``tol * ||H||_F``; ``"lapack"`` calls numpy's ``eigvalsh``; ``"auto"`` picks Jacobi
    up to order 64.
    """
    A = _as_array(H)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.linalg.norm(A)))
    if np.max(np.abs(A - A.conj().T), initial=0.0) > herm_tol * scale:
        raise ValueError("matrix is not Hermitian")
    if method == "auto":
        method = "jacobi" if A.shape[0] <= JACOBI_MAX_ORDER else "lapack"
    if method == "jacobi":
        return _jacobi(A, tol)
    if method == "lapack":
        return np.linalg.eigvalsh((A + A.conj().T) / 2)
    raise ValueError(f"unknown method {method!r}")


def spectral_norm(M) -> float:
    """Largest singular value, as the square root of the top eigenvalue of ``M M^dagger``."""
    A = _as_array(M)
    if A.size == 0:
        return 0.0
    top = hermitian_eigen(A @ A.conj().T)[-1]
    return math.sqrt(max(top, 0.0))


def is_normal(M, tol: float = 1e-9) -> bool:
    A = _as_array(M)
    d = A @ A.conj().T - A.conj().T @ A
    return bool(np.max(np.abs(d), initial=0.0) <= tol * max(1.0, float(np.linalg.norm(A)) ** 2))


def spectral_radius(M, tol: float = 1e-9) -> float | None:
    """Spectral radius of a normal matrix, ``None`` for non-normal input.

    For normal ``M`` the moduli of the eigenvalues are the singular values, so the radius
    equals the spectral norm.
    """
    if not is_normal(M, tol):
        return None
    return spectral_norm(M)


def numerical_radius(M, tol: float = 1e-6) -> float:
    """max over theta of the top eigenvalue of the Hermitian part of ``e^{i theta} M``.

    A 720-point grid locates the best bracket, refined by golden-section search.
    """
    A = _as_array(M)
    n = A.shape[0]
    if n == 0:
        return 0.0

    def f(theta):
        R = np.exp(1j * np.asarray(theta))[..., None, None] * A
        return np.linalg.eigvalsh((R + np.conj(np.swapaxes(R, -1, -2))) / 2)[..., -1]

    step = 2 * np.pi / RADIUS_GRID
    grid = np.arange(RADIUS_GRID) * step
    vals = f(grid)
    k = int(np.argmax(vals))
    best = float(vals[k])
    lo, hi = grid[k] - step, grid[k] + step
    gr = (math.sqrt(5) - 1) / 2
    # f is Lipschitz in theta with constant <= sigma(M), which turns tol into a theta width
    width = tol / max(float(np.abs(A).sum()), 1.0)
    c, d = hi - gr * (hi - lo), lo + gr * (hi - lo)
    fc, fd = float(f(c)), float(f(d))
    while hi - lo > width:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - gr * (hi - lo)
            fc = float(f(c))
        else:
            lo, c, fc = c, d, fd
            d = lo + gr * (hi - lo)
            fd = float(f(d))
    r = max(best, fc, fd)
    lower = abs(A.sum()) / n
    assert r >= lower - 1e-9 * max(1.0, lower), "numerical radius below |excess|/n"
    return r


# ---------------------------------------------------------------------------
# row-sum bound
# ---------------------------------------------------------------------------

def nu(M) -> float:
    """Euclidean norm of the vector of row sums."""
    A = _as_array(M)
    return float(np.linalg.norm(A.sum(axis=1)))


@dataclass(frozen=True)
class Saturation:
    saturated: bool
    gamma: Fraction | complex | float | None = None


def nu_saturated(M, tol: float | None = None) -> Saturation:
    """Whether ``sqrt(n) nu(M)`` equals ``n |Gamma|``, i.e. ``M`` has constant row sum Gamma."""
    if isinstance(M, (GameMatrix, CorrelationCore)):
        g = constant_row_sum(M, tol)
        n = M.order
    else:
        A = np.asarray(M)
        wrapped = CorrelationCore.from_entries(A.astype(complex), m=A.shape[0])
        g = constant_row_sum(wrapped, 1e-9 if tol is None else tol)
        n = A.shape[0]
    if g is None:
        return Saturation(False, None)
    mod = abs(complex(*map(float, g))) if isinstance(g, tuple) else abs(complex(g))
    bound = math.sqrt(n) * nu(M)
    assert abs(bound - n * mod) <= 1e-9 * max(1.0, n * mod), "nu bound disagrees with n |Gamma|"
    return Saturation(True, g)


# ---------------------------------------------------------------------------
# quantum witness
# ---------------------------------------------------------------------------

def _check_observable(U: np.ndarray, q: int, tol: float) -> None:
    d = U.shape[0]
    if U.shape != (d, d):
        raise ValueError(f"observable must be square, got shape {U.shape}")
    if np.max(np.abs(U @ U.conj().T - np.eye(d))) > tol:
        raise ValueError("observable is not unitary")
    if np.max(np.abs(np.linalg.matrix_power(U, q) - np.eye(d))) > tol * q:
        raise ValueError(f"observable spectrum is not made of {q}-th roots of unity")


def bell_operator(M: GameMatrix, A: Sequence[np.ndarray], B: Sequence[np.ndarray], tol: float = 1e-9) -> np.ndarray:
    """``sum M[m s + x, m t + y] A_x**s (x) B_y**t``."""
    check_symmetry(M)
    m, q = M.m, M.q
    if len(A) != m or len(B) != m:
        raise ValueError(f"need {m} observables per party, got {len(A)} and {len(B)}")
    A = [np.asarray(a, dtype=complex) for a in A]
    B = [np.asarray(b, dtype=complex) for b in B]
    da, db = A[0].shape[0], B[0].shape[0]
    for U in A:
        if U.shape != (da, da):
            raise ValueError("Alice's observables have different dimensions")
        _check_observable(U, q, tol)
    for U in B:
        if U.shape != (db, db):
            raise ValueError("Bob's observables have different dimensions")
        _check_observable(U, q, tol)
    Ap = [[np.linalg.matrix_power(a, s) for s in range(q)] for a in A]
    Bp = [[np.linalg.matrix_power(b, t) for t in range(q)] for b in B]
    c = M.to_complex()
    W = np.zeros((da * db, da * db), dtype=complex)
    for s in range(q):
        for x in range(m):
            for t in range(q):
                for y in range(m):
                    coef = c[m * s + x, m * t + y]
                    if coef != 0:
                        W += coef * np.kron(Ap[x][s], Bp[y][t])
    return W


def quantum_witness(M: GameMatrix, A: Sequence[np.ndarray], B: Sequence[np.ndarray], tol: float = 1e-9) -> float:
    """Largest eigenvalue of the Bell operator for fixed observables (a lower bound on Q)."""
    W = bell_operator(M, A, B, tol)
    scale = max(1.0, float(np.linalg.norm(W)))
    assert np.max(np.abs(W - W.conj().T)) <= tol * scale * 10, "Bell operator is not Hermitian"
    return float(hermitian_eigen(W, herm_tol=tol * 10)[-1])


def rotated_observable(alpha: float) -> np.ndarray:
    """``U D U^T`` with ``D = diag(1, -1)`` and ``U`` the rotation by ``alpha``."""
    c, s = math.cos(alpha), math.sin(alpha)
    U = np.array([[c, -s], [s, c]])
    return U @ np.diag([1.0, -1.0]) @ U.T


# ---------------------------------------------------------------------------
# closed-form excess results
# ---------------------------------------------------------------------------

def skew_conference_family_excess(k: int) -> tuple[int, int]:
    """(order, maximal excess) of the Hadamard family built from a skew-type Hadamard
    matrix (k = 0 mod 4) or a conference matrix (k = 2 mod 4) of order k."""
    if k < 2 or k % 2:
        raise ValueError(f"k must be even and at least 2, got {k}")
    return 4 * k * (k - 1), 4 * (k - 1) ** 2 * (2 * k + 1)


def conference_excess_bound(n: int) -> Fraction:
    """Upper bound on the excess of a conference matrix of order n."""
    if n < 2:
        raise ValueError(f"order must be at least 2, got {n}")
    r = math.isqrt(n - 1)
    k = r if r % 2 else r - 1
    return Fraction(n * (k * k + 2 * k + n - 1), 2 * (k + 1))


def _is_prime_power(v: int) -> bool:
    if v < 2:
        return False
    p = next(d for d in range(2, v + 1) if v % d == 0)
    while v % p == 0:
        v //= p
    return v == 1


@dataclass(frozen=True)
class QuadraticResidueExcess:
    order: int
    k: int
    t: int
    s: int
    excess: int


def quadratic_residue_family_excess(ell: int) -> QuadraticResidueExcess:
    """Maximal excess of the quadratic-residue Hadamard matrix of order ell + 1 when
    ell = (2m+1)**2 + 2 is a prime power."""
    root = math.isqrt(ell - 2) if ell >= 2 else -1
    if ell < 3 or root * root != ell - 2 or root % 2 == 0 or not _is_prime_power(ell):
        raise ValueError(f"{ell} is not a prime power of the form (2m+1)**2 + 2")
    n = ell + 1
    k = math.isqrt(n)
    k -= k % 2
    t = k if abs(n - k * k) < abs(n - (k + 2) ** 2) else k - 2
    s = (n * ((t + 4) ** 2 - n)) // (8 * t + 16)
    return QuadraticResidueExcess(n, k, t, s, n * (t + 4) - 4 * s)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    n: int
    excess: Fraction | float
    best_lower: Fraction | float | None
    best_upper: int | float | None
    radius: float
    radius_bound: float
    nu: float
    nu_bound: float
    sigma: float
    sigma_bound: float
    rho: float | None
    saturated: bool
    gamma: Fraction | complex | float | None
    gamma_bound: float | None
    normalized: bool
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        def plain(v):
            if isinstance(v, Fraction):
                return int(v) if v.denominator == 1 else float(v)
            if isinstance(v, tuple):
                return [plain(x) for x in v]
            if isinstance(v, complex):
                return [v.real, v.imag]
            return v

        out = {k: plain(getattr(self, k)) for k in (
            "n", "excess", "best_lower", "best_upper", "radius", "radius_bound", "nu", "nu_bound",
            "sigma", "sigma_bound", "rho", "saturated", "gamma", "gamma_bound", "normalized")}
        out.update({k: plain(v) for k, v in self.extras.items()})
        return out


def _is_sign_matrix(A: np.ndarray) -> bool:
    return A.size > 0 and bool(np.all(np.isin(A, (-1, 1))))


def bounds_report(M: GameMatrix | CorrelationCore | np.ndarray, *, normalized: bool = False,
                  tol: float = 1e-6) -> BoundsReport:
    """All matrix bounds for ``M`` as given.  ``normalized`` records whether ``M`` is known to be
    a maximal-excess representative, which is the hypothesis of the radius and nu bounds."""
    if isinstance(M, np.ndarray):
        M = CorrelationCore.from_entries(M.tolist() if M.dtype.kind in "iu" else M, m=M.shape[0])
    if isinstance(M, GameMatrix):
        check_symmetry(M)
    A = M.to_complex()
    n = A.shape[0]
    r = numerical_radius(A, tol)
    sig = spectral_norm(A)
    v = nu(A)
    sat = nu_saturated(M)
    lower = upper = None
    if not np.any(A.imag) and _is_sign_matrix(A.real) and n % 2 == 0:
        H = np.rint(A.real).astype(np.int64)
        if np.array_equal(H @ H.T, n * np.eye(n, dtype=np.int64)):
            lower, upper = best_bounds(n)
    gbound = None
    if sat.saturated:
        g = sat.gamma
        gbound = n * (abs(complex(*map(float, g))) if isinstance(g, tuple) else abs(complex(g)))
    return BoundsReport(n=n, excess=excess(M), best_lower=lower, best_upper=upper, radius=r,
                        radius_bound=n * r, nu=v, nu_bound=math.sqrt(n) * v, sigma=sig,
                        sigma_bound=n * sig, rho=spectral_radius(A), saturated=sat.saturated,
                        gamma=sat.gamma, gamma_bound=gbound, normalized=normalized)


__all__ = [
    "best_bounds", "hermitian_eigen", "spectral_norm", "spectral_radius", "is_normal",
    "numerical_radius", "nu", "nu_saturated", "Saturation", "bell_operator", "quantum_witness",
    "rotated_observable", "skew_conference_family_excess", "conference_excess_bound",
    "quadratic_residue_family_excess", "QuadraticResidueExcess", "BoundsReport", "bounds_report",
]
