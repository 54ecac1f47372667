"""Matrix families: Sylvester and Paley Hadamard matrices, circulants, the Fourier-square
games, and predicates for Hadamard, conference, skew-type and weighing matrices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import GameMatrix, GameTensor, check_symmetry, exact_root, roots_of_unity

# Sign matrices are plain int64 arrays with entries in {-1, 0, 1}.
SignMatrix = np.ndarray

H2 = np.array([[1, 1], [1, -1]], dtype=np.int64)


def as_sign_matrix(A, allow_zero: bool = False) -> SignMatrix:
    arr = np.asarray(A)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    allowed = (-1, 0, 1) if allow_zero else (-1, 1)
    if not np.all(np.isin(arr, allowed)):
        raise ValueError(f"entries must lie in {set(allowed)}")
    return arr.astype(np.int64)


def _gram(A: np.ndarray) -> np.ndarray:
    return A @ A.T


def sylvester(k: int) -> SignMatrix:
    """``H2`` tensored with itself ``k`` times (order ``2**k``)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    H = np.ones((1, 1), dtype=np.int64)
    for _ in range(k):
        H = np.kron(H, H2)
    return H


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def quadratic_residues(p: int) -> set[int]:
    return {(i * i) % p for i in range(1, p)}


def paley_hadamard(ell: int) -> SignMatrix:
    """Hadamard matrix of order ell + 1 from the quadratic residues mod a prime ell = 3 mod 4.

    First row ``(-1, 1, ..., 1)``, first column of ones below it, and the remaining block
    ``A[i, j] = 1`` when ``j - i`` is zero or a nonzero square, ``-1`` otherwise.
    """
    if not _is_prime(ell):
        raise ValueError(f"{ell} is not prime (prime-power fields are not supported)")
    if ell % 4 != 3:
        raise ValueError(f"{ell} is not 3 mod 4")
    res = quadratic_residues(ell) | {0}
    diff = (np.arange(ell)[None, :] - np.arange(ell)[:, None]) % ell
    A = np.where(np.isin(diff, list(res)), 1, -1)
    H = np.ones((ell + 1, ell + 1), dtype=np.int64)
    H[0, 0] = -1
    H[1:, 1:] = A
    assert is_hadamard(H)
    return H


def circulant(first_row) -> np.ndarray:
    """Row ``i`` is ``first_row`` shifted right by ``i``."""
    r = np.asarray(first_row)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("first row must be a non-empty vector")
    return np.stack([np.roll(r, i) for i in range(r.size)])


def fourier_square(q: int) -> GameMatrix:
    """Game with ``m = q`` and ``M[q s + x, q t + y] = omega**(x t - s y)``.

    Entries are exact for q in {2, 4} and float otherwise.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    s, x, t, y = np.meshgrid(*(np.arange(q),) * 4, indexing="ij")
    e = ((x * t - s * y) % q).reshape(q * q, q * q)
    if q in (2, 4):
        table = [exact_root(q, k) for k in range(q)]
        re = np.array([[Fraction(table[k][0]) for k in row] for row in e], dtype=object)
        im = np.array([[Fraction(table[k][1]) for k in row] for row in e], dtype=object)
        M = GameMatrix(re, im, m=q, q=q)
    else:
        c = roots_of_unity(q)[e]
        M = GameMatrix(c.real.copy(), c.imag.copy(), m=q, q=q)
    check_symmetry(M)
    return M


def gyni_tensor(q: int) -> GameTensor:
    """Guess-your-neighbour's-input coefficients: ``S[a, b, x, y] = 1`` iff ``x = b`` and ``y = a``."""
    if q < 2:
        raise ValueError("q must be at least 2")
    S = np.full((q, q, q, q), Fraction(0), dtype=object)
    for a in range(q):
        for b in range(q):
            S[a, b, b, a] = Fraction(1)
    return GameTensor(q, q, S)


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------

def is_hadamard(H) -> bool:
    A = np.asarray(H)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or not np.all(np.isin(A, (-1, 1))):
        return False
    A = A.astype(np.int64)
    return bool(np.array_equal(_gram(A), A.shape[0] * np.eye(A.shape[0], dtype=np.int64)))


def is_conference(C) -> bool:
    """Zero diagonal, +-1 elsewhere, ``C C^T = (n - 1) I``."""
    A = np.asarray(C)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    n = A.shape[0]
    off = ~np.eye(n, dtype=bool)
    if np.any(np.diag(A) != 0) or not np.all(np.isin(A[off], (-1, 1))):
        return False
    A = A.astype(np.int64)
    return bool(np.array_equal(_gram(A), (n - 1) * np.eye(n, dtype=np.int64)))


def is_skew_type(H) -> bool:
    """Hadamard with ``H - I`` skew-symmetric."""
    if not is_hadamard(H):
        return False
    D = np.asarray(H, dtype=np.int64) - np.eye(len(H), dtype=np.int64)
    return bool(np.array_equal(D.T, -D))


def weighing_weight(W) -> int | None:
    """``k`` such that ``W W^T = k I`` for a {-1, 0, 1} matrix, otherwise ``None``."""
    A = np.asarray(W)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.size == 0 or not np.all(np.isin(A, (-1, 0, 1))):
        return None
    A = A.astype(np.int64)
    G = _gram(A)
    k = int(G[0, 0])
    if not np.array_equal(G, k * np.eye(A.shape[0], dtype=np.int64)):
        return None
    return k


# ---------------------------------------------------------------------------
# mutually quasi-unbiased weighing matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MquwmParams:
    m: int
    k: int
    l: int
    a: int

    def __post_init__(self):
        if min(self.m, self.k, self.l, self.a) <= 0:
            raise ValueError("MQUWM parameters must be positive")
        if self.a * self.l != self.k * self.k:
            raise ValueError(f"a*l = {self.a * self.l} differs from k**2 = {self.k ** 2}")


@dataclass(frozen=True)
class MquwmResult:
    ok: bool
    params: MquwmParams | None = None
    reason: str = ""

    @property
    def l(self) -> int | None:
        return self.params.l if self.params else None


def mquwm_check(W1, W2, a: int) -> MquwmResult:
    """Check that ``W1 W2^T / sqrt(a)`` is a weighing matrix of weight ``k**2 / a``.

    Squared form: every entry of ``P = W1 W2^T`` squares to 0 or ``a``, and
    ``P P^T = a l I``.
    """
    A, B = np.asarray(W1), np.asarray(W2)
    if A.shape != B.shape:
        raise ValueError(f"orders differ: {A.shape} and {B.shape}")
    k1, k2 = weighing_weight(A), weighing_weight(B)
    if k1 is None or k2 is None:
        raise ValueError("inputs must be weighing matrices")
    if k1 != k2:
        return MquwmResult(False, reason=f"weights differ ({k1} and {k2})")
    if a <= 0 or (k1 * k1) % a:
        return MquwmResult(False, reason=f"a = {a} does not divide k**2 = {k1 * k1}")
    l = k1 * k1 // a
    P = A.astype(np.int64) @ B.astype(np.int64).T
    sq = P * P
    bad = np.argwhere((sq != 0) & (sq != a))
    if bad.size:
        i, j = bad[0]
        return MquwmResult(False, reason=f"entry ({i}, {j}) = {P[i, j]} is not 0 or +-sqrt({a})")
    G = P @ P.T
    if not np.array_equal(G, a * l * np.eye(len(P), dtype=np.int64)):
        return MquwmResult(False, reason=f"scaled product is not a weighing matrix of weight {l}")
    return MquwmResult(True, MquwmParams(len(P), k1, l, a))


__all__ = [
    "SignMatrix", "H2", "as_sign_matrix", "sylvester", "quadratic_residues", "paley_hadamard",
    "circulant", "fourier_square", "gyni_tensor", "is_hadamard", "is_conference", "is_skew_type",
    "weighing_weight", "MquwmParams", "MquwmResult", "mquwm_check",
]
