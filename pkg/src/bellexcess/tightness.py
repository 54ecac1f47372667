"""Facet test for q = 2 correlation Bell inequalities.

The optimal deterministic points of a core ``H`` are the sign matrices ``a b^T`` attaining
the LHV value.  The inequality is tight when these points span an affine space of dimension
``m**2 - 1``.  Ranks are computed exactly: a modular elimination picks a candidate set of
independent rows and an integer certificate (or the structural upper bound) confirms it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .core import CorrelationCore
from .lhv import DEFAULT_BUDGET, optimal_alice

# two primes below 2**31, used for the modular rank and its cross-check
PRIMES = (2147483629, 2147483587)


class Vertex(NamedTuple):
    """Correlation point ``v[x m + y] = a_x b_y``; bit ``x m + y`` of ``packed`` is set when
    ``v = -1``.  Stored with ``a_0 = +1``."""

    packed: int
    m: int

    def signs(self) -> np.ndarray:
        bits = np.array([(self.packed >> i) & 1 for i in range(self.m * self.m)], dtype=np.int64)
        return 1 - 2 * bits

    def matrix(self) -> np.ndarray:
        return self.signs().reshape(self.m, self.m)

    @classmethod
    def from_signs(cls, a: Sequence[int], b: Sequence[int]) -> "Vertex":
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a[0] < 0:
            a, b = -a, -b
        return cls(_pack(np.outer(a, b).ravel()), len(a))


def _pack(signs: np.ndarray) -> int:
    bits = np.packbits(signs < 0, bitorder="little")
    return int.from_bytes(bits.tobytes(), "little")


@dataclass(frozen=True)
class VertexSet:
    """Distinct optimal correlation points, rows of ``signs`` (shape ``(count, m*m)``)."""

    m: int
    signs: np.ndarray

    def __len__(self) -> int:
        return self.signs.shape[0]

    def __iter__(self) -> Iterator[Vertex]:
        for row in self.signs:
            yield Vertex(_pack(row), self.m)

    def packed(self) -> set[int]:
        return {v.packed for v in self}


def _core_array(core) -> np.ndarray:
    if isinstance(core, CorrelationCore):
        if core.q != 2:
            raise ValueError("tightness is implemented for q = 2 only")
        return np.asarray(core.integer_matrix())
    arr = np.asarray(core)
    if arr.dtype.kind not in "iu":
        if not np.all(arr == np.rint(arr)):
            raise ValueError("core must be given as an integer matrix or a CorrelationCore")
        arr = np.rint(arr).astype(np.int64)
    return arr


def collect_vertices(core, threads: int = 1, budget: int = DEFAULT_BUDGET) -> VertexSet:
    """All distinct optimal correlation points of a q = 2 core.

    Alice's first sign is fixed to +1.  For each optimal Alice vector, Bob's signs follow
    the column sums, and a zero column sum contributes both signs.
    """
    H = _core_array(core)
    m = H.shape[0]
    c = CorrelationCore.from_entries(H.tolist(), m=m)
    _, alice, en = optimal_alice(c, threads=threads, budget=budget, fix_first=True)
    ties = en.bob_ties(alice)  # (k, 2, m)
    rows = []
    for a_dig, t in zip(alice, ties):
        a = 1 - 2 * a_dig
        free = np.flatnonzero(t[0] & t[1])
        b0 = np.where(t[0], 1, -1)
        for mask in range(1 << free.size):
            b = b0.copy()
            for i, y in enumerate(free):
                if (mask >> i) & 1:
                    b[y] = -1
            rows.append(np.outer(a, b).ravel())
    signs = np.array(rows, dtype=np.int8).reshape(-1, m * m)
    seen: set[bytes] = set()
    keep = []
    for i, row in enumerate(np.packbits(signs < 0, axis=1)):
        key = row.tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return VertexSet(m, signs[keep])


# ---------------------------------------------------------------------------
# exact rank
# ---------------------------------------------------------------------------

def _rref_mod(A: np.ndarray, p: int):
    """Row-reduced echelon form mod p.  Returns (rows, pivot columns, source rows)."""
    A = np.mod(A.astype(np.int64), p)
    nr, nc = A.shape
    order = np.arange(nr)
    pivots = []
    r = 0
    for col in range(nc):
        if r == nr:
            break
        nz = np.flatnonzero(A[r:, col])
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
            order[[r, k]] = order[[k, r]]
        inv = pow(int(A[r, col]), p - 2, p)
        A[r] = (A[r] * inv) % p
        factors = A[:, col].copy()
        factors[r] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            # the pivot row vanishes left of col
            A[hit, col:] = (A[hit, col:] - (factors[hit, None] * A[r, col:][None, :]) % p) % p
        pivots.append(col)
        r += 1
    return A[:r], pivots, order[:r]


def _mulmod(X: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """``X @ B mod p`` for entries in [0, p), p < 2**31, with exact float64 products.

    ``X`` is split into 11-bit digits so each partial product sum stays below 2**53 for
    inner dimensions up to 512.
    """
    if X.shape[1] > 512:
        raise ValueError("inner dimension too large for the float64 split")
    Bf = B.astype(np.float64)
    out = np.zeros((X.shape[0], B.shape[1]), dtype=np.int64)
    for shift in (22, 11, 0):
        part = ((X >> shift) & 0x7FF).astype(np.float64)
        out = (out * 2048 + (part @ Bf).astype(np.int64) % p) % p
    return out


def modular_basis(V: np.ndarray, p: int, chunk: int = 256) -> np.ndarray:
    """Indices of rows of ``V`` that are independent mod ``p`` and span its rows mod ``p``."""
    V = np.asarray(V, dtype=np.int64)
    selected = []
    basis = np.empty((0, V.shape[1]), dtype=np.int64)
    pivots: list[int] = []
    for start in range(0, V.shape[0], chunk):
        X = np.mod(V[start:start + chunk], p)
        if pivots:
            X = (X - _mulmod(X[:, pivots], basis, p)) % p
        if not X.any():
            continue
        N, new_piv, src = _rref_mod(X, p)
        if not new_piv:
            continue
        # keep the basis in reduced form: clear the new pivot columns from the old rows
        if pivots:
            basis = (basis - _mulmod(basis[:, new_piv], N, p)) % p
        basis = np.vstack([basis, N])
        pivots += new_piv
        selected.extend((start + src).tolist())
    return np.array(sorted(selected), dtype=np.int64)


def _bareiss(A: list[list[int]]):
    """Fraction-free Gauss-Jordan elimination on a list of integer rows.

    Returns (rank, pivot columns, reduced rows, determinant of the pivot block).  In the
    reduced rows the pivot block equals ``det * I`` and every row is an integer
    combination of the input rows scaled so that entries stay exact minors.
    """
    R = [list(map(int, row)) for row in A]
    nr = len(R)
    nc = len(R[0]) if R else 0
    prev = 1
    r = 0
    pivots = []
    for col in range(nc):
        if r == nr:
            break
        k = next((i for i in range(r, nr) if R[i][col] != 0), None)
        if k is None:
            continue
        R[r], R[k] = R[k], R[r]
        piv = R[r][col]
        prow = R[r]
        for i in range(nr):
            if i == r:
                continue
            f = R[i][col]
            row = R[i]
            R[i] = [(piv * a - f * b) // prev for a, b in zip(row, prow)]
        prev = piv
        pivots.append(col)
        r += 1
    return r, pivots, R[:r], (prev if r else 1)


def bareiss_rank(A) -> int:
    """Exact rank of an integer matrix by fraction-free elimination."""
    rows = np.asarray(A).tolist()
    if not rows or not rows[0]:
        return 0
    return _bareiss(rows)[0]


def _certify_span(V: np.ndarray, sel: np.ndarray) -> bool:
    """True when every row of ``V`` lies in the rational span of ``V[sel]``."""
    rank, piv, E, det = _bareiss(V[sel].tolist())
    if rank != len(sel):
        return False
    E = np.array(E, dtype=object)
    Vo = V.astype(object)
    lhs = Vo * det
    rhs = Vo[:, piv].dot(E)
    return bool(np.all(lhs == rhs))


def difference_matrix(vertices) -> np.ndarray:
    """Rows ``(v_i - v_0) / 2`` for i >= 1, entries in {-1, 0, 1}."""
    if isinstance(vertices, VertexSet):
        S = vertices.signs.astype(np.int64)
    else:
        S = np.array([v.signs() if isinstance(v, Vertex) else v for v in vertices], dtype=np.int64)
    if S.shape[0] == 0:
        raise ValueError("empty vertex set")
    return (S[1:] - S[:1]) // 2


def affine_rank(vertices, upper: int | None = None) -> int:
    """Exact affine rank (rank of the differences to the first vertex) over the rationals.

    A modular elimination proposes independent rows; independence mod p implies
    independence over Q.  If their number reaches ``upper`` (a known bound on the rank)
    the result is final; otherwise an integer certificate checks that they span all
    differences, with a full fraction-free elimination as the fallback.
    """
    D = difference_matrix(vertices)
    if D.shape[0] == 0 or not D.any():
        return 0
    sel = modular_basis(D, PRIMES[0])
    if upper is not None and len(sel) >= upper:
        return len(sel)
    other = modular_basis(D, PRIMES[1])
    if len(other) > len(sel):
        sel = other
    r = len(sel)
    if upper is not None and r >= upper:
        return r
    if _certify_span(D, sel):
        return r
    return bareiss_rank(D)


def modular_rank(vertices, p: int = PRIMES[1]) -> int:
    D = difference_matrix(vertices)
    return int(len(modular_basis(D, p))) if D.size else 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TightnessReport:
    m: int
    lhv_value: int
    vertex_count: int
    affine_rank: int
    tight: bool
    regular_equivalent: bool

    def row(self) -> tuple:
        return (self.m, self.vertex_count, self.affine_rank, "Tight" if self.tight else "Non-tight")

    def as_dict(self) -> dict:
        return {"m": self.m, "lhv_value": self.lhv_value, "vertex_count": self.vertex_count,
                "affine_rank": self.affine_rank, "tight": self.tight,
                "regular_equivalent": self.regular_equivalent}


def tightness_report(core, threads: int = 1, budget: int = DEFAULT_BUDGET) -> TightnessReport:
    H = _core_array(core)
    m = H.shape[0]
    vs = collect_vertices(H, threads=threads, budget=budget)
    C = int(np.sum(vs.signs[0].astype(np.int64) * H.ravel()))
    # every optimal point lies on <H, v> = C, so the differences lie in H's complement
    upper = m * m - 1 if H.any() else m * m
    rank = affine_rank(vs, upper=upper)
    return TightnessReport(m=m, lhv_value=C, vertex_count=len(vs), affine_rank=rank,
                           tight=rank == m * m - 1, regular_equivalent=C * C == m**3)


class TableRow(NamedTuple):
    label: str
    order: int
    index: int
    vertices: int
    rank: int
    tight: bool
    regular: bool


# Reference tightness table as published; catalogue index i of each order is matched to a row by computed
# invariants (see the catalogue module).
TABLE_I: tuple[TableRow, ...] = (
    TableRow("2", 2, 0, 4, 3, True, False),
    TableRow("4*", 4, 0, 4, 3, False, True),
    TableRow("8", 8, 0, 64, 63, True, False),
    TableRow("12", 12, 0, 2640, 143, True, False),
    TableRow("16 (1)*", 16, 0, 896, 105, False, True),
    TableRow("16 (2)*", 16, 1, 192, 81, False, True),
    TableRow("16 (3)*", 16, 2, 64, 45, False, True),
    TableRow("16 (4)", 16, 3, 21504, 255, True, False),
    TableRow("16 (5)", 16, 4, 21504, 255, True, False),
    TableRow("20 (1)", 20, 0, 20064, 399, True, False),
    TableRow("20 (2)", 20, 1, 20064, 399, True, False),
    TableRow("20 (3)", 20, 2, 20064, 399, True, False),
)


__all__ = [
    "Vertex", "VertexSet", "collect_vertices", "affine_rank", "bareiss_rank", "modular_rank",
    "modular_basis", "difference_matrix", "TightnessReport", "tightness_report", "TableRow",
    "TABLE_I", "PRIMES",
]
