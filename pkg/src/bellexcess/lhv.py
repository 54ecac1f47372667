"""Local hidden variable values by exhaustive enumeration of Alice's strategies.

The objective ``sum M[m s + x, m t + y] a_x**s b_y**t`` splits into one term per Bob
setting ``y``, each depending on ``b_y`` only, so for a fixed Alice assignment Bob's
best response is chosen setting by setting.  Alice's ``q**m`` assignments are
walked as a table over the first few settings combined with a reflected q-ary Gray
code over the rest; exact games (integer numerators, ``q`` in {1, 2, 4}) are
evaluated in integer arithmetic so ties are exact.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (
    EXACT_Q,
    CorrelationCore,
    GameMatrix,
    check_symmetry,
    embed_core,
    exact_root,
    kron_entries,
    roots_of_unity,
)

DEFAULT_BUDGET = 2**26
DEFAULT_OPTIMIZER_CAP = 2**22
DEFAULT_TIE_TOL = 1e-7

# target size (rows * columns) of the low-block table evaluated per Gray step
_TABLE_CELLS = 2**20


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"enumeration needs {required} Alice states; budget is {budget}")


class OptimizerCapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} optimal strategies exceed the cap of {cap}")


@dataclass(frozen=True)
class Strategy:
    """Deterministic local strategy: ``a_x = omega**alice[x]``, ``b_y = omega**bob[y]``."""

    alice: tuple[int, ...]
    bob: tuple[int, ...]
    q: int = 2

    def __post_init__(self):
        if len(self.alice) != len(self.bob):
            raise ValueError("Alice and Bob need the same number of settings")
        for e in self.alice + self.bob:
            if not 0 <= e < self.q:
                raise ValueError(f"exponent {e} outside [0, {self.q})")

    @property
    def m(self) -> int:
        return len(self.alice)

    @classmethod
    def all_plus(cls, m: int, q: int = 2) -> "Strategy":
        return cls((0,) * m, (0,) * m, q)

    @classmethod
    def from_signs(cls, a: Sequence[int], b: Sequence[int]) -> "Strategy":
        """q = 2 strategy from +-1 vectors."""
        return cls(tuple(0 if v > 0 else 1 for v in a), tuple(0 if v > 0 else 1 for v in b), 2)

    def signs(self) -> tuple[np.ndarray, np.ndarray]:
        if self.q != 2:
            raise ValueError("signs are defined for q = 2 only")
        return 1 - 2 * np.array(self.alice), 1 - 2 * np.array(self.bob)

    def packed(self) -> tuple[int, int]:
        """Bit-packed (q = 2) form: bit x set when ``a_x = -1``."""
        if self.q != 2:
            raise ValueError("bit packing is defined for q = 2 only")
        pack = lambda v: sum(1 << i for i, e in enumerate(v) if e)  # noqa: E731
        return pack(self.alice), pack(self.bob)

    def powers(self) -> tuple[np.ndarray, np.ndarray]:
        """Complex vectors ``u[m s + x] = a_x**s`` and ``w[m t + y] = b_y**t``."""
        w = roots_of_unity(self.q)
        s = np.arange(self.q)[:, None]
        u = w[(s * np.array(self.alice)[None, :]) % self.q].ravel()
        v = w[(s * np.array(self.bob)[None, :]) % self.q].ravel()
        return u, v


@dataclass(frozen=True)
class LhvResult:
    value: Fraction | float
    witness: Strategy
    optimizer_count: int | None = None


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _exact_powers(q: int, exps: Sequence[int]) -> tuple[list[int], list[int]]:
    re, im = [], []
    for s in range(q):
        for e in exps:
            r, i = exact_root(q, s * e)
            re.append(r)
            im.append(i)
    return re, im


def evaluate(M: GameMatrix, s: Strategy):
    """Value of the Bell expression for the deterministic strategy ``s``."""
    if s.m != M.m or s.q != M.q:
        raise ValueError(f"strategy (m={s.m}, q={s.q}) does not match matrix (m={M.m}, q={M.q})")
    if M.exact and M.q in EXACT_Q:
        form = M.integer_form()
        mre = np.asarray(form.re, dtype=object)
        mim = np.asarray(form.im, dtype=object)
        ur, ui = (np.array(v, dtype=object) for v in _exact_powers(M.q, s.alice))
        wr, wi = (np.array(v, dtype=object) for v in _exact_powers(M.q, s.bob))
        pre = mre.dot(wr) - mim.dot(wi)
        pim = mre.dot(wi) + mim.dot(wr)
        real = ur.dot(pre) - ui.dot(pim)
        imag = ur.dot(pim) + ui.dot(pre)
        if imag != 0:
            raise ValueError("objective has a nonzero imaginary part; matrix is not symmetric")
        return Fraction(int(real)) * form.scale
    u, w = s.powers()
    val = u @ M.to_complex() @ w
    if abs(val.imag) > M.tol * max(1, M.n) ** 2:
        raise ValueError(f"objective has imaginary part {val.imag:.3g}; matrix is not symmetric")
    return float(val.real)


# ---------------------------------------------------------------------------
# kernels: per-setting contributions and Bob's per-setting options
# ---------------------------------------------------------------------------

class _Kernel:
    """Numeric data for the enumeration.

    ``G[x, k]`` is the contribution of Alice choosing ``omega**k`` at setting ``x`` to the
    column vector ``c = u^T M``; ``bob_values(c)`` returns the value of every Bob option
    per setting, shape ``(..., q, m)``.
    """

    m: int
    q: int
    exact: bool
    scale: Fraction | None
    G: np.ndarray

    def bob_values(self, c: np.ndarray) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def to_value(self, raw):
        if self.exact:
            return Fraction(int(raw)) * self.scale
        return float(raw)


class _MatrixKernel(_Kernel):
    def __init__(self, M: GameMatrix):
        m, q, n = M.m, M.q, M.n
        self.m, self.q = m, q
        self.exact = M.exact and q in EXACT_Q
        w = roots_of_unity(q)
        self._bob_phase = w[(np.arange(q)[:, None] * np.arange(q)[None, :]) % q]  # [t, k]
        phase = self._bob_phase  # [k, s], symmetric
        if self.exact:
            form = M.integer_form()
            self.scale = form.scale
            if q <= 2 or not np.any(np.asarray(form.im, dtype=object) != 0):
                base = np.asarray(form.re, dtype=np.int64) if form.re.dtype != object else None
            else:
                base = None
            bound = max(int(abs(v)) for v in list(np.ravel(form.re)) + list(np.ravel(form.im)) + [0])
            if bound * n * n * q >= 2**50:
                raise OverflowError("integer numerators too large for exact enumeration")
            if q <= 2 and base is not None:
                B = base.reshape(q, m, n)
                if q == 1:
                    self.G = B.transpose(1, 0, 2).copy()
                else:
                    self.G = np.stack([B[0] + B[1], B[0] - B[1]], axis=1)
                self._real = True
            else:
                c = np.asarray(form.re, dtype=float) + 1j * np.asarray(form.im, dtype=float)
                self.G = np.einsum("ks,sxc->xkc", phase, c.reshape(q, m, n))
                self._real = False
        else:
            self.scale = None
            self.G = np.einsum("ks,sxc->xkc", phase, M.to_complex().reshape(q, m, n))
            self._real = False

    def bob_values(self, c):
        q, m = self.q, self.m
        c4 = c.reshape(c.shape[:-1] + (q, m))
        if self._real:
            if q == 1:
                return c4
            return np.stack([c4[..., 0, :] + c4[..., 1, :], c4[..., 0, :] - c4[..., 1, :]], axis=-2)
        f = np.einsum("...ty,tk->...ky", c4, self._bob_phase).real
        if self.exact:
            return np.rint(f).astype(np.int64)
        return f


class _CoreKernel(_Kernel):
    """q = 2 correlation game given by its core H: value = sum_y |sum_x H[x, y] a_x|."""

    def __init__(self, H: np.ndarray, scale: Fraction | None):
        H = np.asarray(H)
        self.m = H.shape[0]
        self.q = 2
        self.exact = scale is not None
        self.scale = scale
        self.G = np.stack([H, -H], axis=1)

    def bob_values(self, c):
        return np.stack([c, -c], axis=-2)


def _kernel_for(M) -> _Kernel:
    if isinstance(M, CorrelationCore):
        if M.q != 2:
            return _MatrixKernel(embed_core(M))
        if M.exact:
            form = M.integer_form()
            if any(v != 0 for v in np.ravel(form.im)):
                raise ValueError("q = 2 core must be real")
            return _CoreKernel(np.asarray(form.re, dtype=np.int64), form.scale)
        return _CoreKernel(M.re.copy(), None)
    check_symmetry(M)
    return _MatrixKernel(M)


# ---------------------------------------------------------------------------
# Gray-code enumeration
# ---------------------------------------------------------------------------

def digits_of(index: np.ndarray, q: int, length: int) -> np.ndarray:
    """Base-q digits, least significant first, shape (len(index), length)."""
    index = np.asarray(index, dtype=np.int64)
    out = np.empty((index.size, length), dtype=np.int64)
    rest = index.copy()
    for i in range(length):
        rest, out[:, i] = np.divmod(rest, q)
    return out


def gray_digits(index: np.ndarray, q: int, length: int) -> np.ndarray:
    """Reflected q-ary Gray code words for the given ranks (least significant digit first).

    Consecutive ranks differ in exactly one digit, by +-1.
    """
    d = digits_of(index, q, length)
    g = np.empty_like(d)
    flip = np.zeros(d.shape[0], dtype=bool)
    for i in range(length - 1, -1, -1):
        dd = np.where(flip, q - 1 - d[:, i], d[:, i])
        g[:, i] = dd
        flip ^= (dd % 2) == 1
    return g


def _split_sizes(m: int, q: int, ncols: int, fix_first: bool) -> int:
    """Number of settings enumerated as a table (the low block)."""
    low = 1 if fix_first else 0
    while low < m and q ** (low + 1) * ncols <= _TABLE_CELLS:
        low += 1
    return max(low, 1 if fix_first else 0)


@dataclass
class _Segment:
    best: object
    alice: list  # arrays of optimal Alice digit vectors


class _Enumerator:
    def __init__(self, kernel: _Kernel, tie_tol: float, fix_first: bool, incremental: bool | None):
        self.k = kernel
        self.tie_tol = tie_tol
        m, q = kernel.m, kernel.q
        ncols = kernel.G.shape[-1]
        self.low = _split_sizes(m, q, ncols, fix_first)
        self.high = m - self.low
        low_idx = np.arange(q**self.low)
        self.low_digits = digits_of(low_idx, q, self.low)
        if fix_first:
            self.low_digits = self.low_digits[self.low_digits[:, 0] == 0]
        G = kernel.G
        table = np.zeros((self.low_digits.shape[0], ncols), dtype=G.dtype)
        for x in range(self.low):
            table += G[x, self.low_digits[:, x]]
        self.table = table
        # float sums are recomputed from scratch so that every state is summed identically
        self.incremental = kernel.exact if incremental is None else incremental

    def _ties(self, vals, best):
        if self.k.exact:
            return vals == best
        return vals >= best - self.tie_tol * (1 + abs(best))

    def run_segment(self, start: int, stop: int) -> _Segment:
        k, low = self.k, self.low
        G = k.G
        words = gray_digits(np.arange(start, stop), k.q, self.high)
        best = None
        found: list[np.ndarray] = []
        chigh = None
        prev = None
        for word in words:
            if chigh is None or not self.incremental:
                chigh = np.zeros(G.shape[-1], dtype=G.dtype)
                for j, e in enumerate(word):
                    chigh = chigh + G[low + j, e]
            else:
                (j,) = np.flatnonzero(word != prev)
                chigh = chigh + (G[low + j, word[j]] - G[low + j, prev[j]])
            prev = word
            f = k.bob_values(self.table + chigh)
            vals = f.max(axis=-2).sum(axis=-1)
            top = vals.max()
            if best is None or (top > best if k.exact else top > best + self.tie_tol * (1 + abs(best))):
                best = top
                found = []
            elif not self._ties(np.array([top]), best)[0]:
                continue
            rows = np.flatnonzero(self._ties(vals, best))
            if rows.size:
                alice = np.empty((rows.size, k.m), dtype=np.int64)
                alice[:, :low] = self.low_digits[rows]
                alice[:, low:] = word
                found.append(alice)
        return _Segment(best, found)

    def run(self, threads: int = 1):
        nhigh = self.k.q**self.high
        nseg = max(1, min(threads, nhigh))
        bounds = [nhigh * i // nseg for i in range(nseg + 1)]
        spans = list(zip(bounds[:-1], bounds[1:]))
        if nseg == 1:
            segs = [self.run_segment(*spans[0])]
        else:
            with ThreadPoolExecutor(max_workers=nseg) as pool:
                segs = list(pool.map(lambda sp: self.run_segment(*sp), spans))
        best = segs[0].best
        for s in segs[1:]:
            if s.best > best:
                best = s.best
        parts = []
        for s in segs:
            if not self._ties(np.array([s.best]), best)[0]:
                continue
            for arr in s.alice:
                vals = self.alice_values(arr)
                keep = self._ties(vals, best)
                if keep.any():
                    parts.append(arr[keep])
        alice = np.concatenate(parts) if parts else np.empty((0, self.k.m), dtype=np.int64)
        return best, alice

    def columns(self, alice: np.ndarray) -> np.ndarray:
        G = self.k.G
        c = np.zeros((alice.shape[0], G.shape[-1]), dtype=G.dtype)
        for x in range(self.k.m):
            c += G[x, alice[:, x]]
        return c

    def alice_values(self, alice: np.ndarray) -> np.ndarray:
        return self.k.bob_values(self.columns(alice)).max(axis=-2).sum(axis=-1)

    def bob_ties(self, alice: np.ndarray) -> np.ndarray:
        """Boolean array (len(alice), q, m): Bob options attaining the per-setting max."""
        f = self.k.bob_values(self.columns(alice))
        top = f.max(axis=-2, keepdims=True)
        if self.k.exact:
            return f == top
        return f >= top - self.tie_tol * (1 + np.abs(top))


def _check_budget(q: int, m: int, fix_first: bool, budget: int) -> None:
    states = q ** (m - 1 if fix_first else m)
    if states > budget:
        raise BudgetExceeded(states, budget)


def optimal_alice(M: GameMatrix | CorrelationCore, *, threads: int = 1, budget: int = DEFAULT_BUDGET,
                  tie_tol: float = DEFAULT_TIE_TOL, fix_first: bool = False,
                  incremental: bool | None = None):
    """Maximum value and every optimal Alice assignment (as digit rows).

    With ``fix_first`` Alice's first setting is pinned to ``omega**0``; for q = 2
    correlation games this removes the joint sign flip.
    """
    kernel = _kernel_for(M)
    _check_budget(kernel.q, kernel.m, fix_first, budget)
    en = _Enumerator(kernel, tie_tol, fix_first, incremental)
    best, alice = en.run(threads)
    return kernel.to_value(best), alice, en


def lhv_value(M: GameMatrix | CorrelationCore, threads: int = 1, *, budget: int = DEFAULT_BUDGET,
              tie_tol: float = DEFAULT_TIE_TOL, count: bool = False,
              optimizer_cap: int = DEFAULT_OPTIMIZER_CAP) -> LhvResult:
    """Maximum of the Bell expression over deterministic local strategies.

    The witness is the first optimum in enumeration order with Bob's smallest optimal
    exponent per setting, so the result does not depend on ``threads``.
    """
    value, alice, en = optimal_alice(M, threads=threads, budget=budget, tie_tol=tie_tol)
    ties = en.bob_ties(alice[:1])[0]
    bob = tuple(int(np.flatnonzero(ties[:, y])[0]) for y in range(en.k.m))
    witness = Strategy(tuple(int(v) for v in alice[0]), bob, en.k.q)
    n_opt = None
    if count:
        n_opt = _count(en.bob_ties(alice))
        if n_opt > optimizer_cap:
            raise OptimizerCapExceeded(n_opt, optimizer_cap)
    return LhvResult(value, witness, n_opt)


def _count(ties: np.ndarray) -> int:
    per = ties.sum(axis=-2)
    return int(sum(math.prod(int(v) for v in row) for row in per))


def enumerate_optimizers(M: GameMatrix | CorrelationCore, tie_tol: float = DEFAULT_TIE_TOL, *,
                         threads: int = 1, budget: int = DEFAULT_BUDGET,
                         optimizer_cap: int = DEFAULT_OPTIMIZER_CAP,
                         vertices: bool = False) -> list[Strategy]:
    """All strategies attaining the LHV value.

    Exact games compare in integers and ignore ``tie_tol``.  ``vertices=True`` keeps only
    strategies with ``alice[0] == 0``; for q = 2 correlation games that is one strategy
    per correlation vertex.
    """
    _, alice, en = optimal_alice(M, threads=threads, budget=budget, tie_tol=tie_tol, fix_first=vertices)
    ties = en.bob_ties(alice)
    total = _count(ties)
    if total > optimizer_cap:
        raise OptimizerCapExceeded(total, optimizer_cap)
    q, m = en.k.q, en.k.m
    out = []
    for a, t in zip(alice, ties):
        options = [np.flatnonzero(t[:, y]).tolist() for y in range(m)]
        a_t = tuple(int(v) for v in a)
        for b in itertools.product(*options):
            out.append(Strategy(a_t, tuple(b), q))
    return out


# ---------------------------------------------------------------------------
# brute force oracle
# ---------------------------------------------------------------------------

def brute_force(M: GameMatrix, tie_tol: float = DEFAULT_TIE_TOL, max_states: int = 2**22):
    """Value and optimal strategies by evaluating all ``q**(2m)`` strategy pairs.

    Independent of the best-response machinery; intended as a test oracle.
    """
    check_symmetry(M)
    m, q = M.m, M.q
    if q ** (2 * m) > max_states:
        raise BudgetExceeded(q ** (2 * m), max_states)
    words = digits_of(np.arange(q**m), q, m)
    w = roots_of_unity(q)
    s = np.arange(q)
    U = w[(s[None, :, None] * words[:, None, :]) % q].reshape(len(words), m * q)
    exact = M.exact and q in EXACT_Q
    if exact:
        form = M.integer_form()
        mat = np.asarray(form.re, dtype=float) + 1j * np.asarray(form.im, dtype=float)
    else:
        mat = M.to_complex()
    vals = (U @ mat @ U.T).real
    if exact:
        vals = np.rint(vals).astype(np.int64)
        best = vals.max()
        hit = np.argwhere(vals == best)
        value = Fraction(int(best)) * form.scale
    else:
        best = vals.max()
        hit = np.argwhere(vals >= best - tie_tol * (1 + abs(best)))
        value = float(best)
    strategies = [Strategy(tuple(int(v) for v in words[i]), tuple(int(v) for v in words[j]), q) for i, j in hit]
    return value, strategies


# ---------------------------------------------------------------------------
# normalization and products
# ---------------------------------------------------------------------------

def normalize_to_allplus(M: GameMatrix, s: Strategy, *, check: bool = True,
                         threads: int = 1, tie_tol: float = DEFAULT_TIE_TOL) -> GameMatrix:
    """Equivalent matrix ``M'[i, j] = u_i w_j M[i, j]`` for which the all-plus strategy
    attains the value of ``s``.  With ``check`` the strategy must be optimal for ``M``.

    The phase is not conjugated: with ``conj(u_i w_j)`` the excess of ``M'`` is the value of the
    conjugate strategy, which differs from the value of ``s`` for complex games.
    """
    check_symmetry(M)
    if s.m != M.m or s.q != M.q:
        raise ValueError("strategy does not match the matrix")
    if check:
        best = lhv_value(M, threads, tie_tol=tie_tol).value
        val = evaluate(M, s)
        ok = val == best if M.exact and M.q in EXACT_Q else abs(val - best) <= tie_tol * (1 + abs(best))
        if not ok:
            raise ValueError(f"strategy value {val} is below the LHV value {best}")
    q = M.q
    if M.exact and q in EXACT_Q:
        ur, ui = _exact_powers(q, s.alice)
        wr, wi = _exact_powers(q, s.bob)
        pre = np.outer(ur, wr) - np.outer(ui, wi)
        pim = np.outer(ur, wi) + np.outer(ui, wr)
        re = M.re * pre - M.im * pim
        im = M.im * pre + M.re * pim
        out = GameMatrix(np.asarray(re, dtype=object), np.asarray(im, dtype=object), m=M.m, q=q, tol=M.tol)
    else:
        u, w = s.powers()
        c = np.outer(u, w) * M.to_complex()
        out = GameMatrix(c.real.copy(), c.imag.copy(), m=M.m, q=q, tol=M.tol)
    check_symmetry(out)
    return out


def normalize(M: GameMatrix, threads: int = 1) -> tuple[GameMatrix, LhvResult]:
    """Normalize ``M`` with its own witness; returns the new matrix and the LHV result."""
    res = lhv_value(M, threads)
    return normalize_to_allplus(M, res.witness, check=False), res


def tensor_game(M1: GameMatrix, M2: GameMatrix) -> GameMatrix:
    """Kronecker product ``M1 (x) M2`` as a game with ``q`` outcomes and ``m1 m2 q`` settings.

    ``M2`` must be real; otherwise the product need not have the conjugation symmetry.
    """
    if M1.q != M2.q:
        raise ValueError(f"factors have different outcome counts q={M1.q} and q={M2.q}")
    if not M2.is_real():
        raise ValueError("second factor must be real for the product to keep the conjugation symmetry")
    check_symmetry(M1)
    check_symmetry(M2)
    q = M1.q
    re, im = kron_entries(M1, M2)
    tol = max(M1.tol, M2.tol)
    out = GameMatrix(re, im, m=M1.m * M2.m * q, q=q, tol=tol)
    check_symmetry(out)
    return out


__all__ = [
    "DEFAULT_BUDGET", "DEFAULT_OPTIMIZER_CAP", "DEFAULT_TIE_TOL", "BudgetExceeded",
    "OptimizerCapExceeded", "Strategy", "LhvResult", "evaluate", "lhv_value",
    "enumerate_optimizers", "optimal_alice", "brute_force", "normalize_to_allplus", "normalize",
    "tensor_game", "gray_digits", "digits_of",
]
