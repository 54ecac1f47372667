"""Domain types for bipartite Bell expressions and the transforms between them.

A Bell expression with ``m`` settings and ``q`` outcomes per party is held
either as a coefficient tensor ``S[a, b, x, y]`` (probability form) or as a
square matrix ``M`` of order ``n = m q`` (correlator form).  Matrix rows and
columns use the composite index ``m*s + x`` where ``s`` is the power of the
observable and ``x`` the setting.

Entries are stored exactly (arrays of :class:`fractions.Fraction` for the real
and imaginary parts) or as floats.  The exact form is the default whenever the
roots of unity involved are Gaussian integers, i.e. ``q`` in ``{1, 2, 4}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import NamedTuple

import numpy as np

DEFAULT_TOL = 1e-9

# q values whose roots of unity lie in Z[i]
EXACT_Q = frozenset({1, 2, 4})


class SymmetryError(ValueError):
    """Raised when a matrix does not satisfy the conjugation symmetry of a Bell matrix."""

    def __init__(self, violation: "SymmetryViolation"):
        self.violation = violation
        super().__init__(
            f"symmetry violated at entry {violation.index} against partner "
            f"{violation.partner} (|difference| = {violation.magnitude:.3g})"
        )


class SymmetryViolation(NamedTuple):
    index: tuple[int, int]
    partner: tuple[int, int]
    magnitude: float


# ---------------------------------------------------------------------------
# roots of unity
# ---------------------------------------------------------------------------

def exact_root(q: int, k: int) -> tuple[int, int]:
    """Real and imaginary part of ``omega**k`` for ``q`` in ``{1, 2, 4}``."""
    k %= q
    if q == 1:
        return 1, 0
    if q == 2:
        return (1, 0) if k == 0 else (-1, 0)
    if q == 4:
        return ((1, 0), (0, 1), (-1, 0), (0, -1))[k]
    raise ValueError(f"omega is not a Gaussian integer for q={q}")


def roots_of_unity(q: int) -> np.ndarray:
    """``omega**k`` for ``k = 0..q-1`` as complex128, exact for q in {1, 2, 4}."""
    if q in EXACT_Q:
        return np.array([complex(*exact_root(q, k)) for k in range(q)])
    return np.exp(2j * np.pi * np.arange(q) / q)


def conjugate_index_map(m: int, q: int) -> np.ndarray:
    """Permutation sending ``m*s + x`` to ``m*((q - s) % q) + x``."""
    s, x = np.divmod(np.arange(m * q), m)
    return m * ((q - s) % q) + x


# ---------------------------------------------------------------------------
# entry storage shared by GameMatrix and CorrelationCore
# ---------------------------------------------------------------------------

def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise ValueError("non-finite coefficient")
        return Fraction(float(v))
    raise TypeError(f"cannot convert {type(v).__name__} to an exact rational")


def _fraction_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = _as_fraction(v)
    return out


def _is_rational_like(v) -> bool:
    return isinstance(v, (int, np.integer, Fraction, str)) and not isinstance(v, bool)


def _split_parts(entries, exact: bool | None):
    """Turn user input into (re, im) arrays, exact or float."""
    if isinstance(entries, tuple) and len(entries) == 2:
        re_in, im_in = entries
    else:
        arr = np.asarray(entries, dtype=object if exact else None)
        if arr.dtype == object:
            flat = arr.ravel()
            if exact is None:
                exact = all(_is_rational_like(v) for v in flat)
            if exact:
                re = np.empty(arr.shape, dtype=object)
                im = np.empty(arr.shape, dtype=object)
                for idx, v in np.ndenumerate(arr):
                    if isinstance(v, tuple):
                        re[idx], im[idx] = _as_fraction(v[0]), _as_fraction(v[1])
                    elif isinstance(v, complex):
                        re[idx], im[idx] = _as_fraction(v.real), _as_fraction(v.imag)
                    else:
                        re[idx], im[idx] = _as_fraction(v), Fraction(0)
                return re, im
            arr = arr.astype(complex)
        if exact is None:
            exact = np.issubdtype(arr.dtype, np.integer)
        if exact:
            if np.iscomplexobj(arr):
                return _fraction_array(arr.real), _fraction_array(arr.imag)
            return _fraction_array(arr), _fraction_array(np.zeros(arr.shape, dtype=int))
        arr = arr.astype(complex)
        return arr.real.copy(), arr.imag.copy()
    if exact is None:
        exact = np.asarray(re_in).dtype == object or np.issubdtype(np.asarray(re_in).dtype, np.integer)
    if exact:
        return _fraction_array(re_in), _fraction_array(im_in)
    return np.asarray(re_in, dtype=float).copy(), np.asarray(im_in, dtype=float).copy()


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class IntegerForm(NamedTuple):
    """Entries written as ``scale * (re + 1j*im)`` with integer ``re``, ``im``."""

    re: np.ndarray
    im: np.ndarray
    scale: Fraction


def integer_form(re: np.ndarray, im: np.ndarray) -> IntegerForm:
    """Clear denominators of an exact (re, im) pair.  The scale is a positive rational."""
    den = 1
    for v in re.flat:
        den = _lcm(den, v.denominator)
    for v in im.flat:
        den = _lcm(den, v.denominator)
    nre = np.array([int(v * den) for v in re.flat], dtype=object).reshape(re.shape)
    nim = np.array([int(v * den) for v in im.flat], dtype=object).reshape(im.shape)
    g = 0
    for v in nre.flat:
        g = math.gcd(g, v)
    for v in nim.flat:
        g = math.gcd(g, v)
    g = g or 1
    nre = nre // g
    nim = nim // g
    big = max((abs(v) for v in list(nre.flat) + list(nim.flat)), default=0)
    if big < 2**62:
        nre = nre.astype(np.int64)
        nim = nim.astype(np.int64)
    return IntegerForm(nre, nim, Fraction(g, den))


@dataclass(frozen=True, eq=False)
class _Entries:
    re: np.ndarray
    im: np.ndarray
    tol: float = field(default=DEFAULT_TOL, kw_only=True)

    def __post_init__(self):
        if self.re.shape != self.im.shape or self.re.ndim != 2 or self.re.shape[0] != self.re.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {self.re.shape}")
        self.re.flags.writeable = False
        self.im.flags.writeable = False

    @property
    def exact(self) -> bool:
        return self.re.dtype == object

    @property
    def order(self) -> int:
        return self.re.shape[0]

    def is_real(self) -> bool:
        if self.exact:
            return all(v == 0 for v in self.im.flat)
        return bool(np.all(np.abs(self.im) <= self.tol))

    def to_complex(self) -> np.ndarray:
        """Entries as complex128 (rounded when exact)."""
        if self.exact:
            return self.re.astype(float) + 1j * self.im.astype(float)
        return self.re + 1j * self.im

    def integer_form(self) -> IntegerForm:
        if not self.exact:
            raise TypeError("integer form is only defined for exact entries")
        return self._integer_form

    @cached_property
    def _integer_form(self) -> IntegerForm:
        return integer_form(self.re, self.im)

    def entry(self, i: int, j: int):
        """One entry: a Fraction when exact and real, a (re, im) Fraction pair when exact
        and complex, a Python complex otherwise."""
        if self.exact:
            if self.im[i, j] == 0:
                return self.re[i, j]
            return self.re[i, j], self.im[i, j]
        return complex(self.re[i, j], self.im[i, j])

    def row_sums(self):
        if self.exact:
            return [(sum(r, Fraction(0)), sum(i, Fraction(0))) for r, i in zip(self.re, self.im)]
        return list(self.re.sum(axis=1) + 1j * self.im.sum(axis=1))


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GameTensor:
    """Coefficients ``S[a, b, x, y]`` of a Bell expression in probability form."""

    m: int
    q: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.m < 1 or self.q < 2:
            raise ValueError("need m >= 1 and q >= 2")
        if self.coeffs.shape != (self.q, self.q, self.m, self.m):
            raise ValueError(f"coefficient shape {self.coeffs.shape} does not match (q, q, m, m)")
        if self.coeffs.dtype != object and not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")
        self.coeffs.flags.writeable = False

    @classmethod
    def from_array(cls, values, m: int | None = None, q: int | None = None, exact: bool | None = None):
        arr = np.asarray(values, dtype=object if exact else None)
        if exact is None:
            exact = arr.dtype == object or np.issubdtype(arr.dtype, np.integer)
        coeffs = _fraction_array(arr) if exact else np.asarray(arr, dtype=float).copy()
        q = coeffs.shape[0] if q is None else q
        m = coeffs.shape[2] if m is None else m
        return cls(m, q, coeffs)

    @classmethod
    def zeros(cls, m: int, q: int):
        return cls.from_array(np.zeros((q, q, m, m), dtype=int))

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    def equals(self, other: "GameTensor", tol: float = DEFAULT_TOL) -> bool:
        if (self.m, self.q) != (other.m, other.q):
            return False
        if self.exact and other.exact:
            return bool(np.all(self.coeffs == other.coeffs))
        return bool(np.allclose(self.coeffs.astype(float), other.coeffs.astype(float), atol=tol, rtol=0))


@dataclass(frozen=True, eq=False)
class GameMatrix(_Entries):
    """Correlator-form Bell matrix of order ``n = m q``."""

    m: int = field(kw_only=True)
    q: int = field(kw_only=True)

    def __post_init__(self):
        super().__post_init__()
        if self.m < 1 or self.q < 1 or self.order != self.m * self.q:
            raise ValueError(f"matrix order {self.order} != m*q = {self.m}*{self.q}")

    @classmethod
    def from_entries(cls, entries, m: int, q: int, exact: bool | None = None, tol: float = DEFAULT_TOL):
        """Build from a square array.  Integers and Fractions give the exact form, floats
        and complex numbers the float form, unless ``exact`` says otherwise."""
        re, im = _split_parts(entries, exact)
        return cls(re, im, m=m, q=q, tol=tol)

    @classmethod
    def zeros(cls, m: int, q: int):
        return cls.from_entries(np.zeros((m * q, m * q), dtype=int), m, q)

    @property
    def n(self) -> int:
        return self.order

    def blocks(self) -> np.ndarray:
        """Complex view indexed as ``[s, x, t, y]``."""
        return self.to_complex().reshape(self.q, self.m, self.q, self.m)

    def equals(self, other: "GameMatrix", tol: float | None = None) -> bool:
        if (self.m, self.q) != (other.m, other.q):
            return False
        if self.exact and other.exact:
            return bool(np.all(self.re == other.re) and np.all(self.im == other.im))
        tol = self.tol if tol is None else tol
        return bool(np.allclose(self.to_complex(), other.to_complex(), atol=tol, rtol=0))

    def with_float_entries(self) -> "GameMatrix":
        c = self.to_complex()
        return GameMatrix(c.real.copy(), c.imag.copy(), m=self.m, q=self.q, tol=self.tol)


@dataclass(frozen=True, eq=False)
class CorrelationCore(_Entries):
    """Submatrix ``M[m:, m:]`` of a correlation Bell matrix; order ``m (q - 1)``."""

    m: int = field(kw_only=True)
    q: int = field(kw_only=True)

    def __post_init__(self):
        super().__post_init__()
        if self.order != self.m * (self.q - 1):
            raise ValueError(f"core order {self.order} != m*(q-1) = {self.m * (self.q - 1)}")

    @classmethod
    def from_entries(cls, entries, m: int | None = None, q: int = 2, exact: bool | None = None,
                     tol: float = DEFAULT_TOL):
        re, im = _split_parts(entries, exact)
        if m is None:
            m, rem = divmod(re.shape[0], q - 1)
            if rem:
                raise ValueError("core order must be a multiple of q - 1")
        return cls(re, im, m=m, q=q, tol=tol)

    @property
    def scale(self) -> Fraction:
        return self.integer_form().scale

    def integer_matrix(self) -> np.ndarray:
        """Real integer numerators (q = 2 cores); entries equal ``scale * result``."""
        form = self.integer_form()
        if any(v != 0 for v in form.im.flat):
            raise ValueError("core is not real")
        return form.re


@dataclass(frozen=True)
class Relabeling:
    """Relabeling of inputs and outputs of both parties.

    ``x_perm[x]`` is Alice's new label for setting ``x`` and ``a_perms[x][a]`` her new
    label for outcome ``a`` of that setting; likewise ``y_perm`` and ``b_perms`` for Bob.
    """

    x_perm: tuple[int, ...]
    y_perm: tuple[int, ...]
    a_perms: tuple[tuple[int, ...], ...]
    b_perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = len(self.x_perm)
        if len(self.y_perm) != m or len(self.a_perms) != m or len(self.b_perms) != m:
            raise ValueError("all relabeling components need one entry per setting")
        for p in (self.x_perm, self.y_perm):
            if sorted(p) != list(range(m)):
                raise ValueError(f"{p} is not a permutation of range({m})")
        qs = {len(p) for p in self.a_perms + self.b_perms}
        if len(qs) != 1:
            raise ValueError("outcome permutations must all have the same length")
        q = qs.pop()
        for p in self.a_perms + self.b_perms:
            if sorted(p) != list(range(q)):
                raise ValueError(f"{p} is not a permutation of range({q})")

    @property
    def m(self) -> int:
        return len(self.x_perm)

    @property
    def q(self) -> int:
        return len(self.a_perms[0])

    @classmethod
    def identity(cls, m: int, q: int):
        ident = tuple(range(q))
        return cls(tuple(range(m)), tuple(range(m)), (ident,) * m, (ident,) * m)

    @classmethod
    def build(cls, m: int, q: int, *, x_perm=None, y_perm=None, a_perms=None, b_perms=None):
        """Fill unspecified components with identities.  ``a_perms``/``b_perms`` may be a
        mapping ``setting -> permutation``."""
        base = cls.identity(m, q)

        def outcome(perms, default):
            if perms is None:
                return default
            if isinstance(perms, dict):
                return tuple(tuple(perms.get(i, default[i])) for i in range(m))
            return tuple(tuple(p) for p in perms)

        return cls(
            tuple(x_perm) if x_perm is not None else base.x_perm,
            tuple(y_perm) if y_perm is not None else base.y_perm,
            outcome(a_perms, base.a_perms),
            outcome(b_perms, base.b_perms),
        )

    def inverse(self) -> "Relabeling":
        def inv(p):
            out = [0] * len(p)
            for i, j in enumerate(p):
                out[j] = i
            return tuple(out)

        x_inv, y_inv = inv(self.x_perm), inv(self.y_perm)
        # the new setting x' = x_perm[x] carries the inverse of a_perms[x]
        a_inv = tuple(inv(self.a_perms[x_inv[xp]]) for xp in range(self.m))
        b_inv = tuple(inv(self.b_perms[y_inv[yp]]) for yp in range(self.m))
        return Relabeling(x_inv, y_inv, a_inv, b_inv)


# ---------------------------------------------------------------------------
# Fourier transforms
# ---------------------------------------------------------------------------

def game_matrix_from_tensor(S: GameTensor, tol: float = DEFAULT_TOL) -> GameMatrix:
    """``M[m s + x, m t + y] = q**-2 * sum_{a,b} omega**(s a + t b) * S[a, b, x, y]``."""
    m, q = S.m, S.q
    if S.exact and q in EXACT_Q:
        re = np.empty((q, m, q, m), dtype=object)
        im = np.empty((q, m, q, m), dtype=object)
        norm = Fraction(1, q * q)
        for s in range(q):
            for t in range(q):
                acc_re = np.full((m, m), Fraction(0), dtype=object)
                acc_im = np.full((m, m), Fraction(0), dtype=object)
                for a in range(q):
                    for b in range(q):
                        wr, wi = exact_root(q, s * a + t * b)
                        if wr:
                            acc_re = acc_re + wr * S.coeffs[a, b]
                        if wi:
                            acc_im = acc_im + wi * S.coeffs[a, b]
                re[s, :, t, :] = acc_re * norm
                im[s, :, t, :] = acc_im * norm
        n = m * q
        return GameMatrix(re.reshape(n, n), im.reshape(n, n), m=m, q=q, tol=tol)
    w = roots_of_unity(q)
    phase = w[(np.arange(q)[:, None] * np.arange(q)[None, :]) % q]  # [s, a]
    coeffs = S.coeffs.astype(float)
    blocks = np.einsum("sa,tb,abxy->sxty", phase, phase, coeffs) / q**2
    n = m * q
    full = blocks.reshape(n, n)
    return GameMatrix(full.real.copy(), full.imag.copy(), m=m, q=q, tol=tol)


def tensor_from_game_matrix(M: GameMatrix) -> GameTensor:
    """Inverse transform ``S[a, b, x, y] = sum_{s,t} omega**-(s a + t b) * M[m s + x, m t + y]``.

    Raises :class:`SymmetryError` if ``M`` is not the transform of a real tensor.
    """
    check_symmetry(M)
    m, q = M.m, M.q
    if M.exact and q in EXACT_Q:
        re4 = M.re.reshape(q, m, q, m)
        im4 = M.im.reshape(q, m, q, m)
        out = np.empty((q, q, m, m), dtype=object)
        for a in range(q):
            for b in range(q):
                acc_re = np.full((m, m), Fraction(0), dtype=object)
                acc_im = np.full((m, m), Fraction(0), dtype=object)
                for s in range(q):
                    for t in range(q):
                        wr, wi = exact_root(q, -(s * a + t * b))
                        # (wr + i wi)(re + i im)
                        acc_re = acc_re + wr * re4[s, :, t, :] - wi * im4[s, :, t, :]
                        acc_im = acc_im + wr * im4[s, :, t, :] + wi * re4[s, :, t, :]
                if any(v != 0 for v in acc_im.flat):
                    raise SymmetryError(SymmetryViolation((a, b), (a, b), float(max(abs(v) for v in acc_im.flat))))
                out[a, b] = acc_re
        return GameTensor(m, q, out)
    w = roots_of_unity(q)
    phase = np.conj(w[(np.arange(q)[:, None] * np.arange(q)[None, :]) % q])  # [s, a]
    coeffs = np.einsum("sa,tb,sxty->abxy", phase, phase, M.blocks())
    if np.max(np.abs(coeffs.imag), initial=0.0) > M.tol * max(1, M.n) ** 2:
        raise ValueError("inverse transform is not real")
    return GameTensor(m, q, coeffs.real.copy())


# ---------------------------------------------------------------------------
# symmetry, excess, cores
# ---------------------------------------------------------------------------

def _first_violation(re, im, m, q, tol, exact):
    perm = conjugate_index_map(m, q)
    n = m * q
    # Entries paired with themselves (s, t in the self-conjugate set) must be real.
    self_conj = perm == np.arange(n)
    if exact:
        for i in np.flatnonzero(self_conj):
            for j in np.flatnonzero(self_conj):
                if im[i, j] != 0:
                    return SymmetryViolation((int(i), int(j)), (int(i), int(j)), float(abs(im[i, j])))
        for i in range(n):
            pi = perm[i]
            for j in range(n):
                pj = perm[j]
                if re[pi, pj] != re[i, j] or im[pi, pj] != -im[i, j]:
                    mag = abs(complex(re[pi, pj] - re[i, j], im[pi, pj] + im[i, j]))
                    return SymmetryViolation((i, j), (int(pi), int(pj)), mag)
        return None
    block = np.abs(im[np.ix_(self_conj, self_conj)])
    if block.size and block.max() > tol:
        rows, cols = np.flatnonzero(self_conj), np.flatnonzero(self_conj)
        k = np.unravel_index(np.argmax(block > tol), block.shape)
        i, j = int(rows[k[0]]), int(cols[k[1]])
        return SymmetryViolation((i, j), (i, j), float(block[k]))
    c = re + 1j * im
    diff = np.abs(c[np.ix_(perm, perm)] - np.conj(c))
    bad = diff > tol
    if bad.any():
        i, j = np.unravel_index(np.argmax(bad), bad.shape)
        return SymmetryViolation((int(i), int(j)), (int(perm[i]), int(perm[j])), float(diff[i, j]))
    return None


def validate_symmetry(M: GameMatrix, tol: float | None = None) -> SymmetryViolation | None:
    """Return ``None`` if ``M[perm(a), perm(b)] == conj(M[a, b])`` for all entries, where
    ``perm`` maps the power ``s`` to ``-s mod q``; otherwise the first violation found
    (real-block entries are checked first)."""
    tol = M.tol if tol is None else tol
    return _first_violation(M.re, M.im, M.m, M.q, tol, M.exact)


def check_symmetry(M: GameMatrix, tol: float | None = None) -> None:
    v = validate_symmetry(M, tol)
    if v is not None:
        raise SymmetryError(v)


def excess(M: GameMatrix | CorrelationCore | np.ndarray):
    """Sum of all entries.  Exact (Fraction) for exact input, float otherwise."""
    if isinstance(M, np.ndarray):
        total = M.sum()
        if np.iscomplexobj(M):
            if abs(total.imag) > DEFAULT_TOL * max(1, M.shape[0]) ** 2:
                raise ValueError(f"excess has imaginary part {total.imag:.3g}")
            return float(total.real)
        return total.item() if hasattr(total, "item") else total
    if M.exact:
        im = sum(M.im.flat, Fraction(0))
        if im != 0:
            raise ValueError(f"excess has nonzero imaginary part {im}")
        return sum(M.re.flat, Fraction(0))
    im = float(M.im.sum())
    if abs(im) > M.tol * max(1, M.order) ** 2:
        raise ValueError(f"excess has imaginary part {im:.3g}")
    return float(M.re.sum())


def is_correlation_matrix(M: GameMatrix, tol: float | None = None) -> bool:
    """True when ``M`` is symmetric and vanishes on the rows and columns with power 0."""
    tol = M.tol if tol is None else tol
    m = M.m
    if M.exact:
        zero = all(v == 0 for v in M.re[:m].flat) and all(v == 0 for v in M.re[:, :m].flat) \
            and all(v == 0 for v in M.im[:m].flat) and all(v == 0 for v in M.im[:, :m].flat)
    else:
        c = M.to_complex()
        zero = bool(np.all(np.abs(c[:m]) <= tol) and np.all(np.abs(c[:, :m]) <= tol))
    return zero and validate_symmetry(M, tol) is None


def core_of(M: GameMatrix) -> CorrelationCore:
    if not is_correlation_matrix(M):
        raise ValueError("matrix is not a correlation matrix (nonzero marginal block or asymmetric)")
    m = M.m
    return CorrelationCore(M.re[m:, m:].copy(), M.im[m:, m:].copy(), m=m, q=M.q, tol=M.tol)


def embed_core(core: CorrelationCore | np.ndarray, m: int | None = None, q: int = 2) -> GameMatrix:
    """Place a core into the lower-right block of a zero Bell matrix of order ``m q``."""
    if not isinstance(core, CorrelationCore):
        core = CorrelationCore.from_entries(core, m=m, q=q)
    m = core.m if m is None else m
    if core.order != m * (q - 1) or (core.m, core.q) != (m, q):
        raise ValueError(f"core of order {core.order} does not fit m={m}, q={q}")
    n = m * q
    if core.exact:
        re = np.full((n, n), Fraction(0), dtype=object)
        im = np.full((n, n), Fraction(0), dtype=object)
    else:
        re = np.zeros((n, n))
        im = np.zeros((n, n))
    re[m:, m:] = core.re
    im[m:, m:] = core.im
    M = GameMatrix(re, im, m=m, q=q, tol=core.tol)
    check_symmetry(M)
    return M


def constant_row_sum(M: GameMatrix | CorrelationCore, tol: float | None = None):
    """The common row sum, or ``None`` if rows sum to different values.

    Exact input gives a Fraction (or a (re, im) pair for a non-real sum); float input a
    Python complex reduced to float when real.
    """
    sums = M.row_sums()
    if M.exact:
        first = sums[0]
        if any(s != first for s in sums[1:]):
            return None
        return first[0] if first[1] == 0 else first
    tol = M.tol if tol is None else tol
    arr = np.asarray(sums)
    if np.max(np.abs(arr - arr[0])) > tol * max(1, M.order):
        return None
    g = complex(arr.mean())
    return g.real if abs(g.imag) <= tol * max(1, M.order) else g


# ---------------------------------------------------------------------------
# relabeling
# ---------------------------------------------------------------------------

def apply_relabeling(S: GameTensor, r: Relabeling) -> GameTensor:
    """``S'[a', b', x', y'] = S[a, b, x, y]`` with primed labels given by ``r``."""
    if (r.m, r.q) != (S.m, S.q):
        raise ValueError(f"relabeling is for m={r.m}, q={r.q}; tensor has m={S.m}, q={S.q}")
    out = np.empty_like(S.coeffs)
    for x in range(S.m):
        for y in range(S.m):
            xp, yp = r.x_perm[x], r.y_perm[y]
            for a in range(S.q):
                for b in range(S.q):
                    out[r.a_perms[x][a], r.b_perms[y][b], xp, yp] = S.coeffs[a, b, x, y]
    return GameTensor(S.m, S.q, out)


def coefficient_multiset(S: GameTensor) -> list:
    return sorted(S.coeffs.ravel().tolist())


def real_block_mask(m: int, q: int) -> np.ndarray:
    """Boolean mask of entries forced real by the symmetry."""
    perm = conjugate_index_map(m, q)
    self_conj = perm == np.arange(m * q)
    return np.outer(self_conj, self_conj)


def as_game(obj, m: int | None = None, q: int = 2) -> GameMatrix:
    """Accept a GameMatrix, a CorrelationCore or a bare array interpreted as a core."""
    if isinstance(obj, GameMatrix):
        return obj
    if isinstance(obj, CorrelationCore):
        return embed_core(obj)
    return embed_core(np.asarray(obj), m=m, q=q)


def kron_entries(A: GameMatrix, B: GameMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Kronecker product of entry arrays, exact when both inputs are."""
    if A.exact and B.exact:
        re = np.kron(A.re, B.re) - np.kron(A.im, B.im)
        im = np.kron(A.re, B.im) + np.kron(A.im, B.re)
        return re, im
    c = np.kron(A.to_complex(), B.to_complex())
    return c.real.copy(), c.imag.copy()


__all__ = [
    "DEFAULT_TOL", "EXACT_Q", "SymmetryError", "SymmetryViolation", "GameTensor", "GameMatrix",
    "CorrelationCore", "Relabeling", "IntegerForm", "exact_root", "roots_of_unity",
    "conjugate_index_map", "game_matrix_from_tensor", "tensor_from_game_matrix",
    "validate_symmetry", "check_symmetry", "excess", "is_correlation_matrix", "core_of",
    "embed_core", "constant_row_sum", "apply_relabeling", "coefficient_multiset",
    "real_block_mask", "as_game", "kron_entries", "integer_form",
]
