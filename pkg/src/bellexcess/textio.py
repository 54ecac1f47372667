"""Plain-text formats for game matrices and tensors.

Matrix: a header ``n m q`` followed by ``n`` rows of ``n`` entries, each ``R`` or ``R,I``
with ``R`` and ``I`` decimals or rationals ``p/q``.  Tensor: a header ``m q`` followed by
lines ``a b x y value``.  Lines starting with ``#`` are comments.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import EXACT_Q, CorrelationCore, GameMatrix, GameTensor, check_symmetry


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((no, line))
    return out


def _number(tok: str, no: int) -> Fraction:
    try:
        return Fraction(tok.replace("−", "-"))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad number {tok!r}", no) from exc


def _entry(tok: str, no: int) -> tuple[Fraction, Fraction]:
    parts = tok.split(",")
    if len(parts) == 1:
        return _number(parts[0], no), Fraction(0)
    if len(parts) == 2:
        return _number(parts[0], no), _number(parts[1], no)
    raise FormatError(f"bad entry {tok!r}", no)


def _ints(line: str, count: int, no: int) -> list[int]:
    toks = line.split()
    if len(toks) != count:
        raise FormatError(f"expected {count} integers in the header, got {line!r}", no)
    try:
        return [int(t) for t in toks]
    except ValueError as exc:
        raise FormatError(f"bad header {line!r}", no) from exc


def parse_matrix(text: str, tol: float = 1e-9) -> GameMatrix:
    """Parse the matrix format.  Entries stay exact for q in {1, 2, 4}, float otherwise."""
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty input")
    no, head = lines[0]
    n, m, q = _ints(head, 3, no)
    if n != m * q or n < 1:
        raise FormatError(f"header says n={n} but m*q={m * q}", no)
    rows = lines[1:]
    if len(rows) != n:
        raise FormatError(f"expected {n} rows, found {len(rows)}")
    re = np.empty((n, n), dtype=object)
    im = np.empty((n, n), dtype=object)
    for i, (no, line) in enumerate(rows):
        toks = line.split()
        if len(toks) != n:
            raise FormatError(f"expected {n} entries, found {len(toks)}", no)
        for j, tok in enumerate(toks):
            re[i, j], im[i, j] = _entry(tok, no)
    if q in EXACT_Q:
        M = GameMatrix(re, im, m=m, q=q, tol=tol)
    else:
        M = GameMatrix(re.astype(float), im.astype(float), m=m, q=q, tol=tol)
    check_symmetry(M)
    return M


def parse_sign_rows(text: str) -> np.ndarray:
    """A bare square matrix of numbers or of +/- characters (used for cores)."""
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty input")
    rows = []
    for no, line in lines:
        toks = line.split()
        if len(toks) == 1 and set(toks[0]) <= set("+-0−"):
            toks = list(toks[0])
            rows.append([{"+": 1, "-": -1, "−": -1, "0": 0}[c] for c in toks])
        else:
            rows.append([_entry(t, no)[0] for t in toks])
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise FormatError("core must be a square matrix")
    arr = np.array(rows, dtype=object)
    if all(v.denominator == 1 if isinstance(v, Fraction) else True for v in arr.flat):
        return arr.astype(np.int64)
    return arr


def parse_tensor(text: str) -> GameTensor:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty input")
    no, head = lines[0]
    m, q = _ints(head, 2, no)
    coeffs = np.full((q, q, m, m), Fraction(0), dtype=object)
    seen = set()
    for no, line in lines[1:]:
        toks = line.split()
        if len(toks) != 5:
            raise FormatError("expected 'a b x y value'", no)
        try:
            a, b, x, y = (int(t) for t in toks[:4])
        except ValueError as exc:
            raise FormatError(f"bad index in {line!r}", no) from exc
        if not (0 <= a < q and 0 <= b < q and 0 <= x < m and 0 <= y < m):
            raise FormatError(f"index out of range in {line!r}", no)
        if (a, b, x, y) in seen:
            raise FormatError(f"duplicate coefficient {(a, b, x, y)}", no)
        seen.add((a, b, x, y))
        coeffs[a, b, x, y] = _number(toks[4], no)
    return GameTensor(m, q, coeffs)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    v = float(v)
    return repr(0.0 if v == 0 else v)


def format_matrix(M: GameMatrix) -> str:
    lines = [f"{M.n} {M.m} {M.q}"]
    for i in range(M.n):
        toks = []
        for j in range(M.n):
            re, im = M.re[i, j], M.im[i, j]
            toks.append(_fmt(re) if im == 0 else f"{_fmt(re)},{_fmt(im)}")
        lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"


def format_tensor(S: GameTensor) -> str:
    lines = [f"{S.m} {S.q}"]
    for (a, b, x, y), v in np.ndenumerate(S.coeffs):
        lines.append(f"{a} {b} {x} {y} {_fmt(v)}")
    return "\n".join(lines) + "\n"


def format_sign_rows(H: np.ndarray) -> str:
    sym = {1: "+", -1: "-", 0: "0"}
    return "\n".join("".join(sym[int(v)] for v in row) for row in np.asarray(H)) + "\n"


def load_game(path: str | Path, as_core: bool = False, tol: float = 1e-9) -> GameMatrix | CorrelationCore:
    """Read a matrix file; with ``as_core`` the file holds a bare q = 2 core."""
    text = Path(path).read_text()
    if as_core:
        arr = parse_sign_rows(text)
        return CorrelationCore.from_entries(arr.tolist(), m=arr.shape[0], tol=tol)
    return parse_matrix(text, tol)


def load_tensor(path: str | Path) -> GameTensor:
    return parse_tensor(Path(path).read_text())


__all__ = [
    "FormatError", "parse_matrix", "parse_sign_rows", "parse_tensor", "format_matrix",
    "format_tensor", "format_sign_rows", "load_game", "load_tensor",
]
