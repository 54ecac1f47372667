"""Hadamard and weighing matrices in the +/- text format, and the shipped representatives.

Shipped Hadamard classes (one file per order under ``data/``):

=====  ======================================================================
order  entries
=====  ======================================================================
1, 2   the trivial matrix and ``H2``
4      ``circ(-1, 1, 1, 1)``
8      Sylvester
12     quadratic residues mod 11
16     0-2 constant row sum classes (448, 192, 64 optimal points),
       3-4 the two classes without a constant row sum representative
20     three classes; index 0 is equivalent to the quadratic-residue matrix
=====  ======================================================================
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .constructions import is_hadamard, weighing_weight
from .core import CorrelationCore
from .lhv import lhv_value

_SYMBOLS = {"+": 1, "-": -1, "−": -1, "0": 0}
BUILTIN_ORDERS = (1, 2, 4, 8, 12, 16, 20)


class CatalogueError(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    order: int
    index: int
    matrix: np.ndarray
    source: str = "embedded"

    @property
    def key(self) -> str:
        return f"{self.order}/{self.index}"

    def core(self) -> CorrelationCore:
        return CorrelationCore.from_entries(self.matrix.tolist(), m=self.order)


def _gram_defect(A: np.ndarray, k: int) -> tuple[int, int] | None:
    G = A @ A.T
    bad = np.argwhere(G != k * np.eye(len(A), dtype=np.int64))
    return (int(bad[0][0]), int(bad[0][1])) if bad.size else None


def parse_catalogue_text(data: bytes | str, kind: str = "hadamard") -> list[np.ndarray]:
    """Matrices written as lines of ``+``/``-`` (and ``0`` for weighing matrices).

    Blank lines separate matrices; lines starting with ``#`` are comments.  ``kind`` is
    ``"hadamard"``, ``"weighing"`` or ``"any"``.
    """
    if kind not in ("hadamard", "weighing", "any"):
        raise ValueError(f"unknown kind {kind!r}")
    text = data.decode() if isinstance(data, bytes) else data
    blocks: list[list[tuple[int, str]]] = [[]]
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if blocks[-1]:
                blocks.append([])
            continue
        blocks[-1].append((no, line))
    out = []
    for block in (b for b in blocks if b):
        width = len(block[0][1])
        rows = []
        for no, line in block:
            if len(line) != width:
                raise CatalogueError(f"line {no}: ragged row (length {len(line)}, expected {width})")
            bad = [c for c in line if c not in _SYMBOLS]
            if bad:
                raise CatalogueError(f"line {no}: invalid character {bad[0]!r}")
            if kind == "hadamard" and "0" in line:
                raise CatalogueError(f"line {no}: zero entry in a Hadamard matrix")
            rows.append([_SYMBOLS[c] for c in line])
        if len(rows) != width:
            raise CatalogueError(f"line {block[0][0]}: matrix is {len(rows)}x{width}, not square")
        A = np.array(rows, dtype=np.int64)
        if kind == "hadamard":
            defect = _gram_defect(A, width)
            if defect:
                raise CatalogueError(f"matrix at line {block[0][0]}: rows {defect[0]} and {defect[1]} "
                                     "are not orthogonal" if defect[0] != defect[1] else
                                     f"matrix at line {block[0][0]}: row {defect[0]} has the wrong norm")
        elif kind == "weighing" and weighing_weight(A) is None:
            defect = _gram_defect(A, int((A[0] ** 2).sum()))
            raise CatalogueError(f"matrix at line {block[0][0]}: not a weighing matrix, Gram defect at {defect}")
        out.append(A)
    return out


def format_catalogue_text(matrices) -> str:
    sym = {1: "+", -1: "-", 0: "0"}
    blocks = ["\n".join("".join(sym[int(v)] for v in row) for row in np.asarray(A)) for A in matrices]
    return "\n\n".join(blocks) + "\n"


def load_catalogue(path: str | Path, kind: str = "hadamard") -> list[CatalogEntry]:
    mats = parse_catalogue_text(Path(path).read_bytes(), kind)
    return [CatalogEntry(len(A), i, A, str(path)) for i, A in enumerate(mats)]


def _data_text(name: str) -> str:
    return resources.files("bellexcess").joinpath("data", name).read_text()


@lru_cache(maxsize=None)
def _builtin_order(order: int) -> tuple[np.ndarray, ...]:
    if order not in BUILTIN_ORDERS:
        raise KeyError(f"no embedded Hadamard matrices of order {order}")
    mats = parse_catalogue_text(_data_text(f"hadamard_{order}.txt"))
    for A in mats:
        A.flags.writeable = False
    return tuple(mats)


def builtin_keys() -> list[tuple[int, int]]:
    return [(o, i) for o in BUILTIN_ORDERS for i in range(len(_builtin_order(o)))]


def builtin(order: int, index: int = 0) -> CatalogEntry:
    mats = _builtin_order(order)
    if not 0 <= index < len(mats):
        raise KeyError(f"order {order} has {len(mats)} embedded matrices; index {index} is out of range")
    return CatalogEntry(order, index, mats[index])


def parse_key(key: str) -> tuple[int, int]:
    """``"16/3"`` -> (16, 3); ``"12"`` -> (12, 0)."""
    try:
        parts = [int(p) for p in key.split("/")]
    except ValueError as exc:
        raise KeyError(f"bad catalogue key {key!r}") from exc
    if len(parts) == 1:
        parts.append(0)
    if len(parts) != 2:
        raise KeyError(f"bad catalogue key {key!r}")
    return parts[0], parts[1]


def detect_regular_equivalent(H, threads: int = 1) -> bool:
    """Whether some sign-equivalent form of ``H`` has constant row sums.

    Equivalent to the LHV value of the correlation game with core ``H`` reaching
    ``n sqrt(n)``, tested as ``C**2 == n**3``.
    """
    A = np.asarray(H)
    if not is_hadamard(A):
        raise ValueError("input is not a Hadamard matrix")
    n = len(A)
    C = lhv_value(CorrelationCore.from_entries(A.astype(np.int64).tolist(), m=n), threads).value
    regular = C * C == n**3
    if regular:
        assert int(np.sqrt(n)) ** 2 == n, "regular Hadamard matrix of non-square order"
    return bool(regular)


# ---------------------------------------------------------------------------
# weighing matrices of the optimal-strategy study
# ---------------------------------------------------------------------------

def strategy_fixture(order: int, party: str) -> list[np.ndarray]:
    """Optimal strategies of the order-2, 4 and 8 Hadamard games arranged as weighing
    matrices, as listed in the source; ``party`` is ``"A"`` or ``"B"``."""
    if party not in ("A", "B"):
        raise ValueError("party must be 'A' or 'B'")
    return parse_catalogue_text(_data_text(f"strategies_{order}_{party}.txt"), kind="weighing")


def pairing_fixture() -> list[tuple[int, int, int, int]]:
    """The 64 one-based tuples (i, j, k, l) linking row i of Alice's j-th matrix to row k of
    Bob's l-th matrix for the order-8 game."""
    out = []
    for line in _data_text("pairings_8.txt").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(tuple(int(t) for t in line.split()))
    return out


__all__ = [
    "CatalogueError", "CatalogEntry", "BUILTIN_ORDERS", "parse_catalogue_text",
    "format_catalogue_text", "load_catalogue", "builtin", "builtin_keys", "parse_key",
    "detect_regular_equivalent", "strategy_fixture", "pairing_fixture",
]
