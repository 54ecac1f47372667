"""Command-line interface: ``bellexcess <command> ...``.

Exit codes: 0 success, 1 input error, 2 budget or cap refusal, 3 tightness table mismatch.
The default thread count comes from ``BELLEXCESS_THREADS`` or the CPU count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds as bd
from . import catalog, constructions as cons, tightness as tg
from .core import CorrelationCore, GameMatrix, SymmetryError, embed_core, excess, game_matrix_from_tensor
from .lhv import (
    DEFAULT_BUDGET,
    DEFAULT_OPTIMIZER_CAP,
    BudgetExceeded,
    OptimizerCapExceeded,
    lhv_value,
    normalize,
)
from .textio import FormatError, format_matrix, format_sign_rows, format_tensor, load_game

THREADS_ENV = "BELLEXCESS_THREADS"


class InputError(Exception):
    pass


class GoldenMismatch(Exception):
    pass


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise InputError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if value < 1:
            raise InputError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return value
    return os.cpu_count() or 1


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _plain(v):
    """JSON-friendly scalar: integral Fractions become ints, others floats."""
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


def _show(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, tuple):
        return "(" + ", ".join(_show(x) for x in v) + ")"
    return str(v)


class Output:
    def __init__(self, args):
        self.format = args.format
        self.path = getattr(args, "output", None)
        self.lines: list[str] = []

    def emit(self, record: dict, table: str):
        if self.format == "json":
            self.lines.append(json.dumps({k: _plain(v) for k, v in record.items()}))
        else:
            self.lines.append(table)

    def flush(self):
        text = "\n".join(self.lines) + ("\n" if self.lines else "")
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------

def _load(args) -> tuple[GameMatrix | CorrelationCore, str]:
    if getattr(args, "file_opt", None):
        if args.file:
            raise InputError("give the input file once")
        args.file = args.file_opt
    if args.builtin and args.file:
        raise InputError("give either a file or --builtin, not both")
    if args.builtin:
        try:
            order, index = catalog.parse_key(args.builtin)
            entry = catalog.builtin(order, index)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
        return CorrelationCore.from_entries(entry.matrix.tolist(), m=order, tol=args.tol), f"builtin {entry.key}"
    if not args.file:
        raise InputError("no input: give a matrix file or --builtin ORDER/INDEX")
    return load_game(args.file, as_core=args.as_core, tol=args.tol), args.file


def _as_core_array(obj) -> np.ndarray:
    if isinstance(obj, CorrelationCore):
        return np.asarray(obj.integer_matrix()) if obj.exact else obj.re
    raise InputError("this command needs a q = 2 core (use --as-core or --builtin)")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_lhv(args, out: Output):
    game, name = _load(args)
    res = lhv_value(game, args.threads, budget=args.budget, count=args.count,
                    optimizer_cap=args.optimizer_cap)
    w = res.witness
    rec = {"input": name, "value": res.value, "alice": list(w.alice), "bob": list(w.bob), "q": w.q}
    table = f"C = {_show(res.value)}\nwitness: alice={list(w.alice)} bob={list(w.bob)} (exponents of omega, q={w.q})"
    if args.count:
        rec["optimizer_count"] = res.optimizer_count
        table += f"\noptimal strategy pairs: {res.optimizer_count}"
    out.emit(rec, table)


def cmd_excess(args, out: Output):
    game, name = _load(args)
    val = excess(game)
    out.emit({"input": name, "excess": val}, f"excess = {_show(val)}")


def cmd_bounds(args, out: Output):
    game, name = _load(args)
    normalized = False
    C = None
    if args.normalize:
        M = game if isinstance(game, GameMatrix) else None
        if M is None:
            M = embed_core(game)
        M, res = normalize(M, args.threads)
        C = res.value
        game = M
        normalized = True
    rep = bd.bounds_report(game, normalized=normalized, tol=args.tol if args.tol < 1e-3 else 1e-6)
    rec = {"input": name, **rep.as_dict()}
    if C is not None:
        rec["lhv_value"] = C
    rows = [("order n", rep.n), ("excess", rep.excess), ("best (lower, upper)", (rep.best_lower, rep.best_upper)),
            ("numerical radius r", rep.radius), ("n r", rep.radius_bound), ("nu", rep.nu),
            ("sqrt(n) nu", rep.nu_bound), ("sigma", rep.sigma), ("n sigma", rep.sigma_bound),
            ("rho", rep.rho if rep.rho is not None else "unavailable (not normal)"),
            ("constant row sum", rep.gamma if rep.saturated else "no"), ("normalized", rep.normalized)]
    if C is not None:
        rows.insert(1, ("LHV value", C))
    if rep.best_lower is None:
        rows = [r for r in rows if not r[0].startswith("best")]
    width = max(len(k) for k, _ in rows)
    out.emit(rec, "\n".join(f"{k:<{width}}  {_show(v)}" for k, v in rows))


def cmd_tightness(args, out: Output):
    game, name = _load(args)
    H = _as_core_array(game)
    rep = tg.tightness_report(H, threads=args.threads, budget=args.budget)
    out.emit({"input": name, **rep.as_dict()},
             f"m={rep.m} C={rep.lhv_value} vertices={rep.vertex_count} affine_rank={rep.affine_rank} "
             f"{'Tight' if rep.tight else 'Non-tight'}{' regular' if rep.regular_equivalent else ''}")


_ANGLE = re.compile(r"^\s*([+-]?\d*\.?\d*(?:e[+-]?\d+)?)\s*\*?\s*(pi)?\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(text: str) -> float:
    """Numbers such as ``0.5``, ``pi/3``, ``7pi/12`` or ``2*pi/3``."""
    m = _ANGLE.match(text.lower())
    if not m or (not m.group(1) and not m.group(2)):
        raise InputError(f"bad angle {text!r}")
    coef = float(m.group(1)) if m.group(1) not in ("", "+", "-") else (-1.0 if m.group(1) == "-" else 1.0)
    val = coef * (math.pi if m.group(2) else 1.0)
    return val / float(m.group(3)) if m.group(3) else val


def cmd_witness(args, out: Output):
    if args.file or args.file_opt or args.builtin:
        game, name = _load(args)
        if isinstance(game, CorrelationCore):
            game = embed_core(game)
    else:
        game = embed_core(cons.circulant([0, -1, 1]).tolist())
        name = "circ(0, -1, 1)"
    if game.q != 2:
        raise InputError("the witness command builds rotated qubit observables and needs q = 2")
    alice = [parse_angle(a) for a in (args.alice or ["0", "2pi/3", "pi/3"])]
    bob = [parse_angle(b) for b in (args.bob or ["pi/4", "7pi/12", "11pi/12"])]
    A = [bd.rotated_observable(a) for a in alice]
    B = [bd.rotated_observable(b) for b in bob]
    val = bd.quantum_witness(game, A, B)
    out.emit({"input": name, "witness": val, "alice_angles": alice, "bob_angles": bob},
             f"largest Bell operator eigenvalue = {val:.12g}")


def cmd_construct(args, out: Output):
    kind = args.kind
    p = args.params
    try:
        if kind == "sylvester":
            H = cons.sylvester(int(p[0]))
            text, extra = format_sign_rows(H), {"order": len(H)}
        elif kind == "paley":
            H = cons.paley_hadamard(int(p[0]))
            text, extra = format_sign_rows(H), {"order": len(H)}
        elif kind == "circulant":
            H = cons.circulant([int(v) for v in p])
            text, extra = format_sign_rows(H), {"order": len(H)}
        elif kind == "fourier-square":
            q = int(p[0])
            M = cons.fourier_square(q)
            C = lhv_value(M, args.threads, budget=args.budget).value
            text, extra = format_matrix(M), {"q": q, "lhv_value": C}
        elif kind == "gyni":
            q = int(p[0])
            S = cons.gyni_tensor(q)
            C = lhv_value(game_matrix_from_tensor(S), args.threads, budget=args.budget).value
            # the transform preserves the value; the Fourier-square matrix is q**2 times the
            # transform up to an output relabeling, hence q**3
            text, extra = format_tensor(S), {"q": q, "lhv_value": C, "fourier_square_value": C * q * q}
        else:  # pragma: no cover - argparse restricts choices
            raise InputError(f"unknown construction {kind}")
    except (IndexError, ValueError) as exc:
        raise InputError(f"construct {kind}: {exc}") from None
    if args.output:
        Path(args.output).write_text(text)
        summary = {"kind": kind, "file": str(args.output), **extra}
        out.path = None
        out.emit(summary, " ".join(f"{k}={_show(v)}" for k, v in extra.items()))
    else:
        note = "".join(f"# {k} = {_show(v)}\n" for k, v in extra.items() if k not in ("order", "q"))
        out.emit({"kind": kind, "text": text, **extra}, note + text.rstrip("\n"))


def cmd_catalog(args, out: Output):
    if args.action == "list":
        for order, index in catalog.builtin_keys():
            e = catalog.builtin(order, index)
            rs = set(e.matrix.sum(axis=1).tolist())
            const = rs.pop() if len(rs) == 1 else None
            out.emit({"key": e.key, "order": order, "index": index, "constant_row_sum": const},
                     f"{e.key:<6} order {order:<3}" + (f" constant row sum {const}" if const is not None else ""))
    else:
        if not args.key:
            raise InputError("catalog show needs a key such as 16/3")
        try:
            e = catalog.builtin(*catalog.parse_key(args.key))
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
        text = catalog.format_catalogue_text([e.matrix])
        out.emit({"key": e.key, "order": e.order, "rows": text.split()}, text.rstrip("\n"))


def cmd_verify_mquwm(args, out: Output):
    mats: list[tuple[str, np.ndarray]] = []
    for f in args.files:
        try:
            got = catalog.parse_catalogue_text(Path(f).read_bytes(), kind="weighing")
        except catalog.CatalogueError as exc:
            raise InputError(f"{f}: {exc}") from None
        mats += [(f"{f}#{i + 1}", W) for i, W in enumerate(got)]
    if args.fixture:
        try:
            order, party = args.fixture.split("/")
            mats += [(f"{args.fixture}#{i + 1}", W) for i, W in enumerate(catalog.strategy_fixture(int(order), party))]
        except (ValueError, FileNotFoundError) as exc:
            raise InputError(f"bad fixture {args.fixture!r}: {exc}") from None
    if len(mats) < 2:
        raise InputError("need at least two weighing matrices")
    all_ok = True
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            (n1, W1), (n2, W2) = mats[i], mats[j]
            try:
                r = cons.mquwm_check(W1, W2, args.a)
            except ValueError as exc:
                raise InputError(str(exc)) from None
            all_ok &= r.ok
            p = r.params
            out.emit({"first": n1, "second": n2, "ok": r.ok, "l": r.l, "reason": r.reason},
                     f"{n1} {n2}: " + (f"ok MQUWM({p.m},{p.k},{p.l},{p.a})" if r.ok else f"fail ({r.reason})"))
    return 0 if all_ok else 1


def cmd_table1(args, out: Output):
    mismatch = False
    header = f"{'row':<8} {'m':>3} {'vertices':>9} {'rank':>5}  {'verdict':<10} regular  status"
    if out.format == "table":
        out.emit({}, header)
    for row in tg.TABLE_I:
        H = catalog.builtin(row.order, row.index).matrix
        t0 = time.perf_counter()
        rep = tg.tightness_report(H, threads=args.threads, budget=args.budget)
        dt = time.perf_counter() - t0
        diffs = []
        if rep.vertex_count != row.vertices:
            diffs.append(f"vertices {rep.vertex_count} != {row.vertices}")
        if rep.affine_rank != row.rank:
            diffs.append(f"rank {rep.affine_rank} != {row.rank}")
        if rep.tight != row.tight:
            diffs.append("verdict")
        if rep.regular_equivalent != row.regular:
            diffs.append("regular flag")
        mismatch |= bool(diffs)
        status = "ok" if not diffs else "MISMATCH: " + "; ".join(diffs)
        out.emit({"row": row.label, "key": f"{row.order}/{row.index}", **rep.as_dict(),
                  "expected_vertices": row.vertices, "expected_rank": row.rank, "match": not diffs,
                  "seconds": round(dt, 3)},
                 f"{row.label:<8} {rep.m:>3} {rep.vertex_count:>9} {rep.affine_rank:>5}  "
                 f"{'Tight' if rep.tight else 'Non-tight':<10} {'yes' if rep.regular_equivalent else 'no':<8} {status}")
    if mismatch:
        raise GoldenMismatch("computed values differ from the published table")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors: exit status 1, keeping 2 for budget refusals."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive, default=None,
                        help=f"worker threads (default: ${THREADS_ENV} or the CPU count)")
    common.add_argument("--tol", type=float, default=1e-9, help="float tolerance (default 1e-9)")
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET,
                        help="maximum number of Alice assignments to enumerate")
    common.add_argument("--optimizer-cap", type=_positive, default=DEFAULT_OPTIMIZER_CAP)
    common.add_argument("--output", help="write the result here instead of stdout")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("file", nargs="?", help="matrix file (header 'n m q') or a core with --as-core")
    source.add_argument("--file", dest="file_opt", metavar="PATH", help="same as the positional file")
    source.add_argument("--builtin", metavar="ORDER/INDEX", help="embedded Hadamard matrix used as a q = 2 core")
    source.add_argument("--as-core", action="store_true", help="read the file as a bare q = 2 core")

    p = _Parser(prog="bellexcess", description="LHV values of bipartite Bell inequalities through matrix excess")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lhv", parents=[common, source], help="LHV value and an optimal strategy")
    s.add_argument("--count", action="store_true", help="also count optimal strategy pairs")
    s.set_defaults(func=cmd_lhv)

    s = sub.add_parser("excess", parents=[common, source], help="sum of all entries")
    s.set_defaults(func=cmd_excess)

    s = sub.add_parser("bounds", parents=[common, source], help="spectral, radius and row-sum bounds")
    s.add_argument("--normalize", action="store_true", help="normalize with an optimal strategy first")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("tightness", parents=[common, source], help="vertex count and affine rank of a q = 2 core")
    s.set_defaults(func=cmd_tightness)

    s = sub.add_parser("witness", parents=[common, source], help="Bell operator eigenvalue for rotated qubit observables")
    s.add_argument("--alice", nargs="+", metavar="ANGLE", help="rotation angles, e.g. 0 2pi/3 pi/3")
    s.add_argument("--bob", nargs="+", metavar="ANGLE")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("construct", parents=[common], help="generate a matrix family")
    s.add_argument("kind", choices=("sylvester", "paley", "circulant", "fourier-square", "gyni"))
    s.add_argument("params", nargs="+", help="k | ell | first row | q")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("catalog", parents=[common], help="embedded Hadamard matrices")
    s.add_argument("action", choices=("list", "show"))
    s.add_argument("key", nargs="?", help="ORDER/INDEX for show")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("verify-mquwm", parents=[common], help="check mutual quasi-unbiasedness of weighing matrices")
    s.add_argument("files", nargs="*", help="+/-/0 text files, one or more matrices each")
    s.add_argument("--a", type=_positive, required=True, help="scaling parameter a")
    s.add_argument("--fixture", metavar="ORDER/PARTY", help="shipped strategy matrices, e.g. 8/A")
    s.set_defaults(func=cmd_verify_mquwm)

    s = sub.add_parser("table1", parents=[common], help="reproduce the tightness table")
    s.set_defaults(func=cmd_table1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args)
    try:
        if args.threads is None:
            args.threads = default_threads()
        code = args.func(args, out) or 0
    except (BudgetExceeded, OptimizerCapExceeded) as exc:
        out.flush()
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except GoldenMismatch as exc:
        out.flush()
        print(f"table1: {exc}", file=sys.stderr)
        return 3
    except (InputError, FormatError, SymmetryError, catalog.CatalogueError, OSError, ValueError) as exc:
        out.flush()
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out.flush()
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
