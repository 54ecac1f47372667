import numpy as np
import pytest

from bellexcess import GameMatrix, GameTensor, embed_core, game_matrix_from_tensor

H2 = [[1, 1], [1, -1]]

_ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


def chsh_tensor() -> GameTensor:
    S = np.empty((2, 2, 2, 2), dtype=np.int64)
    for a in range(2):
        for b in range(2):
            S[a, b] = np.array(H2) * (-1) ** (a + b)
    return GameTensor.from_array(S)


def chsh_matrix() -> GameMatrix:
    return embed_core(H2)


def random_game(rng, m: int, q: int, low: int = -3, high: int = 3) -> GameMatrix:
    """Symmetric game from a random integer tensor (exact for q in {2, 4})."""
    S = rng.integers(low, high + 1, size=(q, q, m, m))
    return game_matrix_from_tensor(GameTensor.from_array(S))


def random_real_game(rng, m: int, low: int = -3, high: int = 3) -> GameMatrix:
    """q = 2 game with independent integer entries (every real matrix is symmetric for q = 2)."""
    A = rng.integers(low, high + 1, size=(2 * m, 2 * m))
    return GameMatrix.from_entries(A.tolist(), m=m, q=2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.call_report = rep


@pytest.fixture
def acceptance(request):
    """Record one sub-result of an acceptance criterion for the terminal summary.

    A test that errors before recording a failure is reported as a failure of every
    criterion it touched.
    """
    touched: list[str] = []
    failed_records: list[str] = []

    def record(criterion: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
        touched.append(criterion)
        if not ok:
            failed_records.append(criterion)
        return ok

    yield record
    rep = getattr(request.node, "call_report", None)
    if rep is not None and rep.failed:
        for crit in dict.fromkeys(touched):
            if crit not in failed_records:
                msg = rep.longrepr.reprcrash.message if hasattr(rep.longrepr, "reprcrash") else "error"
                _ACCEPTANCE[crit].append((False, f"{request.node.name} errored: {msg}"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE, key=lambda c: int(c.split()[0])):
        parts = _ACCEPTANCE[crit]
        ok = all(p[0] for p in parts)
        failed = [d for good, d in parts if not good]
        line = f"criterion {crit}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += " -- " + "; ".join(failed)
        terminalreporter.write_line(line)
