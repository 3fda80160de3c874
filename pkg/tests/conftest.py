import importlib
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from comoving import _quad_py, kernels  # noqa: E402

try:
    _quad = importlib.import_module("comoving._quad")
except ImportError:
    _quad = None

BACKENDS = {"python": _quad_py}
if _quad is not None:
    BACKENDS["cython"] = _quad


@pytest.fixture(params=["python", "cython"])
def backend(request, monkeypatch):
    """Route all moment quadrature through one kernel implementation."""
    mod = BACKENDS.get(request.param)
    if mod is None:
        pytest.skip("compiled kernel not built")
    monkeypatch.setattr(kernels, "train_moments", mod.train_moments)
    monkeypatch.setattr(kernels, "train_moments_cumulative", mod.train_moments_cumulative)
    return mod


_REPORT = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record ``(criterion, part, passed, detail)`` for the end-of-run summary."""
    store = request.config.stash.setdefault(_REPORT, [])

    def record(criterion, part, passed, detail):
        store.append((criterion, part, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_REPORT, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted({r[0] for r in rows}):
        parts = [r for r in rows if r[0] == crit]
        ok = all(r[2] for r in parts)
        detail = "; ".join(f"[{r[1]} {'PASS' if r[2] else 'FAIL'}] {r[3]}" for r in parts)
        terminalreporter.write_line(f"CRITERION {crit:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
