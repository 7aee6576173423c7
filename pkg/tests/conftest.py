import time

import numpy as np
import pytest

from biortho import _backend

SUITE_BUDGET_S = 10.0
ACCEPTANCE_LINES = []
_state = {}


@pytest.fixture(params=sorted(_backend.KERNELS))
def kernel(request, monkeypatch):
    """Run a test once per available Jacobi kernel."""
    monkeypatch.setattr(_backend, "kernel", _backend.KERNELS[request.param])
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20081201)


def pytest_sessionstart(session):
    _state["t0"] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _state["t0"]
    _state["elapsed"] = elapsed
    if elapsed > SUITE_BUDGET_S and session.exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    elapsed = _state.get("elapsed")
    if elapsed is not None:
        verdict = "PASS" if elapsed <= SUITE_BUDGET_S else "FAIL"
        terminalreporter.write_line(
            f"[{verdict}] suite runtime {elapsed:.2f} s (budget {SUITE_BUDGET_S:.0f} s, kernel={_backend.BACKEND})"
        )
