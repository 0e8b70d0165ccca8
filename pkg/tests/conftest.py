"""Shared fixtures and a global post-condition on every returned state."""

from __future__ import annotations

import functools
import importlib

import pytest

from dicke_fringe.qcore import DensityMatrix4

STATE_PRODUCERS = ("propagate", "steady_state", "steady_state_numeric", "reduce_on_detection")
PATCHED_MODULES = (
    "dicke_fringe",
    "dicke_fringe.dynamics",
    "dicke_fringe.detection",
    "dicke_fringe.correlations",
    "dicke_fringe.acceptance",
    "dicke_fringe.cli",
)

ACCEPTANCE_LINES: list[str] = []


def _checked(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        out = fn(*args, **kwargs)
        if isinstance(out, DensityMatrix4):
            out.validate()  # Hermitian, unit trace, positive semidefinite
        return out

    wrapper.__wrapped_state_check__ = True
    return wrapper


@pytest.fixture(autouse=True)
def validate_returned_states(monkeypatch):
    """Every state handed back by the library must be a valid density matrix."""
    for modname in PATCHED_MODULES:
        mod = importlib.import_module(modname)
        for name in STATE_PRODUCERS:
            fn = getattr(mod, name, None)
            if fn is not None and not getattr(fn, "__wrapped_state_check__", False):
                monkeypatch.setattr(mod, name, _checked(fn))
    yield


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
