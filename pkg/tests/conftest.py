import numpy as np
import pytest

from mlkuramoto import _backend

ACCEPTANCE_RESULTS = []


@pytest.fixture(params=_backend.available())
def kernels(request):
    return _backend.get(request.param)


@pytest.fixture
def python_backend(monkeypatch):
    """Route the public API through the numpy fallback kernels."""
    monkeypatch.setattr(_backend, "kernels", _backend.get("python"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail}")
