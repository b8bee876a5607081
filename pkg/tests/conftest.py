import numpy as np
import pytest

_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def criterion():
    """Record a one-line pass/fail outcome for an acceptance criterion."""
    def record(number, ok, detail):
        _ACCEPTANCE[number] = (bool(ok), detail)
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section('acceptance criteria')
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")


def random_complex(rng, shape, scale=1.0):
    Z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return scale * Z
