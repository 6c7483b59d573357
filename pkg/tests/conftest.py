import numpy as np
import pytest
from hypothesis import strategies as st

from eventsig.core import SpikeTrain


def brute_leaky_sums(times, amps, alpha):
    """Direct sum_k<=n exp(-alpha (t_n - t_k)) a_k for every n (O(n^2))."""
    t = np.asarray(times, dtype=float)
    a = np.asarray(amps, dtype=float)
    return np.array([
        np.sum(np.exp(-alpha * (t[n] - t[:n + 1])) * a[:n + 1]) for n in range(t.size)
    ])


def brute_weyl(x):
    best = 0.0
    for i in range(len(x)):
        for j in range(i, len(x)):
            best = max(best, abs(sum(x[i:j + 1])))
    return best


@st.composite
def spike_trains(draw, max_size=40, amp=3.0, min_gap=1e-3):
    n = draw(st.integers(0, max_size))
    gaps = draw(st.lists(st.floats(min_gap, 2.0), min_size=n, max_size=n))
    amps = draw(st.lists(
        st.floats(-amp, amp).filter(lambda v: abs(v) > 1e-6), min_size=n, max_size=n))
    return SpikeTrain(np.cumsum(gaps), amps)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one human-readable PASS/FAIL line per acceptance criterion."""
    def emit(criterion, ok, detail):
        status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
        line = f"[{status}] criterion {criterion}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
