import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def bits(a):
    """Byte view of an array for bitwise comparisons."""
    a = np.ascontiguousarray(a)
    return a.dtype.str, a.shape, a.tobytes()


@pytest.fixture
def criterion(record_property):
    """Tag an acceptance test with the criterion it checks."""

    def tag(name):
        record_property("criterion", name)

    return tag


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", None) != "call":
                continue
            name = dict(rep.user_properties).get("criterion")
            if name:
                lines.append(f"{'PASS' if rep.passed else 'FAIL'}  {name}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s[6:]):
            terminalreporter.write_line(line)
