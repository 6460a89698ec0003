import numpy as np
import pytest

from superpac import DataMatrix, SyntheticSpec, generate_uos


@pytest.fixture
def small_uos():
    """Three well-separated planes in R^20, 20 points each, light noise."""
    spec = SyntheticSpec(K=3, d=2, D=20, points_per_cluster=20, sigma=0.01, seed=7)
    X, bases = generate_uos(spec)
    return X, bases


@pytest.fixture
def tiny_matrix():
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((5, 12))
    return DataMatrix(pts)


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance criterion verdicts, which stdout capture would
    otherwise hide for passing tests."""
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance")
    if mod is None:
        return
    lines = getattr(mod, "ACCEPTANCE_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
