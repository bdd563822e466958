import numpy as np
import pytest

from aremos.pipeline import SyntheticSpec, generate_synthetic


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in config.acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""

    def record(label, ok, detail, elapsed, limit):
        ok = bool(ok) and elapsed < limit
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail} [{elapsed:.1f}s / limit {limit:.0f}s]"
        request.config.acceptance_lines.append(line)
        print(line)
        assert ok, line

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_dataset():
    spec = SyntheticSpec(n_stations=2, n_days=160, n_members=8)
    return generate_synthetic(spec, seed=99)
