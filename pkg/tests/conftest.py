"""Shared fixtures and the acceptance summary hook."""

import numpy as np
import pytest

from runperf.dataio.synthetic import SynthConfig, generate_synthetic
from runperf.learners import BoostedEnsembleParams, train_boosted
from runperf.tracker import assign

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::")[-1].removeprefix("test_")
        _ACCEPTANCE_RESULTS[name] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance")
    for name, outcome in _ACCEPTANCE_RESULTS.items():
        label = "PASS" if outcome == "PASSED" else outcome
        terminalreporter.write_line(f"ACCEPTANCE {label}: {name}")


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile the jitted kernels so timed assertions exclude compile time."""
    assign(np.array([[1.0, 2.0], [2.0, 1.0]]))
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([1, 1, 2, 2])
    train_boosted((X, y), BoostedEnsembleParams(n_rounds=1, max_depth=1))
    return True


@pytest.fixture(scope="session")
def crossing_dataset():
    """Two runners whose paths cross mid-sequence, no dropout."""
    return generate_synthetic(SynthConfig(n_runners=4), seed=7)


@pytest.fixture(scope="session")
def dropout_dataset():
    """Same geometry with a 10-frame detection gap on the first track."""
    return generate_synthetic(SynthConfig(n_runners=4, dropout=(0, 80, 10)), seed=7)


@pytest.fixture(scope="session")
def small_labeled():
    """40 runners, two well-separated categories, one RP slice."""
    from runperf.perf import build_current

    ds = generate_synthetic(
        SynthConfig(n_runners=40, categories=2, class_separation=6.0), seed=11
    )
    return build_current(ds.clips, ds.splits, rp_id=3, mode="raw", C=2)
