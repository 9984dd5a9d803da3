import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hyperflow.complex import from_edge_labels, load_manifest, sample_manifest_path  # noqa: E402

ARCCOSH3 = math.acosh(3.0)
X_STAR = (3.0 + math.sqrt(3.0)) / 4.0
L_STAR = math.acosh(X_STAR)


@pytest.fixture(scope="session")
def sample():
    return load_manifest(sample_manifest_path())


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture(scope="session")
def mixed_valence():
    """Six tetrahedra, three classes with valences 10, 12 and 14."""
    labels = np.random.default_rng(7).permutation(
        np.repeat([0, 1, 2], [10, 12, 14])).reshape(6, 6)
    return from_edge_labels(labels)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
