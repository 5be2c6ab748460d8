import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from causal_emergence import io as eio
from causal_emergence.zoo import make_block_model, make_identity, make_uniform

GOLDEN = Path(__file__).parent / "golden"


def random_tpm(rng, n, sparsity=0.0):
    a = rng.random((n, n))
    if sparsity:
        a[rng.random((n, n)) < sparsity] = 0.0
        a[np.arange(n), rng.integers(0, n, n)] += 0.1
    return a / a.sum(axis=1, keepdims=True)


@pytest.fixture
def block44():
    return make_block_model([4, 4])


@pytest.fixture
def tpm_files(tmp_path):
    files = {
        "block": tmp_path / "block-model-44.json",
        "identity8": tmp_path / "identity-8.json",
        "identity3": tmp_path / "identity-3.json",
        "uniform8": tmp_path / "uniform-8.json",
    }
    eio.write_tpm(make_block_model([4, 4]), files["block"])
    eio.write_tpm(make_identity(8), files["identity8"])
    eio.write_tpm(make_identity(3), files["identity3"])
    eio.write_tpm(make_uniform(8), files["uniform8"])
    return files


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_RESULTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[num])
