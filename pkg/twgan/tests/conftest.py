import os
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def dataset_dir():
    """Real simulator-exported dataset committed under fixtures/."""
    d = FIXTURES / "dataset"
    if not (d / "manifest.json").exists():
        pytest.skip("fixture dataset not present")
    return d


@pytest.fixture(scope="session")
def runs_dir():
    """Training artifact cache reused across sessions; override with
    TWGAN_RUNS_DIR."""
    p = Path(os.environ.get("TWGAN_RUNS_DIR", FIXTURES / "runs"))
    p.mkdir(parents=True, exist_ok=True)
    return p


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
