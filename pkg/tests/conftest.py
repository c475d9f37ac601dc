from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
BOSTON_CSV = REPO_ROOT / "data" / "boston.csv"


@pytest.fixture(scope="session")
def boston_path():
    return BOSTON_CSV


@pytest.fixture(scope="session")
def boston():
    from mldnn.data import load_csv

    return load_csv(BOSTON_CSV)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
