import logging

import numpy as np
import pandas as pd
import pytest

from pldc import config
from pldc.models import Dataset


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(autouse=True)
def log_dir(tmp_path, monkeypatch):
    """Keep the rotating log out of the source tree."""
    path = tmp_path / "logs"
    monkeypatch.setattr(config, "LOG_DIR", str(path))
    yield path
    package_logger = logging.getLogger("pldc")
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
        handler.close()


@pytest.fixture
def small_regression(rng):
    x = rng.standard_normal((6, 2))
    y = np.sin(x[:, 0]) + 0.5 * x[:, 1]
    return Dataset.from_arrays(x, y, standardize=False)


@pytest.fixture
def write_table(tmp_path):
    """Write a dict of columns to a CSV under tmp_path and return its path."""

    def _write(name, columns):
        path = tmp_path / name
        pd.DataFrame(columns).to_csv(path, index=False, float_format="%.17g")
        return str(path)

    return _write
