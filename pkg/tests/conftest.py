from __future__ import annotations

import pytest
from prefect.testing.utilities import prefect_test_harness


@pytest.fixture(scope="session")
def prefect_harness():
    """Temporary Prefect database for tests that run flows."""
    with prefect_test_harness():
        yield


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    path = tmp_path / "output"
    monkeypatch.setenv("HEATCONTENT_OUTPUT_DIR", str(path))
    return path
