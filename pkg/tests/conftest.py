import importlib.resources
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def toy_dir() -> Path:
    """Bundled ~200-passage corpus with gazetteer, queries, and qrels."""
    return Path(str(importlib.resources.files("entsearch"))) / "data" / "toy"
