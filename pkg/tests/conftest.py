import importlib
import os
import sys
import warnings
from pathlib import Path
from typing import Callable, Dict, Iterator

import numpy as np
import pytest

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

warnings.filterwarnings("ignore", category=DeprecationWarning)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return ROOT_DIR / "corpus"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def configure() -> Iterator[Callable[..., None]]:
    """Override settings through the environment for one test.

    ``configure(residual_eps=1e-6)`` sets ``HOPFJORDAN_RESIDUAL_EPS`` and
    reloads the config module; the original environment is restored after.
    """
    from hopfjordan.core import config as cfg

    saved: Dict[str, str | None] = {}

    def apply(**overrides: object) -> None:
        for key, value in overrides.items():
            name = f"HOPFJORDAN_{key.upper()}"
            saved.setdefault(name, os.environ.get(name))
            os.environ[name] = str(value)
        importlib.reload(cfg)

    yield apply

    for name, value in saved.items():
        if value is None:
            os.environ.pop(name, None)
        else:
            os.environ[name] = value
    importlib.reload(cfg)
