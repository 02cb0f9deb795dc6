"""Shared fixtures: simulation corpora reused across test modules.

The acceptance corpus (4 controls x 9 starts x 1e6 paths x 1024 steps under
common random numbers) takes a few minutes to build, so it is session-scoped
and shared by the error-estimate, sandwich, and modulus acceptance criteria.
Unit-level statistical tests use the small corpus.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

ACCEPTANCE_SEED = 20260817
SMALL_SEED = 424242


@pytest.fixture(scope="session")
def small_corpus():
    from sdl.verify import build_corpus

    return build_corpus(20_000, 256, SMALL_SEED, 1.0)


@pytest.fixture(scope="session")
def acceptance_corpus():
    """Full-scale corpus plus its build time (charged to criterion 5)."""
    from sdl.verify import build_corpus

    start = time.monotonic()
    corpus = build_corpus(1_000_000, 1024, ACCEPTANCE_SEED, 1.0)
    return corpus, time.monotonic() - start
