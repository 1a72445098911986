from __future__ import annotations

import pytest

from commentguard.corpus import LabeledComment

from helpers import synthetic_corpus


@pytest.fixture
def small_corpus() -> list[LabeledComment]:
    return synthetic_corpus(20, 20, seed=11)
