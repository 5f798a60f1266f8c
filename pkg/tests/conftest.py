import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from surrogate import make_splice_like  # noqa: E402

from strembed.bench import gen_synthetic  # noqa: E402
from strembed.data import split_dataset  # noqa: E402


@pytest.fixture(scope="session")
def small_dna_ds():
    """120 random DNA-like strings of length 40, single class."""
    return gen_synthetic(120, 40, 4, seed=11)


@pytest.fixture(scope="session")
def splice_like_ds():
    """Synthetic splice-style 3-class dataset, split 2233/957."""
    return split_dataset(make_splice_like(), 0.7, seed=42)
