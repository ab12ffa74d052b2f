import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from _corpus import make_corpus, make_sensitivity  # noqa: E402


@pytest.fixture(scope="session")
def corpus():
    return make_corpus(30)


@pytest.fixture(scope="session")
def sens_table():
    return make_sensitivity()


@pytest.fixture(scope="session")
def small_image(corpus):
    return corpus[0]
