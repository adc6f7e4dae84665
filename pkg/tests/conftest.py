import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent
DATA = ROOT / "data"
GOLDEN = HERE / "golden"

sys.path.insert(0, str(HERE))


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture(scope="session")
def flies_mode_text(data_dir) -> str:
    return (data_dir / "flies.mode").read_text()


@pytest.fixture(scope="session")
def headline(data_dir):
    from xhail_lite import load_corpus

    corpus = load_corpus(
        str(data_dir / "headline.tokens"), str(data_dir / "headline.gold")
    )
    assert len(corpus) == 1
    return corpus[0]
