import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import build_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """Session-wide synthetic corpus: manifest path of 5 utterances."""
    root = tmp_path_factory.mktemp("corpus")
    return build_corpus(root)
