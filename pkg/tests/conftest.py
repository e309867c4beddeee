from __future__ import annotations

import pytest

from schemex import corpus
from schemex.detect import analyze


@pytest.fixture(scope="session")
def scheme_corpus():
    return corpus()


@pytest.fixture(scope="session")
def corpus_analyses(scheme_corpus):
    """One full analysis per corpus entry, shared across test modules."""
    return {name: analyze(s) for name, s, _expected in scheme_corpus}
