import pytest

from vibroaffect import AffectScore, NullBackend, Pipeline, Player
from vibroaffect.estimators import Backend, EstimatorConfig


@pytest.fixture
def lexicon_pipeline():
    return Pipeline(estimator=EstimatorConfig(backend=Backend.LEXICON))


@pytest.fixture
def neutral_pipeline():
    return Pipeline(estimate_fn=lambda text: AffectScore.neutral())


@pytest.fixture
def null_player():
    backend = NullBackend()
    player = Player(backend)
    player.backend_record = backend
    yield player
    player.close()
