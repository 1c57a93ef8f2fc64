import pytest
from hypothesis import settings

from yolobot.classifier import default_model

settings.register_profile("det", derandomize=True)
settings.load_profile("det")


@pytest.fixture(scope="session")
def model():
    """The default generated model (cached; fitting takes ~0.5 s)."""
    return default_model()
