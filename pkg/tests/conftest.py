import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def small_random_model():
    from nucleus_search import random_model

    return random_model(seed=7, vocab_size=4, max_prefix_len=4)
