import hypothesis
import pytest

from apxadder import demo_config

hypothesis.settings.register_profile("pkg", deadline=None, max_examples=50)
hypothesis.settings.load_profile("pkg")


@pytest.fixture(scope="session")
def demo():
    return demo_config()
