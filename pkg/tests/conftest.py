import pytest

from junction import resources


@pytest.fixture(scope="session")
def graph():
    return resources.default_curriculum()


@pytest.fixture(scope="session")
def rubric():
    return resources.default_rubric()


@pytest.fixture(scope="session")
def corpus():
    return resources.corpus_programs()


@pytest.fixture(scope="session")
def archetype_info():
    return resources.default_archetypes()
