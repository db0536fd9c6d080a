import pytest

from fractotal.graphs import complement_two_factor, first_perfect_matching, generate


@pytest.fixture(scope="session")
def k4():
    return generate("complete", n=4)


@pytest.fixture(scope="session")
def petersen():
    return generate("generalized_petersen", n=5, k=2)


@pytest.fixture(scope="session")
def prism():
    return generate("prism")


@pytest.fixture(scope="session")
def gp103():
    return generate("generalized_petersen", n=10, k=3)


@pytest.fixture(scope="session")
def random200():
    return generate("random_cubic_girth", n=200, min_girth=7, seed=1)


@pytest.fixture(scope="session")
def petersen_factor(petersen):
    return complement_two_factor(petersen, first_perfect_matching(petersen))


@pytest.fixture(scope="session")
def random200_factor(random200):
    return complement_two_factor(random200, first_perfect_matching(random200))
