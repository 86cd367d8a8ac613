import pytest

from mddial.domain import load_builtin_domain


@pytest.fixture(scope="session")
def restaurants():
    return load_builtin_domain("restaurants")


@pytest.fixture(scope="session")
def hotels():
    return load_builtin_domain("hotels")
