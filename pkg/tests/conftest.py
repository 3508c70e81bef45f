import pytest

from toricount.corpus import fan

SPLIT_NAMES = ("p1", "p2", "p1xp1", "hirzebruch1", "dp6")
NONSPLIT_NAMES = ("p1-norm-one", "p1xp1-swap", "p2-threecycle")


@pytest.fixture(scope="session")
def corpus():
    from toricount.corpus import NAMES

    return {name: fan(name) for name in NAMES}


@pytest.fixture(scope="session")
def p1():
    return fan("p1")


@pytest.fixture(scope="session")
def p2():
    return fan("p2")


@pytest.fixture(scope="session")
def p1xp1():
    return fan("p1xp1")


@pytest.fixture(scope="session")
def dp6():
    return fan("dp6")


@pytest.fixture(scope="session")
def hirzebruch1():
    return fan("hirzebruch1")
