import pytest

from infentropy.maps import make_f, make_tent
from infentropy.zygmund import make_zygmund_map


@pytest.fixture(scope="session")
def f1():
    return make_f(1.0)


@pytest.fixture(scope="session")
def f_half():
    return make_f(0.5)


@pytest.fixture(scope="session")
def tent3():
    return make_tent(3)


@pytest.fixture(scope="session")
def zyg():
    return make_zygmund_map(16)
