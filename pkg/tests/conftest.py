import pytest

from myohold import preset


@pytest.fixture(scope="session")
def wrist():
    return preset("wrist")[0]


@pytest.fixture(scope="session")
def finger():
    return preset("finger")[0]
