import pytest

from tpbounds.acceptance import Workspace
from tpbounds.besselmap import BesselModel
from tpbounds.mpnum import PrecisionContext


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(50)


@pytest.fixture(scope="session")
def model(ctx):
    return BesselModel(ctx)


@pytest.fixture(scope="session")
def workspace():
    # one shared workspace so loop data and path integrals are built once
    return Workspace(digits=80)
