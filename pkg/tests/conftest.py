import numpy as np
import pytest

from fplab import GridSpec, ModelParams, make_context


@pytest.fixture(scope="session")
def line16():
    return GridSpec.line(0.0, 1.0, 16)


@pytest.fixture(scope="session")
def line24():
    return GridSpec.line(0.0, 1.0, 24)


@pytest.fixture(scope="session")
def params_half():
    # N = sp holds for this combination in one dimension
    return ModelParams(s=0.5, p=2.0, q=4.0, r=3.0)


@pytest.fixture(scope="session")
def ctx16(line16, params_half):
    return make_context(line16, params_half)


@pytest.fixture(scope="session")
def ctx24(line24, params_half):
    return make_context(line24, params_half)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
