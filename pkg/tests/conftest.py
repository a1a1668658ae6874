import numpy as np
import pytest

from sphdesign import design_ladder, load_design


@pytest.fixture(scope="session")
def design16():
    return load_design(16)


@pytest.fixture(scope="session")
def design32():
    return load_design(32)


@pytest.fixture(scope="session")
def design64():
    return load_design(64)


@pytest.fixture(scope="session")
def ladder():
    return design_ladder()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
