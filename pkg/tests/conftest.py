import numpy as np
import pytest

from holomech import SystemSpec, builtin_potentials

DEFAULT_SEED = 42


@pytest.fixture(scope="session")
def builtins_map():
    return builtin_potentials()


@pytest.fixture(scope="session")
def builtin_specs(builtins_map):
    """SystemSpec at the reference mass 1/2 for every catalog potential."""
    return {name: SystemSpec(expr, 0.5) for name, expr in builtins_map.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(DEFAULT_SEED)
