import pytest

from skewmorph import _kernels
from skewmorph.enumerate import brute_force_census


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT compilation is environmental cost, not algorithm cost; compiled
    # kernels are cached on disk across runs
    _kernels.warmup()


@pytest.fixture(scope="session")
def oracle_censuses(warm_kernels):
    return {n: brute_force_census(n) for n in range(1, 12)}
