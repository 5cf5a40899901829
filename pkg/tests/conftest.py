import pytest

from nufix import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the jitted kernels (when the numba path is active) so that
    # timed acceptance checks measure the algorithms, not LLVM
    kernels.warm_up()
