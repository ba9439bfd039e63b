import pytest

from adecount import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # Compile (or load from cache) every kernel once so timing-sensitive
    # tests measure the algorithms, not JIT startup.
    _kernels.warm_up()
