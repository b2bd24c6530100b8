import pytest

from parcpt import warm_up


@pytest.fixture(scope="session", autouse=True)
def _compiled_kernel():
    # Pay the JIT cost once so individual tests (and any timing) stay stable.
    warm_up()
