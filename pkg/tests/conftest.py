import pytest

from mwcurves.symbols import set_debug


@pytest.fixture(autouse=True, scope="session")
def _compatibility_checks():
    # every constructed class is checked against its invariants during tests
    set_debug(True)
    yield
    set_debug(False)
