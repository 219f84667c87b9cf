import pytest

from ulabeam import UlaConfig


@pytest.fixture(scope="session")
def cfg1024() -> UlaConfig:
    """The workhorse array: 1024 elements, half-wavelength spacing, 140 GHz."""
    return UlaConfig(n_elements=1024, spacing=299792458.0 / 140e9 / 2.0, carrier_freq=140e9)
