import numpy as np
import pytest

from wakeradar.params import RadarConfig


@pytest.fixture
def small_radar():
    """A cheap configuration for unit tests: 16 bins of 256 pulses."""
    return RadarConfig(carrier_frequency=10.1e9, prf=11400.0, n_pulses=256,
                       bandwidth=5e6, n_range_bins=16)


@pytest.fixture
def rng():
    return np.random.default_rng(20210814)


def tone(config, velocity, amplitude=1.0, phase=0.0):
    from wakeradar.params import wavelength
    t = np.arange(config.n_pulses) / config.prf
    lam = wavelength(config)
    return amplitude * np.exp(1j * (2.0 * np.pi * (2.0 * velocity / lam) * t + phase))
