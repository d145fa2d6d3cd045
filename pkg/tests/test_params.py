"""Derived-quantity formulas against independent high-precision oracles.

Oracle values are recomputed with mpmath at 50 digits inside each test, so
a regression in the float path cannot hide behind a matching regression in
the expectation.
"""

import math

import mpmath
import pytest

from wakeradar.errors import DomainError
from wakeradar.params import (SPEED_OF_LIGHT, LinkBudgetQuery, RadarConfig,
                              detection_range, fold_velocity, range_resolution,
                              snr_db, unambiguous_velocity, velocity_resolution,
                              wavelength)
from wakeradar.presets import comparison_radar, track16_radar, whu_radar

mpmath.mp.dps = 50


def mp_wavelength(config):
    return mpmath.mpf(SPEED_OF_LIGHT) / mpmath.mpf(config.carrier_frequency)


def mp_vres(config):
    cpi = mpmath.mpf(config.n_pulses) / mpmath.mpf(config.prf)
    return mp_wavelength(config) / (2 * cpi)


def test_wavelength_against_oracle():
    for config in (whu_radar(), track16_radar(), comparison_radar()):
        oracle = mp_wavelength(config)
        assert abs(wavelength(config) - float(oracle)) <= 1e-15 * float(oracle)


def test_main_wavelength_value():
    assert wavelength(whu_radar()) == pytest.approx(0.02968, abs=2e-5)


def test_range_resolution_oracle_and_values():
    oracle5 = mpmath.mpf(SPEED_OF_LIGHT) / (2 * mpmath.mpf(5e6))
    assert range_resolution(5e6) == pytest.approx(float(oracle5), rel=1e-15)
    assert abs(range_resolution(5e6) - 30.0) / 30.0 < 0.002
    assert abs(range_resolution(3.75e6) - 40.0) / 40.0 < 0.002


def test_velocity_resolution_oracle():
    for config in (whu_radar(), track16_radar()):
        assert velocity_resolution(config) == pytest.approx(
            float(mp_vres(config)), rel=1e-14)
    assert abs(velocity_resolution(whu_radar()) - 0.083) < 0.001


def test_unambiguous_velocity_oracle():
    for config in (whu_radar(), track16_radar()):
        oracle = mp_wavelength(config) * mpmath.mpf(config.prf) / 4
        assert unambiguous_velocity(config) == pytest.approx(float(oracle),
                                                             rel=1e-14)
    assert unambiguous_velocity(whu_radar()) == pytest.approx(84.59, abs=0.01)
    assert unambiguous_velocity(track16_radar()) == pytest.approx(64.56, abs=0.01)


def test_cpi_is_quotient_not_state():
    assert whu_radar().cpi_seconds == 2048 / 11400.0
    assert track16_radar().cpi_seconds == 2031 / 8700.0
    assert whu_radar().cpi_seconds == pytest.approx(0.1796, abs=2e-4)


def test_config_is_frozen():
    config = whu_radar()
    with pytest.raises(Exception):
        config.prf = 9000.0


@pytest.mark.parametrize("field,value", [
    ("carrier_frequency", 0.0), ("prf", -1.0), ("bandwidth", 0.0),
    ("n_pulses", 1), ("n_range_bins", 0), ("peak_power", 0.0),
    ("noise_figure", -2.0),
])
def test_config_rejects_nonsense(field, value):
    kwargs = dict(carrier_frequency=10.1e9, prf=11400.0, n_pulses=2048,
                  bandwidth=5e6, n_range_bins=512)
    kwargs[field] = value
    with pytest.raises(DomainError):
        RadarConfig(**kwargs)


def oracle_fold(v, v_ua):
    span = 2.0 * v_ua
    while v >= v_ua:
        v -= span
    while v < -v_ua:
        v += span
    return v


def test_fold_brute_force():
    import numpy as np
    gen = np.random.default_rng(4242)
    v_ua = gen.uniform(1.0, 100.0, 10_000)
    v = gen.uniform(-40.0, 40.0, 10_000) * v_ua
    for vi, ui in zip(v, v_ua):
        assert fold_velocity(float(vi), float(ui)) == oracle_fold(float(vi), float(ui))


def test_fold_edges():
    assert fold_velocity(84.5949, 84.5949) == -84.5949
    assert fold_velocity(-84.5949, 84.5949) == -84.5949
    assert fold_velocity(0.0, 84.5949) == 0.0
    v_ua = unambiguous_velocity(whu_radar())
    assert fold_velocity(-140.1103, v_ua) == pytest.approx(29.0795, abs=2e-4)
    with pytest.raises(DomainError):
        fold_velocity(1.0, 0.0)
    with pytest.raises(DomainError):
        fold_velocity(math.inf, 10.0)


def test_detection_range_power_scaling_is_exact():
    base = whu_radar()
    query = LinkBudgetQuery(target_rcs=0.01, required_snr=20.0)
    r1 = detection_range(base, query)
    boosted = RadarConfig(carrier_frequency=base.carrier_frequency,
                          prf=base.prf, n_pulses=base.n_pulses,
                          bandwidth=base.bandwidth,
                          n_range_bins=base.n_range_bins,
                          peak_power=base.peak_power * 16.0)
    r2 = detection_range(boosted, query)
    assert abs(r2 - 2.0 * r1) <= 1e-12 * r1


def test_detection_range_oracle():
    config = whu_radar()
    query = LinkBudgetQuery(target_rcs=0.01, required_snr=13.0)
    num = (mpmath.mpf(config.peak_power) * config.antenna_gain
           * config.effective_aperture * mpmath.mpf(query.target_rcs))
    den = ((4 * mpmath.pi) ** 2 * mpmath.mpf(query.boltzmann_constant)
           * config.system_temperature * config.bandwidth
           * config.noise_figure * query.required_snr)
    oracle = (num / den) ** mpmath.mpf("0.25")
    assert detection_range(config, query) == pytest.approx(float(oracle),
                                                           rel=1e-13)


def test_detection_range_monotone_in_rcs():
    config = whu_radar()
    small = detection_range(config, LinkBudgetQuery(0.01, 13.0))
    large = detection_range(config, LinkBudgetQuery(1.0, 13.0))
    assert large > small


def test_budget_query_validation():
    with pytest.raises(DomainError):
        LinkBudgetQuery(target_rcs=0.0, required_snr=13.0)
    with pytest.raises(DomainError):
        LinkBudgetQuery(target_rcs=0.1, required_snr=0.0)


def test_snr_db():
    assert snr_db(100.0, 1.0) == pytest.approx(20.0, abs=1e-12)
    assert snr_db(1.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        snr_db(0.0, 1.0)
    with pytest.raises(DomainError):
        snr_db(1.0, 0.0)
