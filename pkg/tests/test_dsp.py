"""Spectral transforms against a direct DFT oracle."""

import numpy as np
import pytest

from conftest import tone
from wakeradar.dsp import (DopplerSpectrum, Spectrogram, doppler_spectrum,
                           index_for_velocity, micro_doppler_spectrogram,
                           notch_clutter, range_doppler_map)
from wakeradar.errors import DimensionError, DomainError
from wakeradar.params import unambiguous_velocity, velocity_resolution


def dft_oracle(x):
    """O(n^2) DFT written without numpy's FFT, for cross-checking."""
    n = x.shape[0]
    k = np.arange(n)
    mat = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return mat @ x


def test_spectrum_matches_direct_dft(small_radar, rng):
    x = rng.standard_normal(2 * small_radar.n_pulses).view(np.complex128)
    sp = doppler_spectrum(x, small_radar)
    oracle = np.abs(np.fft.fftshift(dft_oracle(x)))
    assert np.allclose(sp.amplitudes, oracle, rtol=1e-9, atol=1e-9)


def test_axis_conventions(small_radar):
    sp = doppler_spectrum(np.zeros(small_radar.n_pulses), small_radar)
    n = small_radar.n_pulses
    vres = velocity_resolution(small_radar)
    assert sp.velocity_axis[n // 2] == 0.0
    assert sp.velocity_axis[0] == pytest.approx(-unambiguous_velocity(small_radar))
    assert np.allclose(np.diff(sp.velocity_axis), vres)


def test_tone_lands_on_its_cell(small_radar):
    vres = velocity_resolution(small_radar)
    n = small_radar.n_pulses
    for cells in (3, -17, 40):
        sp = doppler_spectrum(tone(small_radar, cells * vres), small_radar)
        assert int(np.argmax(sp.amplitudes)) == n // 2 + cells
        # on-grid tone: all energy coherently in one cell
        assert sp.amplitudes.max() == pytest.approx(n, rel=1e-9)


def test_parseval(small_radar, rng):
    x = rng.standard_normal(2 * small_radar.n_pulses).view(np.complex128)
    sp = doppler_spectrum(x, small_radar)
    lhs = float(np.sum(sp.amplitudes ** 2))
    rhs = small_radar.n_pulses * float(np.sum(np.abs(x) ** 2))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_wrong_length_rejected(small_radar):
    with pytest.raises(DimensionError):
        doppler_spectrum(np.zeros(small_radar.n_pulses + 1), small_radar)


def test_unknown_window_rejected(small_radar):
    with pytest.raises(DomainError):
        doppler_spectrum(np.zeros(small_radar.n_pulses), small_radar,
                         window="kaiser")


def test_hann_window_applied(small_radar, rng):
    from scipy.signal import get_window
    x = rng.standard_normal(2 * small_radar.n_pulses).view(np.complex128)
    sp = doppler_spectrum(x, small_radar, window="hann")
    oracle = np.abs(np.fft.fftshift(np.fft.fft(
        x * get_window("hann", small_radar.n_pulses))))
    assert np.allclose(sp.amplitudes, oracle, rtol=1e-12)


def test_notch_masks_inclusive_and_idempotent(small_radar):
    sp = doppler_spectrum(np.ones(small_radar.n_pulses), small_radar)
    vres = velocity_resolution(small_radar)
    notched = notch_clutter(sp, 2.0 * vres)
    expect = np.abs(sp.velocity_axis) <= 2.0 * vres
    assert np.array_equal(notched.notch_mask, expect)
    assert notched.amplitudes is sp.amplitudes
    again = notch_clutter(notched, 1.0 * vres)
    assert np.array_equal(again.notch_mask, expect)
    wider = notch_clutter(notched, 4.0 * vres)
    assert wider.notch_mask.sum() > expect.sum()
    with pytest.raises(DomainError):
        notch_clutter(sp, -0.1)


def test_index_for_velocity_round_trip(small_radar):
    sp = doppler_spectrum(np.zeros(small_radar.n_pulses), small_radar)
    for i in (0, 1, small_radar.n_pulses // 2, small_radar.n_pulses - 1):
        assert index_for_velocity(sp, float(sp.velocity_axis[i])) == i
    with pytest.raises(DomainError):
        index_for_velocity(sp, 10.0 * unambiguous_velocity(small_radar))


def test_map_rows_equal_per_bin_spectra(small_radar, rng):
    frame = rng.standard_normal(
        (small_radar.n_range_bins, 2 * small_radar.n_pulses)).view(np.complex128)
    rd = range_doppler_map(frame, small_radar)
    assert rd.n_bins == small_radar.n_range_bins
    for b in (0, 7, small_radar.n_range_bins - 1):
        row = doppler_spectrum(frame[b], small_radar, bin_index=b)
        assert np.array_equal(rd.rows[b].amplitudes, row.amplitudes)
        assert rd.rows[b].bin_index == b
    with pytest.raises(DimensionError):
        range_doppler_map(frame[:, :-1], small_radar)


class TestSpectrogram:
    def test_slice_layout(self, small_radar):
        x = np.zeros(small_radar.n_pulses, dtype=complex)
        spg = micro_doppler_spectrogram(x, small_radar, win_len=64, hop=16)
        n_slices = (small_radar.n_pulses - 64) // 16 + 1
        assert spg.magnitudes.shape == (n_slices, 64)
        assert spg.values.shape == (n_slices, 64)
        assert spg.time_axis.shape == (n_slices,)
        # each time stamp is the center of its window
        assert spg.time_axis[0] == pytest.approx(32 / small_radar.prf)
        assert spg.time_axis[1] - spg.time_axis[0] == pytest.approx(
            16 / small_radar.prf)

    def test_slices_match_windowed_dft(self, small_radar, rng):
        from scipy.signal import get_window
        x = rng.standard_normal(2 * small_radar.n_pulses).view(np.complex128)
        spg = micro_doppler_spectrogram(x, small_radar, win_len=64, hop=32)
        w = get_window("hann", 64)
        for s in (0, 3):
            chunk = x[s * 32:s * 32 + 64]
            oracle = np.fft.fftshift(dft_oracle(chunk * w))
            assert np.allclose(spg.values[s], oracle, rtol=1e-8, atol=1e-8)
        assert np.array_equal(spg.magnitudes, np.abs(spg.values))

    def test_velocity_axis_spans_full_interval(self, small_radar):
        spg = micro_doppler_spectrogram(np.zeros(small_radar.n_pulses),
                                        small_radar, win_len=64, hop=16)
        v_ua = unambiguous_velocity(small_radar)
        assert spg.velocity_axis[32] == 0.0
        assert spg.velocity_axis[0] == pytest.approx(-v_ua)

    def test_bad_arguments(self, small_radar):
        x = np.zeros(small_radar.n_pulses)
        with pytest.raises(DomainError):
            micro_doppler_spectrogram(x, small_radar, win_len=1)
        with pytest.raises(DomainError):
            micro_doppler_spectrogram(x, small_radar,
                                      win_len=small_radar.n_pulses + 1)
        with pytest.raises(DomainError):
            micro_doppler_spectrogram(x, small_radar, hop=0)
        with pytest.raises(DimensionError):
            micro_doppler_spectrogram(x[:-1], small_radar)

    def test_magnitude_only_instances_allowed(self):
        spg = Spectrogram(magnitudes=np.ones((4, 8)),
                          time_axis=np.arange(4.0),
                          velocity_axis=np.arange(8.0) - 4.0)
        assert spg.values is None
