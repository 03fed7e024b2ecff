import math

import numpy as np
import pytest

from isingspec import (
    ChainParams,
    ConfigError,
    DegenerateInputError,
    Spectrum,
    auto_time_grid,
    broadening_metrics,
    build_mode_table,
    coherent_state,
    correlation_series,
    far_field_check,
    fock_superposition,
    lorentzian,
    mean_photon_number,
    spectrum_analytic,
    spectrum_fft,
    threshold_crossing_time,
)


def params_for(n_sites=8, lam=1.0, g_over_b=0.1, gamma_over_b=0.02):
    return ChainParams(
        n_sites=n_sites, lam=lam, g_over_b=g_over_b, gamma_over_b=gamma_over_b
    )


def pipeline(params, state, t_max=None, n_samples=None):
    table = build_mode_table(params, n_max=max(state.n_max, 1))
    if t_max is None:
        grid = auto_time_grid(params, table, state)
        t_max, n_samples = grid.t_max, grid.n_samples
    series = correlation_series(params, table, state, t_max, n_samples)
    return table, series, spectrum_fft(series)


class TestCorrelationSeries:
    def test_vacuum_probe_is_zero(self):
        p = params_for()
        table = build_mode_table(p, n_max=1)
        series = correlation_series(p, table, fock_superposition([1]), 50.0, 256)
        np.testing.assert_allclose(series.values, 0.0, atol=1e-15)

    def test_time_zero_equals_mean_photon_number(self):
        p = params_for()
        state = fock_superposition([1, 1])
        table = build_mode_table(p, n_max=1)
        series = correlation_series(p, table, state, 100.0, 1024)
        mid = series.n_samples // 2
        assert series.times[mid] == 0.0
        assert series.values[mid] == pytest.approx(0.5, abs=1e-10)

    def test_magnitude_never_exceeds_initial_value(self):
        p = params_for(n_sites=100, lam=1.0)
        state = coherent_state(1.0, tail_tol=1e-8)
        table = build_mode_table(p, n_max=state.n_max)
        series = correlation_series(p, table, state, 200.0, 2048)
        s0 = mean_photon_number(state)
        assert np.max(np.abs(series.values)) <= s0 + 1e-10

    def test_negative_times_conjugate_positive(self):
        p = params_for(n_sites=20, lam=0.7)
        table = build_mode_table(p, n_max=1)
        series = correlation_series(p, table, fock_superposition([1, 1]), 80.0, 512)
        mid = series.n_samples // 2
        for j in range(1, mid):
            assert series.values[mid + j] == np.conj(series.values[mid - j])

    def test_missing_branch_is_config_error(self):
        p = params_for()
        table = build_mode_table(p, n_max=1)
        state = fock_superposition([0, 0, 1])  # needs branch 2
        with pytest.raises(ConfigError, match="branch 2"):
            correlation_series(p, table, state, 50.0, 256)

    def test_rejects_bad_grids(self):
        p = params_for()
        table = build_mode_table(p, n_max=1)
        state = fock_superposition([1, 1])
        with pytest.raises(ConfigError):
            correlation_series(p, table, state, 50.0, 300)  # not a power of two
        with pytest.raises(ConfigError):
            correlation_series(p, table, state, -1.0, 256)


class TestSpectrumFFT:
    def test_pure_envelope_gives_lorentzian(self):
        # zero coupling leaves D = 1, so S(t) = 0.5 exp(-Gamma |t|) and the
        # transform is half a Lorentzian of width Gamma peaking at 2/Gamma
        gamma = 0.05
        p = params_for(g_over_b=0.0, gamma_over_b=gamma)
        state = fock_superposition([1, 1])
        _, _, spec = pipeline(p, state, t_max=8.0 / gamma, n_samples=1 << 12)
        peak = float(np.max(spec.values))
        assert peak == pytest.approx(0.5 * 2.0 / gamma, rel=0.02)
        center = spec.frequencies[int(np.argmax(spec.values))]
        assert abs(center) < 2 * (spec.frequencies[1] - spec.frequencies[0])

    def test_parseval_normalization(self):
        p = params_for(lam=0.8)
        state = fock_superposition([1, 1])
        _, series, spec = pipeline(p, state)
        d_omega = spec.frequencies[1] - spec.frequencies[0]
        mid = series.n_samples // 2
        assert np.sum(spec.values) * d_omega == pytest.approx(
            2 * np.pi * series.values[mid].real, rel=0.01
        )

    def test_imag_residual_small_and_reported(self):
        p = params_for(lam=1.0)
        _, _, spec = pipeline(p, fock_superposition([1, 1]))
        assert 0.0 <= spec.imag_residual < 1e-6

    def test_matches_analytic_lines(self):
        for lam in (0.5, 1.0, 2.0):
            p = params_for(lam=lam)
            state = fock_superposition([1, 1])
            table, _, spec = pipeline(p, state)
            analytic = spectrum_analytic(p, table, state, spec.frequencies)
            deviation = np.linalg.norm(spec.values - analytic.values)
            deviation /= np.linalg.norm(analytic.values)
            assert deviation < 0.01

    def test_probe_phase_invariance(self):
        p = params_for(lam=0.9)
        a = fock_superposition([1, 1j])
        b = fock_superposition([np.exp(0.3j), np.exp(0.3j) * 1j])
        _, _, spec_a = pipeline(p, a, t_max=100.0, n_samples=1 << 11)
        _, _, spec_b = pipeline(p, b, t_max=100.0, n_samples=1 << 11)
        scale = np.max(np.abs(spec_a.values))
        np.testing.assert_allclose(spec_a.values, spec_b.values, atol=1e-12 * scale)


class TestSpectrumAnalytic:
    def test_single_line_peak_height(self):
        gamma = 0.04
        grid = np.linspace(-1.0, 1.0, 4001)
        values = lorentzian(grid, 0.0, gamma)
        assert float(np.max(values)) == pytest.approx(2.0 / gamma, rel=1e-6)

    def test_halving_gamma_doubles_peak(self):
        p1 = params_for(g_over_b=0.0, gamma_over_b=0.04)
        p2 = params_for(g_over_b=0.0, gamma_over_b=0.02)
        state = fock_superposition([1, 1])
        grid = np.linspace(-0.5, 0.5, 2001)
        table1 = build_mode_table(p1, n_max=1)
        table2 = build_mode_table(p2, n_max=1)
        peak1 = np.max(spectrum_analytic(p1, table1, state, grid).values)
        peak2 = np.max(spectrum_analytic(p2, table2, state, grid).values)
        assert peak2 == pytest.approx(2 * peak1, rel=1e-3)


class TestBroadeningMetrics:
    def test_single_lorentzian_w90(self):
        # analytic 90% quantile window of a Lorentzian is 2 Gamma tan(0.45 pi);
        # the grid must span several hundred HWHM or the heavy tails bias it
        gamma = 0.01
        d_omega = gamma / 25
        grid = np.arange(-10000, 10001) * d_omega
        spec = Spectrum(frequencies=grid, values=lorentzian(grid, 0.0, gamma))
        metrics = broadening_metrics(spec)
        expected = 2 * gamma * math.tan(0.45 * math.pi)
        assert metrics.w90 == pytest.approx(expected, rel=0.05)

    def test_uniform_spectrum_is_maximally_flat(self):
        grid = np.linspace(-1, 1, 1024)
        spec = Spectrum(frequencies=grid, values=np.ones(1024))
        metrics = broadening_metrics(spec)
        assert metrics.entropy == pytest.approx(math.log(1024), abs=1e-12)
        assert metrics.participation == pytest.approx(1.0, abs=1e-12)
        assert metrics.w90 == pytest.approx(0.9 * 2.0, rel=0.01)

    def test_rejects_empty_spectrum(self):
        grid = np.linspace(-1, 1, 64)
        with pytest.raises(DegenerateInputError):
            broadening_metrics(Spectrum(frequencies=grid, values=np.zeros(64)))

    def test_doubling_chain_far_from_critical_keeps_w90(self):
        state = fock_superposition([1, 1])
        results = {}
        for n_sites in (500, 1000):
            p = params_for(n_sites=n_sites, lam=5.0, g_over_b=0.08125, gamma_over_b=0.02)
            _, _, spec = pipeline(p, state)
            results[n_sites] = broadening_metrics(spec).w90
        assert abs(results[1000] - results[500]) <= 0.2 * results[500]


class TestFarField:
    def test_zero_coupling_is_exactly_lorentzian(self):
        p = params_for(g_over_b=0.0, gamma_over_b=0.05)
        table = build_mode_table(p, n_max=1)
        report = far_field_check(p, table, fock_superposition([1, 1]))
        assert report.deviation < 0.01
        assert abs(report.shift) < 1e-3
        assert report.total_weight == pytest.approx(0.5)

    def test_far_field_single_peak_characterised(self):
        p = params_for(n_sites=200, lam=50.0, g_over_b=0.08, gamma_over_b=0.02)
        table = build_mode_table(p, n_max=1)
        report = far_field_check(p, table, fock_superposition([1, 1]))
        assert report.deviation < 0.05
        # dominant line sits at the branch ground-energy offset
        expected = float(np.sum(table.epsilon[0] - table.epsilon[1]))
        assert report.shift == pytest.approx(expected, abs=0.02)

    def test_critical_point_deviates(self):
        p = params_for(n_sites=200, lam=1.0, g_over_b=0.08, gamma_over_b=0.02)
        table = build_mode_table(p, n_max=1)
        report = far_field_check(p, table, fock_superposition([1, 1]))
        assert report.deviation > 0.5  # reported magnitude, pinned loosely


class TestAutoTimeGrid:
    def test_resolves_envelope(self):
        p = params_for(gamma_over_b=0.02)
        table = build_mode_table(p, n_max=1)
        grid = auto_time_grid(p, table, fock_superposition([1, 1]))
        assert grid.t_max == pytest.approx(8.0 / 0.02)
        assert grid.n_samples & (grid.n_samples - 1) == 0
        # Nyquist clears the padded estimate
        nyquist = math.pi * grid.n_samples / (2 * grid.t_max)
        assert nyquist >= grid.omega_estimate

    def test_gamma_zero_demands_explicit_grid(self):
        p = params_for(gamma_over_b=0.0)
        table = build_mode_table(p, n_max=1)
        with pytest.raises(ConfigError):
            auto_time_grid(p, table, fock_superposition([1, 1]))


class TestThresholdCrossing:
    def test_zero_coupling_crossing_is_envelope_time(self):
        gamma = 0.01
        p = params_for(g_over_b=0.0, gamma_over_b=gamma)
        table = build_mode_table(p, n_max=1)
        t = threshold_crossing_time(p, table, fock_superposition([1, 1]))
        assert t == pytest.approx(math.log(10.0) / gamma, rel=1e-3)

    def test_never_crossing_returns_inf(self):
        p = params_for(g_over_b=0.0, gamma_over_b=0.01)
        table = build_mode_table(p, n_max=1)
        t = threshold_crossing_time(
            p, table, fock_superposition([1, 1]), threshold=1e-6, horizon=10.0
        )
        assert math.isinf(t)
