"""Correlation series, spectra, and the broadening metrics.

S(t) weighs each branch echo by n |c_n|^2 and multiplies in the
phenomenological exp(-Gamma |t|) envelope; S(omega) is its two-sided
transform with the exp(-i omega t) sign convention, either via FFT on a
symmetric time grid or, at small N, by summing the exact Lorentzian lines
(half width Gamma, peak 2/Gamma for unit weight).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .chain import ModeTable
from .decoherence import decoherence_factor, enumerate_lines, mode_coefficients
from .errors import ConfigError, DegenerateInputError, NumericsError
from .params import ChainParams
from .probe import ProbeState, mean_photon_number

# time horizon as a multiple of the envelope decay time 1/Gamma
_T_MAX_ENVELOPE_FACTOR = 8.0
# line configurations with less weight than this may alias (bandwidth estimator)
_ALIAS_MASS_FLOOR = 1e-6
_IMAG_RESIDUAL_LIMIT = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    """Resolved sampling for the FFT path."""

    t_max: float
    n_samples: int
    omega_estimate: float | None = None


@dataclass(frozen=True)
class BroadeningMetrics:
    """Width/flatness summary of a spectrum.

    w90 is the length of the smallest contiguous frequency window holding
    90% of the |S| mass; entropy is the Shannon entropy of the normalized
    |S| distribution in nats; participation is the inverse participation
    ratio divided by the number of grid points, so a flat spectrum scores 1.
    """

    w90: float
    entropy: float
    participation: float


@dataclass(frozen=True)
class CorrelationSeries:
    """S(t) on the symmetric uniform grid t_j in [-t_max, t_max)."""

    t_max: float
    times: np.ndarray
    values: np.ndarray

    @property
    def n_samples(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class Spectrum:
    """Real S(omega) samples on a uniform frequency grid (units of B)."""

    frequencies: np.ndarray
    values: np.ndarray
    imag_residual: float = 0.0
    metrics: BroadeningMetrics | None = None

    def with_metrics(self, metrics: BroadeningMetrics) -> "Spectrum":
        return replace(self, metrics=metrics)


def _required_branches(state: ProbeState, weight_floor: float) -> list[int]:
    weights = state.branch_weights()
    return [n for n in range(1, len(weights)) if weights[n] > weight_floor]


def _check_branches(table: ModeTable, branches: list[int]) -> None:
    for n in branches:
        if n > table.n_max:
            raise ConfigError(
                f"probe populates branch {n} but the mode table stops at "
                f"n_max={table.n_max}; rebuild the table with a larger cutoff"
            )


def auto_time_grid(
    params: ChainParams,
    table: ModeTable,
    state: ProbeState,
    weight_floor: float = 0.0,
    pad: float = 2.0,
    min_samples: int = 1024,
    max_samples: int = 1 << 22,
) -> TimeGrid:
    """Pick t_max and a power-of-two sample count for the FFT path.

    t_max = 8 / (Gamma/B) resolves the Lorentzian width.  The Nyquist
    frequency must clear every line configuration carrying visible weight:
    the carrier reach sum_k |eps_n - eps_prev| plus the reach of flipped
    modes.  A config flipping modes S has weight ~ prod_S flip_mass and sits
    up to sum_S (eps_n + eps_prev) further out, so flips are included
    greedily (heaviest first) while their cumulative weight stays above a
    small alias floor; configs below it carry too little mass to matter.
    The padded estimate is echoed in the grid so output headers can record
    it.
    """
    if params.gamma_over_b <= 0.0:
        raise ConfigError(
            "auto time grid needs gamma_over_b > 0; give an explicit grid instead"
        )
    t_max = _T_MAX_ENVELOPE_FACTOR / params.gamma_over_b

    branches = _required_branches(state, weight_floor)
    _check_branches(table, branches)
    omega_max = 0.0
    for n in branches:
        coeffs = mode_coefficients(table.alpha[n], table.alpha[n - 1])
        flip_mass = np.abs(coeffs.pp) + np.abs(coeffs.mm)
        eps_n, eps_p = table.epsilon[n], table.epsilon[n - 1]
        carrier = float(np.sum(np.abs(eps_n - eps_p)))
        reach = eps_n + eps_p
        qualifying = flip_mass >= _ALIAS_MASS_FLOOR
        flip_part = 0.0
        if qualifying.any():
            order = np.argsort(flip_mass[qualifying])[::-1]
            masses = flip_mass[qualifying][order]
            reaches = reach[qualifying][order]
            keep = np.cumprod(masses) >= _ALIAS_MASS_FLOOR
            keep[0] = True  # any single qualifying flip is visible
            flip_part = max(
                float(np.sum(reaches[keep])), float(np.max(reach[qualifying]))
            )
        omega_max = max(omega_max, carrier + flip_part)
    omega_padded = pad * omega_max

    n_samples = min_samples
    if omega_padded > 0.0:
        needed = 2.0 * t_max * omega_padded / np.pi
        n_samples = 1 << max(
            int(math.ceil(math.log2(max(needed, 2.0)))), int(math.log2(min_samples))
        )
    n_samples = min(n_samples, max_samples)
    return TimeGrid(t_max=t_max, n_samples=n_samples, omega_estimate=omega_padded)


def correlation_series(
    params: ChainParams,
    table: ModeTable,
    state: ProbeState,
    t_max: float,
    n_samples: int,
    weight_floor: float = 0.0,
) -> CorrelationSeries:
    """S(t_j) = sum_n n |c_n|^2 D_{n,n-1}(t_j) exp(-Gamma |t_j|) on [-t_max, t_max).

    Every branch populated above weight_floor must be covered by the table.
    The echo is evaluated on the non-negative half-grid and mirrored via
    S(-t) = conj(S(t)), which the real line weights make exact (bitwise, in
    fact, for correctly rounded trigonometry).
    """
    if n_samples < 2 or n_samples & (n_samples - 1):
        raise ConfigError(f"n_samples must be a power of two >= 2, got {n_samples!r}")
    if not (t_max > 0.0 and math.isfinite(t_max)):
        raise ConfigError(f"t_max must be finite and > 0, got {t_max!r}")

    branches = _required_branches(state, weight_floor)
    _check_branches(table, branches)
    weights = state.branch_weights()

    dt = 2.0 * t_max / n_samples
    half = np.arange(n_samples // 2 + 1) * dt  # 0 .. t_max inclusive
    positive = np.zeros(half.shape, dtype=complex)
    for n in branches:
        positive += weights[n] * decoherence_factor(table, n, half)
    positive *= np.exp(-params.gamma_over_b * half)

    values = np.empty(n_samples, dtype=complex)
    values[n_samples // 2 :] = positive[: n_samples // 2]
    values[1 : n_samples // 2] = np.conj(positive[1 : n_samples // 2][::-1])
    values[0] = np.conj(positive[n_samples // 2])  # t = -t_max
    times = -t_max + np.arange(n_samples) * dt
    times.setflags(write=False)
    values.setflags(write=False)
    return CorrelationSeries(t_max=t_max, times=times, values=values)


def spectrum_fft(series: CorrelationSeries) -> Spectrum:
    """Discrete two-sided transform sum_j dt exp(-i omega t_j) S(t_j).

    Frequency spacing is 2 pi / (2 t_max).  The sample at -t_max has no +t_max
    partner on the half-open grid but represents both under the DFT's periodic
    wraparound, so its imaginary part is dropped; with S(-t) = conj(S(t)) the
    transform is then real to machine precision.  The residue is reported and
    must stay below 1e-6 of the peak.
    """
    m = series.n_samples
    dt = 2.0 * series.t_max / m
    signal = np.array(series.values)
    signal[0] = signal[0].real
    phases = np.where(np.arange(m) % 2 == 0, 1.0, -1.0)  # exp(i omega_l t_max)
    raw = dt * phases * np.fft.fft(signal)
    frequencies = np.fft.fftshift(2.0 * np.pi * np.fft.fftfreq(m, d=dt))
    raw = np.fft.fftshift(raw)

    peak = float(np.max(np.abs(raw.real))) if m else 0.0
    residual = float(np.max(np.abs(raw.imag)) / peak) if peak > 0.0 else 0.0
    if residual > _IMAG_RESIDUAL_LIMIT:
        raise NumericsError(
            f"imaginary residue {residual:.3e} of the transform exceeds "
            f"{_IMAG_RESIDUAL_LIMIT:g} of the peak; the time grid is unsound"
        )
    values = raw.real
    frequencies.setflags(write=False)
    values.setflags(write=False)
    return Spectrum(frequencies=frequencies, values=values, imag_residual=residual)


def lorentzian(omega, center: float, gamma: float):
    """2 Gamma / (Gamma^2 + (omega - center)^2): unit-weight line, peak 2/Gamma."""
    return 2.0 * gamma / (gamma**2 + (np.asarray(omega) - center) ** 2)


def spectrum_analytic(
    params: ChainParams,
    table: ModeTable,
    state: ProbeState,
    frequencies,
    weight_floor: float = 0.0,
    line_floor: float = 0.0,
) -> Spectrum:
    """Exact Lorentzian sum over the enumerated lines of every branch.

    Only feasible while the line enumeration is (N/2 momentum pairs at four
    channels each); propagates its capacity error otherwise.
    """
    frequencies = np.asarray(frequencies, dtype=float)
    branches = _required_branches(state, weight_floor)
    _check_branches(table, branches)
    weights = state.branch_weights()
    gamma = params.gamma_over_b

    values = np.zeros(frequencies.shape)
    for n in branches:
        decomp = enumerate_lines(table, n, weight_floor=line_floor)
        for f_start in range(0, frequencies.size, 4096):
            f = frequencies[f_start : f_start + 4096]
            acc = np.zeros(f.shape)
            for l_start in range(0, decomp.centers.size, 2048):
                c = decomp.centers[l_start : l_start + 2048]
                w = decomp.weights[l_start : l_start + 2048]
                acc += (
                    (2.0 * gamma * w)
                    / (gamma**2 + (f[:, None] - c[None, :]) ** 2)
                ).sum(axis=1)
            values[f_start : f_start + 4096] += weights[n] * acc
    values.setflags(write=False)
    return Spectrum(frequencies=frequencies, values=values, imag_residual=0.0)


def broadening_metrics(spec: Spectrum, noise_floor: float = 1e-12) -> BroadeningMetrics:
    """w90, entropy and normalized participation of the |S| distribution."""
    magnitude = np.abs(spec.values)
    if magnitude.size == 0 or float(magnitude.max()) <= noise_floor:
        raise DegenerateInputError("spectrum has no mass above the noise floor")
    p = magnitude / magnitude.sum()
    d_omega = float(spec.frequencies[1] - spec.frequencies[0])

    cum = np.concatenate([[0.0], np.cumsum(p)])
    right = np.arange(1, p.size + 1)
    left = np.searchsorted(cum, cum[1:] - 0.9, side="right") - 1
    ok = left >= 0
    if ok.any():
        w90 = float((right[ok] - left[ok]).min()) * d_omega
    else:  # mass never reaches 90% from any left edge (cannot happen: sums to 1)
        w90 = p.size * d_omega

    nonzero = p[p > 0.0]
    entropy = float(-np.sum(nonzero * np.log(nonzero)))
    participation = float(1.0 / np.sum(p * p) / p.size)
    return BroadeningMetrics(w90=w90, entropy=entropy, participation=participation)


@dataclass(frozen=True)
class FarFieldReport:
    """Distance of a spectrum from a single shifted Lorentzian.

    deviation is the relative L2 mismatch after the best global frequency
    shift; shift is that fitted center; total_weight the probe's mean
    photon number carried by the reference line.
    """

    deviation: float
    shift: float
    total_weight: float


def fitted_peak(spec: Spectrum, gamma: float, total_weight: float) -> tuple[float, float]:
    """Best-fit center of total_weight * L(omega - s) and its relative L2 error."""
    values = spec.values
    frequencies = spec.frequencies
    start = float(frequencies[int(np.argmax(np.abs(values)))])
    span = max(10.0 * gamma, 2.0 * float(frequencies[1] - frequencies[0]))

    def mismatch(shift: float) -> float:
        model = total_weight * lorentzian(frequencies, shift, gamma)
        return float(np.linalg.norm(values - model) / np.linalg.norm(model))

    result = minimize_scalar(
        mismatch,
        bounds=(start - span, start + span),
        method="bounded",
        options={"xatol": 1e-9 * max(1.0, abs(start))},
    )
    return float(result.x), float(result.fun)


def far_field_check(
    params: ChainParams,
    table: ModeTable,
    state: ProbeState,
    spectrum: Spectrum | None = None,
    time_grid: TimeGrid | None = None,
    weight_floor: float = 0.0,
) -> FarFieldReport:
    """Compare the spectrum against one Lorentzian of the full probe weight.

    Far from the critical point the branch eigenbases nearly coincide and
    the whole spectrum collapses onto a single line whose position is set by
    the branch ground-energy offset, not by lambda; one global frequency
    shift is therefore fitted before measuring the residual.  Near lambda=1
    the returned deviation is large; it is reported, never asserted.
    """
    if spectrum is None:
        if time_grid is None:
            time_grid = auto_time_grid(params, table, state, weight_floor=weight_floor)
        series = correlation_series(
            params,
            table,
            state,
            time_grid.t_max,
            time_grid.n_samples,
            weight_floor=weight_floor,
        )
        spectrum = spectrum_fft(series)
    total = mean_photon_number(state)
    if total <= 0.0:
        raise DegenerateInputError("probe state carries no photon-number weight")
    shift, deviation = fitted_peak(spectrum, params.gamma_over_b, total)
    return FarFieldReport(deviation=deviation, shift=shift, total_weight=total)


def threshold_crossing_time(
    params: ChainParams,
    table: ModeTable,
    state: ProbeState,
    threshold: float = 0.1,
    horizon: float | None = None,
    weight_floor: float = 0.0,
) -> float:
    """First t >= 0 where |S(t)| / S(0) falls below threshold.

    Scans densely (fine steps at short times where echo collapse happens,
    coarser out to the envelope horizon), then bisects the bracketing
    interval with exact evaluations.  Returns inf if the ratio never drops
    below threshold inside the horizon.
    """
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must lie in (0, 1), got {threshold!r}")
    branches = _required_branches(state, weight_floor)
    _check_branches(table, branches)
    weights = state.branch_weights()
    s0 = float(sum(weights[n] for n in branches))
    if s0 <= 0.0:
        raise DegenerateInputError("probe state carries no photon-number weight")

    gamma = params.gamma_over_b
    if horizon is None:
        horizon = (
            1.2 * math.log(1.0 / threshold) / gamma if gamma > 0.0 else 2000.0
        )

    def ratio(ts: np.ndarray) -> np.ndarray:
        acc = np.zeros(ts.shape, dtype=complex)
        for n in branches:
            acc += weights[n] * decoherence_factor(table, n, ts)
        return np.abs(acc) * np.exp(-gamma * ts) / s0

    split = min(20.0, horizon)
    ts = np.concatenate(
        [np.arange(0.0, split, 0.005), np.arange(split, horizon, 0.1)]
    )
    r = ratio(ts)
    below = np.nonzero(r < threshold)[0]
    if below.size == 0:
        return math.inf
    i = int(below[0])
    if i == 0:  # cannot occur: the ratio starts at 1
        return float(ts[0])
    lo, hi = float(ts[i - 1]), float(ts[i])
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if float(ratio(np.array([mid]))[0]) < threshold:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
