"""Decoherence factor between adjacent photon branches.

For one momentum pair the ground state of the uncoupled chain overlaps the
eigenstates of branches n and n-1 through four real channel weights; the
two-Hamiltonian echo then factorizes into a product over momenta of
four-term exponential sums.  At small N the same object expands into an
explicit list of spectral lines, which is what the Lorentzian spectrum sums
over.

Sign convention: channel label (a, b) carries the phase
exp(i (a eps_n + b eps_{n-1}) t), with the weights as defined in
mode_coefficients.  The pairing is pinned by the two-level validator in
the oracle module (see tests), which also fixes it against the full
exact-diagonalization echo.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ModeTable
from .errors import CapacityError, ParameterError

# below this magnitude an accumulated product is flushed to exactly zero
UNDERFLOW_CLAMP = 1e-300

# hard cap on enumerable momentum pairs: 4**14 configurations
MAX_ENUMERABLE_MODES = 14

_T_CHUNK = 1 << 15


@dataclass(frozen=True)
class ModeCoefficients:
    """Four real channel weights of one momentum pair (or arrays thereof).

    They sum to exactly one: pp + mm = sin^2(delta), pm + mp = cos^2(delta)
    with delta the angle mismatch between the two branches.  pp and mm
    vanish when the branches share their mixing angle.
    """

    pp: np.ndarray | float
    pm: np.ndarray | float
    mp: np.ndarray | float
    mm: np.ndarray | float


def mode_coefficients(alpha_n, alpha_prev) -> ModeCoefficients:
    """Channel weights from the branch angles alpha_n and alpha_{n-1}."""
    delta = np.asarray(alpha_prev) - np.asarray(alpha_n)
    sin_n, cos_n = np.sin(alpha_n), np.cos(alpha_n)
    sin_p, cos_p = np.sin(alpha_prev), np.cos(alpha_prev)
    sin_d, cos_d = np.sin(delta), np.cos(delta)
    return ModeCoefficients(
        pp=-sin_n * cos_p * sin_d,
        pm=sin_n * sin_p * cos_d,
        mp=cos_n * cos_p * cos_d,
        mm=cos_n * sin_p * sin_d,
    )


def _channel_sums(coeffs: ModeCoefficients):
    """Cosine/sine weights for the (eps_n + eps_prev) and (eps_n - eps_prev) tones."""
    return (
        coeffs.pp + coeffs.mm,
        coeffs.pp - coeffs.mm,
        coeffs.pm + coeffs.mp,
        coeffs.pm - coeffs.mp,
    )


def mode_factor(coeffs: ModeCoefficients, eps_n, eps_prev, t):
    """Single-mode echo sum_{a,b} c_ab exp(i (a eps_n + b eps_prev) t).

    Equals 1 at t = 0 by the weight sum rule and never exceeds unit
    modulus.  Broadcasts over whatever shapes the inputs share.
    """
    cs, ds, cq, dq = _channel_sums(coeffs)
    s = (np.asarray(eps_n) + np.asarray(eps_prev)) * np.asarray(t)
    q = (np.asarray(eps_n) - np.asarray(eps_prev)) * np.asarray(t)
    return (
        cs * np.cos(s)
        + 1j * (ds * np.sin(s))
        + cq * np.cos(q)
        + 1j * (dq * np.sin(q))
    )


def decoherence_factor(table: ModeTable, n: int, t):
    """Echo between branches n and n-1 at time(s) t, product over momenta.

    The per-momentum factors are multiplied in ascending-k order regardless
    of how callers parallelize over time samples, so outputs are bitwise
    reproducible.  Magnitudes that underflow below 1e-300 are flushed to
    exactly zero rather than treated as an error.
    """
    if n < 1 or n > table.n_max:
        raise ParameterError(
            f"branch pair ({n}, {n - 1}) not covered by table with n_max={table.n_max}"
        )
    scalar = np.isscalar(t) or np.ndim(t) == 0
    tarr = np.atleast_1d(np.asarray(t, dtype=float))

    eps_n, eps_p = table.epsilon[n], table.epsilon[n - 1]
    cs, ds, cq, dq = _channel_sums(mode_coefficients(table.alpha[n], table.alpha[n - 1]))
    eps_sum, eps_dif = eps_n + eps_p, eps_n - eps_p

    out = np.empty(tarr.shape, dtype=complex)
    for start in range(0, tarr.size, _T_CHUNK):
        tc = tarr[start : start + _T_CHUNK]
        acc = np.ones(tc.shape, dtype=complex)
        for j in range(eps_n.size):  # ascending k
            s = eps_sum[j] * tc
            q = eps_dif[j] * tc
            acc *= (
                cs[j] * np.cos(s)
                + 1j * (ds[j] * np.sin(s))
                + cq[j] * np.cos(q)
                + 1j * (dq[j] * np.sin(q))
            )
        out[start : start + _T_CHUNK] = acc
    out[np.abs(out) < UNDERFLOW_CLAMP] = 0.0
    return out[0] if scalar else out


@dataclass(frozen=True)
class SpectralLine:
    """One Lorentzian line: center frequency (units of B) and real weight."""

    center: float
    weight: float


@dataclass(frozen=True)
class LineDecomposition:
    """Exact line list of one branch echo, with pruning bookkeeping.

    pruned_weight is the signed total weight of discarded configurations
    (exact, since each pruned subtree sums to its prefix weight);
    pruned_abs_weight is the absolute mass of the discarded prefixes.
    """

    centers: np.ndarray
    weights: np.ndarray
    pruned_weight: float
    pruned_abs_weight: float

    def lines(self) -> list[SpectralLine]:
        return [
            SpectralLine(center=float(c), weight=float(w))
            for c, w in zip(self.centers, self.weights)
        ]


def enumerate_lines(
    table: ModeTable,
    n: int,
    max_modes: int = MAX_ENUMERABLE_MODES,
    weight_floor: float = 1e-15,
) -> LineDecomposition:
    """All 4^(N/2) configurations {(a_k, b_k)} with weights and centers.

    Each configuration contributes weight prod_k c_{a_k b_k, k} at center
    sum_k (a_k eps_nk + b_k eps_{n-1,k}).  Partial products whose magnitude
    falls below weight_floor are pruned (they can only shrink further), and
    the pruned mass is reported.  Beyond min(max_modes, 14) momentum pairs
    the enumeration refuses and the FFT path should be used instead.
    """
    if n < 1 or n > table.n_max:
        raise ParameterError(
            f"branch pair ({n}, {n - 1}) not covered by table with n_max={table.n_max}"
        )
    n_modes = table.momenta.size
    cap = min(int(max_modes), MAX_ENUMERABLE_MODES)
    if n_modes > cap:
        raise CapacityError(
            f"{n_modes} momentum pairs exceed the enumerable cap of {cap} "
            "(4^modes configurations); use the FFT spectrum path instead"
        )

    coeffs = mode_coefficients(table.alpha[n], table.alpha[n - 1])
    eps_n, eps_p = table.epsilon[n], table.epsilon[n - 1]
    # channel order (+,+), (+,-), (-,+), (-,-)
    channel_weights = np.stack([coeffs.pp, coeffs.pm, coeffs.mp, coeffs.mm], axis=1)
    channel_centers = np.stack(
        [eps_n + eps_p, eps_n - eps_p, -eps_n + eps_p, -eps_n - eps_p], axis=1
    )

    centers = np.zeros(1)
    weights = np.ones(1)
    pruned = 0.0
    pruned_abs = 0.0
    for j in range(n_modes):  # ascending k
        mode_centers = channel_centers[j]
        mode_weights = channel_weights[j]
        centers = (centers[:, None] + mode_centers[None, :]).ravel()
        weights = (weights[:, None] * mode_weights[None, :]).ravel()
        if weight_floor > 0.0:
            keep = np.abs(weights) >= weight_floor
            if not keep.all():
                dropped = weights[~keep]
                pruned += float(dropped.sum())
                pruned_abs += float(np.abs(dropped).sum())
                centers, weights = centers[keep], weights[keep]
    centers.setflags(write=False)
    weights.setflags(write=False)
    return LineDecomposition(
        centers=centers,
        weights=weights,
        pruned_weight=pruned,
        pruned_abs_weight=pruned_abs,
    )
