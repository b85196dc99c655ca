"""Secret-key rates: decoy estimation, finite-size penalties, sweeps.

The certified rate per signal pulse sent in the key basis is

    R = Q1_low * (1 - i_eve) - Q_signal * f_ec * h(E_signal)

clamped at zero, with Q1_low a lower bound on the single-photon part of
the signal gain, i_eve the information bound from the security module,
and the second term the error-correction cost of the full signal gain.

Single-photon quantities are estimated with a vacuum + weak-decoy pair of
test intensities.  Writing Q for gains rescaled by e^{intensity}, the
bounds used are

    Y1 >= mu / (mu nu - nu^2) * (Q_nu e^nu - Q_mu e^mu nu^2/mu^2
                                 - (mu^2 - nu^2)/mu^2 * Y0)
    Y1 <= (Q_nu e^nu - Y0) / nu
    e1 Y1 <= (EQ_nu e^nu - Y0 / 2) / nu

all clamped to [0, 1].  In finite mode every observed probability is
first relaxed by a Hoeffding deviation sqrt(ln(1/eps) / (2 n)) for its
bin of n pulses, in whichever direction is pessimistic for the quantity
being derived; pulses are split evenly over the three intensities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import (ChannelParams, single_photon_pair_stats,
                      single_photon_yields, wcs_statistics)
from .qubit import binary_entropy
from .security import (SecurityAbort, SecuritySummary, UndefinedStatisticsError,
                       analyze)
from .source import STATE_LABELS, SourceSpec, build_coefficients

BOB_BASIS_PROB = {"Z": 0.5, "X": 0.25, "Y": 0.25}
ALICE_STATE_PROB = 0.25
_INTENSITY_SHARE = 1.0 / 3.0

_MU_GRID_POINTS = 200
_MU_REFINE_POINTS = 21


@dataclass(frozen=True)
class ProtocolParams:
    """Intensities, block size and estimation/correction overheads."""

    mu: float = 0.5
    nu: float = 0.05
    n_pulses: float = 1e10
    epsilon: float = 1e-10
    f_ec: float = 1.22

    def __post_init__(self) -> None:
        if not 0.0 <= self.nu < self.mu:
            raise ValueError(
                f"need signal > decoy >= 0, got mu={self.mu!r} nu={self.nu!r}")
        if not self.n_pulses > 0.0:
            raise ValueError("n_pulses must be positive")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon!r}")
        if self.f_ec < 1.0:
            raise ValueError("error-correction inefficiency must be >= 1")


@dataclass(frozen=True)
class KeyRatePoint:
    distance_km: float
    rate: float
    mu_opt: float
    summary: SecuritySummary | None
    abort: bool


def hoeffding_deviation(n_samples: float, epsilon: float) -> float:
    """One-sided deviation bound for a frequency over n_samples trials."""
    if n_samples <= 0.0:
        raise ValueError("n_samples must be positive")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon!r}")
    return math.sqrt(math.log(1.0 / epsilon) / (2.0 * n_samples))


def finite_key_adjust(value: float, n_samples: float, epsilon: float,
                      direction: str) -> float:
    """Pessimistic shift of an observed probability, clamped to [0, 1]."""
    dev = hoeffding_deviation(n_samples, epsilon)
    if direction == "up":
        return min(value + dev, 1.0)
    if direction == "down":
        return max(value - dev, 0.0)
    raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")


def decoy_yield_lower(y_vac: float, q_decoy: float, q_signal: float,
                      mu: float, nu: float) -> float:
    """Lower bound on the single-photon yield from a vacuum + weak pair."""
    if not nu < mu:
        raise ValueError(f"need mu > nu, got mu={mu!r} nu={nu!r}")
    if nu <= 0.0:
        raise ValueError("weak-decoy intensity must be positive")
    val = (mu / (mu * nu - nu * nu)) * (
        q_decoy * math.exp(nu)
        - q_signal * math.exp(mu) * (nu * nu) / (mu * mu)
        - ((mu * mu - nu * nu) / (mu * mu)) * y_vac)
    return min(max(val, 0.0), 1.0)


def decoy_yield_upper(y_vac: float, q_decoy: float, nu: float) -> float:
    """Upper bound on the single-photon yield from the weak decoy alone."""
    if nu <= 0.0:
        raise ValueError("weak-decoy intensity must be positive")
    val = (q_decoy * math.exp(nu) - y_vac) / nu
    return min(max(val, 0.0), 1.0)


def decoy_error_upper(y_vac: float, eq_decoy: float, y1_lower: float,
                      nu: float) -> float:
    """Upper bound on the single-photon error rate; 1 when Y1 is unbounded."""
    if nu <= 0.0:
        raise ValueError("weak-decoy intensity must be positive")
    if y1_lower <= 0.0:
        return 1.0
    val = (eq_decoy * math.exp(nu) - 0.5 * y_vac) / (nu * y1_lower)
    return min(max(val, 0.0), 1.0)


def secret_key_rate(q1_lower: float, i_eve_upper: float, q_signal: float,
                    bit_error_signal: float, f_ec: float) -> float:
    """Certified rate per key-basis signal pulse, clamped at zero."""
    cost = q_signal * f_ec * binary_entropy(min(max(bit_error_signal, 0.0), 0.5))
    return max(q1_lower * (1.0 - i_eve_upper) - cost, 0.0)


def _signal_stats(states: dict, ch: ChannelParams, mu: float):
    """Simulated observation table at the signal intensity alone."""
    return wcs_statistics(states, ch, {"signal": mu})


def _grid_maximize(fn, candidates: np.ndarray):
    """Best (x, fn(x)) over a grid plus one local refinement pass.

    fn returns tuples ordered by their first element; ties resolve to the
    smaller x because argmax takes the first maximum of an ascending grid.
    """
    values = [fn(float(x)) for x in candidates]
    best = int(np.argmax([v[0] for v in values]))
    lo = candidates[max(best - 1, 0)]
    hi = candidates[min(best + 1, len(candidates) - 1)]
    refined = np.linspace(lo, hi, _MU_REFINE_POINTS)
    values_r = [fn(float(x)) for x in refined]
    best_r = int(np.argmax([v[0] for v in values_r]))
    if values_r[best_r][0] > values[best][0]:
        return float(refined[best_r]), values_r[best_r]
    return float(candidates[best]), values[best]


def _mu_candidates(protocol: ProtocolParams) -> np.ndarray:
    grid = np.linspace(0.0, 1.0, _MU_GRID_POINTS + 1)[1:]
    grid = grid[grid > protocol.nu + 1e-12]
    if len(grid) == 0:
        raise ValueError("no admissible signal intensities above the decoy")
    return grid


def _asymptotic_point(spec: SourceSpec, ch: ChannelParams,
                      protocol: ProtocolParams, optimize_mu: bool,
                      feas_tol: float) -> KeyRatePoint:
    coeffs = build_coefficients(spec)
    y1 = single_photon_yields(coeffs.states, ch)
    yield_intervals = {
        (basis, s): {label: (y1[(label, basis, s)], y1[(label, basis, s)])
                     for label in STATE_LABELS}
        for basis in ("X", "Y") for s in (0, 1)
    }
    gain1, err1 = single_photon_pair_stats(y1, "Z", "Z")
    if gain1 <= 0.0:
        raise UndefinedStatisticsError("key basis never clicks")
    summary = analyze(coeffs, yield_intervals, err1 / gain1, feas_tol)

    def rate_for(mu: float):
        stats = _signal_stats(coeffs.states, ch, mu)
        q_mu = stats.gains[("ZZ", "signal")]
        e_mu = stats.error_rates[("ZZ", "signal")]
        q1 = mu * math.exp(-mu) * gain1
        return (secret_key_rate(q1, summary.i_eve_upper, q_mu, e_mu,
                                protocol.f_ec),)

    if optimize_mu:
        mu_best, value = _grid_maximize(rate_for, _mu_candidates(protocol))
        rate = value[0]
        if rate == 0.0:
            mu_best = 0.0
    else:
        mu_best = protocol.mu
        rate = rate_for(protocol.mu)[0]
    return KeyRatePoint(ch.distance_km, rate, mu_best, summary, False)


def _finite_cache(spec: SourceSpec, ch: ChannelParams, protocol: ProtocolParams,
                  coeffs) -> dict:
    """Mu-independent pieces: deviated vacuum and weak-decoy observations."""
    stats = wcs_statistics(coeffs.states, ch, {"decoy": protocol.nu, "vacuum": 0.0})
    n_per_intensity = protocol.n_pulses * _INTENSITY_SHARE
    cache = {"per_state": {}, "zz": {}}
    for basis in ("X", "Y"):
        n_bin = n_per_intensity * ALICE_STATE_PROB * BOB_BASIS_PROB[basis]
        for label in STATE_LABELS:
            for s in (0, 1):
                for iname in ("decoy", "vacuum"):
                    y = stats.intensity_yields[(label, basis, s, iname)]
                    cache["per_state"][(label, basis, s, iname)] = (
                        finite_key_adjust(y, n_bin, protocol.epsilon, "down"),
                        finite_key_adjust(y, n_bin, protocol.epsilon, "up"))
    n_zz = n_per_intensity * 2.0 * ALICE_STATE_PROB * BOB_BASIS_PROB["Z"]
    for iname in ("decoy", "vacuum"):
        gain = stats.gains[("ZZ", iname)]
        err = stats.error_gains[("ZZ", iname)]
        cache["zz"][iname] = {
            "gain": (finite_key_adjust(gain, n_zz, protocol.epsilon, "down"),
                     finite_key_adjust(gain, n_zz, protocol.epsilon, "up")),
            "err": (finite_key_adjust(err, n_zz, protocol.epsilon, "down"),
                    finite_key_adjust(err, n_zz, protocol.epsilon, "up")),
        }
    cache["n_per_intensity"] = n_per_intensity
    cache["n_zz"] = n_zz
    return cache


def _finite_rate_for_mu(spec: SourceSpec, ch: ChannelParams,
                        protocol: ProtocolParams, coeffs, cache: dict,
                        mu: float, feas_tol: float):
    """(rate, summary, abort) of the full finite-size chain at one mu."""
    n_per_intensity = cache["n_per_intensity"]
    nu = protocol.nu
    stats = _signal_stats(coeffs.states, ch, mu)

    yield_intervals = {}
    for basis in ("X", "Y"):
        n_bin = n_per_intensity * ALICE_STATE_PROB * BOB_BASIS_PROB[basis]
        for s in (0, 1):
            per_state = {}
            for label in STATE_LABELS:
                y_mu = stats.intensity_yields[(label, basis, s, "signal")]
                mu_hi = finite_key_adjust(y_mu, n_bin, protocol.epsilon, "up")
                vac_lo, vac_hi = cache["per_state"][(label, basis, s, "vacuum")]
                dec_lo, dec_hi = cache["per_state"][(label, basis, s, "decoy")]
                lo = decoy_yield_lower(vac_hi, dec_lo, mu_hi, mu, nu)
                hi = decoy_yield_upper(vac_lo, dec_hi, nu)
                per_state[label] = (min(lo, hi), hi)
            yield_intervals[(basis, s)] = per_state

    n_zz = cache["n_zz"]
    gain_mu = stats.gains[("ZZ", "signal")]
    err_mu = stats.error_gains[("ZZ", "signal")]
    gain_mu_lo = finite_key_adjust(gain_mu, n_zz, protocol.epsilon, "down")
    gain_mu_hi = finite_key_adjust(gain_mu, n_zz, protocol.epsilon, "up")
    err_mu_hi = finite_key_adjust(err_mu, n_zz, protocol.epsilon, "up")
    vac_gain_lo, vac_gain_hi = cache["zz"]["vacuum"]["gain"]
    dec_gain_lo, dec_gain_hi = cache["zz"]["decoy"]["gain"]
    dec_err_lo, dec_err_hi = cache["zz"]["decoy"]["err"]

    y1_zz_lo = decoy_yield_lower(vac_gain_hi, dec_gain_lo, gain_mu_hi, mu, nu)
    e1_zz_hi = decoy_error_upper(vac_gain_lo, dec_err_hi, y1_zz_lo, nu)
    try:
        summary = analyze(coeffs, yield_intervals, e1_zz_hi, feas_tol)
    except SecurityAbort as exc:
        return (0.0, exc.summary, True)
    q1 = mu * math.exp(-mu) * y1_zz_lo
    e_mu = err_mu_hi / gain_mu_lo if gain_mu_lo > 0.0 else 0.5
    rate = secret_key_rate(q1, summary.i_eve_upper, gain_mu_hi, e_mu,
                           protocol.f_ec)
    return (rate, summary, False)


def _finite_point(spec: SourceSpec, ch: ChannelParams, protocol: ProtocolParams,
                  optimize_mu: bool, feas_tol: float) -> KeyRatePoint:
    coeffs = build_coefficients(spec)
    cache = _finite_cache(spec, ch, protocol, coeffs)

    def rate_for(mu: float):
        return _finite_rate_for_mu(spec, ch, protocol, coeffs, cache, mu,
                                   feas_tol)

    if optimize_mu:
        mu_best, value = _grid_maximize(rate_for, _mu_candidates(protocol))
        if value[0] == 0.0:
            mu_best = 0.0
    else:
        mu_best = protocol.mu
        value = rate_for(protocol.mu)
    rate, summary, aborted = value
    return KeyRatePoint(ch.distance_km, rate, mu_best if rate > 0.0 else
                        (0.0 if optimize_mu else mu_best), summary, aborted)


def evaluate_point(spec: SourceSpec, ch: ChannelParams, protocol: ProtocolParams,
                   mode: str = "asymptotic", optimize_mu: bool = True,
                   feas_tol: float = 1e-12) -> KeyRatePoint:
    """Key-rate point for one channel configuration.

    Aborts (bit error too high, or statistics too degenerate to define a
    phase error) yield rate 0 with the abort flag set; physically
    inconsistent yields raise InfeasibleStatisticsError.
    """
    if mode not in ("asymptotic", "finite"):
        raise ValueError(f"mode must be 'asymptotic' or 'finite', got {mode!r}")
    try:
        if mode == "asymptotic":
            return _asymptotic_point(spec, ch, protocol, optimize_mu, feas_tol)
        return _finite_point(spec, ch, protocol, optimize_mu, feas_tol)
    except SecurityAbort as exc:
        return KeyRatePoint(ch.distance_km, 0.0, 0.0, exc.summary, True)
    except UndefinedStatisticsError:
        return KeyRatePoint(ch.distance_km, 0.0, 0.0, None, True)


def sweep_distance(spec: SourceSpec, ch_base: ChannelParams,
                   protocol: ProtocolParams, distances, mode: str = "asymptotic",
                   optimize_mu: bool = True) -> list[KeyRatePoint]:
    """Evaluate a list of distances with a shared configuration."""
    points = []
    for d in distances:
        ch = replace(ch_base, distance_km=float(d))
        points.append(evaluate_point(spec, ch, protocol, mode, optimize_mu))
    return points


def optimize_intensity(spec: SourceSpec, ch: ChannelParams,
                       protocol: ProtocolParams,
                       mode: str = "asymptotic") -> tuple[float, KeyRatePoint]:
    """Best signal intensity and its key-rate point at one distance."""
    point = evaluate_point(spec, ch, protocol, mode, optimize_mu=True)
    return point.mu_opt, point
