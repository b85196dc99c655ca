"""Security bounds from observed single-photon statistics.

The unknown in this analysis is Bob's effective measurement together with
whatever the eavesdropper does: for each measurement basis and outcome it
is summarized by four transmission rates q = (q_I, q_X, q_Y, q_Z), the
coefficients of the effective operator on (I, sx, sy, sz)/2 inside the
protected qubit subspace.  Each of the four signal states pins a linear
combination of q between its observed yield minus the source's slack
eigenvalues, and positivity of the measurement adds box constraints:

    yield_low - slack_max <= robust_weight * (V . q) <= yield_high - slack_min
    0 <= q_I <= 1,   |q_t| <= min(q_I, 1 - q_I)     (t = X, Y, Z)

with V the flawed state's Bloch functional.  Extrema of linear maps over
this polytope then bound the virtual X/Y yields, the four phase-error
rates, the correlation parameter C, and finally the eavesdropper's
information on the key bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .polytope import Polytope
from .qubit import binary_entropy
from .source import STATE_LABELS, CoefficientSet, VirtualCoefficients

# Above this single-photon bit error rate the information bound reaches
# one bit and the protocol aborts.
E_ZZ_ABORT = 0.159

PAIR_LABELS = ("XX", "XY", "YX", "YY")

_DEGENERACY_TOL = 1e-10


class InfeasibleStatisticsError(RuntimeError):
    """Observed yields admit no physical transmission rates."""


class DegenerateSystemError(ValueError):
    """The four signal states do not span the constraint space."""


class UndefinedStatisticsError(RuntimeError):
    """A phase-error denominator vanished; treated as abort upstream."""


class SecurityAbort(RuntimeError):
    """Bit error too high for the information bound to certify anything."""

    def __init__(self, message: str, summary: "SecuritySummary | None" = None):
        super().__init__(message)
        self.summary = summary


@dataclass(frozen=True)
class TransmissionRates:
    """Feasible region of q = (q_I, q_X, q_Y, q_Z) with cached vertices."""

    constraint_matrix: np.ndarray
    constraint_bounds: np.ndarray
    vertices: np.ndarray
    intervals: dict

    def extrema(self, objective: np.ndarray) -> tuple[float, float]:
        values = self.vertices @ np.asarray(objective, dtype=float)
        return (float(values.min()), float(values.max()))

    def contains(self, q, tol: float = 1e-9) -> bool:
        return bool(np.all(self.constraint_matrix @ np.asarray(q, dtype=float)
                           <= self.constraint_bounds + tol))


@dataclass(frozen=True)
class SecuritySummary:
    phase_error_lower: dict
    phase_error_upper: dict
    c_lower: float
    e_zz_upper: float
    v_max: float
    i_eve_upper: float


def _box_rows() -> tuple[list, list]:
    rows = [[-1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]]
    bounds = [0.0, 1.0]
    for t in range(1, 4):
        for sign in (1.0, -1.0):
            row = [0.0, 0.0, 0.0, 0.0]
            row[t] = sign
            row[0] = -1.0
            rows.append(list(row))
            bounds.append(0.0)
            row = [0.0, 0.0, 0.0, 0.0]
            row[t] = sign
            row[0] = 1.0
            rows.append(list(row))
            bounds.append(1.0)
    return rows, bounds


def build_inequality_system(coeffs: CoefficientSet,
                            yields: dict) -> tuple[np.ndarray, np.ndarray]:
    """Constraint system A q <= b for one measurement basis and outcome.

    ``yields`` maps each state label to a (low, high) interval of its
    conditional click probability; in asymptotic mode both ends coincide.
    """
    state_rows = []
    for label in STATE_LABELS:
        lo, hi = yields[label]
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi + 1e-12:
            raise ValueError(f"invalid yield interval for {label}: ({lo!r}, {hi!r})")
        if lo < -1e-9 or hi > 1.0 + 1e-9:
            raise ValueError(f"yield interval for {label} outside [0, 1]")
        state_rows.append((label, max(lo, 0.0), min(hi, 1.0)))

    bloch_rows = np.array([coeffs.states[label].bloch.as_tuple()
                           for label in STATE_LABELS])
    # Row norms are >= 1 (leading identity component), so an absolute
    # determinant threshold on the normalized rows detects coinciding
    # states without flagging small robust weights.
    normalized = bloch_rows / np.linalg.norm(bloch_rows, axis=1, keepdims=True)
    if abs(np.linalg.det(normalized)) < _DEGENERACY_TOL:
        raise DegenerateSystemError(
            "signal-state Bloch vectors are linearly dependent")

    rows, bounds = _box_rows()
    for label, lo, hi in state_rows:
        pc = coeffs.practical[label]
        v = pc.robust_weight * bloch_rows[STATE_LABELS.index(label)]
        rows.append(list(v))
        bounds.append(hi - pc.slack_min)
        rows.append(list(-v))
        bounds.append(-(lo - pc.slack_max))
    return np.array(rows), np.array(bounds)


def bound_q_extrema(A: np.ndarray, b: np.ndarray,
                    objective: np.ndarray,
                    feas_tol: float = 1e-12) -> tuple[float, float]:
    """Exact (min, max) of objective . q over {q : A q <= b}."""
    poly = Polytope(A, b, feas_tol)
    if poly.is_empty:
        raise InfeasibleStatisticsError(
            "no transmission rates are consistent with the observed yields")
    return poly.extrema(objective)


def transmission_rates(coeffs: CoefficientSet, yields: dict,
                       feas_tol: float = 1e-12) -> TransmissionRates:
    A, b = build_inequality_system(coeffs, yields)
    poly = Polytope(A, b, feas_tol)
    if poly.is_empty:
        raise InfeasibleStatisticsError(
            "no transmission rates are consistent with the observed yields")
    vertices = poly.vertices
    intervals = {}
    for k, name in enumerate(("I", "X", "Y", "Z")):
        col = vertices[:, k]
        intervals[name] = (float(col.min()), float(col.max()))
    return TransmissionRates(constraint_matrix=A, constraint_bounds=b,
                             vertices=vertices, intervals=intervals)


def virtual_yield_interval(virt: VirtualCoefficients,
                           rates: TransmissionRates) -> tuple[float, float]:
    """Bounds on one virtual yield over the feasible transmission rates.

    The yield equals (1/4) * prep_probability * [robust_weight * (V_vir . q)
    + leak contribution]; the leak contribution lies between the slack
    eigenvalues for any physical measurement.
    """
    f = virt.robust_weight
    if f > 0.0:
        objective = f * np.array(virt.bloch.as_tuple())
        mn, mx = rates.extrema(objective)
    else:
        mn = mx = 0.0
    lo = 0.25 * virt.prep_probability * (mn + virt.slack_min)
    hi = 0.25 * virt.prep_probability * (mx + virt.slack_max)
    return (max(lo, 0.0), max(hi, 0.0))


def phase_error_interval(yield_bounds: dict) -> tuple[float, float]:
    """Bounds on errors / total from per-(bit, outcome) yield intervals.

    ``yield_bounds`` maps (j, s) to (low, high); mismatched outcomes are
    errors.  Numerator and denominator are bounded separately, which is
    conservative for the ratio.
    """
    num_lo = yield_bounds[(0, 1)][0] + yield_bounds[(1, 0)][0]
    num_hi = yield_bounds[(0, 1)][1] + yield_bounds[(1, 0)][1]
    match_lo = yield_bounds[(0, 0)][0] + yield_bounds[(1, 1)][0]
    match_hi = yield_bounds[(0, 0)][1] + yield_bounds[(1, 1)][1]
    if num_hi + match_lo <= 0.0:
        raise UndefinedStatisticsError(
            "phase-error denominator is not bounded away from zero")
    upper = min(num_hi / (num_hi + match_lo), 1.0)
    if num_lo + match_hi <= 0.0:
        lower = 0.0
    else:
        lower = max(num_lo / (num_lo + match_hi), 0.0)
    return (lower, min(max(upper, lower), 1.0))


def c_parameter_lower(phase_intervals: dict) -> float:
    """Certified lower bound on the sum of squared X/Y correlations.

    Each pair contributes (1 - 2E)^2 minimized over its error interval:
    zero when the interval straddles 1/2, otherwise the smaller endpoint
    contribution.
    """
    total = 0.0
    for pair in PAIR_LABELS:
        lo, hi = phase_intervals[pair]
        lo = min(max(lo, 0.0), 1.0)
        hi = min(max(hi, 0.0), 1.0)
        if lo <= 0.5 <= hi:
            continue
        total += min((1.0 - 2.0 * lo) ** 2, (1.0 - 2.0 * hi) ** 2)
    return total


def eve_information(c_lower: float, e_zz_upper: float) -> tuple[float, float]:
    """Upper bound (i_eve, v_max) on Eve's information per sifted key bit.

    Valid only below the abort threshold; raises SecurityAbort otherwise.
    Correlation arguments are capped at 1 so the entropy terms stay in
    domain when the certified C exceeds what the bit error admits.
    """
    if not 0.0 <= e_zz_upper <= 1.0:
        raise ValueError(f"bit error rate out of range: {e_zz_upper!r}")
    if e_zz_upper >= E_ZZ_ABORT:
        raise SecurityAbort(
            f"bit error {e_zz_upper:.4f} >= abort threshold {E_ZZ_ABORT}")
    c = min(max(c_lower, 0.0), 4.0)
    half_c = c / 2.0
    v_max = min(math.sqrt(half_c) / (1.0 - e_zz_upper), 1.0)
    info = (1.0 - e_zz_upper) * binary_entropy((1.0 + v_max) / 2.0)
    if e_zz_upper > 0.0:
        residual = max(half_c - (1.0 - e_zz_upper) ** 2 * v_max ** 2, 0.0)
        f_corr = min(math.sqrt(residual) / e_zz_upper, 1.0)
        info += e_zz_upper * binary_entropy((1.0 + f_corr) / 2.0)
    return (min(max(info, 0.0), 1.0), v_max)


def analyze(coeffs: CoefficientSet, yield_intervals: dict, e_zz_upper: float,
            feas_tol: float = 1e-12) -> SecuritySummary:
    """Full bound chain for one channel configuration.

    ``yield_intervals`` maps (bob_basis, outcome) for bases X and Y to a
    per-state-label dict of (low, high) conditional click probabilities.
    Raises SecurityAbort (with the partial summary attached) when the bit
    error exceeds the abort threshold.
    """
    rates = {key: transmission_rates(coeffs, yields, feas_tol)
             for key, yields in yield_intervals.items()}
    phase_lower = {}
    phase_upper = {}
    for pair in PAIR_LABELS:
        alice_basis, bob_basis = pair[0], pair[1]
        bounds = {}
        for j in (0, 1):
            virt = coeffs.virtual[(alice_basis, j)]
            for s in (0, 1):
                bounds[(j, s)] = virtual_yield_interval(virt,
                                                        rates[(bob_basis, s)])
        lo, hi = phase_error_interval(bounds)
        phase_lower[pair] = lo
        phase_upper[pair] = hi
    c_low = c_parameter_lower({pair: (phase_lower[pair], phase_upper[pair])
                               for pair in PAIR_LABELS})
    try:
        i_eve, v_max = eve_information(c_low, e_zz_upper)
    except SecurityAbort as exc:
        exc.summary = SecuritySummary(phase_error_lower=phase_lower,
                                      phase_error_upper=phase_upper,
                                      c_lower=c_low, e_zz_upper=e_zz_upper,
                                      v_max=0.0, i_eve_upper=1.0)
        raise
    return SecuritySummary(phase_error_lower=phase_lower,
                           phase_error_upper=phase_upper,
                           c_lower=c_low, e_zz_upper=e_zz_upper,
                           v_max=v_max, i_eve_upper=i_eve)
