"""Threshold-detector channel model and simulated measurement records.

Transmission and detection
--------------------------
A photon survives fibre plus detector with probability
``t = eta_det * 10^(-alpha * L / 10)``.  Bob measures Z, X or Y; his X/Y
frame is rotated by a slow drift angle omega relative to Alice's:

    X_B = cos(omega) X_A + sin(omega) Y_A
    Y_B = cos(omega) Y_A - sin(omega) X_A

so Z statistics are drift-free.  Each basis uses two threshold detectors
with dark-count probability p_dark per gate.  Writing A0, A1, An for the
probabilities that no photon arrives at detector 0, detector 1, either
detector, the assigned-outcome probabilities are

    only0 = (A1 - An)(1 - p_dark) + An p_dark (1 - p_dark)
    both  = (1 - A0 - A1 + An) + (A0 + A1 - 2 An) p_dark + An p_dark^2
    y0    = only0 + both / 2          (double clicks split evenly)

and symmetrically for y1; the gain is 1 - An (1 - p_dark)^2.  For an
n-photon pulse with Born probability p0 on detector 0,
A0 = (1 - t p0)^n, A1 = (1 - t p1)^n, An = (1 - t)^n; for a phase-
randomized weak coherent pulse of intensity mu the Poisson mixture gives
A0 = exp(-mu t p0), A1 = exp(-mu t p1), An = exp(-mu t).

Leaked modes and back-reflected light do not disturb these statistics;
they only enter the security analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .qubit import BlochVector
from .source import STATE_LABELS, EmittedState

BASIS_LABELS = ("Z", "X", "Y")

# Basis-pair aggregates are averaged over the states Alice sends in that
# basis; the expected outcome of each state defines what counts as an
# error.
_ALICE_BASIS_STATES = {"Z": ("0Z", "1Z"), "X": ("0X",), "Y": ("0Y",)}
_EXPECTED_OUTCOME = {"0Z": 0, "1Z": 1, "0X": 0, "0Y": 0}


@dataclass(frozen=True)
class ChannelParams:
    distance_km: float
    alpha_db_per_km: float = 0.21
    eta_det: float = 0.2
    p_dark: float = 1e-6
    omega: float = math.pi / 8

    def __post_init__(self) -> None:
        if not math.isfinite(self.distance_km) or self.distance_km < 0.0:
            raise ValueError(f"distance_km must be >= 0, got {self.distance_km!r}")
        if not math.isfinite(self.alpha_db_per_km) or self.alpha_db_per_km < 0.0:
            raise ValueError("alpha_db_per_km must be >= 0")
        if not 0.0 < self.eta_det <= 1.0:
            raise ValueError(f"eta_det must be in (0, 1], got {self.eta_det!r}")
        if not 0.0 <= self.p_dark < 1.0:
            raise ValueError(f"p_dark must be in [0, 1), got {self.p_dark!r}")
        if not math.isfinite(self.omega):
            raise ValueError("omega must be finite")


@dataclass(frozen=True)
class StatsTable:
    """Simulated measurement record of one channel configuration.

    All yields are conditional on the state sent and the basis Bob
    measured.  ``single_photon`` holds the exact one-photon branch;
    ``intensity_yields`` the weak-coherent-pulse values per intensity
    label; pair aggregates average over the states of Alice's basis.
    """

    single_photon: dict
    intensity_yields: dict
    gains: dict
    error_gains: dict
    error_rates: dict
    intensities: dict


def transmittance(ch: ChannelParams) -> float:
    """Overall photon survival probability including detector efficiency."""
    return ch.eta_det * 10.0 ** (-ch.alpha_db_per_km * ch.distance_km / 10.0)


def bob_measurement_bloch(basis: str, outcome: int, omega: float) -> BlochVector:
    """Bloch functional of Bob's projector (I + (-1)^s n . sigma)/2."""
    if basis not in BASIS_LABELS:
        raise ValueError(f"unknown basis {basis!r}")
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    if basis == "Z":
        n = (0.0, 0.0, 1.0)
    elif basis == "X":
        n = (math.cos(omega), math.sin(omega), 0.0)
    else:
        n = (-math.sin(omega), math.cos(omega), 0.0)
    sign = -1.0 if outcome == 1 else 1.0
    return BlochVector(1.0, sign * n[0], sign * n[1], sign * n[2])


def outcome_probability(state_bloch: BlochVector, meas_bloch: BlochVector) -> float:
    """Born probability Tr(rho Pi) = (1 + P . n)/2 from Bloch functionals."""
    return 0.5 * state_bloch.dot(meas_bloch)


def _assigned_probs(a0: float, a1: float, a_none: float,
                    p_dark: float) -> tuple[float, float]:
    only0 = (a1 - a_none) * (1.0 - p_dark) + a_none * p_dark * (1.0 - p_dark)
    only1 = (a0 - a_none) * (1.0 - p_dark) + a_none * p_dark * (1.0 - p_dark)
    both = ((1.0 - a0 - a1 + a_none)
            + (a0 + a1 - 2.0 * a_none) * p_dark
            + a_none * p_dark * p_dark)
    return (only0 + 0.5 * both, only1 + 0.5 * both)


def n_photon_click_probs(p0: float, t: float, p_dark: float,
                         n: int) -> tuple[float, float]:
    """Assigned-outcome probabilities for an n-photon pulse."""
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"Born probability out of range: {p0!r}")
    if n < 0:
        raise ValueError("photon number must be >= 0")
    p1 = 1.0 - p0
    return _assigned_probs((1.0 - t * p0) ** n, (1.0 - t * p1) ** n,
                           (1.0 - t) ** n, p_dark)


def poisson_click_probs(p0: float, t: float, p_dark: float,
                        mu: float) -> tuple[float, float]:
    """Assigned-outcome probabilities for a weak coherent pulse."""
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"Born probability out of range: {p0!r}")
    if mu < 0.0:
        raise ValueError("intensity must be >= 0")
    p1 = 1.0 - p0
    return _assigned_probs(math.exp(-mu * t * p0), math.exp(-mu * t * p1),
                           math.exp(-mu * t), p_dark)


def _born_table(states: dict[str, EmittedState],
                ch: ChannelParams) -> dict[tuple[str, str], float]:
    born = {}
    for label in STATE_LABELS:
        for basis in BASIS_LABELS:
            meas0 = bob_measurement_bloch(basis, 0, ch.omega)
            born[(label, basis)] = outcome_probability(states[label].bloch, meas0)
    return born


def single_photon_yields(states: dict[str, EmittedState],
                         ch: ChannelParams) -> dict[tuple[str, str, int], float]:
    """Exact one-photon assigned-outcome probabilities per (state, basis, s)."""
    t = transmittance(ch)
    born = _born_table(states, ch)
    table = {}
    for (label, basis), p0 in born.items():
        y0, y1 = n_photon_click_probs(p0, t, ch.p_dark, 1)
        table[(label, basis, 0)] = y0
        table[(label, basis, 1)] = y1
    return table


def wcs_statistics(states: dict[str, EmittedState], ch: ChannelParams,
                   intensities: dict[str, float]) -> StatsTable:
    """Full simulated record for a set of pulse intensities.

    ``intensities`` maps labels (e.g. signal/decoy/vacuum) to mean photon
    numbers.  Pair aggregates are keyed by (alice_basis + bob_basis,
    intensity label).
    """
    for name, value in intensities.items():
        if not math.isfinite(value) or value < 0.0:
            raise ValueError(f"intensity {name!r} must be >= 0, got {value!r}")
    t = transmittance(ch)
    born = _born_table(states, ch)

    intensity_yields = {}
    for (label, basis), p0 in born.items():
        for iname, mu in intensities.items():
            y0, y1 = poisson_click_probs(p0, t, ch.p_dark, mu)
            intensity_yields[(label, basis, 0, iname)] = y0
            intensity_yields[(label, basis, 1, iname)] = y1

    gains = {}
    error_gains = {}
    error_rates = {}
    for alice_basis in BASIS_LABELS:
        members = _ALICE_BASIS_STATES[alice_basis]
        for bob_basis in BASIS_LABELS:
            pair = alice_basis + bob_basis
            for iname in intensities:
                gain = 0.0
                err = 0.0
                for label in members:
                    y0 = intensity_yields[(label, bob_basis, 0, iname)]
                    y1 = intensity_yields[(label, bob_basis, 1, iname)]
                    gain += (y0 + y1) / len(members)
                    wrong = 1 - _EXPECTED_OUTCOME[label]
                    err += (y0 if wrong == 0 else y1) / len(members)
                gains[(pair, iname)] = gain
                error_gains[(pair, iname)] = err
                error_rates[(pair, iname)] = err / gain if gain > 0.0 else 0.0

    return StatsTable(single_photon=single_photon_yields(states, ch),
                      intensity_yields=intensity_yields,
                      gains=gains, error_gains=error_gains,
                      error_rates=error_rates,
                      intensities=dict(intensities))


def single_photon_pair_stats(single_photon: dict, alice_basis: str,
                             bob_basis: str) -> tuple[float, float]:
    """(gain, error_gain) of the exact one-photon branch for a basis pair."""
    members = _ALICE_BASIS_STATES[alice_basis]
    gain = 0.0
    err = 0.0
    for label in members:
        y0 = single_photon[(label, bob_basis, 0)]
        y1 = single_photon[(label, bob_basis, 1)]
        gain += (y0 + y1) / len(members)
        wrong = 1 - _EXPECTED_OUTCOME[label]
        err += (y0 if wrong == 0 else y1) / len(members)
    return gain, err
