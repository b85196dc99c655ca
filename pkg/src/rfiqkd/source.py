"""Transmitter model: flawed signal states and their security coefficients.

The four signal states are qubit states with encoding flaws (intensity- and
phase-modulation offsets).  Each emitted pulse additionally carries

* a mode leak: with amplitude sin(theta) the encoded state leaves the
  intended optical mode, so only cos(theta) of it stays in the qubit space
  that Bob's measurement is calibrated for, and
* a back-reflection tag: an eavesdropper injecting light of intensity
  gamma into the transmitter gets back a field that is vacuum with
  amplitude t_i = e^{-gamma/2} and a state-dependent pointer with
  amplitude t_d = sqrt(1 - e^{-gamma}).

Pointer states for distinct signals are taken mutually orthogonal and the
leaked-mode copy of a signal mirrors its qubit amplitudes; both are the
adversarially worst case consistent with the intensity constraint.

For each emitted state, ``practical_coefficients`` splits the detection
probability into a part that transforms like the flawed qubit (weight
``robust_weight``) plus a bounded remainder whose extreme contributions are
the eigenvalues of a 2x2 coherence matrix.  ``virtual_coefficients`` does
the same for the states Alice would have sent had she measured her half of
the key-generation entangled pair in the X or Y basis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .qubit import BlochVector, Herm2, PureQubitState, bloch_of, eig2, state_from_angles

STATE_LABELS = ("0Z", "1Z", "0X", "0Y")

_CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class SourceSpec:
    """Encoding flaws plus leak/back-reflection strengths of the transmitter.

    Angles are radians.  ``theta_mode`` selects how the mode-leak angle is
    assigned: "independent" applies ``theta`` to every state, "dependent"
    scales a per-state modulation footprint by ``theta_hat``.
    """

    delta_im1: float = 0.0
    delta_im2: float = 0.0
    delta_bs1: float = 0.0
    delta_bs2: float = 0.0
    delta_pm1: float = 0.0
    delta_pm2: float = 0.0
    theta_mode: str = "independent"
    theta: float = 0.0
    theta_hat: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        for name in ("delta_im1", "delta_im2", "delta_bs1", "delta_bs2",
                     "delta_pm1", "delta_pm2", "theta", "theta_hat", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.theta_mode not in ("independent", "dependent"):
            raise ValueError(f"unknown theta_mode {self.theta_mode!r}")
        if self.gamma < 0.0:
            raise ValueError("gamma must be non-negative")


@dataclass(frozen=True)
class TrojanAmplitudes:
    """Vacuum amplitude t_i and pointer amplitude t_d of the reflected field."""

    t_i: float
    t_d: float


@dataclass(frozen=True)
class EmittedState:
    label: str
    qubit: PureQubitState
    bloch: BlochVector
    theta: float


@dataclass(frozen=True)
class PracticalCoefficients:
    """Decomposition weights of one emitted state's detection probability.

    robust_weight multiplies the flawed-qubit Bloch functional; the leak
    and back-reflection remainder contributes between slack_min and
    slack_max for any physical measurement.
    """

    robust_weight: float
    leak_weight: float
    coherence: float
    trojan_weight: float
    slack_min: float
    slack_max: float


@dataclass(frozen=True)
class VirtualCoefficients:
    """Same decomposition for a virtual X/Y preparation on the key states."""

    robust_weight: float
    coherence: float
    leaked_weight: float
    slack_min: float
    slack_max: float
    prep_probability: float
    bloch: BlochVector


@dataclass(frozen=True)
class CoefficientSet:
    states: dict
    practical: dict
    virtual: dict
    trojan: TrojanAmplitudes


def build_flawed_states(spec: SourceSpec) -> dict[str, EmittedState]:
    """The four signal states with their mode-leak angles, keyed by label."""
    thetas = theta_assignment(spec)
    qubits = {
        "0Z": state_from_angles(spec.delta_im1 / 2.0, 0.0),
        "1Z": state_from_angles(math.pi / 2.0 - spec.delta_im2 / 2.0, 0.0),
        "0X": state_from_angles(math.pi / 4.0 - spec.delta_bs1 / 2.0, spec.delta_pm1),
        "0Y": state_from_angles(math.pi / 4.0 - spec.delta_bs2 / 2.0,
                                math.pi / 2.0 + spec.delta_pm2),
    }
    return {
        label: EmittedState(label, q, bloch_of(q), thetas[label])
        for label, q in qubits.items()
    }


def theta_assignment(spec: SourceSpec) -> dict[str, float]:
    """Mode-leak angle per state label.

    In dependent mode the leak grows with how much each modulator has to
    work: the Z states carry their intensity-modulation offset plus a full
    pulse-carving swing, the X state its phase offset, and the Y state the
    quarter-wave phase plus its offset, all scaled by theta_hat.
    """
    if spec.theta_mode == "independent":
        return {label: spec.theta for label in STATE_LABELS}
    th = spec.theta_hat
    return {
        "0Z": (spec.delta_im1 / 2.0 + math.pi) * th,
        "1Z": (spec.delta_im2 / 2.0 + math.pi) * th,
        "0X": spec.delta_pm1 * th,
        "0Y": (spec.delta_pm2 + math.pi / 2.0) * th,
    }


def trojan_amplitudes(gamma: float) -> TrojanAmplitudes:
    """Reflected-field split for back-reflected intensity gamma."""
    if not math.isfinite(gamma) or gamma < 0.0:
        raise ValueError(f"gamma must be finite and non-negative, got {gamma!r}")
    return TrojanAmplitudes(t_i=math.exp(-gamma / 2.0),
                            t_d=math.sqrt(1.0 - math.exp(-gamma)))


def practical_coefficients(state: EmittedState,
                           trojan: TrojanAmplitudes) -> PracticalCoefficients:
    ct, st = math.cos(state.theta), math.sin(state.theta)
    ti2 = trojan.t_i ** 2
    td2 = trojan.t_d ** 2
    m = ct * ct * ti2
    leak = st * st * (ti2 + td2)
    n = ct * st * ti2
    p = ct * ct * td2
    lo, hi = eig2(Herm2(a11=leak, a22=p, a12_re=n))
    return PracticalCoefficients(robust_weight=m, leak_weight=leak, coherence=n,
                                 trojan_weight=p, slack_min=lo, slack_max=hi)


def virtual_coefficients(spec: SourceSpec, trojan: TrojanAmplitudes,
                         alice_basis: str, j: int) -> VirtualCoefficients:
    """Coefficients for Alice's virtual preparation of bit j in X or Y.

    The virtual state is the (un-normalized) superposition of the two
    emitted key states with relative phase (-1)^j for X and (-1)^j i for
    Y.  Weights are squared norms of its robust and leaked branches; the
    coherence is exactly sqrt(robust * leaked) because both branch
    amplitudes are non-negative.
    """
    if alice_basis not in ("X", "Y"):
        raise ValueError(f"virtual basis must be X or Y, got {alice_basis!r}")
    if j not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {j!r}")

    thetas = theta_assignment(spec)
    th0, th1 = thetas["0Z"], thetas["1Z"]
    c0, s0 = math.cos(th0), math.sin(th0)
    c1, s1 = math.cos(th1), math.sin(th1)
    ti2 = trojan.t_i ** 2
    td2 = trojan.t_d ** 2
    # Overlap of the two key states; it survives in the leaked mode too
    # because the leak mirrors the qubit amplitudes.
    overlap = math.sin((spec.delta_im1 + spec.delta_im2) / 2.0)
    phase = 1.0 if alice_basis == "X" else 1j
    sign = (-1.0 if j == 1 else 1.0) * phase.real

    f = ti2 * (c0 * c0 + c1 * c1 + 2.0 * sign * overlap * c0 * c1)
    h = 2.0 * td2 + ti2 * (s0 * s0 + s1 * s1 + 2.0 * sign * overlap * s0 * s1)
    f = max(f, 0.0)
    h = max(h, 0.0)
    g = math.sqrt(f * h)
    lo, hi = eig2(Herm2(a11=h, a22=0.0, a12_re=g))

    prep = 0.5 * (1.0 + sign * ti2 * overlap * (c0 * c1 + s0 * s1))
    if f < _CONSISTENCY_TOL and h < _CONSISTENCY_TOL and prep > _CONSISTENCY_TOL:
        raise ValueError(
            "inconsistent virtual decomposition: zero branch weights with "
            f"non-zero preparation probability {prep!r}")
    if abs(prep - (f + h) / 4.0) > _CONSISTENCY_TOL:
        raise ValueError(
            "inconsistent virtual decomposition: preparation probability "
            f"{prep!r} does not match branch weights ({f!r}, {h!r})")

    # Raw encoding amplitudes, not the stored sign-fixed states: fixing
    # each state's global phase separately can flip the relative sign
    # inside the superposition (the 1Z amplitude angle passes pi/2 for
    # negative flaws), which would swap the j = 0 and j = 1 branches.
    a0, a1 = math.cos(spec.delta_im1 / 2.0), complex(math.sin(spec.delta_im1 / 2.0))
    b0, b1 = math.sin(spec.delta_im2 / 2.0), complex(math.cos(spec.delta_im2 / 2.0))
    rel = (phase if j == 0 else -phase)
    g0 = c0 * a0 + rel * c1 * b0
    g1 = c0 * a1 + rel * c1 * b1
    norm2 = abs(g0) ** 2 + abs(g1) ** 2
    if norm2 < 1e-24:
        # Fully destructive superposition: the robust branch is absent and
        # its Bloch functional is multiplied by robust_weight = 0 anyway.
        vb = BlochVector(1.0, 0.0, 0.0, 0.0)
    else:
        cross = g0.conjugate() * g1
        vb = BlochVector(
            i=1.0,
            x=2.0 * cross.real / norm2,
            y=2.0 * cross.imag / norm2,
            z=(abs(g0) ** 2 - abs(g1) ** 2) / norm2,
        )
    return VirtualCoefficients(robust_weight=f, coherence=g, leaked_weight=h,
                               slack_min=lo, slack_max=hi,
                               prep_probability=prep, bloch=vb)


def build_coefficients(spec: SourceSpec) -> CoefficientSet:
    """All security coefficients of a transmitter in one bundle."""
    trojan = trojan_amplitudes(spec.gamma)
    states = build_flawed_states(spec)
    practical = {label: practical_coefficients(states[label], trojan)
                 for label in STATE_LABELS}
    virtual = {(basis, j): virtual_coefficients(spec, trojan, basis, j)
               for basis in ("X", "Y") for j in (0, 1)}
    return CoefficientSet(states=states, practical=practical,
                          virtual=virtual, trojan=trojan)
