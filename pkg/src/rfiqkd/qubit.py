"""Small qubit-space numerics shared by the rest of the package.

Pure states are stored as amplitudes on the computational basis with the
global phase fixed so that the |0> amplitude is real and non-negative.
Bloch decompositions follow rho = (1/2)(p_i*I + p_x*sx + p_y*sy + p_z*sz),
so a pure state always has p_i = 1 and |p| = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class PureQubitState:
    """Normalized qubit amplitudes (amp0, amp1_re, amp1_im), amp0 >= 0."""

    amp0: float
    amp1_re: float
    amp1_im: float

    def __post_init__(self) -> None:
        norm = self.amp0 ** 2 + self.amp1_re ** 2 + self.amp1_im ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state is not normalized: |amp|^2 = {norm!r}")
        if self.amp0 < 0.0:
            raise ValueError("amp0 must be non-negative (fixed global phase)")

    @property
    def amp1(self) -> complex:
        return complex(self.amp1_re, self.amp1_im)


@dataclass(frozen=True)
class BlochVector:
    """Coefficients (i, x, y, z) of a 2x2 density operator on (I, sx, sy, sz)/2."""

    i: float
    x: float
    y: float
    z: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.i, self.x, self.y, self.z)

    def dot(self, other: "BlochVector") -> float:
        return self.i * other.i + self.x * other.x + self.y * other.y + self.z * other.z


@dataclass(frozen=True)
class Herm2:
    """Hermitian 2x2 matrix [[a11, a12], [conj(a12), a22]]."""

    a11: float
    a22: float
    a12_re: float = 0.0
    a12_im: float = 0.0


def state_from_angles(amp_angle: float, phase: float) -> PureQubitState:
    """Build cos(amp_angle)|0> + sin(amp_angle) e^{i phase}|1>, phase-fixed.

    If cos(amp_angle) < 0 the state is multiplied by -1 so the stored |0>
    amplitude stays non-negative.
    """
    if not (math.isfinite(amp_angle) and math.isfinite(phase)):
        raise ValueError("angles must be finite")
    a0 = math.cos(amp_angle)
    mag1 = math.sin(amp_angle)
    a1_re = mag1 * math.cos(phase)
    a1_im = mag1 * math.sin(phase)
    if a0 < 0.0:
        a0, a1_re, a1_im = -a0, -a1_re, -a1_im
    return PureQubitState(a0, a1_re, a1_im)


def bloch_of(state: PureQubitState) -> BlochVector:
    """Bloch coefficients of |state><state|; the identity component is 1."""
    a0 = state.amp0
    return BlochVector(
        i=1.0,
        x=2.0 * a0 * state.amp1_re,
        y=2.0 * a0 * state.amp1_im,
        z=a0 * a0 - (state.amp1_re ** 2 + state.amp1_im ** 2),
    )


def eig2(m: Herm2) -> tuple[float, float]:
    """Eigenvalues of a Hermitian 2x2 matrix, ascending.

    Closed form lam = (tr +/- sqrt((a11-a22)^2 + 4|a12|^2)) / 2; the
    difference form of the discriminant avoids cancellation in tr^2 - 4 det.
    """
    tr = m.a11 + m.a22
    gap = math.hypot(m.a11 - m.a22, 2.0 * math.hypot(m.a12_re, m.a12_im))
    return ((tr - gap) / 2.0, (tr + gap) / 2.0)


def binary_entropy(x: float) -> float:
    """Binary entropy h(x) in bits, with h(0) = h(1) = 0.

    Inputs within 1e-12 outside [0, 1] are clamped (they occur as rounding
    residue of probability arithmetic); anything further out is rejected.
    """
    if x < 0.0:
        if x < -_NORM_TOL:
            raise ValueError(f"binary_entropy domain error: {x!r}")
        x = 0.0
    elif x > 1.0:
        if x > 1.0 + _NORM_TOL:
            raise ValueError(f"binary_entropy domain error: {x!r}")
        x = 1.0
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)
