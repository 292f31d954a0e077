"""Jones calculus and the two-path weak-value interferometer.

A photon in linear polarization ``|L> = cos θ|H> + sin θ|V>`` is split into
paths A and B with amplitudes proportional to ``(p_A, p_A - 1)``, a half-wave
plate acts on one path, and the photon is postselected in ``(|A> - |B>)/√2``.
The weak value of ``|A><A|`` for this selection is exactly ``p_A``.

Two independent routes compute the output polarization:

* :func:`run_interferometer` simulates the tensor-product state with
  :mod:`weakvalue.qcore` (any HWP placement and angle);
* :func:`closed_form_amplitudes` and :func:`shift_angle_exact` evaluate the
  closed expressions for the HWP at π/4 on path A.

All angles are radians.  Polarization directions are reported as the ray
representative with a non-negative H amplitude, i.e. in ``(-π/2, π/2]``,
which is the branch of the principal arctangent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PostselectionError, RangeError, StructuralError
from .prepost import PrePostSelection
from .qcore import (
    ATOL,
    Operator,
    StateVector,
    apply,
    basis_projector,
    bra_on_first,
    identity,
    ket,
    kron,
    normalize,
    tensor,
)

PATHS = ("A", "B")
POLS = ("H", "V")


@dataclass(frozen=True)
class MeasurementStrength:
    """Which-path correlation ``G = cos²θ - sin²θ`` and its angle θ."""

    G: float
    theta: float

    @property
    def cos_theta(self) -> float:
        return math.sqrt((1.0 + self.G) / 2.0)

    @property
    def sin_theta(self) -> float:
        return math.sqrt((1.0 - self.G) / 2.0)


def strength_from_G(G: float) -> MeasurementStrength:
    G = float(G)
    if not 0.0 <= G <= 1.0:
        raise RangeError(f"G must lie in [0, 1], got {G}")
    theta = math.atan2(math.sqrt((1.0 - G) / 2.0), math.sqrt((1.0 + G) / 2.0))
    return MeasurementStrength(G, theta)


# name kept for callers that think of it as "solve for theta given G"
theta_from_strength = strength_from_G


def strength_from_theta(theta: float) -> MeasurementStrength:
    theta = float(theta)
    if not 0.0 <= theta <= math.pi / 4 + ATOL:
        raise RangeError(f"theta must lie in [0, pi/4], got {theta}")
    theta = min(theta, math.pi / 4)
    return MeasurementStrength(math.cos(2.0 * theta), theta)


def as_strength(strength: MeasurementStrength | float) -> MeasurementStrength:
    if isinstance(strength, MeasurementStrength):
        return strength
    return strength_from_G(strength)


def delta_theta(strength: MeasurementStrength | float) -> float:
    """Polarization shift for a photon certainly in path A: π/2 - 2θ = arcsin G."""
    return math.pi / 2 - 2.0 * as_strength(strength).theta


def hwp(chi: float) -> Operator:
    """Half-wave plate with fast axis at ``chi``; maps direction a to 2χ - a."""
    c, s = math.cos(2.0 * chi), math.sin(2.0 * chi)
    return Operator(np.array([[c, s], [s, -c]]), POLS, POLS, f"HWP({chi:.6g})")


def linear_polarization(angle: float) -> StateVector:
    return ket(POLS, [math.cos(angle), math.sin(angle)])


def polarization_angle(state: StateVector) -> float:
    """Direction of a linearly polarized state, in (-π/2, π/2]."""
    if state.labels != POLS:
        raise StructuralError(f"expected a polarization state, got {state.labels}")
    amps = state.amplitudes
    k = int(np.argmax(np.abs(amps)))
    amps = amps * (abs(amps[k]) / amps[k])  # strip global phase
    if np.max(np.abs(amps.imag)) > 1e-9 * max(1.0, np.max(np.abs(amps))):
        raise StructuralError("state is not linearly polarized")
    a_h, a_v = float(amps[0].real), float(amps[1].real)
    if a_h < 0 or (a_h == 0 and a_v < 0):
        a_h, a_v = -a_h, -a_v
    return math.atan2(a_v, a_h)


def preselection_from_weak_value(p_A: float) -> StateVector:
    """Path state (p_A|A> + (p_A - 1)|B>)/√n."""
    state, _ = normalize(ket(PATHS, [p_A, p_A - 1.0]))
    return state


def postselection() -> StateVector:
    return ket(PATHS, [1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)])


def two_path_selection(p_A: float) -> PrePostSelection:
    return PrePostSelection.create(preselection_from_weak_value(p_A), postselection())


def hwp1_angle_from_weak_value(p_A: float) -> float:
    """HWP1 angle η preparing the path preselection, with (cos2η, sin2η) ∝ (p_A, p_A-1)."""
    return 0.5 * math.atan2(p_A - 1.0, p_A)


def weak_value_from_hwp1_angle(eta: float) -> float:
    c, s = math.cos(2.0 * eta), math.sin(2.0 * eta)
    if abs(c - s) <= ATOL:
        raise RangeError("HWP1 angle yields an orthogonal pre/post-selection")
    return c / (c - s)


@dataclass(frozen=True, eq=False)
class InterferometerRun:
    p_A: float
    strength: MeasurementStrength
    hwp_path: str
    hwp_angle: float
    output_polarization: StateVector
    output_angle: float
    postselect_prob: float

    @property
    def shift(self) -> float:
        return self.output_angle - self.strength.theta


def run_interferometer(
    p_A: float,
    strength: MeasurementStrength | float,
    hwp_path: str = "A",
    hwp_angle: float = math.pi / 4,
) -> InterferometerRun:
    """Simulate the interferometer on the path⊗polarization space."""
    strength = as_strength(strength)
    if hwp_path not in PATHS:
        raise RangeError(f"hwp_path must be one of {PATHS}, got {hwp_path!r}")
    other = "B" if hwp_path == "A" else "A"
    psi = tensor(preselection_from_weak_value(p_A), linear_polarization(strength.theta))
    plate = kron(basis_projector(PATHS, hwp_path), hwp(hwp_angle)) + kron(
        basis_projector(PATHS, other), identity(POLS)
    )
    out = apply(bra_on_first(postselection(), POLS), apply(plate, psi))
    prob = out.norm ** 2
    if prob <= ATOL**2:
        raise PostselectionError(f"postselection annihilates the state (p_A={p_A})")
    state, _ = normalize(out)
    return InterferometerRun(
        p_A=float(p_A),
        strength=strength,
        hwp_path=hwp_path,
        hwp_angle=float(hwp_angle),
        output_polarization=state,
        output_angle=polarization_angle(state),
        postselect_prob=float(prob),
    )


def closed_form_amplitudes(p_A: float, strength: MeasurementStrength | float) -> tuple[float, float]:
    """Unnormalized (α_H, α_V) = (p sinθ - (p-1) cosθ, p cosθ - (p-1) sinθ)."""
    s = as_strength(strength)
    return (
        p_A * s.sin_theta - (p_A - 1.0) * s.cos_theta,
        p_A * s.cos_theta - (p_A - 1.0) * s.sin_theta,
    )


def closed_form_postselect_prob(p_A: float, strength: MeasurementStrength | float) -> float:
    a_h, a_v = closed_form_amplitudes(p_A, strength)
    return (a_h**2 + a_v**2) / (2.0 * (p_A**2 + (p_A - 1.0) ** 2))


def shift_angle_exact(p_A: float, strength: MeasurementStrength | float) -> float:
    """Rotation of the polarization direction induced by the selection.

    arctan[(p√(1+G) - (p-1)√(1-G)) / (p√(1-G) - (p-1)√(1+G))] - arctan√((1-G)/(1+G))
    """
    G = as_strength(strength).G
    up, dn = math.sqrt(1.0 + G), math.sqrt(1.0 - G)
    num = p_A * up - (p_A - 1.0) * dn
    den = p_A * dn - (p_A - 1.0) * up
    if num == 0.0 and den == 0.0:
        raise PostselectionError(f"postselection annihilates the state (p_A={p_A})")
    direction = math.pi / 2 if den == 0.0 else math.atan(num / den)
    return direction - math.atan(math.sqrt((1.0 - G) / (1.0 + G)))


def shift_angle_approx(p_A: float, G: float) -> float:
    """Weak-coupling shift p_A·G."""
    return p_A * G


def restoration_hwp_angle(run: InterferometerRun, target_theta: float) -> float:
    """HWP angle returning ``run``'s output polarization to ``target_theta``."""
    return 0.5 * (run.output_angle + target_theta)
