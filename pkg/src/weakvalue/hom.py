"""Hong-Ou-Mandel check that both photons were restored to the same polarization.

Photon 1 passes an interferometer with p_A = 1 and HWP4; photon 2 passes one
with p_A <= 0 and HWP5.  At zero delay with perfect spectral overlap the
coincidence probability at a 50/50 beam splitter is ``(1 - |<s1|s2>|²)/2``,
so the visibility is the squared polarization overlap.  Accidental
coincidences at ratio r to the signal scale it to ``V / (1 + r)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import RangeError, StructuralError
from .optics import (
    MeasurementStrength,
    as_strength,
    delta_theta,
    hwp,
    restoration_hwp_angle,
    run_interferometer,
)
from .qcore import StateVector, apply, inner

EXPERIMENT_G = 0.29
# photon-2 weak values set by the HWP1 angle, and the values read off the
# weak-measurement fits for the same four preparations
HWP1_WEAK_VALUES = (-0.27, -0.57, -0.87, -1.14)
FITTED_WEAK_VALUES = (-0.23, -0.43, -0.72, -0.79)

DEFAULT_STEP = math.radians(0.05)


@dataclass(frozen=True)
class PhotonPairConfig:
    p_A2: float
    strength: MeasurementStrength
    hwp5_angle: float
    p_A1: float = 1.0
    hwp4_angle: float = math.pi / 4
    background_ratio: float = 0.0

    def __post_init__(self):
        if self.background_ratio < 0:
            raise RangeError(f"background_ratio must be >= 0, got {self.background_ratio}")
        object.__setattr__(self, "strength", as_strength(self.strength))


@dataclass(frozen=True)
class VisibilitySweep:
    hwp5_angles: tuple[float, ...]
    relative_angles: tuple[float, ...]
    visibilities: tuple[float, ...]
    argmax_angle: float  # relative to the p_A = 0 reference θ
    max_visibility: float


@dataclass(frozen=True)
class SymmetricAngles:
    exact: float
    paper_symmetric: float  # θ + p_A·Δθ/2
    small_G_mark: float  # θ + p_A·G/2


def overlap_visibility(s1: StateVector, s2: StateVector) -> float:
    if s1.dim != 2 or s2.dim != 2:
        raise StructuralError("visibility is defined for single-photon polarization states")
    if not (s1.is_normalized() and s2.is_normalized()):
        raise StructuralError("visibility needs normalized states")
    return min(1.0, abs(inner(s1, s2)) ** 2)


def background_ratio_from_postselection(
    kappa: float, p_A2: float, strength: MeasurementStrength | float
) -> float:
    """Accidental-to-signal ratio κ / P(postselection) for photon 2."""
    if kappa < 0:
        raise RangeError(f"kappa must be >= 0, got {kappa}")
    return kappa / run_interferometer(p_A2, strength).postselect_prob


def _corrected_states(cfg: PhotonPairConfig):
    s1 = run_interferometer(cfg.p_A1, cfg.strength).output_polarization
    s2 = run_interferometer(cfg.p_A2, cfg.strength).output_polarization
    return apply(hwp(cfg.hwp4_angle), s1), s2


def pair_visibility_from_states(
    s1: StateVector, s2: StateVector, hwp5_angle: float, background_ratio: float = 0.0
) -> float:
    """Visibility of restored photon 1 ``s1`` against photon 2 ``s2`` after HWP5."""
    return overlap_visibility(s1, apply(hwp(hwp5_angle), s2)) / (1.0 + background_ratio)


def pair_visibility(cfg: PhotonPairConfig) -> float:
    s1, s2 = _corrected_states(cfg)
    return pair_visibility_from_states(s1, s2, cfg.hwp5_angle, cfg.background_ratio)


def visibility_sweep(cfg: PhotonPairConfig, hwp5_grid: Sequence[float]) -> VisibilitySweep:
    """Visibility against the HWP5 angle; ``cfg.hwp5_angle`` is ignored.

    The argmax is taken over the samples only, ties going to the smaller angle.
    """
    grid = np.asarray(hwp5_grid, dtype=float)
    if grid.size == 0:
        raise RangeError("HWP5 grid is empty")
    s1, s2 = _corrected_states(cfg)
    (h1, v1), (h2, v2) = s1.amplitudes.conj(), s2.amplitudes
    c, s = np.cos(2.0 * grid), np.sin(2.0 * grid)
    # <s1| HWP(χ) |s2> for every χ at once
    amp = h1 * (c * h2 + s * v2) + v1 * (s * h2 - c * v2)
    vis = np.minimum(np.abs(amp) ** 2, 1.0) / (1.0 + cfg.background_ratio)
    best = vis.max()
    k = min(np.flatnonzero(vis == best), key=lambda i: grid[i])
    theta = cfg.strength.theta
    return VisibilitySweep(
        hwp5_angles=tuple(grid.tolist()),
        relative_angles=tuple((grid - theta).tolist()),
        visibilities=tuple(vis.tolist()),
        argmax_angle=float(grid[k] - theta),
        max_visibility=float(best),
    )


def relative_grid(
    strength: MeasurementStrength | float,
    start: float = -math.pi / 4,
    stop: float = math.pi / 4,
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """Absolute HWP5 angles for relative offsets start..stop around θ."""
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return as_strength(strength).theta + start + step * np.arange(n)


def symmetric_angle_report(p_A2: float, strength: MeasurementStrength | float) -> SymmetricAngles:
    s = as_strength(strength)
    run = run_interferometer(p_A2, s)
    return SymmetricAngles(
        exact=restoration_hwp_angle(run, s.theta),
        paper_symmetric=s.theta + p_A2 * delta_theta(s) / 2,
        small_G_mark=s.theta + p_A2 * s.G / 2,
    )


def default_pair(p_A2: float, strength: MeasurementStrength | float, **kw) -> PhotonPairConfig:
    """Photon 1 at p_A = 1 with HWP4 at π/4; HWP5 starts aligned with |L>."""
    s = as_strength(strength)
    return PhotonPairConfig(p_A2=p_A2, strength=s, hwp5_angle=s.theta, **kw)
