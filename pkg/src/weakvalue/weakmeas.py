"""Weak measurement of the path projector through the photon's polarization.

The probability of detecting V after postselection is rescaled into the
normalized readout ``R = (P_V - sin²θ) / G``.  R equals 1 for a photon
certainly in path A at any strength, equals the ABL probability at G = 1, and
tends to the real part of the weak value as G -> 0.  The weak value is
recovered from finite-G data by least-squares fitting of the exact model
``R(G; p_A)`` in the single parameter ``p_A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import RangeError, UndefinedReadoutError, ValidationError
from .optics import MeasurementStrength, as_strength, run_interferometer


@dataclass(frozen=True)
class ReadoutPoint:
    G: float
    P_V: float
    R: float
    sigma: float = 0.0  # one-standard-error on R; 0 for exact points


@dataclass(frozen=True)
class CountRecord:
    G: float
    counts_V: int
    counts_H: int
    trials: int
    seed: int
    background_rate: float = 0.0

    def __post_init__(self):
        if self.counts_V < 0 or self.counts_H < 0:
            raise ValidationError("counts must be nonnegative")
        if self.counts_V + self.counts_H > self.trials:
            raise ValidationError("more detections than trials")

    @property
    def detected(self) -> int:
        return self.counts_V + self.counts_H

    @property
    def ratio_V(self) -> float:
        if self.detected == 0:
            raise UndefinedReadoutError(f"no detections recorded at G={self.G}")
        return self.counts_V / self.detected


@dataclass(frozen=True)
class SweepCurve:
    p_A: float
    points: tuple[ReadoutPoint, ...]
    meta: dict = field(default_factory=dict)

    @property
    def G(self) -> np.ndarray:
        return np.array([pt.G for pt in self.points])

    @property
    def R(self) -> np.ndarray:
        return np.array([pt.R for pt in self.points])


def conditional_prob_V(p_A: float, strength: MeasurementStrength | float) -> float:
    """P(V|φ) from the simulated interferometer output."""
    run = run_interferometer(p_A, strength)
    return float(abs(run.output_polarization.amplitude("V")) ** 2)


def readout(P_V: float, strength: MeasurementStrength | float) -> float:
    s = as_strength(strength)
    if s.G == 0.0:
        raise UndefinedReadoutError("normalized readout is undefined at G = 0")
    return (P_V - s.sin_theta**2) / s.G


def readout_closed_form(p_A, G):
    """R(G; p_A) in closed form; broadcasts over numpy arrays.

    With c = sin 2θ = √(1 - G²):
    R = (p² - p(p-1)c) / (p² + (p-1)² - 2p(p-1)c).
    """
    p = np.asarray(p_A, dtype=float)
    c = np.sqrt(1.0 - np.asarray(G, dtype=float) ** 2)
    cross = p * (p - 1.0)
    out = (p * p - cross * c) / (p * p + (p - 1.0) ** 2 - 2.0 * cross * c)
    return out if out.ndim else float(out)


def readout_point(p_A: float, G: float) -> ReadoutPoint:
    s = as_strength(G)
    P_V = conditional_prob_V(p_A, s)
    return ReadoutPoint(s.G, P_V, readout(P_V, s))


def readout_curve(p_A: float, G_grid: Iterable[float]) -> SweepCurve:
    grid = [float(g) for g in G_grid]
    for g in grid:
        if not 0.0 < g <= 1.0:
            raise RangeError(f"readout grid values must lie in (0, 1], got {g}")
    return SweepCurve(float(p_A), tuple(readout_point(p_A, g) for g in grid))


def synthesize_counts(
    p_A: float,
    strength: MeasurementStrength | float,
    trials: int,
    seed: int,
    background_rate: float = 0.0,
) -> CountRecord:
    """Seeded photon counts for one setting of G.

    Each trial either passes the postselection (probability from the
    interferometer) and lands in H or V with the exact conditional
    probabilities, or fails; a failed trial registers a background click
    with probability ``background_rate``, split evenly between H and V.
    Background therefore grows relative to signal as the postselection
    probability drops.
    """
    if trials <= 0:
        raise RangeError(f"trials must be positive, got {trials}")
    if not 0.0 <= background_rate <= 1.0:
        raise RangeError(f"background_rate must lie in [0, 1], got {background_rate}")
    s = as_strength(strength)
    run = run_interferometer(p_A, s)
    q = run.postselect_prob
    pv = float(abs(run.output_polarization.amplitude("V")) ** 2)
    noise = (1.0 - q) * background_rate
    probs = [q * pv, q * (1.0 - pv), noise / 2, noise / 2, (1.0 - q) * (1.0 - background_rate)]
    rng = np.random.default_rng(seed)
    sig_v, sig_h, bg_v, bg_h, _ = rng.multinomial(trials, probs)
    return CountRecord(
        G=s.G,
        counts_V=int(sig_v + bg_v),
        counts_H=int(sig_h + bg_h),
        trials=int(trials),
        seed=int(seed),
        background_rate=float(background_rate),
    )


def synthesize_sweep(
    p_A: float,
    G_grid: Iterable[float],
    trials: int,
    seed: int,
    background_rate: float = 0.0,
) -> list[CountRecord]:
    """One record per G, each with its own 64-bit seed derived from ``seed``.

    Each record stores its point seed, so any single row can be regenerated
    with :func:`synthesize_counts`.
    """
    grid = list(G_grid)
    seeds = np.random.SeedSequence(seed).generate_state(len(grid), np.uint64)
    return [
        synthesize_counts(p_A, g, trials, int(k), background_rate)
        for g, k in zip(grid, seeds)
    ]


def counts_to_point(record: CountRecord) -> ReadoutPoint:
    """Readout from counts with G taken as exact; σ is binomial."""
    s = as_strength(record.G)
    f = record.ratio_V
    sigma = math.sqrt(f * (1.0 - f) / record.detected) / s.G if s.G > 0 else math.inf
    return ReadoutPoint(s.G, f, readout(f, s), sigma)


def estimate_strength(ref_one: CountRecord, ref_zero: CountRecord) -> float:
    """Empirical G from reference runs with p_A = 1 (R=1) and p_A = 0 (R=0)."""
    return ref_one.ratio_V - ref_zero.ratio_V


def calibrate(record: CountRecord, ref_one: CountRecord, ref_zero: CountRecord) -> ReadoutPoint:
    """Affine recalibration of the counting ratio against the two references.

    R = (f - f0) / (f1 - f0), so the references read exactly 1 and 0.
    """
    f, f1, f0 = record.ratio_V, ref_one.ratio_V, ref_zero.ratio_V
    scale = f1 - f0
    if scale <= 0:
        raise UndefinedReadoutError("reference runs do not resolve V from H")
    sigma = math.sqrt(f * (1.0 - f) / record.detected) / scale
    return ReadoutPoint(record.G, f, (f - f0) / scale, sigma)


INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, a: float, b: float, tol: float = 1e-9) -> float:
    """Minimizer of a unimodal ``f`` on [a, b], to absolute tolerance ``tol``."""
    c, d = b - INV_PHI * (b - a), a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (a + b) / 2.0


@dataclass(frozen=True)
class FitResult:
    p_A: float
    residual: float  # RMS of R - model
    stderr: float  # propagated from per-point sigma; 0 for exact inputs

    def __iter__(self):
        return iter((self.p_A, self.residual))


def _as_points(samples: Sequence[ReadoutPoint | CountRecord]) -> list[ReadoutPoint]:
    return [counts_to_point(s) if isinstance(s, CountRecord) else s for s in samples]


def fit_weak_value(
    samples: Sequence[ReadoutPoint | CountRecord],
    bounds: tuple[float, float] = (-10.0, 10.0),
    tol: float = 1e-9,
    n_scan: int = 2001,
) -> FitResult:
    """Least-squares estimate of p_A from readouts at several strengths.

    The sum of squares is not unimodal over wide bounds (R -> 1/2 as
    |p_A| -> ∞), so a uniform scan brackets the global minimum before a
    bounded scalar minimization refines it to ``tol``.
    """
    points = _as_points(samples)
    if len(points) < 2 or len({pt.G for pt in points}) < 2:
        raise ValidationError("fit needs at least two samples with distinct G")
    G = np.array([pt.G for pt in points])
    R = np.array([pt.R for pt in points])
    sigma = np.array([pt.sigma for pt in points])
    if np.any(G <= 0):
        raise RangeError("fit samples need G > 0")

    def sse(p):
        return float(np.sum((R - readout_closed_form(p, G)) ** 2))

    lo, hi = bounds
    scan = np.linspace(lo, hi, n_scan)
    k = int(np.argmin([sse(p) for p in scan]))
    a, b = scan[max(k - 1, 0)], scan[min(k + 1, n_scan - 1)]
    p_hat = golden_section(sse, a, b, tol)
    rms = math.sqrt(sse(p_hat) / len(points))

    h = 1e-6
    jac = (readout_closed_form(p_hat + h, G) - readout_closed_form(p_hat - h, G)) / (2 * h)
    stderr = float(math.sqrt(np.sum((jac * sigma) ** 2)) / np.sum(jac**2))
    return FitResult(p_hat, rms, stderr)
