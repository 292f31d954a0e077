"""Weak values of path projectors and the polarization shifts they produce."""

from .errors import (
    NullStateError,
    PhysicsError,
    PostselectionError,
    RangeError,
    StructuralError,
    UndefinedABLError,
    UndefinedReadoutError,
    UndefinedWeakValueError,
    ValidationError,
)
from .hom import (
    PhotonPairConfig,
    VisibilitySweep,
    overlap_visibility,
    pair_visibility,
    symmetric_angle_report,
    visibility_sweep,
)
from .optics import (
    InterferometerRun,
    MeasurementStrength,
    delta_theta,
    hwp,
    preselection_from_weak_value,
    restoration_hwp_angle,
    run_interferometer,
    shift_angle_approx,
    shift_angle_exact,
    strength_from_G,
    strength_from_theta,
)
from .prepost import (
    PrePostSelection,
    WeakValueResult,
    abl_probability,
    three_box_scenario,
    weak_value,
    weak_value_sum,
)
from .qcore import Operator, StateVector, apply, inner, ket, normalize, tensor
from .weakmeas import (
    CountRecord,
    ReadoutPoint,
    conditional_prob_V,
    fit_weak_value,
    readout,
    readout_curve,
    synthesize_counts,
)

__version__ = "0.1.0"
