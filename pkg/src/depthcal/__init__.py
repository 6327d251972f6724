"""depthcal: single-image depth estimation via polynomial calibration.

Calibrate a camera mounted horizontally at a fixed height by photographing
objects at known ground distances, fit a polynomial mapping pixel depth
(pixels from the bottom image edge to the object's foot) to real distance,
then answer depth, velocity, and extrapolation queries from that profile.
"""

__version__ = "0.1.0"

from .caldata import (
    CalibrationObservation,
    CalibrationSet,
    Finding,
    parse_calibration_csv,
    serialize_calibration_csv,
    validate_set,
)
from .depthmodel import (
    CameraProfile,
    DepthEstimate,
    MonotonicityViolation,
    VelocityEstimate,
    calibrate,
    check_monotonic,
    estimate_velocity,
    load_profile,
    predict_depth,
    save_profile,
)
from .errors import (
    BlurRangeError,
    CsvFormatError,
    DepthcalError,
    HorizonError,
    InsufficientDataError,
    InsufficientDofError,
    ObjectNotFoundError,
    OutOfViewError,
    ProfileFormatError,
    RankDeficiencyError,
    RowConsistencyError,
)
from .estimator import DepthPolynomialRegressor
from .optics import (
    DefocusCamera,
    GroundPlaneCamera,
    blur_width,
    depth_from_blur,
    generate_synthetic_set,
    invert_projection,
    project_ground_point,
    x0_of_camera,
)
from .pixels import GrayImage, compute_pixel_depth, find_foot_row, read_pgm
from .polyfit import (
    AbscissaScale,
    CoefficientInterval,
    DegreeSweep,
    FitResult,
    FitStats,
    PolynomialModel,
    SweepEntry,
    confidence_intervals,
    evaluate,
    fit_polynomial,
    goodness_of_fit,
    sweep_degrees,
    t_quantile,
)

__all__ = [
    "__version__",
    "AbscissaScale",
    "BlurRangeError",
    "CalibrationObservation",
    "CalibrationSet",
    "CameraProfile",
    "CoefficientInterval",
    "CsvFormatError",
    "DefocusCamera",
    "DegreeSweep",
    "DepthEstimate",
    "DepthPolynomialRegressor",
    "DepthcalError",
    "Finding",
    "FitResult",
    "FitStats",
    "GrayImage",
    "GroundPlaneCamera",
    "HorizonError",
    "InsufficientDataError",
    "InsufficientDofError",
    "MonotonicityViolation",
    "ObjectNotFoundError",
    "OutOfViewError",
    "PolynomialModel",
    "ProfileFormatError",
    "RankDeficiencyError",
    "RowConsistencyError",
    "SweepEntry",
    "VelocityEstimate",
    "blur_width",
    "calibrate",
    "check_monotonic",
    "compute_pixel_depth",
    "confidence_intervals",
    "depth_from_blur",
    "estimate_velocity",
    "evaluate",
    "find_foot_row",
    "fit_polynomial",
    "generate_synthetic_set",
    "goodness_of_fit",
    "invert_projection",
    "load_profile",
    "parse_calibration_csv",
    "predict_depth",
    "project_ground_point",
    "read_pgm",
    "save_profile",
    "serialize_calibration_csv",
    "sweep_degrees",
    "t_quantile",
    "validate_set",
    "x0_of_camera",
]
