"""Camera profiles: calibrated depth prediction, persistence, velocity.

A profile bundles the fitted polynomial with the camera mounting height and
the pixel-depth range it was calibrated on. Queries outside that range are
answered but flagged as extrapolation: a high-degree polynomial diverges
quickly beyond its data.
"""

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .caldata import CalibrationSet, validate_set
from .errors import ProfileFormatError
from .polyfit import (
    AbscissaScale,
    FitStats,
    PolynomialModel,
    _raw_to_scaled_exact,
    fit_polynomial,
    sweep_degrees,
)

PROFILE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class CameraProfile:
    """Persisted calibration for one camera at one mounting height."""

    camera_label: str
    camera_height: float
    x0: float | None
    model: PolynomialModel
    stats: FitStats
    pixel_range: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "pixel_range", tuple(self.pixel_range))
        x_min, x_max = self.pixel_range
        if not x_min < x_max:
            raise ValueError(f"pixel_range must satisfy min < max, got {self.pixel_range}")
        if self.stats.n < self.model.degree + 2:
            raise ValueError(
                f"{self.stats.n} observations cannot support degree {self.model.degree}"
            )


@dataclass(frozen=True)
class DepthEstimate:
    """Predicted depth in cm; ``uncertainty`` is the calibration RMSE."""

    depth: float
    extrapolated: bool
    uncertainty: float


@dataclass(frozen=True)
class MonotonicityViolation:
    """Adjacent pixel-depth pair where predicted depth decreases."""

    pixel_from: int
    pixel_to: int
    depth_from: float
    depth_to: float


@dataclass(frozen=True)
class VelocityEstimate:
    t: float
    depth: float
    velocity: float


def calibrate(
    cal_set: CalibrationSet,
    degree: int | str = 8,
    degree_range: tuple[int, int] = (6, 9),
    camera_label: str = "",
) -> CameraProfile:
    """Fit a camera profile from a calibration set.

    ``degree`` is either a fixed degree or ``"auto"``, in which case
    ``degree_range`` is swept and the degree with the smallest dof-adjusted
    RMSE wins. Validation warnings (non-monotonic data) are tolerated;
    error findings abort.
    """
    errors = [f for f in validate_set(cal_set) if f.severity == "error"]
    if errors:
        raise ValueError(
            "calibration set failed validation: "
            + "; ".join(f.message for f in errors)
        )
    xs = np.array(cal_set.pixel_depths, dtype=float)
    ys = np.array(cal_set.actual_depths, dtype=float)
    if degree == "auto":
        best = sweep_degrees(xs, ys, *degree_range).best
        model, stats = best.model, best.stats
    else:
        result = fit_polynomial(xs, ys, int(degree))
        model, stats = result.model, result.stats
    return CameraProfile(
        camera_label=camera_label,
        camera_height=cal_set.camera_height,
        x0=cal_set.x0,
        model=model,
        stats=stats,
        pixel_range=(min(cal_set.pixel_depths), max(cal_set.pixel_depths)),
    )


def predict_depth(profile: CameraProfile, pixel_depth: float) -> DepthEstimate:
    """Depth estimate for one pixel-depth query."""
    if not (math.isfinite(pixel_depth) and pixel_depth >= 0):
        raise ValueError(f"pixel_depth must be finite and >= 0, got {pixel_depth}")
    x_min, x_max = profile.pixel_range
    return DepthEstimate(
        depth=float(profile.model.evaluate(pixel_depth)),
        extrapolated=not x_min <= pixel_depth <= x_max,
        uncertainty=profile.stats.rmse,
    )


def check_monotonic(profile: CameraProfile) -> list[MonotonicityViolation]:
    """Scan the calibrated range at 1-pixel steps for decreasing depth.

    Physically, deeper objects must have larger pixel depth; a fitted
    polynomial can still wiggle. Equal adjacent values pass (only strict
    decreases are violations).
    """
    x_min, x_max = profile.pixel_range
    grid = np.arange(x_min, x_max + 1)
    vals = profile.model.evaluate(grid)
    drops = np.nonzero(np.diff(vals) < 0)[0]
    return [
        MonotonicityViolation(
            pixel_from=int(grid[i]),
            pixel_to=int(grid[i + 1]),
            depth_from=float(vals[i]),
            depth_to=float(vals[i + 1]),
        )
        for i in drops
    ]


def save_profile(profile: CameraProfile) -> str:
    """Serialize a profile to its JSON document (format_version 1).

    ``coeffs_raw`` is stored lowest power first. ``coeffs_scaled`` is
    written as well so that loading reproduces predictions bit for bit;
    documents lacking it are still loadable (see :func:`load_profile`).
    """
    doc = {
        "format_version": PROFILE_FORMAT_VERSION,
        "camera_label": profile.camera_label,
        "height_cm": profile.camera_height,
        "x0_cm": profile.x0,
        "degree": profile.model.degree,
        "coeffs_raw": list(profile.model.coeffs_raw),
        "coeffs_scaled": list(profile.model.coeffs_scaled),
        "scale": {"mu": profile.model.scale.mu, "sigma": profile.model.scale.sigma},
        "stats": {
            "n": profile.stats.n,
            "p": profile.stats.p,
            "sse": profile.stats.sse,
            "sst": profile.stats.sst,
            "rmse": profile.stats.rmse,
            "r2": profile.stats.r_squared,
            "adj_r2": profile.stats.adj_r_squared,
        },
        "pixel_range": list(profile.pixel_range),
    }
    return json.dumps(doc, indent=2) + "\n"


def _field(doc: dict, name: str, kinds, where: str = "profile"):
    if name not in doc:
        raise ProfileFormatError(f"{where} is missing field {name!r}")
    value = doc[name]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ProfileFormatError(
            f"{where} field {name!r} has invalid type {type(value).__name__}"
        )
    return value


def load_profile(text: str) -> CameraProfile:
    """Parse a profile JSON document back into a :class:`CameraProfile`.

    Raises :class:`ProfileFormatError` naming the missing or invalid field.
    When the optional ``coeffs_scaled`` field is absent, the scaled
    coefficients are reconstructed from the raw ones in exact rational
    arithmetic.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ProfileFormatError("profile document must be a JSON object")

    version = _field(doc, "format_version", int)
    if version != PROFILE_FORMAT_VERSION:
        raise ProfileFormatError(f"unsupported format_version {version}")
    label = _field(doc, "camera_label", str)
    height = float(_field(doc, "height_cm", (int, float)))
    x0 = doc.get("x0_cm")
    if x0 is not None and (isinstance(x0, bool) or not isinstance(x0, (int, float))):
        raise ProfileFormatError("profile field 'x0_cm' has invalid type")
    if "x0_cm" not in doc:
        raise ProfileFormatError("profile is missing field 'x0_cm'")
    degree = _field(doc, "degree", int)
    coeffs_raw = _field(doc, "coeffs_raw", list)
    if len(coeffs_raw) != degree + 1 or not all(
        isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs_raw
    ):
        raise ProfileFormatError(
            f"field 'coeffs_raw' must hold {degree + 1} numbers for degree {degree}"
        )
    scale_doc = _field(doc, "scale", dict)
    mu = float(_field(scale_doc, "mu", (int, float), where="scale"))
    sigma = float(_field(scale_doc, "sigma", (int, float), where="scale"))
    if sigma <= 0:
        raise ProfileFormatError(f"scale field 'sigma' must be positive, got {sigma}")

    if "coeffs_scaled" in doc:
        coeffs_scaled = _field(doc, "coeffs_scaled", list)
        if len(coeffs_scaled) != degree + 1 or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool)
            for c in coeffs_scaled
        ):
            raise ProfileFormatError(
                f"field 'coeffs_scaled' must hold {degree + 1} numbers"
            )
        coeffs_scaled = tuple(float(c) for c in coeffs_scaled)
    else:
        coeffs_scaled = _raw_to_scaled_exact([float(c) for c in coeffs_raw], mu, sigma)

    stats_doc = _field(doc, "stats", dict)
    stats = FitStats(
        n=_field(stats_doc, "n", int, where="stats"),
        p=_field(stats_doc, "p", int, where="stats"),
        sse=float(_field(stats_doc, "sse", (int, float), where="stats")),
        sst=float(_field(stats_doc, "sst", (int, float), where="stats")),
        rmse=float(_field(stats_doc, "rmse", (int, float), where="stats")),
        r_squared=float(_field(stats_doc, "r2", (int, float), where="stats")),
        adj_r_squared=float(_field(stats_doc, "adj_r2", (int, float), where="stats")),
    )
    pixel_range = _field(doc, "pixel_range", list)
    if len(pixel_range) != 2 or not all(isinstance(v, int) for v in pixel_range):
        raise ProfileFormatError("field 'pixel_range' must be [min, max] integers")

    model = PolynomialModel(
        degree=degree,
        coeffs_raw=tuple(float(c) for c in coeffs_raw),
        scale=AbscissaScale(mu=mu, sigma=sigma),
        coeffs_scaled=coeffs_scaled,
    )
    try:
        return CameraProfile(
            camera_label=label,
            camera_height=height,
            x0=None if x0 is None else float(x0),
            model=model,
            stats=stats,
            pixel_range=(pixel_range[0], pixel_range[1]),
        )
    except ValueError as exc:
        raise ProfileFormatError(str(exc)) from None


def estimate_velocity(
    profile: CameraProfile, samples: Iterable[Sequence[float]]
) -> list[VelocityEstimate]:
    """Depth and velocity for timestamped pixel-depth samples.

    Velocities use central differences at interior points and one-sided
    differences at the endpoints. Negative velocity means the object is
    approaching the camera.
    """
    pairs = [(float(t), float(px)) for t, px in samples]
    if len(pairs) < 2:
        raise ValueError(f"need at least 2 samples, got {len(pairs)}")
    ts = np.array([t for t, _ in pairs])
    if not (np.diff(ts) > 0).all():
        raise ValueError("timestamps must be strictly increasing")

    depths = np.array([predict_depth(profile, px).depth for _, px in pairs])
    n = len(pairs)
    vel = np.empty(n)
    vel[0] = (depths[1] - depths[0]) / (ts[1] - ts[0])
    vel[-1] = (depths[-1] - depths[-2]) / (ts[-1] - ts[-2])
    for i in range(1, n - 1):
        vel[i] = (depths[i + 1] - depths[i - 1]) / (ts[i + 1] - ts[i - 1])
    return [
        VelocityEstimate(t=float(ts[i]), depth=float(depths[i]), velocity=float(vel[i]))
        for i in range(n)
    ]
