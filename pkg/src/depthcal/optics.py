"""Analytic camera models: pinhole ground-plane projection and thin-lens blur.

The ground-plane camera is the falsifiable oracle behind the polynomial
calibration: a horizontal pinhole camera at height h sees the ground point
at distance s on image row offset f*h/s below center, so

    pixel_depth(s) = R/2 - f*h/s,

which is exactly invertible. The closest sight distance X0 is the distance
whose image lands on the bottom row (pixel depth 0).

The defocus model relates the blur-disc width b of a point object to its
distance s through the thin-lens parameters (aperture w, lens constant d,
offset c, focus distance U):

    b = w*d*|1/(s+c) - 1/(U+c)|

with a near/far branch pair inverting it.
"""

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .caldata import CalibrationObservation, CalibrationSet
from .errors import BlurRangeError, HorizonError, OutOfViewError


@dataclass(frozen=True)
class GroundPlaneCamera:
    """Horizontal pinhole camera at fixed height over flat ground."""

    focal_px: float
    height: float
    image_rows: int

    def __post_init__(self):
        if self.focal_px <= 0:
            raise ValueError(f"focal_px must be positive, got {self.focal_px}")
        if self.height <= 0:
            raise ValueError(f"height must be positive, got {self.height}")
        if self.image_rows <= 0 or self.image_rows % 2:
            raise ValueError(
                f"image_rows must be even and positive, got {self.image_rows}"
            )


@dataclass(frozen=True)
class DefocusCamera:
    """Thin-lens defocus parameters; all lengths in one consistent unit."""

    aperture: float        # w
    lens_param: float      # d
    offset: float          # c
    focus_distance: float  # U

    def __post_init__(self):
        if self.aperture <= 0 or self.lens_param <= 0:
            raise ValueError("aperture and lens_param must be positive")
        if self.focus_distance <= 0:
            raise ValueError(f"focus_distance must be positive, got {self.focus_distance}")
        if self.focus_distance + self.offset <= 0:
            raise ValueError("focus_distance + offset must be positive")

    @property
    def blur_ratio(self) -> float:
        """B = w / d."""
        return self.aperture / self.lens_param


def x0_of_camera(cam: GroundPlaneCamera) -> float:
    """Closest sight distance: the ground point imaged on the bottom row."""
    return cam.focal_px * cam.height / (cam.image_rows / 2)


def project_ground_point(cam: GroundPlaneCamera, s: float) -> float:
    """Pixel depth (real-valued) of the ground point at distance s.

    Raises :class:`OutOfViewError` for s below the closest sight distance.
    """
    x0 = x0_of_camera(cam)
    if not (math.isfinite(s) and s >= x0):
        raise OutOfViewError(
            f"distance {s} cm is closer than the closest sight distance {x0} cm"
        )
    return cam.image_rows / 2 - cam.focal_px * cam.height / s


def invert_projection(cam: GroundPlaneCamera, pixel_depth: float) -> float:
    """Ground distance whose projection has the given pixel depth."""
    if not (math.isfinite(pixel_depth) and pixel_depth >= 0):
        raise ValueError(f"pixel_depth must be finite and >= 0, got {pixel_depth}")
    half = cam.image_rows / 2
    if pixel_depth >= half:
        raise HorizonError(
            f"pixel depth {pixel_depth} is at or beyond the horizon row {half}"
        )
    return cam.focal_px * cam.height / (half - pixel_depth)


def generate_synthetic_set(
    cam: GroundPlaneCamera,
    distances: Sequence[float],
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> CalibrationSet:
    """Calibration set for known distances, with optional Gaussian pixel noise.

    Pixel depths are rounded to integer rows and clamped to [0, image_rows];
    output is deterministic for a fixed seed.
    """
    if noise_sigma < 0:
        raise ValueError(f"noise_sigma must be >= 0, got {noise_sigma}")
    projections = [project_ground_point(cam, s) for s in distances]
    rng = np.random.default_rng(seed)
    observations = []
    for i, (s, proj) in enumerate(zip(distances, projections)):
        noisy = proj + rng.normal(0.0, noise_sigma)
        px = int(round(noisy))
        px = min(max(px, 0), cam.image_rows)
        observations.append(
            CalibrationObservation(
                photo_id=f"sim-{i:03d}",
                actual_depth=float(s),
                image_height=cam.image_rows,
                foot_row=cam.image_rows - px,
                pixel_depth=px,
            )
        )
    return CalibrationSet(
        camera_height=cam.height,
        observations=tuple(observations),
        x0=x0_of_camera(cam),
    )


def blur_width(cam: DefocusCamera, s: float) -> float:
    """Blur-disc width of a point object at distance s."""
    if s + cam.offset <= 0:
        raise ValueError(
            f"distance {s} must satisfy s + offset > 0 (offset {cam.offset})"
        )
    wd = cam.aperture * cam.lens_param
    return wd * abs(
        1.0 / (s + cam.offset) - 1.0 / (cam.focus_distance + cam.offset)
    )


def depth_from_blur(
    cam: DefocusCamera, b: float, side: Literal["near", "far"]
) -> float:
    """Distance of a point object from its blur width.

    The blur equation is two-valued; ``side`` picks the branch nearer
    ("near", s < U) or farther ("far", s > U) than the focus distance.
    """
    if b < 0:
        raise ValueError(f"blur width must be >= 0, got {b}")
    if side not in ("near", "far"):
        raise ValueError(f"side must be 'near' or 'far', got {side!r}")
    wd = cam.aperture * cam.lens_param
    uc = cam.focus_distance + cam.offset
    if side == "near":
        return wd * uc / (wd + b * uc) - cam.offset
    den = wd - b * uc
    if den <= 0:
        raise BlurRangeError(
            f"blur width {b} too large for the far branch (w*d = {wd}, U+c = {uc})"
        )
    return wd * uc / den - cam.offset
