"""Calibration observations and sets, CSV ingestion, and consistency checks.

A calibration set records, for one camera mounted at one fixed height, the
real ground distance of a photographed object together with the pixel depth
of its foot in the image (pixels counted from the bottom edge).
"""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable

from .errors import CsvFormatError, InsufficientDataError, RowConsistencyError

CSV_HEADER = ("photo_id", "actual_depth_cm", "pixel_depth", "R", "r")


@dataclass(frozen=True)
class CalibrationObservation:
    """One photographed object at a known distance.

    Attributes
    ----------
    photo_id : str
        Opaque label for the source photograph.
    actual_depth : float
        Measured horizontal distance from the camera lens, in cm.
    image_height : int
        Total image height R, in pixels.
    foot_row : int
        Row index r of the object's foot, counted from the image top.
    pixel_depth : int
        Pixels from the bottom edge up to the foot; always R - r.
    """

    photo_id: str
    actual_depth: float
    image_height: int
    foot_row: int
    pixel_depth: int

    def __post_init__(self):
        if not (math.isfinite(self.actual_depth) and self.actual_depth > 0):
            raise ValueError(f"actual_depth must be positive, got {self.actual_depth}")
        if self.image_height < 0:
            raise ValueError(f"image_height must be >= 0, got {self.image_height}")
        if not 0 <= self.foot_row <= self.image_height:
            raise ValueError(
                f"foot_row {self.foot_row} outside [0, {self.image_height}]"
            )
        if self.pixel_depth != self.image_height - self.foot_row:
            raise ValueError(
                f"pixel_depth {self.pixel_depth} != "
                f"image_height - foot_row = {self.image_height - self.foot_row}"
            )


@dataclass(frozen=True)
class CalibrationSet:
    """Ordered calibration observations for one camera at one height.

    ``x0`` is the closest sight distance in cm, kept as optional metadata.
    Construction does not require two observations so that incomplete sets
    can still be inspected; :func:`validate_set` reports the shortfall.
    """

    camera_height: float
    observations: tuple[CalibrationObservation, ...]
    x0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "observations", tuple(self.observations))
        if not (math.isfinite(self.camera_height) and self.camera_height > 0):
            raise ValueError(f"camera_height must be positive, got {self.camera_height}")

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def pixel_depths(self) -> tuple[int, ...]:
        return tuple(o.pixel_depth for o in self.observations)

    @property
    def actual_depths(self) -> tuple[float, ...]:
        return tuple(o.actual_depth for o in self.observations)


@dataclass(frozen=True)
class Finding:
    """One validation finding; ``rows`` are 0-based observation indices."""

    severity: str  # "error" or "warning"
    message: str
    rows: tuple[int, ...] = field(default=())


def _data_lines(source) -> Iterable[tuple[int, str]]:
    """Yield (1-based line number, content) skipping blanks and # comments."""
    if isinstance(source, str):
        lines = source.splitlines()
    elif isinstance(source, io.TextIOBase):
        lines = source.read().splitlines()
    else:
        lines = [str(line).rstrip("\n") for line in source]
    for num, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield num, raw


def parse_calibration_csv(
    source, camera_height: float, x0: float | None = None
) -> CalibrationSet:
    """Parse calibration CSV text into a :class:`CalibrationSet`.

    The stream must start with the header ``photo_id,actual_depth_cm,
    pixel_depth,R,r``. Blank lines and lines starting with ``#`` are
    ignored. Row order is preserved.

    Raises
    ------
    CsvFormatError
        Missing/invalid header, wrong field count, or a malformed number,
        with the offending 1-based line number.
    RowConsistencyError
        When a row's pixel_depth does not equal R - r.
    InsufficientDataError
        When fewer than 2 data rows are present.
    """
    lines = list(_data_lines(source))
    if not lines:
        raise CsvFormatError("empty input: missing header row")

    header_line, header_raw = lines[0]
    header = tuple(f.strip() for f in next(csv.reader([header_raw])))
    if header != CSV_HEADER:
        raise CsvFormatError(
            f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}",
            line=header_line,
        )

    observations = []
    for num, raw in lines[1:]:
        fields = [f.strip() for f in next(csv.reader([raw]))]
        if len(fields) != 5:
            raise CsvFormatError(f"expected 5 fields, got {len(fields)}", line=num)
        photo_id, depth_s, px_s, big_r_s, r_s = fields
        try:
            actual_depth = float(depth_s)
            pixel_depth = int(px_s)
            image_height = int(big_r_s)
            foot_row = int(r_s)
        except ValueError as exc:
            raise CsvFormatError(f"malformed number ({exc})", line=num) from None
        if pixel_depth != image_height - foot_row:
            raise RowConsistencyError(
                f"pixel_depth {pixel_depth} != R - r = {image_height - foot_row}",
                line=num,
            )
        try:
            obs = CalibrationObservation(
                photo_id=photo_id,
                actual_depth=actual_depth,
                image_height=image_height,
                foot_row=foot_row,
                pixel_depth=pixel_depth,
            )
        except ValueError as exc:
            raise CsvFormatError(str(exc), line=num) from None
        observations.append(obs)

    if len(observations) < 2:
        raise InsufficientDataError(
            f"need at least 2 data rows, got {len(observations)}"
        )
    return CalibrationSet(
        camera_height=camera_height, observations=tuple(observations), x0=x0
    )


def serialize_calibration_csv(cal_set: CalibrationSet) -> str:
    """Render a calibration set back to CSV text.

    ``parse_calibration_csv(serialize_calibration_csv(s), s.camera_height,
    s.x0)`` reproduces ``s`` field for field.
    """
    out = [",".join(CSV_HEADER)]
    for o in cal_set.observations:
        out.append(
            f"{o.photo_id},{o.actual_depth!r},{o.pixel_depth},"
            f"{o.image_height},{o.foot_row}"
        )
    return "\n".join(out) + "\n"


def validate_set(cal_set: CalibrationSet) -> list[Finding]:
    """Check set-level consistency; an empty list means a clean set.

    Fewer than two observations is an error finding. Non-monotonic pixel
    depth (sorting by actual depth should give strictly increasing pixel
    depth) is only a warning: noisy rigs may legitimately produce it.
    """
    findings: list[Finding] = []
    n = len(cal_set.observations)
    if n < 2:
        findings.append(
            Finding("error", f"need at least 2 observations, got {n}")
        )
        return findings

    order = sorted(range(n), key=lambda i: cal_set.observations[i].actual_depth)
    for prev, cur in zip(order, order[1:]):
        a, b = cal_set.observations[prev], cal_set.observations[cur]
        if b.pixel_depth <= a.pixel_depth:
            findings.append(
                Finding(
                    "warning",
                    f"pixel depth not strictly increasing with actual depth: "
                    f"rows {prev} and {cur} have depths ({a.actual_depth}, "
                    f"{b.actual_depth}) but pixel depths ({a.pixel_depth}, "
                    f"{b.pixel_depth})",
                    rows=(prev, cur),
                )
            )
    return findings
