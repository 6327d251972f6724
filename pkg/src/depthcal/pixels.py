"""Pixel-depth arithmetic and foot-row extraction from grayscale images.

Row indices count from 0 at the image top. The pixel depth of an object is
the number of pixel rows between its foot and the bottom image edge.
"""

import io
from dataclasses import dataclass

import numpy as np

from .errors import ObjectNotFoundError


@dataclass(frozen=True)
class GrayImage:
    """Grayscale raster with ``gray_levels`` quantization levels.

    ``samples`` may be given flat (row-major, length rows*cols) or already
    shaped (rows, cols); it is stored as a read-only int array.
    """

    rows: int
    cols: int
    samples: np.ndarray
    gray_levels: int

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("rows and cols must be non-negative")
        if self.gray_levels < 1:
            raise ValueError(f"gray_levels must be >= 1, got {self.gray_levels}")
        arr = np.asarray(self.samples, dtype=np.int64)
        if arr.ndim == 1:
            if arr.size != self.rows * self.cols:
                raise ValueError(
                    f"expected {self.rows * self.cols} samples, got {arr.size}"
                )
            arr = arr.reshape(self.rows, self.cols)
        elif arr.shape != (self.rows, self.cols):
            raise ValueError(
                f"samples shape {arr.shape} != ({self.rows}, {self.cols})"
            )
        if arr.size and (arr.min() < 0 or arr.max() >= self.gray_levels):
            raise ValueError(
                f"samples must lie in [0, {self.gray_levels - 1}]"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)


def compute_pixel_depth(image_height: int, foot_row: int) -> int:
    """Pixels from the bottom edge to the foot row: image_height - foot_row."""
    if image_height < 0:
        raise ValueError(f"image_height must be >= 0, got {image_height}")
    if not 0 <= foot_row <= image_height:
        raise ValueError(
            f"foot_row {foot_row} outside [0, {image_height}]"
        )
    return image_height - foot_row


def find_foot_row(image: GrayImage, background_threshold: int) -> int:
    """Largest row index holding a sample strictly above the threshold.

    Raises :class:`ObjectNotFoundError` when no sample exceeds the
    threshold (empty scene).
    """
    if image.rows == 0 or image.cols == 0:
        raise ObjectNotFoundError("empty image")
    hit_rows = np.nonzero((image.samples > background_threshold).any(axis=1))[0]
    if hit_rows.size == 0:
        raise ObjectNotFoundError(
            f"no sample above threshold {background_threshold}"
        )
    return int(hit_rows[-1])


def _pgm_tokens(data: bytes):
    """Yield whitespace-separated header tokens, skipping # comments."""
    pos = 0
    while pos < len(data):
        ch = data[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end == -1 else end + 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            yield data[pos:end], end
            pos = end


def read_pgm(source) -> GrayImage:
    """Read a portable graymap (P2 ascii or P5 binary) into a GrayImage.

    Accepts bytes or a binary file object. The maxval header field sets
    ``gray_levels = maxval + 1``.
    """
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        data = source.read()
    else:
        raise TypeError("read_pgm expects bytes or a binary stream")

    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
    except StopIteration:
        raise ValueError("empty PGM stream") from None
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"unsupported magic {magic!r}, expected P2 or P5")
    try:
        cols, _ = next(tokens)
        rows, _ = next(tokens)
        maxval, header_end = next(tokens)
        cols, rows, maxval = int(cols), int(rows), int(maxval)
    except (StopIteration, ValueError):
        raise ValueError("malformed PGM header") from None
    if cols <= 0 or rows <= 0 or not 0 < maxval < 65536:
        raise ValueError(f"invalid PGM dimensions {cols}x{rows} maxval {maxval}")

    count = rows * cols
    if magic == b"P2":
        values = []
        for tok, _ in tokens:
            values.append(int(tok))
        if len(values) != count:
            raise ValueError(f"expected {count} samples, got {len(values)}")
        arr = np.array(values, dtype=np.int64)
    else:
        # single whitespace byte separates header from raster data
        raster = data[header_end + 1 :]
        width = 1 if maxval < 256 else 2
        if len(raster) < count * width:
            raise ValueError(
                f"expected {count * width} raster bytes, got {len(raster)}"
            )
        dtype = ">u1" if width == 1 else ">u2"
        arr = np.frombuffer(raster[: count * width], dtype=dtype).astype(np.int64)

    return GrayImage(rows=rows, cols=cols, samples=arr, gray_levels=maxval + 1)
