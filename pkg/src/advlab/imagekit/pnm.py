"""Binary PGM (P5) and PPM (P6) image files, 8-bit, mapped to [0, 1].

Grayscale images round-trip through P5, RGB through P6. Boolean masks are
stored as P5 with values {0, 255}. Header comments (#) are tolerated.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from ..errors import BadFormatError, MissingFileError
from .ops import validate_image

_MAXVAL = 255


def write_image(path: str | Path, img: np.ndarray) -> None:
    """Write an (H, W, 1) image as P5 or an (H, W, 3) image as P6."""
    validate_image(img)
    h, w, c = img.shape
    data = np.round(img * _MAXVAL).astype(np.uint8)
    magic = b"P5" if c == 1 else b"P6"
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n%d\n" % (w, h, _MAXVAL))
        fh.write(data.tobytes())


def write_mask(path: str | Path, mask: np.ndarray) -> None:
    """Write a boolean mask as P5 with foreground 255."""
    if mask.ndim != 2 or mask.dtype != np.bool_:
        raise ValueError("mask must be a 2-D boolean array")
    write_image(path, mask[:, :, None].astype(float))


def read_image(path: str | Path) -> np.ndarray:
    """Read a P5/P6 file into an (H, W, C) float image in [0, 1]."""
    path = Path(path)
    if not path.exists():
        raise MissingFileError(f"no such image file: {path}")
    raw = path.read_bytes()
    magic = raw[:2]
    if magic not in (b"P5", b"P6"):
        raise BadFormatError(f"{path}: not a binary PGM/PPM file (magic {magic!r})")
    channels = 1 if magic == b"P5" else 3

    # Header = magic, width, height, maxval as whitespace-separated tokens,
    # with optional comment lines; pixel data starts after the single
    # whitespace byte that terminates maxval.
    pos = 2
    fields: list[int] = []
    while len(fields) < 3:
        if pos >= len(raw):
            raise BadFormatError(f"{path}: truncated header")
        ch = raw[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            eol = raw.find(b"\n", pos)
            if eol < 0:
                raise BadFormatError(f"{path}: unterminated comment")
            pos = eol + 1
        else:
            m = re.match(rb"\d+", raw[pos:])
            if not m:
                raise BadFormatError(f"{path}: non-numeric header token")
            fields.append(int(m.group()))
            pos += m.end()
    if pos >= len(raw) or not raw[pos : pos + 1].isspace():
        raise BadFormatError(f"{path}: missing whitespace after maxval")
    pos += 1

    w, h, maxval = fields
    if maxval != _MAXVAL:
        raise BadFormatError(f"{path}: unsupported maxval {maxval} (want {_MAXVAL})")
    expected = w * h * channels
    body = raw[pos : pos + expected]
    if len(body) != expected:
        raise BadFormatError(
            f"{path}: expected {expected} pixel bytes, found {len(body)}"
        )
    data = np.frombuffer(body, dtype=np.uint8).reshape(h, w, channels)
    return data.astype(float) / _MAXVAL


def read_mask(path: str | Path) -> np.ndarray:
    """Read a P5 mask written by write_mask back into booleans."""
    img = read_image(path)
    if img.shape[2] != 1:
        raise BadFormatError(f"{path}: mask files must be single-channel")
    return img[:, :, 0] >= 0.5
