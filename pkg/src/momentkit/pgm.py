"""Binary PGM (P5) image I/O, plus optional PNG via Pillow.

Intensities map v/255 into [0, 1] on read; writing rounds half-up so a
read-write round trip is byte-identical for 8-bit files.
"""

from __future__ import annotations

import numpy as np

from .engine import Image
from .errors import DataError


def _read_tokens(data: bytes, count: int):
    """Yield `count` whitespace-separated header tokens, honouring
    '#' comments, and return the payload offset."""
    tokens = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i] != 0x0A:
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace():
            i += 1
        if start == i:
            raise DataError("truncated PGM header")
        tokens.append(data[start:i])
    if i >= n or not data[i:i + 1].isspace():
        raise DataError("malformed PGM header")
    return tokens, i + 1  # single whitespace byte separates header and payload


def read_pgm(path) -> Image:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise DataError("not a binary PGM (P5) file")
    tokens, off = _read_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise DataError("non-numeric PGM header field") from exc
    if maxval != 255:
        raise DataError(f"unsupported PGM depth (maxval={maxval}; need 255)")
    if width != height:
        raise DataError(f"non-square image ({width}x{height})")
    payload = data[off:off + width * height]
    if len(payload) != width * height:
        raise DataError("PGM payload shorter than header promises")
    raw = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return Image(raw.astype(float) / 255.0)


def write_pgm(image: Image, path) -> None:
    q = np.floor(image.pixels * 255.0 + 0.5).astype(np.int64)
    q = np.clip(q, 0, 255).astype(np.uint8)
    header = f"P5\n{image.n} {image.n}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(q.tobytes())


def read_png(path) -> Image:
    """Optional grayscale PNG input (requires Pillow)."""
    try:
        from PIL import Image as PILImage
    except ImportError as exc:  # pragma: no cover
        raise DataError("PNG support needs the 'png' extra (Pillow)") from exc
    with PILImage.open(path) as im:
        gray = im.convert("L")
        raw = np.asarray(gray, dtype=np.uint8)
    if raw.shape[0] != raw.shape[1]:
        raise DataError(f"non-square image ({raw.shape[1]}x{raw.shape[0]})")
    return Image(raw.astype(float) / 255.0)


def write_png(image: Image, path) -> None:
    try:
        from PIL import Image as PILImage
    except ImportError as exc:  # pragma: no cover
        raise DataError("PNG support needs the 'png' extra (Pillow)") from exc
    q = np.clip(np.floor(image.pixels * 255.0 + 0.5), 0, 255).astype(np.uint8)
    PILImage.fromarray(q, mode="L").save(path, format="PNG")


def read_image_file(path, allow_png: bool = False) -> Image:
    text = str(path)
    if text.lower().endswith(".png"):
        if not allow_png:
            raise DataError("PNG input is gated behind --png")
        return read_png(path)
    return read_pgm(path)


def write_image_file(image: Image, path, allow_png: bool = False) -> None:
    text = str(path)
    if text.lower().endswith(".png"):
        if not allow_png:
            raise DataError("PNG output is gated behind --png")
        write_png(image, path)
        return
    write_pgm(image, path)
