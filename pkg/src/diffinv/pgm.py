"""Minimal PGM image I/O: binary P5 (8/16-bit) and plain P2."""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np


def _read_header_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    tokens = []
    pos = 2  # past magic
    while len(tokens) < count:
        chunk = data[pos:pos + 1]
        if not chunk:
            raise ValueError("truncated PGM header")
        ch = chunk.decode("latin1")
        if ch == "#":
            while data[pos:pos + 1] not in (b"\n", b""):
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            m = re.match(rb"\d+", data[pos:])
            if not m:
                raise ValueError("bad PGM header token")
            tokens.append(int(m.group(0)))
            pos += m.end()
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic == b"P5":
        (width, height, maxval), pos = _read_header_tokens(data, 3)
        pos += 1  # the single whitespace after maxval
        if maxval < 256:
            raw = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
        elif maxval < 65536:
            raw = np.frombuffer(data, dtype=">u2", count=width * height, offset=pos).astype(np.uint16)
        else:
            raise ValueError("unsupported PGM maxval")
        return raw.reshape(height, width).copy()
    if magic == b"P2":
        body = data.decode("latin1")
        body = re.sub(r"#[^\n]*", "", body)
        vals = body.split()[1:]
        width, height, maxval = int(vals[0]), int(vals[1]), int(vals[2])
        arr = np.array(vals[3:3 + width * height], dtype=np.uint32)
        dtype = np.uint8 if maxval < 256 else np.uint16
        return arr.astype(dtype).reshape(height, width)
    raise ValueError(f"not a PGM file: magic {magic!r}")


def write_pgm(path, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.dtype == np.uint8:
        maxval, payload = 255, image.tobytes()
    elif image.dtype == np.uint16:
        maxval, payload = 65535, image.astype(">u2").tobytes()
    else:
        raise ValueError("write_pgm expects uint8 or uint16 data")
    h, w = image.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + payload)


def quantize_u16(values: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Min-max quantisation to uint16; returns (image, vmin, vmax)."""
    values = np.asarray(values, dtype=float)
    vmin, vmax = float(values.min()), float(values.max())
    if vmax == vmin:
        return np.zeros(values.shape, dtype=np.uint16), vmin, vmax
    q = np.rint((values - vmin) / (vmax - vmin) * 65535.0)
    return q.astype(np.uint16), vmin, vmax
