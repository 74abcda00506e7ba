"""Mask and detection file formats, plus the replay directory layout.

Masks are binary PGM (P5), maxval 255, pixel value = class index.
Detections are CSV lines ``class_id,score,x_min,y_min,x_max,y_max`` with the
score at 4 decimals, integer pixel coordinates and LF line endings.
Replay directories hold, per frame index i, the files
``{i:06d}.obj.pgm``, ``{i:06d}.drv.pgm``, ``{i:06d}.lane.pgm`` and
``{i:06d}.det.csv``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .geometry import BoundingBox


class FormatError(ValueError):
    """File exists but its content does not match the format."""


class MissingFrame(FileNotFoundError):
    """A replay frame (or one of its files) is absent."""


def write_pgm(path, mask: np.ndarray) -> None:
    mask = np.asarray(mask)
    if mask.ndim != 2 or mask.dtype != np.uint8:
        raise ValueError("mask must be a 2-D uint8 array")
    h, w = mask.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(mask.tobytes())


def read_pgm(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise MissingFrame(str(path))
    data = path.read_bytes()
    try:
        magic, rest = _token(data, 0)
        if magic != b"P5":
            raise ValueError(f"bad magic {magic!r}")
        w_tok, rest = _token(data, rest)
        h_tok, rest = _token(data, rest)
        max_tok, rest = _token(data, rest)
        w, h, maxval = int(w_tok), int(h_tok), int(max_tok)
        if w <= 0 or h <= 0 or not 0 < maxval < 256:
            raise ValueError("bad header values")
        raster = data[rest:rest + w * h]
        if len(raster) != w * h:
            raise ValueError("truncated raster")
        return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).copy()
    except ValueError as e:
        raise FormatError(f"{path}: {e}") from e


def _token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-delimited PGM header token; '#' starts a comment.
    Returns (token, position just past its single trailing whitespace)."""
    while pos < len(data):
        if data[pos:pos + 1].isspace():
            pos += 1
        elif data[pos:pos + 1] == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise ValueError("unterminated comment")
            pos = nl + 1
        else:
            break
    start = pos
    while pos < len(data) and not data[pos:pos + 1].isspace():
        pos += 1
    if start == pos:
        raise ValueError("missing header token")
    return data[start:pos], pos + 1


def write_detections_csv(path, boxes: list[BoundingBox]) -> None:
    lines = [f"{b.class_id},{b.score:.4f},{b.x_min},{b.y_min},{b.x_max},{b.y_max}\n"
             for b in boxes]
    with open(path, "w", newline="") as f:
        f.writelines(lines)


def read_detections_csv(path) -> list[BoundingBox]:
    path = Path(path)
    if not path.exists():
        raise MissingFrame(str(path))
    boxes = []
    for ln, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            if len(parts) != 6:
                raise ValueError(f"expected 6 fields, got {len(parts)}")
            boxes.append(BoundingBox(class_id=int(parts[0]), score=float(parts[1]),
                                     x_min=int(parts[2]), y_min=int(parts[3]),
                                     x_max=int(parts[4]), y_max=int(parts[5])))
        except ValueError as e:
            raise FormatError(f"{path}:{ln}: {e}") from e
    return boxes


def frame_paths(directory, index: int) -> dict[str, Path]:
    d = Path(directory)
    stem = f"{index:06d}"
    return {
        "obj": d / f"{stem}.obj.pgm",
        "drv": d / f"{stem}.drv.pgm",
        "lane": d / f"{stem}.lane.pgm",
        "det": d / f"{stem}.det.csv",
    }


def frame_count(directory) -> int:
    """Number of consecutive complete frames starting at index 0."""
    n = 0
    while all(p.exists() for p in frame_paths(directory, n).values()):
        n += 1
    return n
