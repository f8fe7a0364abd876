"""Feature extraction and tensor/sequence file I/O.

Two deterministic extractors stand in for a learned encoder: a grid-pooled
intensity/gradient stack for grayscale rasters, and seeded random unit cubes
for synthetic streams. Cubes round-trip through the .fcb binary format.
"""
from __future__ import annotations

import csv
import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    FormatError,
    ImageTooSmallError,
    LabelMismatchError,
    NonFiniteDataError,
    ShapeInconsistentError,
)
from .tensor import FeatureCube

FCB_MAGIC = b"FCUB"
FCB_VERSION = 1
_FCB_HEADER = struct.Struct("<4sIIII")

GRIDPOOL = "gridpool"
RANDPROJ = "randproj"
PRECOMPUTED = "precomputed"


@dataclass(frozen=True)
class ExtractorSpec:
    """Which extractor to run and its output geometry."""

    kind: str
    grid: tuple[int, int] = (7, 7)
    channels: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (GRIDPOOL, RANDPROJ, PRECOMPUTED):
            raise FormatError(f"unknown extractor kind {self.kind!r}")
        if min(self.grid) < 1 or self.channels < 1:
            raise FormatError("grid dims and channels must be >= 1")


@dataclass
class SequenceDataset:
    """Ordered frames with aligned binary interestingness labels."""

    frames: list[FeatureCube]
    labels: list[int]
    paths: list[str]


def save_cube(cube: FeatureCube, path) -> None:
    c, h, w = cube.shape
    with open(path, "wb") as f:
        f.write(_FCB_HEADER.pack(FCB_MAGIC, FCB_VERSION, c, h, w))
        f.write(np.ascontiguousarray(cube.data, dtype="<f4").tobytes())


def load_cube(path) -> FeatureCube:
    """Load one .fcb file, validating magic, version, dims and payload length."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < _FCB_HEADER.size:
        raise FormatError(f"{path}: truncated before header end")
    magic, version, c, h, w = _FCB_HEADER.unpack_from(blob)
    if magic != FCB_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != FCB_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if min(c, h, w) < 1:
        raise FormatError(f"{path}: non-positive dims {(c, h, w)}")
    if len(blob) != _FCB_HEADER.size + 4 * c * h * w:
        raise FormatError(f"{path}: payload length mismatch")
    data = np.frombuffer(blob, dtype="<f4", offset=_FCB_HEADER.size).reshape(c, h, w)
    if not np.isfinite(data).all():
        raise NonFiniteDataError(f"{path}: payload contains NaN or Inf")
    return FeatureCube(data.copy())


def _cell_edges(total: int, cells: int) -> list[int]:
    # Remainder pixels go to the trailing cells.
    base, rem = divmod(total, cells)
    sizes = [base] * (cells - rem) + [base + 1] * rem
    edges = [0]
    for s in sizes:
        edges.append(edges[-1] + s)
    return edges


def extract_gridpool(image: np.ndarray, grid: tuple[int, int]) -> FeatureCube:
    """Pool a grayscale raster onto a (3, gh, gw) cube.

    Channel 0: per-cell mean intensity / 255. Channels 1 and 2: per-cell mean
    absolute horizontal / vertical finite difference / 255, where each
    difference is assigned to the cell of its first pixel (the last column /
    row has no difference). Cells partition the image as evenly as possible
    with remainder pixels in the trailing cells.
    """
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ImageTooSmallError(f"expected a 2-D raster, got ndim={img.ndim}")
    gh, gw = int(grid[0]), int(grid[1])
    ih, iw = img.shape
    if ih < gh or iw < gw:
        raise ImageTooSmallError(f"image {img.shape} smaller than grid {(gh, gw)}")
    dh = np.abs(np.diff(img, axis=1))  # (ih, iw-1)
    dv = np.abs(np.diff(img, axis=0))  # (ih-1, iw)
    rows = _cell_edges(ih, gh)
    cols = _cell_edges(iw, gw)
    out = np.zeros((3, gh, gw))
    for gy in range(gh):
        r0, r1 = rows[gy], rows[gy + 1]
        for gx in range(gw):
            c0, c1 = cols[gx], cols[gx + 1]
            out[0, gy, gx] = img[r0:r1, c0:c1].mean() / 255.0
            hslice = dh[r0:r1, c0:min(c1, iw - 1)]
            out[1, gy, gx] = hslice.mean() / 255.0 if hslice.size else 0.0
            vslice = dv[r0:min(r1, ih - 1), c0:c1]
            out[2, gy, gx] = vslice.mean() / 255.0 if vslice.size else 0.0
    return FeatureCube(out)


def extract_randproj(frame_id: int, spec: ExtractorSpec) -> FeatureCube:
    """Deterministic unit-Frobenius-norm random cube keyed by (seed, frame_id)."""
    rng = np.random.default_rng([int(spec.seed), int(frame_id)])
    t = rng.standard_normal((spec.channels,) + tuple(spec.grid))
    return FeatureCube(t / np.linalg.norm(t.ravel()))


def parse_pgm(path) -> np.ndarray:
    """Binary 8-bit PGM (P5, maxval <= 255) -> 2-D uint8 array."""
    with open(path, "rb") as f:
        blob = f.read()

    pos = 0

    def next_token() -> bytes:
        nonlocal pos
        while pos < len(blob):
            ch = blob[pos:pos + 1]
            if ch == b"#":
                while pos < len(blob) and blob[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(blob) and not blob[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PGM header")
        return blob[start:pos]

    if next_token() != b"P5":
        raise FormatError(f"{path}: not a binary PGM (P5)")
    try:
        width = int(next_token())
        height = int(next_token())
        maxval = int(next_token())
    except ValueError as exc:
        raise FormatError(f"{path}: malformed PGM header") from exc
    if width < 1 or height < 1 or not 1 <= maxval <= 255:
        raise FormatError(f"{path}: unsupported PGM geometry/maxval")
    pos += 1  # single whitespace after maxval
    if len(blob) - pos != width * height:
        raise FormatError(f"{path}: PGM payload length mismatch")
    return np.frombuffer(blob, dtype=np.uint8, offset=pos).reshape(height, width).copy()


def load_frames(directory, extractor: ExtractorSpec | None = None) -> tuple[list[FeatureCube], list[str]]:
    """Load all frames in a directory, ordered by lexicographic filename.

    Directories hold either .fcb cubes or .pgm rasters (the latter require a
    gridpool extractor spec); mixing the two is an error.
    """
    names = sorted(os.listdir(directory))
    fcb = [n for n in names if n.endswith(".fcb")]
    pgm = [n for n in names if n.endswith(".pgm")]
    if fcb and pgm:
        raise FormatError(f"{directory}: mixed .fcb and .pgm frames")
    if not fcb and not pgm:
        raise FileNotFoundError(f"{directory}: no .fcb or .pgm frames found")
    frames: list[FeatureCube] = []
    paths: list[str] = []
    if fcb:
        for n in fcb:
            p = os.path.join(directory, n)
            frames.append(load_cube(p))
            paths.append(p)
    else:
        if extractor is None or extractor.kind != GRIDPOOL:
            raise FormatError(".pgm frames require a gridpool extractor spec")
        for n in pgm:
            p = os.path.join(directory, n)
            frames.append(extract_gridpool(parse_pgm(p), extractor.grid))
            paths.append(p)
    shape = frames[0].shape
    for p, fr in zip(paths, frames):
        if fr.shape != shape:
            raise ShapeInconsistentError(f"{p}: shape {fr.shape} differs from {shape}")
    return frames, paths


def read_labels_csv(path) -> dict[int, int]:
    """Labels CSV with header frame_index,interesting -> {index: 0/1}."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["frame_index", "interesting"]:
        raise FormatError(f"{path}: expected header frame_index,interesting")
    labels: dict[int, int] = {}
    for row in rows[1:]:
        if len(row) != 2:
            raise FormatError(f"{path}: bad label row {row!r}")
        try:
            idx, val = int(row[0]), int(row[1])
        except ValueError as exc:
            raise FormatError(f"{path}: bad label row {row!r}") from exc
        if val not in (0, 1):
            raise FormatError(f"{path}: label must be 0 or 1, got {val}")
        if idx in labels:
            raise LabelMismatchError(f"{path}: duplicate frame_index {idx}")
        labels[idx] = val
    return labels


def load_sequence(directory, labels_csv, extractor: ExtractorSpec | None = None) -> SequenceDataset:
    """Join a frame directory with its labels CSV on frame index."""
    frames, paths = load_frames(directory, extractor)
    labels = read_labels_csv(labels_csv)
    if set(labels) != set(range(len(frames))):
        raise LabelMismatchError(
            f"labels cover {len(labels)} indices, frames need 0..{len(frames) - 1}")
    return SequenceDataset(frames=frames, labels=[labels[i] for i in range(len(frames))],
                           paths=paths)
