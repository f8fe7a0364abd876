"""Memory bank: tangent-sparsified writing, translation-invariant reading.

Writing blends the input into every cube as a per-cube moving average
M_i <- (1 - w_i) * M_i + w_i * x, with w a softmax over tangent-mapped cosine
similarities. The tangent maps [-1, 1] onto the whole real line, so a cube
that already matches the input saturates the softmax and takes (almost) the
entire write; unrelated cubes are left alone. Reading blends circularly
translated cubes with weights sharpened the same way, using the best
cross-correlation response per cube in WTI mode and plain cosine in WOTI.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateNormError,
    FormatError,
    InvalidCapacityError,
    InvalidRateError,
    NonFiniteDataError,
    ShapeMismatchError,
)
from .tensor import (
    EPS_NORM,
    FeatureCube,
    ShiftIndex,
    _bank_xcorr,
    channel_confidence,
    cosine_similarity,
)

WTI = "WTI"
WOTI = "WOTI"

# Fresh cubes are scaled to this Frobenius norm: large enough that residual
# noise keeps cubes distinguishable (write weights can single out a best
# cube), small enough that the first real write dominates a cube's direction.
INIT_NORM = 0.01

# Similarity clamp before the tangent map; tan(pi/2 * (1 - 1e-6)) ~ 6.4e5,
# large enough to saturate the softmax without producing IEEE infinities.
TAN_CLAMP = 1e-6

SNAPSHOT_MAGIC = b"TIVM"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sIIIIIQdd")


@dataclass(frozen=True)
class WeightVector:
    """n non-negative weights summing to 1 (within 1e-6)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise ShapeMismatchError("weight vector must be 1-D and non-empty")
        if not np.isfinite(v).all() or (v < 0).any():
            raise NonFiniteDataError("weights must be finite and non-negative")
        if abs(v.sum() - 1.0) > 1e-6:
            raise ShapeMismatchError(f"weights sum to {v.sum():.9f}, expected 1")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])


@dataclass(frozen=True)
class ReadResult:
    """Blended recall plus the per-cube evidence behind it."""

    recall: FeatureCube
    weights: WeightVector
    shifts: list[ShiftIndex]
    cube_scores: np.ndarray
    confidence: float


class MemoryBank:
    """n same-shape cubes with write/read rates; single-writer semantics."""

    def __init__(self, data: np.ndarray, write_rate: float, read_rate: float, seed: int = 0):
        arr = np.ascontiguousarray(np.asarray(data, dtype=np.float32))
        if arr.ndim != 4 or min(arr.shape) < 1:
            raise InvalidCapacityError(f"bank data must be 4-D (n, c, h, w), got {arr.shape}")
        if not np.isfinite(arr).all():
            raise NonFiniteDataError("bank contains NaN or Inf")
        if write_rate <= 0 or read_rate <= 0:
            raise InvalidRateError("read/write rates must be > 0")
        if not 0 <= int(seed) < 2**64:
            raise InvalidCapacityError("seed must fit in an unsigned 64-bit integer")
        self.data = arr
        self.write_rate = float(write_rate)
        self.read_rate = float(read_rate)
        self.seed = int(seed)

    @property
    def capacity(self) -> int:
        return self.data.shape[0]

    @property
    def cube_shape(self) -> tuple[int, int, int]:
        return self.data.shape[1:]

    def cube(self, i: int) -> FeatureCube:
        return FeatureCube(self.data[i].copy())

    def copy(self) -> "MemoryBank":
        return MemoryBank(self.data.copy(), self.write_rate, self.read_rate, self.seed)

    def __repr__(self) -> str:
        n, c, h, w = self.data.shape
        return f"MemoryBank(n={n}, c={c}, h={h}, w={w}, gw={self.write_rate}, gr={self.read_rate})"


def bank_init(capacity: int, channels: int, height: int, width: int, seed: int,
              write_rate: float = 5.0, read_rate: float = 5.0) -> MemoryBank:
    """Seeded fresh bank of low-energy uniform noise.

    Values are drawn uniform in [-0.1, 0.1] and each cube is rescaled to
    Frobenius norm INIT_NORM, so initial similarities stay near zero while
    the first write of any real-scale input dominates the cube it lands on.
    """
    for name, v in (("capacity", capacity), ("channels", channels),
                    ("height", height), ("width", width)):
        if int(v) < 1:
            raise InvalidCapacityError(f"{name} must be >= 1, got {v}")
    if write_rate <= 0 or read_rate <= 0:
        raise InvalidRateError("read/write rates must be > 0")
    rng = np.random.default_rng(seed)
    raw = rng.uniform(-0.1, 0.1, (capacity, channels, height, width))
    norms = np.linalg.norm(raw.reshape(capacity, -1), axis=1)
    raw *= (INIT_NORM / norms)[:, None, None, None]
    return MemoryBank(raw.astype(np.float32), write_rate, read_rate, seed)


def _check_query(bank: MemoryBank, x: FeatureCube) -> np.ndarray:
    if x.shape != bank.cube_shape:
        raise ShapeMismatchError(f"query {x.shape} vs bank cubes {bank.cube_shape}")
    xf = x.data.astype(np.float64)
    if np.linalg.norm(xf.ravel()) < EPS_NORM:
        raise DegenerateNormError("query norm below floor")
    return xf


def _plain_similarities(xf: np.ndarray, bank: MemoryBank) -> np.ndarray:
    # Degenerate cubes (possible only through hand-built banks) score 0.
    flat = bank.data.reshape(bank.capacity, -1).astype(np.float64)
    norms = np.maximum(np.linalg.norm(flat, axis=1), EPS_NORM)
    dots = flat @ xf.ravel()
    return np.clip(dots / (norms * np.linalg.norm(xf.ravel())), -1.0, 1.0)


def _stable_softmax(z: np.ndarray) -> np.ndarray:
    # Post-tangent magnitudes reach ~1e6 * rate; max-subtraction is required.
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def _sharpened(sims: np.ndarray, rate: float) -> np.ndarray:
    clipped = np.clip(sims, -1.0 + TAN_CLAMP, 1.0 - TAN_CLAMP)
    return _stable_softmax(rate * np.tan(np.pi / 2.0 * clipped))


def write_weights(x: FeatureCube, bank: MemoryBank, rate: float | None = None) -> WeightVector:
    """Tangent-sparsified write weights from untranslated cosine similarity."""
    xf = _check_query(bank, x)
    gamma = bank.write_rate if rate is None else float(rate)
    if gamma <= 0:
        raise InvalidRateError("write rate must be > 0")
    return WeightVector(_sharpened(_plain_similarities(xf, bank), gamma))


def write_weights_baseline(x: FeatureCube, bank: MemoryBank, rate: float) -> WeightVector:
    """Plain softmax write weights (no tangent map): the ablation comparator."""
    xf = _check_query(bank, x)
    if rate <= 0:
        raise InvalidRateError("write rate must be > 0")
    return WeightVector(_stable_softmax(float(rate) * _plain_similarities(xf, bank)))


def write(bank: MemoryBank, x: FeatureCube, w: WeightVector) -> None:
    """Moving-average update M_i <- (1 - w_i) * M_i + w_i * x, in place."""
    if x.shape != bank.cube_shape:
        raise ShapeMismatchError(f"input {x.shape} vs bank cubes {bank.cube_shape}")
    if len(w) != bank.capacity:
        raise ShapeMismatchError(f"{len(w)} weights for {bank.capacity} cubes")
    wv = w.values[:, None, None, None]
    updated = (1.0 - wv) * bank.data.astype(np.float64) + wv * x.data.astype(np.float64)
    bank.data[...] = updated.astype(np.float32)


def read(bank: MemoryBank, x: FeatureCube, mode: str = WTI,
         rate: float | None = None) -> ReadResult:
    """Blend translated cubes into a recall of x; the bank is not modified.

    WTI scores each cube by its best circular-translation match and blends
    cubes after translating each to its own argmax alignment; WOTI uses
    untranslated cosine similarity and leaves every cube in place.
    """
    xf = _check_query(bank, x)
    gamma = bank.read_rate if rate is None else float(rate)
    if gamma <= 0:
        raise InvalidRateError("read rate must be > 0")
    if mode == WTI:
        scores, shift_rows = _bank_xcorr(xf, bank.data)
    elif mode == WOTI:
        scores = _plain_similarities(xf, bank)
        shift_rows = np.zeros((bank.capacity, 2), dtype=np.int64)
    else:
        raise ValueError(f"mode must be {WTI!r} or {WOTI!r}, got {mode!r}")
    r = _sharpened(scores, gamma)
    recall = np.zeros(bank.cube_shape, dtype=np.float64)
    for i in range(bank.capacity):
        if r[i] != 0.0:
            recall += r[i] * np.roll(bank.data[i].astype(np.float64),
                                     (-int(shift_rows[i, 0]), -int(shift_rows[i, 1])),
                                     axis=(1, 2))
    recall_cube = FeatureCube(recall.astype(np.float32))
    shifts = [ShiftIndex(int(a), int(b)) for a, b in shift_rows]
    return ReadResult(recall=recall_cube, weights=WeightVector(r), shifts=shifts,
                      cube_scores=scores, confidence=channel_confidence(x, recall_cube))


def reading_accuracy(recall: FeatureCube, target: FeatureCube) -> float:
    """Full-cube cosine similarity between a recall and its target."""
    return cosine_similarity(recall, target)


def save_bank(bank: MemoryBank, path) -> None:
    """Write the bank snapshot: TIVM header then n*c*h*w little-endian f32."""
    n, c, h, w = bank.data.shape
    header = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, n, c, h, w,
                          bank.seed, bank.write_rate, bank.read_rate)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(bank.data, dtype="<f4").tobytes())


def load_bank(path) -> MemoryBank:
    """Read a TIVM snapshot, validating magic, version, dims and payload."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < _HEADER.size:
        raise FormatError("snapshot truncated before header end")
    magic, version, n, c, h, w, seed, gw, gr = _HEADER.unpack_from(blob)
    if magic != SNAPSHOT_MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise FormatError(f"unsupported snapshot version {version}")
    if min(n, c, h, w) < 1:
        raise FormatError(f"non-positive dims in header: {(n, c, h, w)}")
    expected = _HEADER.size + 4 * n * c * h * w
    if len(blob) != expected:
        raise FormatError(f"payload length {len(blob) - _HEADER.size}, expected {expected - _HEADER.size}")
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(n, c, h, w)
    if not np.isfinite(data).all():
        raise NonFiniteDataError("snapshot payload contains NaN or Inf")
    if gw <= 0 or gr <= 0:
        raise FormatError("snapshot rates must be > 0")
    return MemoryBank(data.copy(), gw, gr, seed)
