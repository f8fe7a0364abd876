"""Dense c*h*w feature cubes plus the similarity and translation primitives.

A FeatureCube is an immutable, finite, channel-major float32 tensor. All
similarity math accumulates in float64 and clamps cosine values into [-1, 1]
so FFT round-off never leaks out of range.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DegenerateNormError, NonFiniteDataError, ShapeMismatchError

# Norm floor below which a tensor is treated as direction-free.
EPS_NORM = 1e-12


class ShiftIndex(NamedTuple):
    """Circular translation offsets, dy in [0, h) and dx in [0, w)."""

    dy: int
    dx: int


class FeatureCube:
    """A c*h*w block of finite real feature activations.

    The backing array is float32, C-contiguous and marked read-only;
    operations return new cubes instead of mutating.
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.float32)
        if arr.ndim != 3:
            raise ShapeMismatchError(f"expected 3-D (c, h, w) data, got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise ShapeMismatchError(f"all dims must be >= 1, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise NonFiniteDataError("feature cube contains NaN or Inf")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        self._data = arr

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, int, int]:
        return self._data.shape

    @property
    def channels(self) -> int:
        return self._data.shape[0]

    @property
    def height(self) -> int:
        return self._data.shape[1]

    @property
    def width(self) -> int:
        return self._data.shape[2]

    def __repr__(self) -> str:
        c, h, w = self.shape
        return f"FeatureCube(c={c}, h={h}, w={w})"


def _require_same_shape(a: FeatureCube, b: FeatureCube) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")


def frobenius_norm(a: FeatureCube) -> float:
    """Square root of the sum of squared entries over all channels."""
    return float(np.linalg.norm(a.data.astype(np.float64).ravel()))


def cosine_similarity(a: FeatureCube, b: FeatureCube) -> float:
    """Full-cube cosine similarity, clamped into [-1, 1]."""
    _require_same_shape(a, b)
    af = a.data.astype(np.float64).ravel()
    bf = b.data.astype(np.float64).ravel()
    na = np.linalg.norm(af)
    nb = np.linalg.norm(bf)
    if na < EPS_NORM or nb < EPS_NORM:
        raise DegenerateNormError(f"norms {na:.3e}, {nb:.3e} below {EPS_NORM:.0e}")
    return float(np.clip(af @ bf / (na * nb), -1.0, 1.0))


def circular_translate(a: FeatureCube, shift: ShiftIndex) -> FeatureCube:
    """Wrap-around translation, identical for every channel.

    output[ch, p, q] = input[ch, (p + dy) mod h, (q + dx) mod w]; shifts are
    reduced modulo the spatial dims, so translating by (h, w) is the identity.
    """
    dy, dx = int(shift[0]), int(shift[1])
    return FeatureCube(np.roll(a.data, (-dy, -dx), axis=(1, 2)))


def _bank_xcorr(x: np.ndarray, cubes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Channel-summed circular cross-correlation of x against a stack of cubes.

    Returns (scores, shifts): per-cube max normalized response over all h*w
    circular translations, and the argmax location as (dy, dx) rows. One
    forward transform of the query, one inverse transform per cube:
    O(c*h*w*log(h*w)) per pair instead of O(c*h^2*w^2).
    """
    h, w = x.shape[-2:]
    xf = np.fft.rfft2(x.astype(np.float64))
    mf = np.fft.rfft2(cubes.astype(np.float64))
    # response[a, b] = sum over channels/pixels of x[p, q] * m[(p+a)%h, (q+b)%w]
    resp = np.fft.irfft2((np.conj(xf)[None] * mf).sum(axis=1), s=(h, w))
    n = cubes.shape[0]
    flat = resp.reshape(n, -1)
    idx = flat.argmax(axis=1)
    best = flat[np.arange(n), idx]
    xn = np.linalg.norm(x.astype(np.float64).ravel())
    mn = np.linalg.norm(cubes.reshape(n, -1).astype(np.float64), axis=1)
    scores = np.clip(best / (xn * np.maximum(mn, EPS_NORM)), -1.0, 1.0)
    shifts = np.stack([idx // w, idx % w], axis=1)
    return scores, shifts


def xcorr_similarity(x: FeatureCube, m: FeatureCube) -> tuple[float, ShiftIndex]:
    """Max cosine similarity of x against all circular translations of m.

    Computed in the frequency domain (channel-summed conjugate products,
    one inverse transform, spatial argmax). The returned shift realizes the
    score: cosine_similarity(x, circular_translate(m, shift)) == score up to
    FFT round-off.
    """
    _require_same_shape(x, m)
    if frobenius_norm(x) < EPS_NORM or frobenius_norm(m) < EPS_NORM:
        raise DegenerateNormError("xcorr_similarity requires nonzero operands")
    scores, shifts = _bank_xcorr(x.data, m.data[None])
    return float(scores[0]), ShiftIndex(int(shifts[0, 0]), int(shifts[0, 1]))


def xcorr_oracle(x: FeatureCube, m: FeatureCube) -> tuple[float, ShiftIndex]:
    """Brute-force reference for xcorr_similarity.

    Exhaustively evaluates cosine_similarity over all h*w circular shifts;
    ties break toward the lexicographically smallest (dy, dx).
    """
    _require_same_shape(x, m)
    if frobenius_norm(x) < EPS_NORM or frobenius_norm(m) < EPS_NORM:
        raise DegenerateNormError("xcorr_oracle requires nonzero operands")
    _, h, w = x.shape
    best_score = -np.inf
    best_shift = ShiftIndex(0, 0)
    for dy in range(h):
        for dx in range(w):
            s = cosine_similarity(x, circular_translate(m, ShiftIndex(dy, dx)))
            if s > best_score:
                best_score = s
                best_shift = ShiftIndex(dy, dx)
    return float(best_score), best_shift


def channel_confidence(a: FeatureCube, b: FeatureCube) -> float:
    """Mean over channels of the 2-D cosine similarity of matching slices.

    Channels where either slice has norm below EPS_NORM contribute 0 to the
    mean rather than erroring; real feature maps routinely carry all-zero
    channels.
    """
    _require_same_shape(a, b)
    af = a.data.astype(np.float64).reshape(a.channels, -1)
    bf = b.data.astype(np.float64).reshape(b.channels, -1)
    na = np.linalg.norm(af, axis=1)
    nb = np.linalg.norm(bf, axis=1)
    dots = np.einsum("ij,ij->i", af, bf)
    valid = (na >= EPS_NORM) & (nb >= EPS_NORM)
    per_channel = np.zeros(a.channels)
    per_channel[valid] = np.clip(dots[valid] / (na[valid] * nb[valid]), -1.0, 1.0)
    return float(per_channel.sum() / a.channels)
