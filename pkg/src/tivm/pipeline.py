"""Short-term (write-before-read) and online (read-before-write) loops.

Short-term training adapts a bank to known-uninteresting frames: each frame
is written first, then read back, and the per-epoch mean reading confidence
is the convergence monitor. The online loop scores a live stream: each frame
is read first (confidence -> interest) and only then written, so repeated
content loses interest while genuinely novel frames score high. Both
orderings are fixed, not configurable.
"""
from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass, field

from .errors import EmptySequenceError, InvalidRateError, ShapeMismatchError
from .memory import WTI, WOTI, MemoryBank, ReadResult, read, write, write_weights
from .tensor import FeatureCube


@dataclass(frozen=True)
class OnlineParams:
    """Rates and reading mode for the online loop."""

    read_rate: float = 5.0
    write_rate: float = 5.0
    mode: str = WTI

    def __post_init__(self):
        if self.read_rate <= 0 or self.write_rate <= 0:
            raise InvalidRateError("rates must be > 0")
        if self.mode not in (WTI, WOTI):
            raise ValueError(f"mode must be {WTI!r} or {WOTI!r}")


@dataclass(frozen=True)
class InterestScore:
    """Per-frame interestingness: the negative affine image of confidence.

    value = (1 - confidence) / 2, mapping confidence in [-1, 1] onto [0, 1].
    """

    value: float
    confidence: float
    frame_index: int


@dataclass
class ShortTermReport:
    epochs_run: int
    mean_confidences: list[float] = field(default_factory=list)
    converged: bool = False


def _check_frames(bank: MemoryBank, frames) -> None:
    if len(frames) == 0:
        raise EmptySequenceError("frame sequence is empty")
    for fr in frames:
        if fr.shape != bank.cube_shape:
            raise ShapeMismatchError(f"frame {fr.shape} vs bank cubes {bank.cube_shape}")


def short_term_train(bank: MemoryBank, frames: list[FeatureCube], max_epochs: int = 10,
                     threshold: float = 0.95, mode: str = WTI) -> ShortTermReport:
    """Write-then-read every frame per epoch until mean confidence >= threshold.

    Mutates the bank. Stops early once an epoch's mean reading confidence
    reaches the threshold, otherwise runs max_epochs epochs.
    """
    _check_frames(bank, frames)
    if max_epochs < 1:
        raise EmptySequenceError("max_epochs must be >= 1")
    if not 0.0 < threshold <= 1.0:
        raise InvalidRateError(f"threshold must lie in (0, 1], got {threshold}")
    report = ShortTermReport(epochs_run=0)
    for _ in range(max_epochs):
        total = 0.0
        for fr in frames:
            w = write_weights(fr, bank)
            write(bank, fr, w)
            total += read(bank, fr, mode=mode).confidence
        mean_conf = total / len(frames)
        report.epochs_run += 1
        report.mean_confidences.append(mean_conf)
        if mean_conf >= threshold:
            report.converged = True
            break
    return report


def online_step(bank: MemoryBank, frame: FeatureCube, params: OnlineParams,
                index: int) -> tuple[InterestScore, ReadResult]:
    """Read first, derive the interest score, then write the frame."""
    result = read(bank, frame, mode=params.mode, rate=params.read_rate)
    score = InterestScore(value=(1.0 - result.confidence) / 2.0,
                          confidence=result.confidence, frame_index=index)
    w = write_weights(frame, bank, rate=params.write_rate)
    write(bank, frame, w)
    return score, result


def online_run(bank: MemoryBank, sequence: list[FeatureCube],
               params: OnlineParams | None = None) -> list[InterestScore]:
    """Fold online_step over the sequence in order, one score per frame.

    Strictly causal: frame t+1 observes the bank state left by frame t, and
    no frame's score uses any later frame.
    """
    params = params or OnlineParams()
    _check_frames(bank, sequence)
    return [online_step(bank, frame, params, i)[0] for i, frame in enumerate(sequence)]


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_float(v: float) -> str:
    return format(float(v), ".9g")


def write_scores_csv(scores: list[InterestScore], path) -> None:
    """Score CSV: frame_index,interest,confidence with 9-significant-digit values."""
    lines = ["frame_index,interest,confidence"]
    lines += [f"{s.frame_index},{format_float(s.value)},{format_float(s.confidence)}"
              for s in scores]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_scores_csv(path) -> list[InterestScore]:
    """Parse a score CSV back into InterestScore rows."""
    from .errors import FormatError

    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["frame_index", "interest", "confidence"]:
        raise FormatError(f"bad score CSV header in {path}")
    out = []
    for row in rows[1:]:
        if len(row) != 3:
            raise FormatError(f"bad score row {row!r}")
        try:
            out.append(InterestScore(value=float(row[1]), confidence=float(row[2]),
                                     frame_index=int(row[0])))
        except ValueError as exc:
            raise FormatError(f"bad score row {row!r}") from exc
    return out
