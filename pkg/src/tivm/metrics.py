"""Online-precision evaluation: per-window top-K ranking, s(n), and its AUC.

For a window of the n most recent frames ending at t, the K ground-truth
interesting frames define K "slots". Every frame in the window is ranked by
its prediction (ties favor the frame under test, via strictly-greater
counting). An interesting frame counts as a true positive when it ranks
within ceil(delta * K); an uninteresting frame counts as a false positive
when it intrudes into the unrelaxed top K. Windows with K = 0 contribute
nothing. The relaxation is one-sided on purpose: delta forgives borderline
hits on truly interesting frames without also licensing extra false alarms,
which keeps a perfect ranking at precision 1 for every delta >= 1 and makes
the area under s non-decreasing in delta.

s(n) sums TP and FP over every window membership for all windows of length n
(clipped at the sequence start so early frames are scored too); the curve's
AUC is the arithmetic mean of s over n = 1..N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRangeError, LengthMismatchError
from .pipeline import atomic_write_text, format_float


@dataclass(frozen=True)
class OnlinePrecisionCurve:
    """s(n) for n = 1..N plus its area under curve."""

    N: int
    delta: float
    s_values: np.ndarray
    auc: float

    def __post_init__(self):
        s = np.asarray(self.s_values, dtype=np.float64)
        if s.shape != (self.N,):
            raise LengthMismatchError(f"need {self.N} s-values, got {s.shape}")
        if ((s < 0) | (s > 1)).any():
            raise IndexOutOfRangeError("s values must lie in [0, 1]")
        if abs(self.auc - s.mean()) > 1e-9:
            raise LengthMismatchError("auc must equal the mean of s(n)")
        s.flags.writeable = False
        object.__setattr__(self, "s_values", s)


def _check_pair(preds, labels) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(preds, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if p.ndim != 1 or y.ndim != 1 or p.size != y.size:
        raise LengthMismatchError(f"preds length {p.size} vs labels length {y.size}")
    if p.size < 1:
        raise LengthMismatchError("need at least one frame")
    return p, y


def window_interest_count(labels, t: int, n: int) -> int:
    """Number of interesting labels in the clipped window [max(1, t-n+1) .. t].

    t is 1-based; windows shorter than n at the sequence start are clipped.
    """
    y = np.asarray(labels, dtype=np.int64)
    if not 1 <= t <= y.size:
        raise IndexOutOfRangeError(f"t={t} outside 1..{y.size}")
    if n < 1:
        raise IndexOutOfRangeError(f"window length must be >= 1, got {n}")
    lo = max(1, t - n + 1)
    return int(y[lo - 1:t].sum())


def declare_positive(preds, labels, t: int, n: int, delta: float = 1.0) -> bool:
    """Is frame t currently a top pick of its own trailing window?

    True iff the window holds K >= 1 interesting frames and fewer than
    ceil(delta * K) window predictions strictly exceed preds[t]; ties
    therefore resolve in favor of frame t.
    """
    p, y = _check_pair(preds, labels)
    if delta < 1:
        raise IndexOutOfRangeError(f"delta must be >= 1, got {delta}")
    k = window_interest_count(y, t, n)
    if k == 0:
        return False
    lo = max(1, t - n + 1)
    greater = int((p[lo - 1:t] > p[t - 1]).sum())
    return greater < math.ceil(delta * k)


def online_precision(preds, labels, n: int, delta: float = 1.0) -> float:
    """Precision of windowed top-K picks for one window length n."""
    p, y = _check_pair(preds, labels)
    if not 1 <= n <= p.size:
        raise IndexOutOfRangeError(f"n={n} outside 1..{p.size}")
    if delta < 1:
        raise IndexOutOfRangeError(f"delta must be >= 1, got {delta}")
    tp = fp = 0
    for t in range(1, p.size + 1):
        lo = max(1, t - n + 1)
        wp = p[lo - 1:t]
        wy = y[lo - 1:t]
        k = int(wy.sum())
        if k == 0:
            continue
        greater = (wp[None, :] > wp[:, None]).sum(axis=1)
        tp += int(((wy == 1) & (greater < math.ceil(delta * k))).sum())
        fp += int(((wy == 0) & (greater < k)).sum())
    return tp / (tp + fp) if tp + fp else 1.0


def auc_op(preds, labels, delta: float = 1.0) -> OnlinePrecisionCurve:
    """s(n) for every n = 1..N and the mean as area under curve.

    Windows ending at each t are grown backward one frame at a time, so the
    strictly-greater counts update incrementally; for n beyond t the clipped
    window no longer changes and its contribution is added to all longer
    lengths at once.
    """
    p, y = _check_pair(preds, labels)
    if delta < 1:
        raise IndexOutOfRangeError(f"delta must be >= 1, got {delta}")
    big = p.size + 2
    tp = np.zeros(big)
    fp = np.zeros(big)
    tp_tail = np.zeros(big)  # diff arrays: contribution to every n >= index
    fp_tail = np.zeros(big)
    for t in range(p.size):
        k = 0
        greater = np.zeros(0, dtype=np.int64)
        last_tp = last_fp = 0
        for a in range(t, -1, -1):
            wp = p[a:t + 1]
            newcomer = int((wp[1:] > p[a]).sum()) if wp.size > 1 else 0
            greater = np.concatenate(([newcomer], greater + (p[a] > wp[1:])))
            k += int(y[a])
            n = t - a + 1
            if k > 0:
                wy = y[a:t + 1]
                last_tp = int(((wy == 1) & (greater < math.ceil(delta * k))).sum())
                last_fp = int(((wy == 0) & (greater < k)).sum())
                tp[n] += last_tp
                fp[n] += last_fp
            else:
                last_tp = last_fp = 0
        # n > t+1 keeps the clipped prefix window [0..t] unchanged
        tp_tail[t + 2] += last_tp
        fp_tail[t + 2] += last_fp
    tp[1:] += np.cumsum(tp_tail)[1:]
    fp[1:] += np.cumsum(fp_tail)[1:]
    denom = tp + fp
    s = np.where(denom > 0, tp / np.maximum(denom, 1), 1.0)[1:p.size + 1]
    return OnlinePrecisionCurve(N=p.size, delta=float(delta), s_values=s,
                                auc=float(s.mean()))


def metric_oracle(preds, labels, delta: float = 1.0) -> OnlinePrecisionCurve:
    """Independent naive recomputation of auc_op (literal loops, no numpy)."""
    p = [float(v) for v in preds]
    y = [int(v) for v in labels]
    if len(p) != len(y) or not p:
        raise LengthMismatchError("preds/labels must be equal-length and non-empty")
    if delta < 1:
        raise IndexOutOfRangeError(f"delta must be >= 1, got {delta}")
    total = len(p)
    s_values = []
    for n in range(1, total + 1):
        tp = 0
        fp = 0
        for t in range(1, total + 1):
            lo = max(1, t - n + 1)
            wp = p[lo - 1:t]
            wy = y[lo - 1:t]
            k = sum(wy)
            if k == 0:
                continue
            thr = math.ceil(delta * k)
            for u in range(len(wp)):
                greater = sum(1 for v in wp if v > wp[u])
                if wy[u] == 1:
                    if greater < thr:
                        tp += 1
                elif greater < k:
                    fp += 1
        s_values.append(tp / (tp + fp) if tp + fp else 1.0)
    return OnlinePrecisionCurve(N=total, delta=float(delta),
                                s_values=np.array(s_values),
                                auc=sum(s_values) / total)


def write_curve_csv(curve: OnlinePrecisionCurve, path) -> None:
    """Curve CSV: n,n_over_N,s rows then a trailing auc,<value> summary line."""
    lines = ["n,n_over_N,s"]
    for i, s in enumerate(curve.s_values, start=1):
        lines.append(f"{i},{format_float(i / curve.N)},{format_float(s)}")
    lines.append(f"auc,{format_float(curve.auc)}")
    atomic_write_text(path, "\n".join(lines) + "\n")
