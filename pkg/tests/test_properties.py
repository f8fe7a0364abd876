"""Algebraic invariants checked over generated inputs."""
import numpy as np
from hypothesis import given, settings, strategies as st

from tivm import (
    FeatureCube,
    ShiftIndex,
    auc_op,
    circular_translate,
    cosine_similarity,
    xcorr_oracle,
    xcorr_similarity,
)

dims = st.integers(min_value=1, max_value=6)


def cube_from_seed(seed, c, h, w):
    return FeatureCube(np.random.default_rng(seed).standard_normal((c, h, w)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=dims, h=dims, w=dims,
       dy1=st.integers(0, 11), dx1=st.integers(0, 11),
       dy2=st.integers(0, 11), dx2=st.integers(0, 11))
def test_translation_composition(seed, c, h, w, dy1, dx1, dy2, dx2):
    a = cube_from_seed(seed, c, h, w)
    two_step = circular_translate(circular_translate(a, ShiftIndex(dy1, dx1)),
                                  ShiftIndex(dy2, dx2))
    one_step = circular_translate(a, ShiftIndex((dy1 + dy2) % h, (dx1 + dx2) % w))
    assert np.array_equal(two_step.data, one_step.data)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1),
       alpha=st.floats(0.01, 100.0), beta=st.floats(0.01, 100.0))
def test_cosine_symmetric_and_scale_invariant(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    a = FeatureCube(rng.standard_normal((2, 4, 4)))
    b = FeatureCube(rng.standard_normal((2, 4, 4)))
    ref = cosine_similarity(a, b)
    assert abs(cosine_similarity(b, a) - ref) <= 1e-12
    scaled = cosine_similarity(FeatureCube(alpha * a.data), FeatureCube(beta * b.data))
    assert abs(scaled - ref) <= 1e-7


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.integers(1, 4),
       h=st.integers(2, 6), w=st.integers(2, 6))
def test_xcorr_matches_oracle(seed, c, h, w):
    rng = np.random.default_rng(seed)
    x = FeatureCube(rng.standard_normal((c, h, w)))
    m = FeatureCube(rng.standard_normal((c, h, w)))
    score, shift = xcorr_similarity(x, m)
    o_score, _ = xcorr_oracle(x, m)
    assert abs(score - o_score) <= 1e-5
    realized = cosine_similarity(x, circular_translate(m, shift))
    assert abs(realized - score) <= 1e-5


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_xcorr_invariant_to_query_translation(seed):
    rng = np.random.default_rng(seed)
    x = FeatureCube(rng.standard_normal((2, 5, 5)))
    dy, dx = int(rng.integers(0, 5)), int(rng.integers(0, 5))
    score, _ = xcorr_similarity(x, circular_translate(x, ShiftIndex(dy, dx)))
    assert abs(score - 1.0) <= 1e-5


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 25),
       delta=st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_auc_op_bounds_and_monotone_transform(seed, n, delta):
    rng = np.random.default_rng(seed)
    preds = rng.random(n)
    labels = (rng.random(n) < 0.4).astype(int)
    curve = auc_op(preds, labels, delta=delta)
    assert ((curve.s_values >= 0.0) & (curve.s_values <= 1.0)).all()
    warped = auc_op(np.exp(preds), labels, delta=delta)
    assert np.max(np.abs(curve.s_values - warped.s_values)) <= 1e-12
