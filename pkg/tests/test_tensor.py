import numpy as np
import pytest

from tivm import (
    DegenerateNormError,
    FeatureCube,
    NonFiniteDataError,
    ShapeMismatchError,
    ShiftIndex,
    channel_confidence,
    circular_translate,
    cosine_similarity,
    frobenius_norm,
    xcorr_oracle,
    xcorr_similarity,
)
from conftest import random_cube


class TestFeatureCube:
    def test_rejects_nan(self):
        data = np.zeros((1, 2, 2))
        data[0, 0, 0] = np.nan
        with pytest.raises(NonFiniteDataError):
            FeatureCube(data)

    def test_rejects_inf(self):
        data = np.zeros((1, 2, 2))
        data[0, 1, 1] = np.inf
        with pytest.raises(NonFiniteDataError):
            FeatureCube(data)

    def test_rejects_wrong_ndim(self):
        with pytest.raises(ShapeMismatchError):
            FeatureCube(np.zeros((2, 2)))

    def test_rejects_empty_dim(self):
        with pytest.raises(ShapeMismatchError):
            FeatureCube(np.zeros((1, 0, 2)))

    def test_immutable(self):
        cube = FeatureCube(np.ones((1, 2, 2)))
        with pytest.raises(ValueError):
            cube.data[0, 0, 0] = 5.0

    def test_dims(self):
        cube = FeatureCube(np.zeros((3, 4, 5)))
        assert (cube.channels, cube.height, cube.width) == (3, 4, 5)


class TestFrobeniusNorm:
    def test_zero_cube(self):
        assert frobenius_norm(FeatureCube(np.zeros((1, 2, 2)))) == 0.0

    def test_single_entry(self):
        data = np.zeros((1, 2, 2))
        data[0, 0, 1] = 3.0
        assert frobenius_norm(FeatureCube(data)) == 3.0

    def test_all_ones(self):
        # sqrt(1 + 1 + 1 + 1) evaluated by hand
        assert frobenius_norm(FeatureCube(np.ones((1, 2, 2)))) == pytest.approx(2.0)


class TestCosineSimilarity:
    def test_self_similarity(self, rng):
        a = random_cube(rng)
        assert cosine_similarity(a, a) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_support(self):
        a = np.zeros((2, 2, 2))
        b = np.zeros((2, 2, 2))
        a[0] = 1.0
        b[1] = 1.0
        assert cosine_similarity(FeatureCube(a), FeatureCube(b)) == 0.0

    def test_hand_value(self):
        # dot = 1, norms 1 and sqrt(2)
        a = FeatureCube(np.array([1.0, 0, 0, 0]).reshape(1, 2, 2))
        b = FeatureCube(np.array([1.0, 1, 0, 0]).reshape(1, 2, 2))
        assert cosine_similarity(a, b) == pytest.approx(0.70710678, abs=1e-7)

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeMismatchError):
            cosine_similarity(random_cube(rng, c=2), random_cube(rng, c=3))

    def test_degenerate_norm(self, rng):
        zero = FeatureCube(np.zeros((4, 8, 8)))
        with pytest.raises(DegenerateNormError):
            cosine_similarity(random_cube(rng), zero)

    def test_symmetry_and_scale_invariance(self, rng):
        a, b = random_cube(rng), random_cube(rng)
        ref = cosine_similarity(a, b)
        assert cosine_similarity(b, a) == pytest.approx(ref, abs=1e-12)
        scaled = cosine_similarity(FeatureCube(2.5 * a.data), FeatureCube(0.3 * b.data))
        assert scaled == pytest.approx(ref, abs=1e-7)


class TestCircularTranslate:
    def test_identity_shift(self, rng):
        a = random_cube(rng)
        assert np.array_equal(circular_translate(a, ShiftIndex(0, 0)).data, a.data)

    def test_periodicity(self, rng):
        a = random_cube(rng, c=2, h=5, w=7)
        assert np.array_equal(circular_translate(a, ShiftIndex(5, 7)).data, a.data)

    def test_hand_application(self):
        a = FeatureCube(np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(1, 2, 2))
        out = circular_translate(a, ShiftIndex(1, 0))
        assert out.data.ravel().tolist() == [3.0, 4.0, 1.0, 2.0]

    def test_composition(self, rng):
        a = random_cube(rng, c=2, h=5, w=6)
        s1, s2 = ShiftIndex(3, 4), ShiftIndex(4, 5)
        double = circular_translate(circular_translate(a, s1), s2)
        combined = circular_translate(a, ShiftIndex((3 + 4) % 5, (4 + 5) % 6))
        assert np.array_equal(double.data, combined.data)


class TestXcorrSimilarity:
    def test_identical_cubes(self, rng):
        x = random_cube(rng)
        score, shift = xcorr_similarity(x, x)
        assert score == pytest.approx(1.0, abs=1e-6)
        assert shift == ShiftIndex(0, 0)

    def test_exact_shifted_replica(self, rng):
        x = random_cube(rng)
        m = circular_translate(x, ShiftIndex(2, 3))
        score, shift = xcorr_similarity(x, m)
        assert score == pytest.approx(1.0, abs=1e-5)
        realized = cosine_similarity(x, circular_translate(m, shift))
        assert realized == pytest.approx(1.0, abs=1e-5)

    def test_agrees_with_oracle(self, rng):
        for _ in range(100):
            x, m = random_cube(rng), random_cube(rng)
            score, shift = xcorr_similarity(x, m)
            o_score, o_shift = xcorr_oracle(x, m)
            assert score == pytest.approx(o_score, abs=1e-5)
            realized = cosine_similarity(x, circular_translate(m, shift))
            assert realized == pytest.approx(score, abs=1e-5)

    def test_translation_invariance_every_shift(self, rng):
        x = random_cube(rng, c=2, h=4, w=4)
        for dy in range(4):
            for dx in range(4):
                score, _ = xcorr_similarity(x, circular_translate(x, ShiftIndex(dy, dx)))
                assert score == pytest.approx(1.0, abs=1e-5)

    def test_degenerate(self, rng):
        with pytest.raises(DegenerateNormError):
            xcorr_similarity(random_cube(rng), FeatureCube(np.zeros((4, 8, 8))))

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeMismatchError):
            xcorr_similarity(random_cube(rng, h=4), random_cube(rng, h=8))


class TestXcorrOracle:
    def test_identity(self, rng):
        x = random_cube(rng)
        assert xcorr_oracle(x, x) == (pytest.approx(1.0, abs=1e-12), ShiftIndex(0, 0))

    def test_constant_cubes_tie_break(self):
        a = FeatureCube(np.full((1, 3, 3), 2.0))
        score, shift = xcorr_oracle(a, a)
        assert score == pytest.approx(1.0, abs=1e-12)
        assert shift == ShiftIndex(0, 0)


class TestChannelConfidence:
    def test_self(self, rng):
        a = random_cube(rng)
        assert channel_confidence(a, a) == pytest.approx(1.0, abs=1e-12)

    def test_mean_of_identical_and_orthogonal(self, rng):
        sl = rng.standard_normal((4, 4))
        a = np.zeros((2, 4, 4))
        b = np.zeros((2, 4, 4))
        a[0] = sl
        b[0] = sl
        # channel 1: disjoint supports -> cosine 0
        a[1, 0, 0] = 1.0
        b[1, 3, 3] = 1.0
        got = channel_confidence(FeatureCube(a), FeatureCube(b))
        assert got == pytest.approx(0.5, abs=1e-7)

    def test_matches_per_channel_recomputation(self, rng):
        a = random_cube(rng, c=3, h=4, w=4)
        b = random_cube(rng, c=3, h=4, w=4)
        per = []
        for ch in range(3):
            ca = FeatureCube(a.data[ch][None])
            cb = FeatureCube(b.data[ch][None])
            per.append(cosine_similarity(ca, cb))
        assert channel_confidence(a, b) == pytest.approx(np.mean(per), abs=1e-7)

    def test_degenerate_channel_contributes_zero(self, rng):
        sl = rng.standard_normal((4, 4))
        a = np.zeros((2, 4, 4))
        b = np.zeros((2, 4, 4))
        a[0] = sl
        b[0] = sl
        a[1] = rng.standard_normal((4, 4))  # b channel 1 stays all-zero
        got = channel_confidence(FeatureCube(a), FeatureCube(b))
        assert got == pytest.approx(0.5, abs=1e-7)
