"""Token extraction strategies against hand and brute-force oracles."""

import numpy as np
import pytest

from semfuse import strategies
from semfuse.selfcheck import brute_force_axis
from semfuse.strategies import DegenerateInputError


class TestAve:
    def test_hand_example(self):
        token = strategies.extract_ave([[1.0, 3.0], [5.0, 7.0]])
        np.testing.assert_array_equal(token.vector, [3.0, 5.0])
        assert token.strategy == "AVE"

    def test_single_row_identity(self):
        row = np.array([[2.5, -1.0, 0.0]])
        np.testing.assert_array_equal(strategies.extract_ave(row).vector, row[0])

    def test_constant_matrix(self):
        h = np.full((4, 3), 1.25)
        np.testing.assert_array_equal(strategies.extract_ave(h).vector, h[0])

    def test_permutation_invariant(self):
        rng = np.random.default_rng(0)
        h = rng.standard_normal((6, 4))
        shuffled = h[rng.permutation(6)]
        np.testing.assert_allclose(
            strategies.extract_ave(h).vector,
            strategies.extract_ave(shuffled).vector,
            rtol=0, atol=1e-15,
        )

    def test_inside_envelope(self):
        rng = np.random.default_rng(1)
        h = rng.standard_normal((7, 5))
        vector = strategies.extract_ave(h).vector
        assert (vector >= h.min(axis=0) - 1e-12).all()
        assert (vector <= h.max(axis=0) + 1e-12).all()

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            strategies.extract_ave(np.zeros((0, 3)))


class TestLast:
    def test_hand_example(self):
        token = strategies.extract_last([[1.0, 2.0], [9.0, 9.0]])
        np.testing.assert_array_equal(token.vector, [9.0, 9.0])

    def test_random_matrix_bitwise(self):
        rng = np.random.default_rng(2)
        h = rng.standard_normal((5, 4))
        assert strategies.extract_last(h).vector.tobytes() == h[4].tobytes()

    def test_not_permutation_invariant(self):
        h = np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
        assert not np.array_equal(
            strategies.extract_last(h).vector,
            strategies.extract_last(h[::-1]).vector,
        )


class TestPca:
    def test_hand_2x2_example(self):
        # axis of [[1,0],[-1,0]] is [1,0]; rescaled to the [-1,1] range -> [1,-1]
        token = strategies.extract_pca([[1.0, 0.0], [-1.0, 0.0]])
        np.testing.assert_allclose(token.vector, [1.0, -1.0], atol=1e-12)

    def test_range_contract(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            h = rng.standard_normal((5, 4)) * rng.uniform(0.5, 3.0)
            vector = strategies.extract_pca(h).vector
            assert abs(vector.min() - h.min()) <= 1e-9 * max(1.0, abs(h.min()))
            assert abs(vector.max() - h.max()) <= 1e-9 * max(1.0, abs(h.max()))

    def test_axis_matches_brute_force_eigendecomposition(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            h = rng.standard_normal((6, 3))
            axis = strategies.principal_axis(h)
            cos = abs(float(axis @ brute_force_axis(h)))
            assert cos >= 1 - 1e-8

    def test_sign_fix_deterministic(self):
        rng = np.random.default_rng(5)
        h = rng.standard_normal((6, 3))
        axis = strategies.principal_axis(h)
        assert axis[np.argmax(np.abs(axis))] > 0

    def test_needs_two_rows(self):
        with pytest.raises(ValueError, match="2 token rows"):
            strategies.extract_pca(np.ones((1, 4)))

    def test_zero_variance_is_degenerate(self):
        with pytest.raises(DegenerateInputError):
            strategies.extract_pca(np.tile([1.0, 2.0, 3.0], (4, 1)))


class TestEis:
    def test_hand_example(self):
        token = strategies.extract_eis_word([[2.0, 2.0]], [[4.0, 4.0]], [[6.0, 6.0]])
        np.testing.assert_array_equal(token.vector, [4.0, 4.0])
        assert token.strategy == "EIS_WORD"

    def test_identical_rows(self):
        row = [[1.5, -2.0]]
        np.testing.assert_array_equal(
            strategies.extract_eis_word(row, row, row).vector, row[0]
        )

    def test_equals_ave_of_concatenation(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            a = rng.standard_normal((rng.integers(1, 5), 4))
            b = rng.standard_normal((rng.integers(1, 5), 4))
            c = rng.standard_normal((rng.integers(1, 5), 4))
            word = strategies.extract_eis_word(a, b, c).vector
            ave = strategies.extract_ave(np.vstack([a, b, c])).vector
            np.testing.assert_array_equal(word, ave)

    def test_width_mismatch_rejected(self):
        with pytest.raises(ValueError, match="width"):
            strategies.extract_eis_word(np.ones((1, 3)), np.ones((1, 4)), np.ones((1, 3)))

    def test_sentence_matches_ave_with_own_tag(self):
        rng = np.random.default_rng(7)
        h = rng.standard_normal((4, 3))
        token = strategies.extract_eis_sentence(h)
        assert token.strategy == "EIS_SENTENCE"
        np.testing.assert_array_equal(token.vector, strategies.extract_ave(h).vector)


class TestSequences:
    def test_pass_through(self):
        h = np.arange(6.0).reshape(3, 2)
        seq = strategies.make_sequence(h, strategies.TEX)
        np.testing.assert_array_equal(seq.matrix, h)
        assert seq.strategy == "TEX"

    def test_single_row(self):
        seq = strategies.make_sequence(np.ones((1, 5)), strategies.PHO)
        assert seq.matrix.shape == (1, 5)

    def test_bad_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            strategies.make_sequence(np.ones((2, 2)), "AVE")


def test_all_extractors_preserve_width():
    rng = np.random.default_rng(8)
    h = rng.standard_normal((5, 7))
    assert strategies.extract_ave(h).vector.shape == (7,)
    assert strategies.extract_last(h).vector.shape == (7,)
    assert strategies.extract_pca(h).vector.shape == (7,)
    assert strategies.extract_eis_word(h, h, h).vector.shape == (7,)
    assert strategies.extract_eis_sentence(h).vector.shape == (7,)
    assert strategies.make_sequence(h, "TEX").matrix.shape == (5, 7)


def test_full_scale_width_5120():
    # the full-scale dump width; three short answer matrices of width 5120
    rng = np.random.default_rng(9)
    parts = [rng.standard_normal((2, 5120)) for _ in range(3)]
    token = strategies.extract_eis_word(*parts)
    assert token.vector.shape == (5120,)
