"""Tests for weighted BCE, class weights and the total loss."""

import math

import numpy as np
import pytest

from src.core.exceptions import DataError, DimensionError, NumericError
from src.services.objective.loss import ClassWeights, class_weights, total_loss, weighted_bce
from src.services.tensor_engine import grad_check, precision
from src.services.tensor_engine.tensor import Tensor


def _bce(x, y, w):
    return weighted_bce(Tensor(np.array([[x]])), np.array([[y]]), np.array([w])).item()


class TestWeightedBCE:
    def test_hand_values(self):
        assert _bce(0.0, 1, 1.0) == pytest.approx(0.693147, abs=1e-5)
        assert _bce(0.0, 1, 2.0) == pytest.approx(1.386294, abs=1e-5)

    def test_negative_term_is_not_weighted(self):
        assert _bce(0.0, 0, 5.0) == pytest.approx(math.log(2.0), abs=1e-6)

    def test_confident_correct_prediction_costs_nothing(self):
        assert _bce(80.0, 1, 1.0) == pytest.approx(0.0, abs=1e-6)
        assert _bce(-80.0, 0, 1.0) == pytest.approx(0.0, abs=1e-6)

    def test_finite_over_logit_range(self):
        logits = np.linspace(-80, 80, 161).reshape(7, 23)
        rng = np.random.default_rng(0)
        labels = rng.integers(0, 2, size=logits.shape)
        loss = weighted_bce(Tensor(logits), labels, np.full(23, 3.0)).item()
        assert math.isfinite(loss)

    def test_nonnegative_on_random_inputs(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n, c = rng.integers(1, 6, size=2)
            logits = Tensor(rng.normal(scale=10.0, size=(n, c)))
            labels = rng.integers(0, 2, size=(n, c))
            weights = rng.uniform(0.0, 5.0, size=c) + 1e-3
            assert weighted_bce(logits, labels, weights).item() >= 0.0

    def test_positive_contribution_decreases_with_logit(self):
        values = [_bce(x, 1, 1.0) for x in np.linspace(-5, 5, 21)]
        assert all(a > b for a, b in zip(values, values[1:], strict=False))

    def test_mean_over_samples_sum_over_classes(self):
        logits = Tensor(np.zeros((4, 3)))
        labels = np.ones((4, 3))
        assert weighted_bce(logits, labels, np.ones(3)).item() == pytest.approx(3 * math.log(2.0), rel=1e-6)

    def test_non_binary_labels(self):
        with pytest.raises(DataError, match="binary"):
            weighted_bce(Tensor(np.zeros((1, 2))), np.array([[0.5, 1.0]]), np.ones(2))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            weighted_bce(Tensor(np.zeros((2, 3))), np.zeros((2, 4)), np.ones(3))
        with pytest.raises(DimensionError):
            weighted_bce(Tensor(np.zeros((2, 3))), np.zeros((2, 3)), np.ones(2))

    def test_gradient_at_float64(self):
        rng = np.random.default_rng(2)
        with precision(np.float64):
            logits = Tensor(rng.normal(scale=3.0, size=(5, 4)))
            labels = rng.integers(0, 2, size=(5, 4))
            weights = rng.uniform(0.5, 3.0, size=4)
            err = grad_check(lambda x: weighted_bce(x, labels, weights), logits)
        assert err <= 1e-6


class TestClassWeights:
    def test_balanced_counts_give_unit_weights(self):
        np.testing.assert_allclose(class_weights(np.full(4, 25), 100).w, 1.0)

    def test_half_frequency_doubles_weight(self):
        assert class_weights(np.array([50, 25, 100, 100]), 400).w[1] == pytest.approx(4.0)
        assert class_weights(np.array([50, 12.5, 100, 100]), 200).w[1] == pytest.approx(4.0)
        assert class_weights(np.array([5, 10]), 40).w[1] == pytest.approx(2.0)

    def test_absent_class_uses_unit_floor(self):
        assert class_weights(np.array([0, 10, 10]), 30).w[0] == pytest.approx(10.0)
        assert class_weights(np.array([0, 1]), 1000).w[0] == pytest.approx(100.0)

    def test_clamped_from_below(self):
        assert class_weights(np.array([100, 1]), 100).w[0] == pytest.approx(0.5)
        assert class_weights(np.array([100] + [0] * 99), 100).w[0] == pytest.approx(0.1)

    def test_negative_counts(self):
        with pytest.raises(DataError, match="non-negative"):
            class_weights(np.array([-1, 2]), 10)

    def test_counts_above_total(self):
        with pytest.raises(DataError):
            class_weights(np.array([11, 2]), 10)

    def test_weights_must_be_positive(self):
        with pytest.raises(DataError):
            ClassWeights(np.array([1.0, 0.0]))


class TestTotalLoss:
    def test_sum(self):
        parts = [Tensor(np.array(v)) for v in (1.0, 2.0, 3.0, 4.0)]
        assert total_loss(*parts).item() == pytest.approx(10.0)
        assert total_loss(*(Tensor(np.array(0.0)) for _ in range(4))).item() == 0.0

    def test_non_finite_names_head(self):
        parts = [Tensor(np.array(v)) for v in (1.0, 2.0, np.nan, 4.0)]
        with pytest.raises(NumericError, match="target"):
            total_loss(*parts)

    def test_gradient_is_sum_of_head_gradients(self):
        rng = np.random.default_rng(3)
        with precision(np.float64):
            shared = Tensor(rng.normal(size=(3, 4)), requires_grad=True)
            labels = [rng.integers(0, 2, size=(3, 4)) for _ in range(4)]

            def head(k):
                return weighted_bce(shared * float(k + 1), labels[k], np.ones(4))

            expected = np.zeros((3, 4))
            for k in range(4):
                shared.zero_grad()
                head(k).backward()
                expected += shared.grad

            shared.zero_grad()
            total_loss(*(head(k) for k in range(4))).backward()

        np.testing.assert_allclose(shared.grad, expected, rtol=1e-12, atol=1e-12)
