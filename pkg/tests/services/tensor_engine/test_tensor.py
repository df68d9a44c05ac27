"""Tests for Tensor, the gradient tape and elementwise ops."""

import numpy as np
import pytest

from src.core.exceptions import ContractError, DimensionError
from src.services.tensor_engine import ops, precision
from src.services.tensor_engine.tensor import Tensor, get_default_dtype, is_grad_enabled, no_grad


class TestTensorBasics:
    def test_default_dtype_is_float32(self):
        assert Tensor([1, 2, 3]).dtype == np.float32

    def test_precision_context_restores_dtype(self):
        with precision(np.float64):
            assert Tensor([1.0]).dtype == np.float64
        assert get_default_dtype() == np.float32

    def test_no_grad_skips_the_tape(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        with no_grad():
            assert not is_grad_enabled()
            y = (x * x).sum()
        assert is_grad_enabled()
        assert y._ctx is None and not y.requires_grad
        with pytest.raises(ContractError):
            y.backward()

    def test_shape_and_size(self):
        t = Tensor(np.zeros((2, 3, 4)))
        assert t.shape == (2, 3, 4)
        assert t.size == 24
        assert t.ndim == 3

    def test_item_requires_single_element(self):
        with pytest.raises(ContractError):
            Tensor([1.0, 2.0]).item()


class TestBackward:
    def test_sum_gives_ones(self):
        x = Tensor(np.arange(6.0).reshape(2, 3), requires_grad=True)
        x.sum().backward()
        np.testing.assert_array_equal(x.grad, np.ones((2, 3)))

    def test_sigmoid_at_zero(self):
        x = Tensor([0.0], requires_grad=True)
        ops.sigmoid(x).sum().backward()
        assert x.grad[0] == pytest.approx(0.25)

    def test_square_at_three(self):
        x = Tensor(3.0, requires_grad=True)
        (x * x).backward()
        assert float(x.grad) == pytest.approx(6.0)

    def test_repeated_backward_accumulates(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        (x * 2.0).sum().backward()
        (x * 2.0).sum().backward()
        np.testing.assert_array_equal(x.grad, [4.0, 4.0])

    def test_zero_grad_resets(self):
        x = Tensor([1.0], requires_grad=True)
        (x * 2.0).sum().backward()
        x.zero_grad()
        assert x.grad is None

    def test_gradient_linearity(self):
        rng = np.random.default_rng(0)
        with precision(np.float64):
            data = rng.normal(size=(3, 4))

            def loss_a(x):
                return (ops.sigmoid(x) * x).sum()

            def loss_b(x):
                return ops.softplus(x).mean()

            joint = Tensor(data, requires_grad=True)
            (loss_a(joint) + loss_b(joint)).backward()

            split = Tensor(data, requires_grad=True)
            loss_a(split).backward()
            loss_b(split).backward()

        np.testing.assert_allclose(joint.grad, split.grad, rtol=0, atol=1e-12)

    def test_non_scalar_loss_is_contract_error(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        with pytest.raises(ContractError):
            (x * 2.0).backward()

    def test_constant_loss_is_contract_error(self):
        with pytest.raises(ContractError):
            Tensor(1.0).backward()

    def test_broadcast_gradient_is_summed(self):
        x = Tensor(np.ones((2, 3)), requires_grad=True)
        b = Tensor(np.ones(3), requires_grad=True)
        (x + b).sum().backward()
        np.testing.assert_array_equal(b.grad, [2.0, 2.0, 2.0])

    def test_shared_subexpression(self):
        x = Tensor([2.0], requires_grad=True)
        y = x * 3.0
        (y * y + y).sum().backward()
        # d/dx (9x^2 + 3x) = 18x + 3
        assert x.grad[0] == pytest.approx(39.0)


class TestShapeAlgebra:
    def test_incompatible_broadcast_raises(self):
        with pytest.raises(DimensionError):
            Tensor(np.ones((2, 3))) + Tensor(np.ones(4))

    def test_matmul_inner_mismatch_raises(self):
        with pytest.raises(DimensionError):
            Tensor(np.ones((2, 3))) @ Tensor(np.ones((2, 3)))

    def test_reshape_to_wrong_size_raises(self):
        with pytest.raises(DimensionError):
            Tensor(np.ones(6)).reshape(4, 2)

    def test_concatenate_mismatch_raises(self):
        with pytest.raises(DimensionError):
            ops.concatenate([Tensor(np.ones((2, 3))), Tensor(np.ones((2, 4)))], axis=0)

    def test_stack_mismatch_raises(self):
        with pytest.raises(DimensionError):
            ops.stack([Tensor(np.ones(2)), Tensor(np.ones(3))])

    def test_concatenate_backward_splits(self):
        a = Tensor(np.ones((1, 2)), requires_grad=True)
        b = Tensor(np.ones((2, 2)), requires_grad=True)
        out = ops.concatenate([a, b], axis=0)
        (out * Tensor(np.arange(6.0).reshape(3, 2))).sum().backward()
        np.testing.assert_array_equal(a.grad, [[0.0, 1.0]])
        np.testing.assert_array_equal(b.grad, [[2.0, 3.0], [4.0, 5.0]])

    def test_index_backward_scatters(self):
        x = Tensor(np.zeros((2, 3)), requires_grad=True)
        x[:, 1].sum().backward()
        np.testing.assert_array_equal(x.grad, [[0, 1, 0], [0, 1, 0]])


class TestRanges:
    def test_sigmoid_open_interval(self):
        x = Tensor(np.linspace(-30, 30, 101))
        out = ops.sigmoid(x).numpy()
        assert np.all(out > 0.0) and np.all(out < 1.0)

    @pytest.mark.parametrize("dtype", [np.float32, np.float64])
    def test_sigmoid_saturated_inputs_stay_open(self, dtype):
        with precision(dtype):
            out = ops.sigmoid(Tensor([-200.0, -40.0, 17.0, 40.0, 200.0])).numpy()
        assert out.dtype == dtype
        assert np.all(out > 0.0) and np.all(out < 1.0)
        assert np.all(np.diff(out) >= 0.0)

    def test_relu_non_negative(self):
        out = ops.relu(Tensor(np.linspace(-3, 3, 13))).numpy()
        assert np.all(out >= 0.0)

    def test_softplus_is_stable_for_large_inputs(self):
        with precision(np.float64):
            out = ops.softplus(Tensor([-800.0, 0.0, 800.0])).numpy()
        np.testing.assert_allclose(out, [0.0, np.log(2.0), 800.0], atol=1e-12)

    def test_softmax_rows_sum_to_one(self):
        out = ops.softmax(Tensor(np.random.default_rng(1).normal(size=(4, 5))), axis=-1)
        np.testing.assert_allclose(out.numpy().sum(axis=-1), np.ones(4), rtol=1e-6)
