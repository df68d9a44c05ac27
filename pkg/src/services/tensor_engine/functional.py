"""Neural-network primitives built on the tensor engine.

Convolutions are cross-correlations (no kernel flip) with zero padding and
are evaluated as one ``tensordot`` per kernel offset. Batch normalization and
attention are compositions of the differentiable ops in ``ops``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.core.exceptions import ConfigurationError, DegenerateBatchError, DimensionError
from src.services.tensor_engine import ops
from src.services.tensor_engine.ops import relu, sigmoid, softmax, softplus
from src.services.tensor_engine.tensor import Function, Tensor

__all__ = [
    "RunningMoments",
    "batchnorm",
    "conv1d",
    "conv2d",
    "global_avg_pool",
    "multi_head_attention",
    "relu",
    "scaled_dot_product_attention",
    "sigmoid",
    "softmax",
    "softplus",
]

BN_MOMENTUM = 0.1
BN_EPS = 1e-5


# ── convolution ─────────────────────────────────────────────────────────


class Conv2d(Function):
    def forward(self, x, w, b, *, stride: int, padding: tuple[int, int]):
        ph, pw = padding
        _, _, kh, kw = w.shape
        xp = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
        h_out = (xp.shape[2] - kh) // stride + 1
        w_out = (xp.shape[3] - kw) // stride + 1

        acc = np.zeros((x.shape[0], h_out, w_out, w.shape[0]), dtype=x.dtype)
        for i in range(kh):
            for j in range(kw):
                patch = xp[:, :, i : i + stride * h_out : stride, j : j + stride * w_out : stride]
                acc += np.tensordot(patch, w[:, :, i, j], axes=([1], [1]))

        self.xp, self.w = xp, w
        self.stride, self.padding = stride, padding
        self.out_hw = (h_out, w_out)
        return np.moveaxis(acc, 3, 1) + b.reshape(1, -1, 1, 1)

    def backward(self, grad):
        xp, w, s = self.xp, self.w, self.stride
        h_out, w_out = self.out_hw
        _, _, kh, kw = w.shape

        gxp = np.zeros_like(xp)
        gw = np.zeros_like(w)
        for i in range(kh):
            for j in range(kw):
                window = (slice(None), slice(None), slice(i, i + s * h_out, s), slice(j, j + s * w_out, s))
                gw[:, :, i, j] = np.tensordot(grad, xp[window], axes=([0, 2, 3], [0, 2, 3]))
                gxp[window] += np.moveaxis(np.tensordot(grad, w[:, :, i, j], axes=([1], [0])), 3, 1)

        ph, pw = self.padding
        gx = gxp[:, :, ph : gxp.shape[2] - ph, pw : gxp.shape[3] - pw]
        return gx, gw, grad.sum(axis=(0, 2, 3))


def conv2d(
    x: Tensor,
    weight: Tensor,
    bias: Tensor,
    stride: int = 1,
    padding: int | tuple[int, int] = 0,
) -> Tensor:
    """2-D cross-correlation of ``x[b,c,h,w]`` with ``weight[c_out,c,kh,kw]``."""
    pad = (padding, padding) if isinstance(padding, int) else tuple(padding)
    if x.ndim != 4 or weight.ndim != 4:
        raise DimensionError(
            f"conv2d expects input[b,c,h,w] and kernel[c_out,c,kh,kw], got {x.shape} and {weight.shape}"
        )
    if x.shape[1] != weight.shape[1]:
        raise DimensionError(
            f"conv2d channel mismatch: input {x.shape} vs kernel {weight.shape}"
        )
    if bias.shape != (weight.shape[0],):
        raise DimensionError(f"conv2d bias {bias.shape} does not match kernel {weight.shape}")
    if stride < 1 or min(pad) < 0:
        raise ConfigurationError(f"conv2d needs stride >= 1 and padding >= 0, got {stride}, {pad}")
    if weight.shape[2] > x.shape[2] + 2 * pad[0] or weight.shape[3] > x.shape[3] + 2 * pad[1]:
        raise DimensionError(
            f"conv2d kernel {weight.shape} larger than padded input {x.shape} (padding {pad})"
        )
    return Conv2d.apply(x, weight, bias, stride=stride, padding=pad)


def conv1d(x: Tensor, weight: Tensor, bias: Tensor, padding: int = 0) -> Tensor:
    """1-D cross-correlation of ``x[b,c,L]`` with ``weight[c_out,c,k]``.

    Output length is ``L + 2*padding - k + 1``.
    """
    if x.ndim != 3 or weight.ndim != 3:
        raise DimensionError(
            f"conv1d expects input[b,c,L] and kernel[c_out,c,k], got {x.shape} and {weight.shape}"
        )
    if x.shape[1] != weight.shape[1]:
        raise DimensionError(
            f"conv1d channel mismatch: input {x.shape} vs kernel {weight.shape}"
        )
    if weight.shape[2] > x.shape[2] + 2 * padding:
        raise DimensionError(
            f"conv1d kernel {weight.shape} longer than padded input {x.shape} (padding {padding})"
        )
    b, c, length = x.shape
    out = conv2d(
        x.reshape(b, c, 1, length),
        weight.reshape(weight.shape[0], c, 1, weight.shape[2]),
        bias,
        stride=1,
        padding=(0, padding),
    )
    return out.reshape(b, weight.shape[0], out.shape[3])


# ── normalization ───────────────────────────────────────────────────────


@dataclass
class RunningMoments:
    """Per-channel running mean / variance updated in place."""

    mean: np.ndarray
    var: np.ndarray

    @classmethod
    def fresh(cls, channels: int, dtype=None) -> RunningMoments:
        dtype = dtype or np.float32
        return cls(np.zeros(channels, dtype=dtype), np.ones(channels, dtype=dtype))

    def update(self, batch_mean: np.ndarray, batch_var: np.ndarray, momentum: float) -> None:
        self.mean *= 1.0 - momentum
        self.mean += momentum * batch_mean.astype(self.mean.dtype)
        self.var *= 1.0 - momentum
        self.var += momentum * batch_var.astype(self.var.dtype)


def batchnorm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    state: RunningMoments,
    mode: Literal["train", "eval"] = "train",
    eps: float = BN_EPS,
    momentum: float = BN_MOMENTUM,
) -> Tensor:
    """Normalize over every axis except the channel axis 1.

    Train mode uses batch statistics and folds them into ``state`` (the
    running variance uses the unbiased estimate). Eval mode is the fixed
    affine map given by ``state``.
    """
    if x.ndim < 2:
        raise DimensionError(f"batchnorm needs a channel axis, got shape {x.shape}")
    channels = x.shape[1]
    if gamma.shape != (channels,) or beta.shape != (channels,):
        raise DimensionError(
            f"batchnorm affine shapes {gamma.shape}/{beta.shape} do not match input {x.shape}"
        )
    axes = tuple(a for a in range(x.ndim) if a != 1)
    bshape = (1, channels) + (1,) * (x.ndim - 2)

    if mode == "train":
        count = x.size // channels
        if count < 2:
            raise DegenerateBatchError(
                f"batchnorm in train mode needs >= 2 elements per channel, input {x.shape}"
            )
        mean = x.mean(axis=axes, keepdims=True)
        centered = x - mean
        var = (centered * centered).mean(axis=axes, keepdims=True)
        x_hat = centered / (var + eps) ** 0.5
        state.update(
            mean.data.reshape(channels),
            var.data.reshape(channels) * (count / (count - 1)),
            momentum,
        )
    elif mode == "eval":
        mean = state.mean.reshape(bshape).astype(x.dtype)
        scale = (1.0 / np.sqrt(state.var + eps)).reshape(bshape).astype(x.dtype)
        x_hat = (x - mean) * scale
    else:
        raise ConfigurationError(f"batchnorm mode must be 'train' or 'eval', got {mode!r}")

    return x_hat * gamma.reshape(bshape) + beta.reshape(bshape)


# ── pooling ─────────────────────────────────────────────────────────────


def global_avg_pool(x: Tensor) -> Tensor:
    """Mean over the trailing two (spatial) axes."""
    if x.ndim < 2:
        raise DimensionError(f"global_avg_pool needs rank >= 2, got shape {x.shape}")
    return x.mean(axis=(-2, -1))


# ── attention ───────────────────────────────────────────────────────────


def scaled_dot_product_attention(q: Tensor, k: Tensor, v: Tensor) -> tuple[Tensor, Tensor]:
    """softmax(q kᵀ / sqrt(d)) v over the key axis; returns (output, weights)."""
    if q.shape[-1] != k.shape[-1] or k.shape[-2] != v.shape[-2]:
        raise DimensionError(
            f"attention shapes disagree: q {q.shape}, k {k.shape}, v {v.shape}"
        )
    scores = (q @ ops.transpose(k, _swap_last(k.ndim))) / math.sqrt(q.shape[-1])
    weights = softmax(scores, axis=-1)
    return weights @ v, weights


def multi_head_attention(q: Tensor, k: Tensor, v: Tensor, heads: int) -> Tensor:
    """Split the feature axis into ``heads`` groups and attend per group.

    ``q[b,n_q,d]``, ``k[b,n_k,d]``, ``v[b,n_k,d]`` → ``[b,n_q,d]``.
    """
    if heads < 1 or q.shape[-1] % heads != 0:
        raise ConfigurationError(
            f"feature dimension {q.shape[-1]} is not divisible by {heads} heads"
        )
    if q.ndim != 3 or k.ndim != 3 or v.ndim != 3:
        raise DimensionError(
            f"multi_head_attention expects rank-3 inputs, got {q.shape}, {k.shape}, {v.shape}"
        )
    if k.shape != v.shape or q.shape[0] != k.shape[0] or q.shape[2] != k.shape[2]:
        raise DimensionError(
            f"multi_head_attention shapes disagree: q {q.shape}, k {k.shape}, v {v.shape}"
        )
    b, n_q, d = q.shape
    n_k = k.shape[1]
    dh = d // heads

    def split(t: Tensor, n: int) -> Tensor:
        return t.reshape(b, n, heads, dh).transpose(0, 2, 1, 3)

    out, _ = scaled_dot_product_attention(split(q, n_q), split(k, n_k), split(v, n_k))
    return out.transpose(0, 2, 1, 3).reshape(b, n_q, d)


def _swap_last(ndim: int) -> tuple[int, ...]:
    axes = list(range(ndim))
    axes[-1], axes[-2] = axes[-2], axes[-1]
    return tuple(axes)
