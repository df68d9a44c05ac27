"""Module system: parameter registration, train/eval mode, state dicts."""

from __future__ import annotations

from collections.abc import Iterator
from typing import Any

import numpy as np

from src.core.exceptions import ConfigurationError
from src.services.tensor_engine import functional as F
from src.services.tensor_engine.tensor import Tensor, get_default_dtype


class Parameter(Tensor):
    """A trainable tensor. Its dotted name is assigned by the owning module tree."""

    def __init__(self, data: Any, dtype: Any = None):
        super().__init__(data, requires_grad=True, dtype=dtype)


class Module:
    """Base class for layers and models.

    Parameters, buffers and sub-modules are discovered from instance
    attributes, including lists of modules, so subclasses only assign them.
    """

    def __init__(self) -> None:
        self.training = True

    def __call__(self, *args: Any, **kwargs: Any) -> Any:
        return self.forward(*args, **kwargs)

    def forward(self, *args: Any, **kwargs: Any) -> Any:
        raise NotImplementedError

    # ── traversal ───────────────────────────────────────────────────────

    def _children(self) -> Iterator[tuple[str, Any]]:
        for name, value in vars(self).items():
            if isinstance(value, Parameter | Module | F.RunningMoments):
                yield name, value
            elif isinstance(value, list | tuple):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield f"{name}.{i}", item

    def named_modules(self, prefix: str = "") -> Iterator[tuple[str, Module]]:
        yield prefix, self
        for name, child in self._children():
            if isinstance(child, Module):
                yield from child.named_modules(_join(prefix, name))

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Parameter]]:
        for name, child in self._children():
            full = _join(prefix, name)
            if isinstance(child, Parameter):
                yield full, child
            elif isinstance(child, Module):
                yield from child.named_parameters(full)

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def named_buffers(self, prefix: str = "") -> Iterator[tuple[str, np.ndarray]]:
        """Running statistics, exposed as ``<path>.running_mean`` / ``.running_var``."""
        for name, child in self._children():
            full = _join(prefix, name)
            if isinstance(child, F.RunningMoments):
                yield f"{full}.running_mean", child.mean
                yield f"{full}.running_var", child.var
            elif isinstance(child, Module):
                yield from child.named_buffers(full)

    # ── mode / grads ────────────────────────────────────────────────────

    def train(self, mode: bool = True) -> Module:
        for _, module in self.named_modules():
            module.training = mode
        return self

    def eval(self) -> Module:
        return self.train(False)

    @property
    def mode(self) -> str:
        return "train" if self.training else "eval"

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    # ── state ───────────────────────────────────────────────────────────

    def state_dict(self) -> dict[str, np.ndarray]:
        state = {name: p.data.copy() for name, p in self.named_parameters()}
        state.update({name: buf.copy() for name, buf in self.named_buffers()})
        return state

    def buffer_snapshot(self) -> dict[str, np.ndarray]:
        return {name: buf.copy() for name, buf in self.named_buffers()}

    def restore_buffers(self, snapshot: dict[str, np.ndarray]) -> None:
        """Write running statistics from ``buffer_snapshot`` back in place."""
        for name, buf in self.named_buffers():
            buf[...] = snapshot[name]

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        targets: dict[str, np.ndarray] = {n: p.data for n, p in self.named_parameters()}
        targets.update(dict(self.named_buffers()))

        missing = sorted(set(targets) - set(state))
        unexpected = sorted(set(state) - set(targets))
        if missing or unexpected:
            raise ConfigurationError(
                f"state dict does not match model: missing={missing[:5]} unexpected={unexpected[:5]}"
            )
        for name, target in targets.items():
            value = np.asarray(state[name])
            if value.shape != target.shape:
                raise ConfigurationError(
                    f"state entry {name} has shape {value.shape}, model expects {target.shape}"
                )
            target[...] = value

    def astype(self, dtype: Any) -> Module:
        """Cast every parameter and buffer in place (e.g. to float64 for grad checks)."""
        dtype = np.dtype(dtype)
        for _, p in self.named_parameters():
            p.data = p.data.astype(dtype)
            p.grad = None
        for _, module in self.named_modules():
            for value in vars(module).values():
                if isinstance(value, F.RunningMoments):
                    value.mean = value.mean.astype(dtype)
                    value.var = value.var.astype(dtype)
        return self

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())


def _join(prefix: str, name: str) -> str:
    return f"{prefix}.{name}" if prefix else name


def _he(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, gain: float = 2.0) -> Parameter:
    std = np.sqrt(gain / fan_in)
    return Parameter(rng.normal(0.0, std, size=shape), dtype=get_default_dtype())


def _zeros(shape: tuple[int, ...]) -> Parameter:
    return Parameter(np.zeros(shape), dtype=get_default_dtype())


# ── layers ──────────────────────────────────────────────────────────────


class Conv2d(Module):
    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        rng: np.random.Generator,
        stride: int = 1,
        padding: int = 0,
    ):
        super().__init__()
        fan_in = in_channels * kernel_size * kernel_size
        self.weight = _he(rng, (out_channels, in_channels, kernel_size, kernel_size), fan_in)
        self.bias = _zeros((out_channels,))
        self.stride = stride
        self.padding = padding

    def forward(self, x: Tensor) -> Tensor:
        return F.conv2d(x, self.weight, self.bias, stride=self.stride, padding=self.padding)


class Conv1d(Module):
    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        rng: np.random.Generator,
        padding: int = 0,
    ):
        super().__init__()
        self.weight = _he(rng, (out_channels, in_channels, kernel_size), in_channels * kernel_size)
        self.bias = _zeros((out_channels,))
        self.padding = padding

    def forward(self, x: Tensor) -> Tensor:
        return F.conv1d(x, self.weight, self.bias, padding=self.padding)


class BatchNorm(Module):
    """Batch normalization over axis 1 of inputs of any rank >= 2."""

    def __init__(self, channels: int, eps: float = F.BN_EPS, momentum: float = F.BN_MOMENTUM):
        super().__init__()
        dtype = get_default_dtype()
        self.gamma = Parameter(np.ones(channels), dtype=dtype)
        self.beta = Parameter(np.zeros(channels), dtype=dtype)
        self.moments = F.RunningMoments.fresh(channels, dtype=dtype)
        self.eps = eps
        self.momentum = momentum

    def forward(self, x: Tensor) -> Tensor:
        return F.batchnorm(
            x, self.gamma, self.beta, self.moments, self.mode, eps=self.eps, momentum=self.momentum
        )


class Linear(Module):
    """``x @ weight + bias`` with ``weight[in, out]``."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        super().__init__()
        self.weight = _he(rng, (in_features, out_features), in_features, gain=1.0)
        self.bias = _zeros((out_features,))

    def forward(self, x: Tensor) -> Tensor:
        return x @ self.weight + self.bias


class ReLU(Module):
    def forward(self, x: Tensor) -> Tensor:
        return F.relu(x)


class Sequential(Module):
    def __init__(self, *layers: Module):
        super().__init__()
        self.layers = list(layers)

    def forward(self, x: Tensor) -> Tensor:
        for layer in self.layers:
            x = layer(x)
        return x


class MultiHeadAttention(Module):
    """Learned q/k/v/output projections around ``multi_head_attention``."""

    def __init__(self, dim: int, heads: int, rng: np.random.Generator):
        super().__init__()
        if heads < 1 or dim % heads != 0:
            raise ConfigurationError(f"attention width {dim} is not divisible by {heads} heads")
        self.heads = heads
        self.q_proj = Linear(dim, dim, rng)
        self.k_proj = Linear(dim, dim, rng)
        self.v_proj = Linear(dim, dim, rng)
        self.out_proj = Linear(dim, dim, rng)

    def forward(self, query: Tensor, key: Tensor, value: Tensor) -> Tensor:
        attended = F.multi_head_attention(
            self.q_proj(query), self.k_proj(key), self.v_proj(value), self.heads
        )
        return self.out_proj(attended)
