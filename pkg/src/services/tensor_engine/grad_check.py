"""Central-difference gradient verification."""

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np
from loguru import logger

from src.core.exceptions import ContractError, NumericError
from src.services.tensor_engine.tensor import Tensor


def grad_check(
    function: Callable[..., Tensor],
    points: Tensor | Sequence[Tensor],
    step: float = 1e-6,
    max_coordinates: int | None = None,
    seed: int = 0,
) -> float:
    """Compare reverse-mode gradients with central differences.

    ``function(*points)`` must return a scalar tensor. Points are perturbed
    in place, so a closure over module parameters works as well as explicit
    inputs. Returns the maximum over checked coordinates of
    ``|analytic - numeric| / max(1, |analytic|)``.

    Args:
        function: Scalar-valued function of the points.
        points: Tensor or tensors to differentiate with respect to.
        step: Finite-difference step.
        max_coordinates: When set, check a seeded random subset of at most
            this many coordinates per point instead of all of them.
        seed: Seed for the coordinate subset.
    """
    tensors = [points] if isinstance(points, Tensor) else list(points)
    if not tensors:
        raise ContractError("grad_check needs at least one point")
    for t in tensors:
        if t.dtype != np.float64:
            logger.warning(f"grad_check on {t.dtype} data; use float64 for meaningful errors")
        t.requires_grad = True
        t.grad = None

    loss = function(*tensors)
    value = loss.item()
    if not np.isfinite(value):
        raise NumericError(f"grad_check: function value is {value} at the base point")
    loss.backward()
    analytic = [t.grad.copy() if t.grad is not None else np.zeros_like(t.data) for t in tensors]

    rng = np.random.default_rng(seed)
    worst = 0.0
    for k, t in enumerate(tensors):
        coords = list(np.ndindex(t.shape))
        if max_coordinates is not None and len(coords) > max_coordinates:
            chosen = rng.choice(len(coords), size=max_coordinates, replace=False)
            coords = [coords[i] for i in sorted(chosen)]
        for idx in coords:
            original = t.data[idx].copy()
            t.data[idx] = original + step
            plus = function(*tensors).item()
            t.data[idx] = original - step
            minus = function(*tensors).item()
            t.data[idx] = original

            a = float(analytic[k][idx])
            if not (np.isfinite(plus) and np.isfinite(minus) and np.isfinite(a)):
                raise NumericError(
                    f"grad_check: non-finite value at tensor {k} coordinate {idx}"
                )
            numeric = (plus - minus) / (2.0 * step)
            worst = max(worst, abs(a - numeric) / max(1.0, abs(a)))

    logger.debug(f"grad_check over {len(tensors)} tensor(s): max relative error {worst:.3e}")
    return worst
