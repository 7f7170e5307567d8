"""Finite-difference verification of layer backward passes.

The check builds the scalar objective L = sum(forward(x) * R) for a fixed
random cotangent R, computes its gradient once analytically through the
layer's backward pass and once by central differences, and reports the
worst per-tensor relative error.  Central differences are an independent
oracle: they never touch the backward code.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation

# Relative-error denominator floor; keeps zero-gradient tensors from
# amplifying finite-difference rounding noise into spurious failures.
_REL_FLOOR = 1e-6


def _relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(np.abs(analytic).max(initial=0.0),
                np.abs(numeric).max(initial=0.0), _REL_FLOOR)
    return float(np.abs(analytic - numeric).max(initial=0.0) / scale)


def _numeric_grad(objective, arr: np.ndarray, eps: float) -> np.ndarray:
    grad = np.zeros_like(arr)
    flat = arr.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = objective()
        flat[i] = orig - eps
        lo = objective()
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * eps)
    return grad


def gradient_check(layer, input: np.ndarray, eps: float = 1e-5,
                   rng: np.random.Generator | None = None) -> float:
    """Compare analytic gradients to central differences; return max relative error."""
    if not 0 < eps <= 1e-2:
        raise ContractViolation(f"gradient_check: eps must be in (0, 1e-2], got {eps}")
    rng = rng or np.random.default_rng(0)
    x = np.array(input, dtype=np.float64)
    out = layer.forward(x)
    cotangent = rng.standard_normal(out.shape)

    def objective() -> float:
        return float(np.sum(layer.forward(x) * cotangent))

    grad = layer.backward(x, cotangent)
    worst = _relative_error(grad.d_input, _numeric_grad(objective, x, eps))
    for name, analytic in grad.d_params.items():
        param = layer.params[name]
        numeric = _numeric_grad(objective, param, eps)
        worst = max(worst, _relative_error(analytic, numeric))
    return worst
