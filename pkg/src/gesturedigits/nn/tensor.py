"""Tensor representation and the gradient carrier.

A "tensor" in this package is a C-contiguous float64 numpy array.  Shapes
are numpy shapes; data is row-major by construction.  Public operations
promise finite outputs, enforced through :func:`ensure_finite`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractViolation


def as_tensor(data) -> np.ndarray:
    """Coerce array-like input to a C-contiguous float64 array."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    return arr


def ensure_finite(name: str, arr: np.ndarray) -> np.ndarray:
    """Raise ContractViolation if `arr` contains NaN or Inf."""
    if not np.isfinite(arr).all():
        raise ContractViolation(f"{name}: non-finite values in tensor of shape {arr.shape}")
    return arr


def is_bias_name(name: str) -> bool:
    """Parameter naming convention: the last dot component 'bias' marks a bias."""
    return name.split(".")[-1] == "bias"


@dataclass
class LayerGrad:
    """Gradients produced by a layer's backward pass.

    d_input matches the forward input's shape; d_params maps parameter
    names to gradients with the parameters' exact shapes.
    """

    d_input: np.ndarray
    d_params: dict[str, np.ndarray] = field(default_factory=dict)
