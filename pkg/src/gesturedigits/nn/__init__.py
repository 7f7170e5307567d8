"""Dense-tensor math and differentiable layer primitives.

Tensors are realized as C-contiguous float64 numpy arrays throughout; all
training-path arithmetic is double precision so the finite-difference
gradient tolerances are meaningful.
"""

from .tensor import LayerGrad, as_tensor, ensure_finite
from .ops import (
    conv2d_forward,
    conv2d_backward,
    relu,
    relu_backward,
    maxpool2x2,
    maxpool2x2_backward,
    dense,
    dense_backward,
    softmax,
    cross_entropy,
    softmax_cross_entropy_grad,
    l2_penalty,
    sgd_step,
)
from .layers import Conv2d, ReLU, MaxPool2x2, Dense, Flatten
from .gradcheck import gradient_check

__all__ = [
    "LayerGrad",
    "as_tensor",
    "ensure_finite",
    "conv2d_forward",
    "conv2d_backward",
    "relu",
    "relu_backward",
    "maxpool2x2",
    "maxpool2x2_backward",
    "dense",
    "dense_backward",
    "softmax",
    "cross_entropy",
    "softmax_cross_entropy_grad",
    "l2_penalty",
    "sgd_step",
    "Conv2d",
    "ReLU",
    "MaxPool2x2",
    "Dense",
    "Flatten",
    "gradient_check",
]
