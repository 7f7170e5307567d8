"""Layer objects wrapping the functional primitives.

Each layer holds its own parameter arrays and implements the small
protocol used by gradient_check and by models.Network:

    forward(x) -> y
    backward(x, upstream) -> LayerGrad
    params -> dict of name -> array   (setter replaces arrays)
    out_shape(in_shape) -> tuple
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation
from . import ops
from .tensor import LayerGrad, as_tensor


class Layer:
    """Stateless base: no parameters, identity shape."""

    @property
    def params(self) -> dict[str, np.ndarray]:
        return {}

    @params.setter
    def params(self, new: dict[str, np.ndarray]) -> None:
        if new:
            raise ContractViolation(f"{type(self).__name__} takes no parameters")

    def out_shape(self, in_shape: tuple[int, ...]) -> tuple[int, ...]:
        return in_shape

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, x: np.ndarray, upstream: np.ndarray) -> LayerGrad:
        raise NotImplementedError


class Conv2d(Layer):
    def __init__(self, kernels, bias, stride: int = 1, padding: int = 0):
        self.kernels = as_tensor(kernels)
        self.bias = as_tensor(bias)
        self.stride = stride
        self.padding = padding

    @property
    def params(self) -> dict[str, np.ndarray]:
        return {"kernels": self.kernels, "bias": self.bias}

    @params.setter
    def params(self, new: dict[str, np.ndarray]) -> None:
        self.kernels = new["kernels"]
        self.bias = new["bias"]

    def out_shape(self, in_shape):
        c, h, w = in_shape
        k, _, kh, kw = self.kernels.shape
        return (k,
                (h + 2 * self.padding - kh) // self.stride + 1,
                (w + 2 * self.padding - kw) // self.stride + 1)

    def forward(self, x):
        return ops.conv2d_forward(x, self.kernels, self.bias, self.stride, self.padding)

    def backward(self, x, upstream):
        return ops.conv2d_backward(x, self.kernels, upstream, self.stride, self.padding)


class ReLU(Layer):
    def forward(self, x):
        return ops.relu(x)

    def backward(self, x, upstream):
        return LayerGrad(d_input=ops.relu_backward(x, upstream))


class MaxPool2x2(Layer):
    def out_shape(self, in_shape):
        c, h, w = in_shape
        return (c, h // 2, w // 2)

    def forward(self, x):
        return ops.maxpool2x2(x)

    def backward(self, x, upstream):
        return LayerGrad(d_input=ops.maxpool2x2_backward(x, upstream))


class Flatten(Layer):
    def out_shape(self, in_shape):
        return (int(np.prod(in_shape)),)

    def forward(self, x):
        return x.reshape(-1)

    def backward(self, x, upstream):
        return LayerGrad(d_input=upstream.reshape(x.shape))


class Dense(Layer):
    def __init__(self, weights, bias):
        self.weights = as_tensor(weights)
        self.bias = as_tensor(bias)

    @property
    def params(self) -> dict[str, np.ndarray]:
        return {"weights": self.weights, "bias": self.bias}

    @params.setter
    def params(self, new: dict[str, np.ndarray]) -> None:
        self.weights = new["weights"]
        self.bias = new["bias"]

    def out_shape(self, in_shape):
        return (self.weights.shape[0],)

    def forward(self, x):
        return ops.dense(x, self.weights, self.bias)

    def backward(self, x, upstream):
        return ops.dense_backward(x, self.weights, upstream)
