"""Network: an ordered stack of named layers with per-parameter trainable flags.

Parameter names are "<layer>.<param>", e.g. "conv1.kernels".  The
architecture descriptor is a canonical JSON dict from which an identical
(zero-initialized) network can be rebuilt; checkpoints compare these
descriptors to detect mismatched loads.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import ContractViolation
from ..nn import ops
from ..nn.layers import Conv2d, Dense, Flatten, Layer, MaxPool2x2, ReLU


class Network:
    def __init__(self, input_shape: tuple[int, ...],
                 named_layers: list[tuple[str, Layer]],
                 softmax_head: bool,
                 descriptor: dict):
        self.input_shape = tuple(input_shape)
        self.named_layers = list(named_layers)
        self.softmax_head = softmax_head
        self.descriptor = descriptor
        self.trainable: dict[str, bool] = {name: True for name in self.params()}
        shape = self.input_shape
        for name, layer in self.named_layers:
            shape = layer.out_shape(shape)
        self.output_shape = shape

    # -- parameter plumbing ------------------------------------------------

    def params(self) -> dict[str, np.ndarray]:
        flat: dict[str, np.ndarray] = {}
        for name, layer in self.named_layers:
            for pname, value in layer.params.items():
                flat[f"{name}.{pname}"] = value
        return flat

    def assign_params(self, params: dict[str, np.ndarray]) -> None:
        for name, layer in self.named_layers:
            current = layer.params
            if not current:
                continue
            layer.params = {pname: params[f"{name}.{pname}"] for pname in current}

    def frozen_names(self) -> set[str]:
        return {name for name, flag in self.trainable.items() if not flag}

    def trainable_parameter_count(self) -> int:
        return sum(v.size for n, v in self.params().items() if self.trainable[n])

    def descriptor_json(self) -> str:
        return json.dumps(self.descriptor, sort_keys=True, separators=(",", ":"))

    # -- forward / backward --------------------------------------------------

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Full forward pass; applies the softmax head when the network has one."""
        out = self.forward_logits(x)
        if self.softmax_head:
            out = ops.softmax(out)
        return out

    def forward_logits(self, x: np.ndarray) -> np.ndarray:
        for _, layer in self.named_layers:
            x = layer.forward(x)
        return x

    def forward_collect(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Forward pass that keeps each layer's input for the backward pass."""
        inputs = []
        for _, layer in self.named_layers:
            inputs.append(x)
            x = layer.forward(x)
        return x, inputs

    def backward(self, inputs: list[np.ndarray],
                 d_logits: np.ndarray) -> dict[str, np.ndarray]:
        """Backpropagate a gradient at the logits; returns flat parameter grads."""
        grads: dict[str, np.ndarray] = {}
        upstream = d_logits
        for (name, layer), layer_in in zip(reversed(self.named_layers), reversed(inputs)):
            grad = layer.backward(layer_in, upstream)
            for pname, value in grad.d_params.items():
                grads[f"{name}.{pname}"] = value
            upstream = grad.d_input
        return grads


def _he_conv(rng: np.random.Generator, out_ch: int, in_ch: int, k: int) -> np.ndarray:
    std = np.sqrt(2.0 / (in_ch * k * k))
    return rng.standard_normal((out_ch, in_ch, k, k)) * std


def _he_dense(rng: np.random.Generator, out_dim: int, in_dim: int) -> np.ndarray:
    std = np.sqrt(2.0 / in_dim)
    return rng.standard_normal((out_dim, in_dim)) * std


def _trunk(rng: np.random.Generator, in_channels: int) -> list[tuple[str, Layer]]:
    """conv(8@3x3, pad 1)-relu-pool-conv(16@3x3, pad 1)-relu-pool."""
    return [
        ("conv1", Conv2d(_he_conv(rng, 8, in_channels, 3), np.zeros(8), stride=1, padding=1)),
        ("relu1", ReLU()),
        ("pool1", MaxPool2x2()),
        ("conv2", Conv2d(_he_conv(rng, 16, 8, 3), np.zeros(16), stride=1, padding=1)),
        ("relu2", ReLU()),
        ("pool2", MaxPool2x2()),
    ]


def _check_side(input_side: int, what: str) -> None:
    if input_side < 16 or input_side % 4 != 0:
        raise ContractViolation(
            f"{what}: input_side must be >= 16 and divisible by 4, got {input_side}")


def build_classifier(num_classes: int, input_side: int, seed: int = 0) -> Network:
    """Gesture classifier over a 1-channel input: two conv blocks, two dense layers, softmax."""
    _check_side(input_side, "build_classifier")
    if num_classes < 2:
        raise ContractViolation(f"build_classifier: need >= 2 classes, got {num_classes}")
    rng = np.random.default_rng(seed)
    layers = _trunk(rng, in_channels=1)
    flat_dim = 16 * (input_side // 4) ** 2
    layers += [
        ("flatten", Flatten()),
        ("dense1", Dense(_he_dense(rng, 64, flat_dim), np.zeros(64))),
        ("relu3", ReLU()),
        ("dense2", Dense(_he_dense(rng, num_classes, 64), np.zeros(num_classes))),
    ]
    descriptor = {
        "kind": "classifier",
        "input_shape": [1, input_side, input_side],
        "num_classes": num_classes,
        "trunk": "conv8-relu-pool-conv16-relu-pool",
        "head": "dense64-relu-dense",
        "softmax_head": True,
    }
    return Network((1, input_side, input_side), layers, softmax_head=True,
                   descriptor=descriptor)


def build_detector(grid_size: int, boxes_per_cell: int, num_classes: int,
                   input_side: int = 96, seed: int = 0) -> Network:
    """Grid detector over a 3-channel input; the head emits S*S*(B*5+C) raw values."""
    _check_side(input_side, "build_detector")
    rng = np.random.default_rng(seed)
    layers = _trunk(rng, in_channels=3)
    flat_dim = 16 * (input_side // 4) ** 2
    out_dim = grid_size * grid_size * (boxes_per_cell * 5 + num_classes)
    layers += [
        ("flatten", Flatten()),
        ("dense1", Dense(_he_dense(rng, 64, flat_dim), np.zeros(64))),
        ("relu3", ReLU()),
        ("dense2", Dense(_he_dense(rng, out_dim, 64), np.zeros(out_dim))),
    ]
    descriptor = {
        "kind": "detector",
        "input_shape": [3, input_side, input_side],
        "grid_size": grid_size,
        "boxes_per_cell": boxes_per_cell,
        "num_classes": num_classes,
        "trunk": "conv8-relu-pool-conv16-relu-pool",
        "head": "dense64-relu-dense",
        "softmax_head": False,
    }
    return Network((3, input_side, input_side), layers, softmax_head=False,
                   descriptor=descriptor)


def network_from_descriptor(descriptor: dict) -> Network:
    """Rebuild a zero-initialized network matching a checkpoint descriptor."""
    kind = descriptor.get("kind")
    side = descriptor["input_shape"][1]
    if kind == "classifier":
        return build_classifier(descriptor["num_classes"], side, seed=0)
    if kind == "detector":
        return build_detector(descriptor["grid_size"], descriptor["boxes_per_cell"],
                              descriptor["num_classes"], side, seed=0)
    raise ContractViolation(f"unknown network kind {kind!r} in descriptor")


def set_trainable(net: Network, layer_name_prefix: str, trainable: bool) -> Network:
    """Flag every parameter whose name starts with the prefix; SGD skips frozen ones."""
    matched = [name for name in net.trainable if name.startswith(layer_name_prefix)]
    if not matched:
        raise ContractViolation(
            f"set_trainable: prefix {layer_name_prefix!r} matches no parameter")
    for name in matched:
        net.trainable[name] = trainable
    return net


def transfer_parameters(src: Network, dst: Network, prefixes) -> list[str]:
    """Copy same-named, same-shaped parameters under the prefixes; returns the names."""
    src_params = src.params()
    dst_params = dst.params()
    copied = []
    for name, value in src_params.items():
        if any(name.startswith(p) for p in prefixes):
            if name in dst_params and dst_params[name].shape == value.shape:
                dst_params[name] = value.copy()
                copied.append(name)
    if not copied:
        raise ContractViolation(f"transfer_parameters: no parameter matched {prefixes!r}")
    dst.assign_params(dst_params)
    return copied
