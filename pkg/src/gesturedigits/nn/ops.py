"""Forward and backward passes for the layer primitives, plus SGD.

All functions are pure: inputs are never mutated and outputs are fresh
arrays.  "Convolution" here is cross-correlation (no kernel flip), the
universal deep-learning convention.
"""

from __future__ import annotations

from collections.abc import Collection

import numpy as np

from ..errors import ContractViolation
from .tensor import LayerGrad, ensure_finite, is_bias_name

CROSS_ENTROPY_EPS = 1e-12


def _conv_check(input: np.ndarray, kernels: np.ndarray, bias: np.ndarray | None,
                stride: int, padding: int) -> tuple[int, int]:
    if input.ndim != 3:
        raise ContractViolation(f"conv2d: input must be CxHxW, got shape {input.shape}")
    if kernels.ndim != 4:
        raise ContractViolation(f"conv2d: kernels must be KxCxkHxkW, got shape {kernels.shape}")
    c, h, w = input.shape
    k, kc, kh, kw = kernels.shape
    if kc != c:
        raise ContractViolation(f"conv2d: kernel channels {kc} != input channels {c}")
    if bias is not None and bias.shape != (k,):
        raise ContractViolation(f"conv2d: bias shape {bias.shape} != ({k},)")
    if stride < 1:
        raise ContractViolation(f"conv2d: stride must be >= 1, got {stride}")
    if padding < 0:
        raise ContractViolation(f"conv2d: padding must be >= 0, got {padding}")
    if kh > h + 2 * padding or kw > w + 2 * padding:
        raise ContractViolation(
            f"conv2d: kernel {kh}x{kw} larger than padded input "
            f"{h + 2 * padding}x{w + 2 * padding}")
    out_h = (h + 2 * padding - kh) // stride + 1
    out_w = (w + 2 * padding - kw) // stride + 1
    return out_h, out_w


def _pad(input: np.ndarray, padding: int) -> np.ndarray:
    if padding == 0:
        return input
    return np.pad(input, ((0, 0), (padding, padding), (padding, padding)))


def conv2d_forward(input: np.ndarray, kernels: np.ndarray, bias: np.ndarray,
                   stride: int = 1, padding: int = 0) -> np.ndarray:
    """Cross-correlate CxHxW input with KxCxkHxkW kernels, add per-filter bias."""
    out_h, out_w = _conv_check(input, kernels, bias, stride, padding)
    k, _, kh, kw = kernels.shape
    padded = _pad(input, padding)
    out = np.zeros((k, out_h, out_w))
    for i in range(kh):
        for j in range(kw):
            view = padded[:, i:i + stride * out_h:stride, j:j + stride * out_w:stride]
            out += np.einsum("kc,cyx->kyx", kernels[:, :, i, j], view)
    out += bias[:, None, None]
    return ensure_finite("conv2d_forward", out)


def conv2d_backward(input: np.ndarray, kernels: np.ndarray, upstream: np.ndarray,
                    stride: int = 1, padding: int = 0) -> LayerGrad:
    """Analytic gradients of conv2d_forward w.r.t. input, kernels and bias."""
    out_h, out_w = _conv_check(input, kernels, None, stride, padding)
    k, c, kh, kw = kernels.shape
    if upstream.shape != (k, out_h, out_w):
        raise ContractViolation(
            f"conv2d_backward: upstream shape {upstream.shape} != ({k}, {out_h}, {out_w})")
    padded = _pad(input, padding)
    d_kernels = np.zeros_like(kernels)
    d_padded = np.zeros_like(padded)
    for i in range(kh):
        for j in range(kw):
            view = padded[:, i:i + stride * out_h:stride, j:j + stride * out_w:stride]
            d_kernels[:, :, i, j] = np.einsum("kyx,cyx->kc", upstream, view)
            d_view = d_padded[:, i:i + stride * out_h:stride, j:j + stride * out_w:stride]
            d_view += np.einsum("kyx,kc->cyx", upstream, kernels[:, :, i, j])
    d_bias = upstream.sum(axis=(1, 2))
    h, w = input.shape[1:]
    d_input = d_padded[:, padding:padding + h, padding:padding + w]
    return LayerGrad(d_input=np.ascontiguousarray(d_input),
                     d_params={"kernels": d_kernels, "bias": d_bias})


def relu(input: np.ndarray) -> np.ndarray:
    """Elementwise max(0, x)."""
    return np.maximum(input, 0.0)


def relu_backward(input: np.ndarray, upstream: np.ndarray) -> np.ndarray:
    """Pass upstream where input > 0, zero elsewhere (subgradient 0 at the kink)."""
    if upstream.shape != input.shape:
        raise ContractViolation(
            f"relu_backward: upstream shape {upstream.shape} != input shape {input.shape}")
    return np.where(input > 0.0, upstream, 0.0)


def maxpool2x2(input: np.ndarray) -> np.ndarray:
    """Reduce each non-overlapping 2x2 window of a CxHxW tensor to its maximum."""
    if input.ndim != 3:
        raise ContractViolation(f"maxpool2x2: input must be CxHxW, got shape {input.shape}")
    c, h, w = input.shape
    if h % 2 or w % 2:
        raise ContractViolation(f"maxpool2x2: H and W must be even, got {h}x{w}")
    windows = input.reshape(c, h // 2, 2, w // 2, 2).transpose(0, 1, 3, 2, 4)
    return windows.reshape(c, h // 2, w // 2, 4).max(axis=-1)


def maxpool2x2_backward(input: np.ndarray, upstream: np.ndarray) -> np.ndarray:
    """Route upstream to each window's argmax (first in row-major order on ties)."""
    c, h, w = input.shape
    if h % 2 or w % 2:
        raise ContractViolation(f"maxpool2x2_backward: H and W must be even, got {h}x{w}")
    if upstream.shape != (c, h // 2, w // 2):
        raise ContractViolation(
            f"maxpool2x2_backward: upstream shape {upstream.shape} != ({c}, {h // 2}, {w // 2})")
    windows = input.reshape(c, h // 2, 2, w // 2, 2).transpose(0, 1, 3, 2, 4)
    flat = windows.reshape(c, h // 2, w // 2, 4)
    # np.argmax returns the first maximal index, which is the row-major tie rule
    winners = np.argmax(flat, axis=-1)
    d_flat = np.zeros_like(flat)
    np.put_along_axis(d_flat, winners[..., None], upstream[..., None], axis=-1)
    d_input = d_flat.reshape(c, h // 2, w // 2, 2, 2).transpose(0, 1, 3, 2, 4).reshape(c, h, w)
    return np.ascontiguousarray(d_input)


def dense(input: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Affine map W @ x + b for a length-N input and MxN weights."""
    if input.ndim != 1 or weights.ndim != 2 or weights.shape[1] != input.shape[0]:
        raise ContractViolation(
            f"dense: weights {weights.shape} incompatible with input {input.shape}")
    if bias.shape != (weights.shape[0],):
        raise ContractViolation(f"dense: bias shape {bias.shape} != ({weights.shape[0]},)")
    return ensure_finite("dense", weights @ input + bias)


def dense_backward(input: np.ndarray, weights: np.ndarray,
                   upstream: np.ndarray) -> LayerGrad:
    """Gradients of the affine map: d_W = u x^T, d_b = u, d_x = W^T u."""
    if upstream.shape != (weights.shape[0],):
        raise ContractViolation(
            f"dense_backward: upstream shape {upstream.shape} != ({weights.shape[0]},)")
    return LayerGrad(d_input=weights.T @ upstream,
                     d_params={"weights": np.outer(upstream, input),
                               "bias": upstream.copy()})


def softmax(logits: np.ndarray) -> np.ndarray:
    """Stable softmax: exponentials of max-shifted logits, normalized to sum 1."""
    if logits.ndim != 1 or logits.shape[0] < 1:
        raise ContractViolation(f"softmax: logits must be a non-empty vector, got {logits.shape}")
    shifted = logits - logits.max()
    exps = np.exp(shifted)
    return exps / exps.sum()


def cross_entropy(probs: np.ndarray, target_class: int) -> float:
    """Negative log-probability of the target class, floored at 1e-12 inside the log."""
    if not 0 <= target_class < probs.shape[0]:
        raise ContractViolation(
            f"cross_entropy: target {target_class} out of range [0, {probs.shape[0]})")
    return float(-np.log(probs[target_class] + CROSS_ENTROPY_EPS))


def softmax_cross_entropy_grad(probs: np.ndarray, target_class: int) -> np.ndarray:
    """Combined softmax + cross-entropy gradient w.r.t. the logits: probs - one_hot."""
    if not 0 <= target_class < probs.shape[0]:
        raise ContractViolation(
            f"softmax_cross_entropy_grad: target {target_class} out of range "
            f"[0, {probs.shape[0]})")
    grad = probs.copy()
    grad[target_class] -= 1.0
    return grad


def l2_penalty(params: dict[str, np.ndarray], lam: float) -> float:
    """lambda * sum of squared weight entries; bias tensors are excluded."""
    if lam < 0:
        raise ContractViolation(f"l2_penalty: lambda must be >= 0, got {lam}")
    total = 0.0
    for name, value in params.items():
        if not is_bias_name(name):
            total += float(np.sum(value * value))
    return lam * total


def sgd_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
             learning_rate: float, lam: float = 0.0,
             frozen: Collection[str] = ()) -> dict[str, np.ndarray]:
    """One SGD step with decoupled L2 decay on weights.

    Weights update as w - lr*(g + 2*lambda*w); biases as b - lr*g.  Names in
    `frozen` are skipped entirely and returned unchanged.
    """
    if learning_rate <= 0:
        raise ContractViolation(f"sgd_step: learning_rate must be > 0, got {learning_rate}")
    frozen = set(frozen)
    updated: dict[str, np.ndarray] = {}
    for name, value in params.items():
        if name in frozen:
            updated[name] = value
            continue
        if name not in grads:
            raise ContractViolation(f"sgd_step: missing gradient for parameter '{name}'")
        g = grads[name]
        if g.shape != value.shape:
            raise ContractViolation(
                f"sgd_step: gradient shape {g.shape} != parameter shape {value.shape} "
                f"for '{name}'")
        if is_bias_name(name):
            updated[name] = value - learning_rate * g
        else:
            updated[name] = value - learning_rate * (g + 2.0 * lam * value)
    return updated
