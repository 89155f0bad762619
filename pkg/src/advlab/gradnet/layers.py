"""Layer specifications and their forward/backward kernels.

All activations are channels-last: batches are (N, H, W, C) before
flattening and (N, D) after. Convolution uses an im2col matmul; its cache
keeps the patch matrix so the backward pass is a pair of matmuls plus a
col2im scatter.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import NonPositiveTemperatureError

KINDS = ("conv", "relu", "maxpool", "dropout", "flatten", "dense", "sigmoid", "softmax")


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    out_channels: int | None = None
    kernel_size: int | None = None
    pad: str = "same"
    stride: int = 1
    window: int | None = None
    rate: float | None = None
    width: int | None = None
    temperature: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if self.kind == "conv":
            if self.kernel_size is None or self.kernel_size % 2 == 0:
                raise ValueError("conv kernel size must be odd")
            if self.out_channels is None or self.out_channels < 1:
                raise ValueError("conv needs out_channels >= 1")
            if self.pad not in ("same", "valid"):
                raise ValueError(f"unknown pad mode {self.pad!r}")
        if self.kind == "dropout" and not (0.0 <= (self.rate or 0.0) < 1.0):
            raise ValueError("dropout rate must lie in [0, 1)")
        if self.kind == "softmax" and self.temperature <= 0.0:
            raise NonPositiveTemperatureError("temperature must be > 0")

    def with_temperature(self, t: float) -> "LayerSpec":
        if t <= 0.0:
            raise NonPositiveTemperatureError("temperature must be > 0")
        return replace(self, temperature=t)


def conv(out_channels: int, kernel_size: int = 3, pad: str = "same", stride: int = 1) -> LayerSpec:
    return LayerSpec("conv", out_channels=out_channels, kernel_size=kernel_size, pad=pad, stride=stride)


def relu() -> LayerSpec:
    return LayerSpec("relu")


def maxpool(window: int = 2, stride: int | None = None) -> LayerSpec:
    return LayerSpec("maxpool", window=window, stride=stride if stride is not None else window)


def dropout(rate: float) -> LayerSpec:
    return LayerSpec("dropout", rate=rate)


def flatten() -> LayerSpec:
    return LayerSpec("flatten")


def dense(width: int) -> LayerSpec:
    return LayerSpec("dense", width=width)


def sigmoid() -> LayerSpec:
    return LayerSpec("sigmoid")


def softmax(temperature: float = 1.0) -> LayerSpec:
    return LayerSpec("softmax", temperature=temperature)


# --- kernels ---------------------------------------------------------------


def conv_forward(x, w, b, pad, stride):
    n, h, wd, _ = x.shape
    kh, kw, cin, f = w.shape
    if pad == "same":
        p = kh // 2
        xp = np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)))
    else:
        p = 0
        xp = x
    view = sliding_window_view(xp, (kh, kw), axis=(1, 2))[:, ::stride, ::stride]
    oh, ow = view.shape[1], view.shape[2]
    cols = np.ascontiguousarray(view.transpose(0, 1, 2, 4, 5, 3)).reshape(
        n, oh, ow, kh * kw * cin
    )
    y = cols @ w.reshape(-1, f) + b
    cache = (cols, x.shape, xp.shape, p)
    return y, cache


def conv_backward(dy, w, cache, stride):
    cols, x_shape, xp_shape, p = cache
    kh, kw, cin, f = w.shape
    n, oh, ow, _ = dy.shape
    db = dy.sum(axis=(0, 1, 2))
    dw = (cols.reshape(-1, kh * kw * cin).T @ dy.reshape(-1, f)).reshape(w.shape)
    dcols = (dy @ w.reshape(-1, f).T).reshape(n, oh, ow, kh, kw, cin)
    dxp = np.zeros(xp_shape)
    for a in range(kh):
        for c in range(kw):
            dxp[:, a : a + oh * stride : stride, c : c + ow * stride : stride, :] += dcols[
                :, :, :, a, c, :
            ]
    _, h, wd, _ = x_shape
    dx = dxp[:, p : p + h, p : p + wd, :]
    return dx, dw, db


def maxpool_forward(x, window, stride):
    n, h, w, c = x.shape
    view = sliding_window_view(x, (window, window), axis=(1, 2))[:, ::stride, ::stride]
    oh, ow = view.shape[1], view.shape[2]
    flat = view.reshape(n, oh, ow, c, window * window)
    idx = flat.argmax(axis=-1)
    y = np.take_along_axis(flat, idx[..., None], axis=-1)[..., 0]
    cache = (idx, x.shape, oh, ow)
    return y, cache


def maxpool_backward(dy, cache, window, stride):
    idx, x_shape, oh, ow = cache
    n, h, w, c = x_shape
    dx = np.zeros(x_shape)
    ni, oi, oj, ci = np.indices((n, oh, ow, c))
    rows = oi * stride + idx // window
    cols = oj * stride + idx % window
    np.add.at(dx, (ni, rows, cols, ci), dy)
    return dx


def dropout_forward(x, rate, rng, train):
    if not train or rate == 0.0:
        return x, None
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * mask, mask


def dropout_backward(dy, mask):
    return dy if mask is None else dy * mask


def stable_sigmoid(z):
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softmax_with_temperature(logits: np.ndarray, temperature: float) -> np.ndarray:
    """Temperature-scaled softmax along the last axis.

    Larger temperatures flatten the distribution toward uniform; the
    computation is shifted by the row max for stability.
    """
    if temperature <= 0.0:
        raise NonPositiveTemperatureError(f"temperature must be > 0, got {temperature}")
    z = np.asarray(logits, dtype=float) / temperature
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)
