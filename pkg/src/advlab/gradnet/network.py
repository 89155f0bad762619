"""Network container: build, forward inference, loss, exact backprop.

The last layer must be a sigmoid or softmax head. Losses fuse the head
with binary/categorical cross-entropy so the backward pass starts from the
analytic logit gradient. `input_gradient` always runs in eval mode
(dropout off), which is the regime attacks operate in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import (
    EmptyBatchError,
    InvalidLabelError,
    ShapeMismatchError,
)
from .layers import (
    LayerSpec,
    conv,
    conv_backward,
    conv_forward,
    dense,
    dropout,
    dropout_backward,
    dropout_forward,
    flatten,
    maxpool,
    maxpool_backward,
    maxpool_forward,
    relu,
    sigmoid,
    softmax,
    softmax_with_temperature,
    stable_sigmoid,
)

_EPS = 1e-7  # probability clamp before logs


def propagate_shapes(specs: list[LayerSpec], input_shape: tuple) -> list[tuple]:
    """Activation shape after every layer; raises ShapeMismatchError."""
    shape = tuple(input_shape)
    shapes = [shape]
    for i, spec in enumerate(specs):
        k = spec.kind
        if k == "conv":
            if len(shape) != 3:
                raise ShapeMismatchError(f"layer {i}: conv needs (H, W, C) input, got {shape}", i)
            h, w, _ = shape
            if spec.pad == "same":
                if spec.stride != 1:
                    raise ShapeMismatchError(f"layer {i}: same-padded conv requires stride 1", i)
                shape = (h, w, spec.out_channels)
            else:
                kh = spec.kernel_size
                if h < kh or w < kh:
                    raise ShapeMismatchError(f"layer {i}: kernel {kh} exceeds input {shape}", i)
                shape = ((h - kh) // spec.stride + 1, (w - kh) // spec.stride + 1, spec.out_channels)
        elif k == "maxpool":
            if len(shape) != 3:
                raise ShapeMismatchError(f"layer {i}: maxpool needs (H, W, C) input", i)
            h, w, c = shape
            if h < spec.window or w < spec.window:
                raise ShapeMismatchError(f"layer {i}: window {spec.window} exceeds input {shape}", i)
            shape = ((h - spec.window) // spec.stride + 1, (w - spec.window) // spec.stride + 1, c)
        elif k == "flatten":
            if len(shape) != 3:
                raise ShapeMismatchError(f"layer {i}: flatten needs (H, W, C) input", i)
            shape = (int(np.prod(shape)),)
        elif k == "dense":
            if len(shape) != 1:
                raise ShapeMismatchError(f"layer {i}: dense needs flat input, got {shape}", i)
            shape = (spec.width,)
        elif k == "sigmoid":
            if shape != (1,):
                raise ShapeMismatchError(f"layer {i}: sigmoid head needs width 1, got {shape}", i)
            if i != len(specs) - 1:
                raise ShapeMismatchError(f"layer {i}: head must be the final layer", i)
        elif k == "softmax":
            if len(shape) != 1 or shape[0] < 2:
                raise ShapeMismatchError(f"layer {i}: softmax head needs width >= 2, got {shape}", i)
            if i != len(specs) - 1:
                raise ShapeMismatchError(f"layer {i}: head must be the final layer", i)
        # relu and dropout keep the shape
        shapes.append(shape)
    if not specs or specs[-1].kind not in ("sigmoid", "softmax"):
        raise ShapeMismatchError("network must end in a sigmoid or softmax head", len(specs) - 1)
    return shapes


@dataclass
class Network:
    specs: list[LayerSpec]
    input_shape: tuple
    params: list[dict]
    shapes: list[tuple]
    rng: np.random.Generator
    mode: str = "eval"

    @property
    def head(self) -> LayerSpec:
        return self.specs[-1]

    @property
    def parameter_count(self) -> int:
        return sum(int(a.size) for layer in self.params for a in layer.values())

    def train_mode(self) -> "Network":
        self.mode = "train"
        return self

    def eval_mode(self) -> "Network":
        self.mode = "eval"
        return self

    def set_temperature(self, t: float) -> None:
        self.specs[-1] = self.specs[-1].with_temperature(t)

    # --- inference -----------------------------------------------------

    def _as_batch(self, x: np.ndarray) -> tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=float)
        if x.shape == self.input_shape:
            return x[None], True
        if x.shape[1:] == self.input_shape:
            return x, False
        raise ShapeMismatchError(
            f"input shape {x.shape} does not match network input {self.input_shape}"
        )

    def _run(self, xb: np.ndarray, train: bool, keep: bool):
        """Forward pass; returns (head output, logits, caches)."""
        act = xb
        caches = []
        for spec, params in zip(self.specs[:-1], self.params[:-1]):
            act, cache = self._layer_forward(spec, params, act, train)
            caches.append(cache if keep else None)
        z = act
        if self.specs[-1].kind == "sigmoid":
            out = stable_sigmoid(z)
        else:
            out = softmax_with_temperature(z, self.specs[-1].temperature)
        return out, z, caches

    def _layer_forward(self, spec, params, act, train):
        k = spec.kind
        if k == "conv":
            return conv_forward(act, params["w"], params["b"], spec.pad, spec.stride)
        if k == "relu":
            return np.maximum(act, 0.0), act > 0
        if k == "maxpool":
            return maxpool_forward(act, spec.window, spec.stride)
        if k == "dropout":
            return dropout_forward(act, spec.rate, self.rng, train)
        if k == "flatten":
            n = act.shape[0]
            return act.reshape(n, -1), act.shape
        if k == "dense":
            return act @ params["w"] + params["b"], act
        raise AssertionError(f"unexpected mid-stack layer {k}")

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Head probabilities: scalar in (0,1) for sigmoid, vector for softmax."""
        xb, single = self._as_batch(x)
        out, _, _ = self._run(xb, train=self.mode == "train", keep=False)
        if self.head.kind == "sigmoid":
            out = out[:, 0]
        return out[0] if single else out

    def logits(self, x: np.ndarray) -> np.ndarray:
        """Pre-head activations (temperature not applied)."""
        xb, single = self._as_batch(x)
        _, z, _ = self._run(xb, train=False, keep=False)
        return z[0] if single else z

    def predict(self, x: np.ndarray):
        """Hard labels: sigmoid thresholds at 0.5, softmax takes the argmax."""
        p = self.forward(x)
        if self.head.kind == "sigmoid":
            return (np.asarray(p) > 0.5).astype(int)
        return np.asarray(p).argmax(axis=-1)

    def score(self, x: np.ndarray):
        """Scalar score of the positive class, for ranking metrics."""
        p = self.forward(x)
        if self.head.kind == "sigmoid":
            return p
        return p[..., 1]

    # --- losses and gradients -------------------------------------------

    def _targets(self, yb, n: int) -> np.ndarray:
        if self.head.kind == "sigmoid":
            y = np.asarray(yb, dtype=float).reshape(n)
            if ((y < 0) | (y > 1)).any():
                raise InvalidLabelError("sigmoid labels must lie in [0, 1]")
            return y
        k = self.shapes[-1][0]
        y = np.asarray(yb)
        if y.dtype.kind in "iub":
            y = y.reshape(n).astype(int)
            if (y < 0).any() or (y >= k).any():
                raise InvalidLabelError(f"class labels must be ints in [0, {k})")
            onehot = np.zeros((n, k))
            onehot[np.arange(n), y] = 1.0
            return onehot
        if y.size != n * k:
            raise InvalidLabelError(f"soft labels must be (n, {k}) probability vectors")
        y = y.reshape(n, k)
        if (y < 0).any() or (np.abs(y.sum(axis=1) - 1) > 1e-6).any():
            raise InvalidLabelError("soft labels must be probability vectors")
        return y

    def _loss_from_out(self, out: np.ndarray, targets: np.ndarray) -> float:
        if self.head.kind == "sigmoid":
            p = np.clip(out[:, 0], _EPS, 1.0 - _EPS)
            per = -(targets * np.log(p) + (1.0 - targets) * np.log(1.0 - p))
        else:
            p = np.clip(out, _EPS, 1.0 - _EPS)
            per = -(targets * np.log(p)).sum(axis=1)
        return float(per.mean())

    def loss(self, x: np.ndarray, y) -> float:
        """Cross-entropy of the head against y (mean over a batch)."""
        xb, _ = self._as_batch(x)
        targets = self._targets(y, xb.shape[0])
        out, _, _ = self._run(xb, train=self.mode == "train", keep=False)
        return self._loss_from_out(out, targets)

    def _backprop_layers(self, caches, dz):
        """Push a logit gradient back to the input; collects param grads."""
        grads: list[dict] = [{} for _ in self.specs]
        dact = dz
        for i in range(len(self.specs) - 2, -1, -1):
            spec, params, cache = self.specs[i], self.params[i], caches[i]
            k = spec.kind
            if k == "conv":
                dact, dw, db = conv_backward(dact, params["w"], cache, spec.stride)
                grads[i] = {"w": dw, "b": db}
            elif k == "relu":
                dact = dact * cache
            elif k == "maxpool":
                dact = maxpool_backward(dact, cache, spec.window, spec.stride)
            elif k == "dropout":
                dact = dropout_backward(dact, cache)
            elif k == "flatten":
                dact = dact.reshape(cache)
            elif k == "dense":
                grads[i] = {"w": cache.T @ dact, "b": dact.sum(axis=0)}
                dact = dact @ params["w"].T
        return dact, grads

    def _backward(self, xb, yb, train: bool):
        n = xb.shape[0]
        targets = self._targets(yb, n)
        out, z, caches = self._run(xb, train=train, keep=True)
        loss = self._loss_from_out(out, targets)
        if self.head.kind == "sigmoid":
            dz = (out - targets[:, None]) / n
        else:
            dz = (out - targets) / (self.head.temperature * n)
        dact, grads = self._backprop_layers(caches, dz)
        return loss, dact, grads

    def logit_backprop(self, x: np.ndarray, dz: np.ndarray) -> np.ndarray:
        """Gradient of dz . logits w.r.t. the input (eval mode).

        For a binary margin pass dz = [1] (sigmoid head) or [-1, 1]
        (2-logit softmax head).
        """
        xb, single = self._as_batch(x)
        _, _, caches = self._run(xb, train=False, keep=True)
        dz = np.broadcast_to(np.asarray(dz, dtype=float), (xb.shape[0], self.shapes[-1][0]))
        dx, _ = self._backprop_layers(caches, dz)
        return dx[0] if single else dx

    def input_gradient(self, x: np.ndarray, y) -> np.ndarray:
        """Exact gradient of the loss w.r.t. every input pixel (eval mode)."""
        xb, single = self._as_batch(x)
        _, dx, _ = self._backward(xb, y, train=False)
        dx = dx * xb.shape[0]  # undo batch mean: per-sample gradients
        return dx[0] if single else dx

    def param_gradients(self, xs: np.ndarray, ys) -> tuple[float, list[dict]]:
        """Loss and parameter gradients averaged over the batch."""
        xs = np.asarray(xs, dtype=float)
        if xs.shape == self.input_shape:
            xs = xs[None]
        if xs.shape[0] == 0:
            raise EmptyBatchError("gradient of an empty batch")
        loss, _, grads = self._backward(xs, ys, train=self.mode == "train")
        return loss, grads


def build(specs: list[LayerSpec], input_shape: tuple, seed: int = 0) -> Network:
    """Instantiate a network: validate shapes, init parameters uniform
    in +-1/sqrt(fan_in), deterministic per seed."""
    shapes = propagate_shapes(specs, tuple(input_shape))
    rng = np.random.default_rng(seed)
    params: list[dict] = []
    for spec, in_shape in zip(specs, shapes[:-1]):
        if spec.kind == "conv":
            kh = spec.kernel_size
            cin = in_shape[2]
            bound = 1.0 / np.sqrt(kh * kh * cin)
            params.append(
                {
                    "w": rng.uniform(-bound, bound, size=(kh, kh, cin, spec.out_channels)),
                    "b": rng.uniform(-bound, bound, size=(spec.out_channels,)),
                }
            )
        elif spec.kind == "dense":
            fan_in = in_shape[0]
            bound = 1.0 / np.sqrt(fan_in)
            params.append(
                {
                    "w": rng.uniform(-bound, bound, size=(fan_in, spec.width)),
                    "b": rng.uniform(-bound, bound, size=(spec.width,)),
                }
            )
        else:
            params.append({})
    return Network(specs=list(specs), input_shape=tuple(input_shape), params=params, shapes=shapes, rng=rng)


def reference_cnn_specs(input_hw: int = 126, scale: float = 1.0) -> tuple[list[LayerSpec], tuple]:
    """Stock grayscale CNN descriptor used by the harness.

    At full width on a 126x126x1 input the stack holds exactly 60,307,326
    parameters. `scale` shrinks every width for desk-scale runs.
    """

    def s(width: int) -> int:
        return max(1, round(width * scale))

    specs = [
        conv(s(50), 3, pad="same"),
        relu(),
        conv(s(75), 3, pad="same"),
        relu(),
        maxpool(2, 2),
        dropout(0.25),
        conv(s(125), 3, pad="same"),
        relu(),
        maxpool(2, 2),
        dropout(0.25),
        flatten(),
        dense(s(500)),
        relu(),
        dropout(0.4),
        dense(s(250)),
        relu(),
        dropout(0.3),
        dense(1),
        sigmoid(),
    ]
    return specs, (input_hw, input_hw, 1)


def promote_to_softmax(specs: list[LayerSpec], temperature: float = 1.0) -> list[LayerSpec]:
    """Rewrite a sigmoid head as a 2-logit softmax head (for distillation)."""
    if specs[-1].kind == "softmax":
        return specs[:-1] + [softmax(temperature)]
    if specs[-1].kind != "sigmoid" or specs[-2].kind != "dense":
        raise ShapeMismatchError("expected a dense+sigmoid head to promote")
    return specs[:-2] + [dense(2), softmax(temperature)]
