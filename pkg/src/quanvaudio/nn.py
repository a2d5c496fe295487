"""Minimal trainable network with hand-rolled backprop and Adam.

Two fronts share one classical tail. The quantum models consume
precomputed 4x20x64 feature maps directly; the classical baseline adds a
2x2, 4-filter, stride-2 convolution so both fronts feed the tail with
identical shapes. Everything is float64 and deterministic per seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-5
    weight_decay: float = 1e-2
    batch_size: int = 20
    max_epochs: int = 10000
    patience: int = 30
    seed: int = 0
    decoupled_decay: bool = False

    def __post_init__(self):
        if min(self.lr, self.weight_decay, self.batch_size, self.max_epochs) <= 0:
            raise ValueError("lr, weight_decay, batch_size, max_epochs must be positive")
        if not 0 < self.patience < self.max_epochs:
            raise ValueError("patience must be in (0, max_epochs)")


class Layer:
    """Base layer; stateful only through cached activations and params."""

    params: dict[str, np.ndarray]
    grads: dict[str, np.ndarray]

    def __init__(self):
        self.params = {}
        self.grads = {}

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def out_shape(self, in_shape: tuple[int, ...]) -> tuple[int, ...]:
        raise NotImplementedError


class Conv2d(Layer):
    """Valid-padding cross-correlation."""

    def __init__(self, in_ch, out_ch, kernel, stride, rng: np.random.Generator):
        super().__init__()
        self.stride = stride
        self.kernel = kernel
        fan_in = in_ch * kernel * kernel
        bound = 1.0 / np.sqrt(fan_in)
        self.params["W"] = rng.uniform(-bound, bound, size=(out_ch, in_ch, kernel, kernel))
        self.params["b"] = rng.uniform(-bound, bound, size=out_ch)

    def forward(self, x):
        s, k = self.stride, self.kernel
        self._x_shape = x.shape
        b = x.shape[0]
        win = sliding_window_view(x, (k, k), axis=(2, 3))[:, :, ::s, ::s]
        _, c, ho, wo = win.shape[:4]
        self._out_hw = (ho, wo)
        # im2col: (B, ho*wo, C*k*k) contiguous so the products run as GEMMs
        col = np.ascontiguousarray(win.transpose(0, 2, 3, 1, 4, 5)).reshape(
            b, ho * wo, c * k * k
        )
        self._col = col
        f = self.params["W"].shape[0]
        out = col @ self.params["W"].reshape(f, -1).T  # (B, ho*wo, F)
        out = out.transpose(0, 2, 1).reshape(b, f, ho, wo)
        return out + self.params["b"][None, :, None, None]

    def backward(self, dout):
        s, k = self.stride, self.kernel
        b, f, ho, wo = dout.shape
        c = self._x_shape[1]
        wmat = self.params["W"].reshape(f, -1)
        dout_mat = dout.reshape(b, f, ho * wo).transpose(0, 2, 1)  # (B, hw, F)
        self.grads["W"] = (
            dout_mat.reshape(-1, f).T @ self._col.reshape(-1, c * k * k)
        ).reshape(self.params["W"].shape)
        self.grads["b"] = dout.sum(axis=(0, 2, 3))
        dwin = (dout_mat @ wmat).reshape(b, ho, wo, c, k, k)
        dx = np.zeros(self._x_shape)
        for i in range(k):
            for j in range(k):
                dx[:, :, i : i + s * ho : s, j : j + s * wo : s] += dwin[
                    ..., i, j
                ].transpose(0, 3, 1, 2)
        return dx

    def out_shape(self, in_shape):
        c, h, w = in_shape
        return (
            self.params["W"].shape[0],
            (h - self.kernel) // self.stride + 1,
            (w - self.kernel) // self.stride + 1,
        )


class ReLU(Layer):
    def forward(self, x):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dout):
        return np.where(self._mask, dout, 0.0)

    def out_shape(self, in_shape):
        return in_shape


class Tanh(Layer):
    def forward(self, x):
        self._y = np.tanh(x)
        return self._y

    def backward(self, dout):
        return dout * (1.0 - self._y**2)

    def out_shape(self, in_shape):
        return in_shape


class MaxPool(Layer):
    """Non-overlapping pooling; trailing remainder rows/columns dropped.

    Gradient is routed to the first argmax within each window.
    """

    def __init__(self, k=3):
        super().__init__()
        self.k = k

    def forward(self, x):
        k = self.k
        b, c, h, w = x.shape
        if h < k or w < k:
            raise ValueError(f"spatial dims {h}x{w} smaller than pool {k}")
        ho, wo = h // k, w // k
        self._in_shape = x.shape
        windows = (
            x[:, :, : ho * k, : wo * k]
            .reshape(b, c, ho, k, wo, k)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(b, c, ho, wo, k * k)
        )
        self._argmax = windows.argmax(axis=-1)
        return np.take_along_axis(windows, self._argmax[..., None], axis=-1)[..., 0]

    def backward(self, dout):
        k = self.k
        b, c, h, w = self._in_shape
        ho, wo = h // k, w // k
        dwin = np.zeros((b, c, ho, wo, k * k))
        np.put_along_axis(dwin, self._argmax[..., None], dout[..., None], axis=-1)
        dx = np.zeros(self._in_shape)
        dx[:, :, : ho * k, : wo * k] = (
            dwin.reshape(b, c, ho, wo, k, k)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(b, c, ho * k, wo * k)
        )
        return dx

    def out_shape(self, in_shape):
        c, h, w = in_shape
        return (c, h // self.k, w // self.k)


class Flatten(Layer):
    def forward(self, x):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dout):
        return dout.reshape(self._shape)

    def out_shape(self, in_shape):
        return (int(np.prod(in_shape)),)


class Linear(Layer):
    def __init__(self, in_dim, out_dim, rng: np.random.Generator):
        super().__init__()
        bound = 1.0 / np.sqrt(in_dim)
        self.params["W"] = rng.uniform(-bound, bound, size=(out_dim, in_dim))
        self.params["b"] = rng.uniform(-bound, bound, size=out_dim)

    def forward(self, x):
        self._x = x
        return x @ self.params["W"].T + self.params["b"]

    def backward(self, dout):
        self.grads["W"] = dout.T @ self._x
        self.grads["b"] = dout.sum(axis=0)
        return dout @ self.params["W"]

    def out_shape(self, in_shape):
        return (self.params["W"].shape[0],)


class Network:
    def __init__(self, layers: list[Layer], in_shape: tuple[int, ...]):
        self.layers = layers
        self.in_shape = in_shape
        # Fail fast if the layer chain is inconsistent.
        shape = in_shape
        self.shapes = [shape]
        for layer in layers:
            shape = layer.out_shape(shape)
            self.shapes.append(shape)

    def forward(self, x: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x)
        if not np.all(np.isfinite(x)):
            raise TrainingDiverged("non-finite activations in forward pass")
        return x

    def backward(self, dout: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout

    def parameters(self):
        for i, layer in enumerate(self.layers):
            for name, arr in layer.params.items():
                yield f"{i}.{name}", arr

    def gradients(self):
        for i, layer in enumerate(self.layers):
            for name in layer.params:
                yield f"{i}.{name}", layer.grads[name]

    def get_params(self) -> dict[str, np.ndarray]:
        return {name: arr.copy() for name, arr in self.parameters()}

    def set_params(self, params: dict[str, np.ndarray]) -> None:
        for i, layer in enumerate(self.layers):
            for name in layer.params:
                layer.params[name] = params[f"{i}.{name}"].copy()

    def n_params(self) -> int:
        return sum(arr.size for _, arr in self.parameters())


MODEL_KINDS = ("cnn_base", "qnn_basic", "qnn_strongly", "qnn_random")

QNN_TEMPLATE = {"qnn_basic": "BEQC", "qnn_strongly": "SEQC", "qnn_random": "RQC"}

GRAM_SHAPE = (1, 40, 128)
FEATURE_SHAPE = (4, 20, 64)


def build_model(kind: str, n_classes: int, seed: int) -> Network:
    """The shared tail behind either a classical conv front (cnn_base) or
    the precomputed quanvolutional features (qnn_*)."""
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    rng = np.random.default_rng(seed)
    layers: list[Layer] = []
    if kind == "cnn_base":
        layers += [Conv2d(1, 4, kernel=2, stride=2, rng=rng), ReLU()]
        in_shape = GRAM_SHAPE
    else:
        in_shape = FEATURE_SHAPE
    layers += [Conv2d(4, 32, kernel=3, stride=1, rng=rng), ReLU(), MaxPool(3), Flatten()]
    flat = int(np.prod(Network(layers, in_shape).shapes[-1]))
    layers += [Linear(flat, 64, rng), Tanh(), Linear(64, n_classes, rng)]
    return Network(layers, in_shape)


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray):
    """Mean CE over the batch; returns (loss, dlogits)."""
    n, k = logits.shape
    if labels.min() < 0 or labels.max() >= k:
        raise ValueError(f"labels must lie in [0, {k}), got range "
                         f"[{labels.min()}, {labels.max()}]")
    shifted = logits - logits.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(logsumexp - shifted[np.arange(n), labels]))
    probs = np.exp(shifted) / np.exp(shifted).sum(axis=1, keepdims=True)
    probs[np.arange(n), labels] -= 1.0
    return loss, probs / n


def loss_and_grads(model: Network, x: np.ndarray, labels: np.ndarray):
    if x.shape[0] == 0:
        raise ValueError("empty batch")
    logits = model.forward(x)
    loss, dlogits = softmax_cross_entropy(logits, labels)
    model.backward(dlogits)
    return loss, dict(model.gradients())


class Adam:
    """Adam with bias correction; weight decay is coupled L2 by default
    (added to the gradient), optionally decoupled."""

    def __init__(self, cfg: TrainConfig, beta1=0.9, beta2=0.999, eps=1e-8):
        self.cfg = cfg
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]):
        cfg = self.cfg
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for name, w in params.items():
            g = grads[name]
            if not cfg.decoupled_decay:
                g = g + cfg.weight_decay * w
            m = self.m.setdefault(name, np.zeros_like(w))
            v = self.v.setdefault(name, np.zeros_like(w))
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g**2
            update = cfg.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)
            if cfg.decoupled_decay:
                update = update + cfg.lr * cfg.weight_decay * w
            w -= update


@dataclass
class TrainResult:
    params: dict[str, np.ndarray]
    history: list[dict] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = np.inf


def evaluate(model: Network, x: np.ndarray, labels: np.ndarray, batch_size=256):
    """Returns (mean loss, accuracy, predictions)."""
    losses, preds = [], []
    for start in range(0, x.shape[0], batch_size):
        logits = model.forward(x[start : start + batch_size])
        loss, _ = softmax_cross_entropy(logits, labels[start : start + batch_size])
        losses.append(loss * logits.shape[0])
        preds.append(logits.argmax(axis=1))
    preds = np.concatenate(preds)
    return (
        float(np.sum(losses) / x.shape[0]),
        float(np.mean(preds == labels)),
        preds,
    )


def train(
    model: Network,
    train_x: np.ndarray,
    train_y: np.ndarray,
    val_x: np.ndarray,
    val_y: np.ndarray,
    cfg: TrainConfig,
) -> TrainResult:
    """Minibatch training with early stopping on validation loss.

    Stops after ``patience`` epochs without strict val-loss improvement
    and returns the best-validation checkpoint.
    """
    if train_x.shape[0] == 0 or val_x.shape[0] == 0:
        raise ValueError("train and validation splits must be nonempty")
    rng = np.random.default_rng(cfg.seed)
    opt = Adam(cfg)
    result = TrainResult(params=model.get_params())
    stale = 0
    params = dict(model.parameters())  # live views, updated in place
    for epoch in range(cfg.max_epochs):
        order = rng.permutation(train_x.shape[0])
        epoch_losses = []
        for start in range(0, order.shape[0], cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, grads = loss_and_grads(model, train_x[idx], train_y[idx])
            if not np.isfinite(loss):
                raise TrainingDiverged(f"loss became {loss} at epoch {epoch}")
            opt.step(params, grads)
            epoch_losses.append(loss)
        val_loss, val_acc, _ = evaluate(model, val_x, val_y)
        result.history.append(
            {
                "epoch": epoch,
                "train_loss": float(np.mean(epoch_losses)),
                "val_loss": val_loss,
                "val_acc": val_acc,
            }
        )
        if val_loss < result.best_val_loss:
            result.best_val_loss = val_loss
            result.best_epoch = epoch
            result.params = model.get_params()
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    model.set_params(result.params)
    return result


def save_checkpoint(path: str | Path, kind: str, n_classes: int,
                    params: dict[str, np.ndarray]) -> None:
    names = sorted(params)
    header = {
        "arch": kind,
        "n_classes": n_classes,
        "params": [{"name": n, "shape": list(params[n].shape)} for n in names],
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        for n in names:
            fh.write(np.ascontiguousarray(params[n], dtype=np.float64).tobytes())


def load_checkpoint(path: str | Path) -> tuple[str, int, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        params = {}
        for entry in header["params"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape))
            raw = fh.read(8 * count)
            if len(raw) != 8 * count:
                raise IOError(f"truncated checkpoint {path}")
            params[entry["name"]] = np.frombuffer(raw, dtype=np.float64).reshape(shape).copy()
    return header["arch"], header["n_classes"], params
