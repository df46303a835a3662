"""Fully-connected Q-network: forward pass, backprop, RMSProp, persistence.

The network maps a state vector concatenated with a 5-way one-hot action to a
single scalar action value. Hidden layers are 128, 64 and 32 rectified linear
units; the output is linear. Everything is float64 and written directly in
numpy so the gradients can be checked against finite differences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

N_ACTIONS = 5
HIDDEN_WIDTHS = (128, 64, 32)
INIT_RANGE = 0.05
MODEL_VERSION = 1
VALID_SENSOR_MODES = ("localization", "landmarks")

_EYE = np.eye(N_ACTIONS)


class NumericalFailureError(RuntimeError):
    """A loss or parameter went NaN/Inf; training must abort loudly."""


class ModelFormatError(ValueError):
    """A model document has the wrong version, shapes or sensor mode."""


@dataclass
class QNetwork:
    """Weight matrices are (n_in, n_out); biases are (n_out,)."""

    sensor_mode: str
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def state_len(self) -> int:
        return self.weights[0].shape[0] - N_ACTIONS

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]


@dataclass
class OptimizerState:
    """Per-parameter squared-gradient moving averages for RMSProp."""

    cache_w: list[np.ndarray]
    cache_b: list[np.ndarray]
    lr: float = 5e-6
    rho: float = 0.9
    eps: float = 1e-8

    @classmethod
    def for_network(cls, net: QNetwork, lr: float = 5e-6, rho: float = 0.9,
                    eps: float = 1e-8) -> "OptimizerState":
        return cls(
            cache_w=[np.zeros_like(w) for w in net.weights],
            cache_b=[np.zeros_like(b) for b in net.biases],
            lr=lr,
            rho=rho,
            eps=eps,
        )


def init_network(state_len: int, rng: np.random.Generator,
                 sensor_mode: str = "localization") -> QNetwork:
    """Fresh network: weights uniform in [-0.05, 0.05], biases zero."""
    if state_len < 1:
        raise ValueError(f"state_len must be >= 1, got {state_len}")
    widths = (state_len + N_ACTIONS,) + HIDDEN_WIDTHS + (1,)
    weights = [
        rng.uniform(-INIT_RANGE, INIT_RANGE, size=(widths[i], widths[i + 1]))
        for i in range(len(widths) - 1)
    ]
    biases = [np.zeros(widths[i + 1]) for i in range(len(widths) - 1)]
    return QNetwork(sensor_mode=sensor_mode, weights=weights, biases=biases)


def encode_input(state: np.ndarray, action: int) -> np.ndarray:
    """Concatenate a state vector with the action's one-hot encoding."""
    return np.concatenate([np.asarray(state, dtype=float), _EYE[int(action)]])


def encode_batch(states: np.ndarray, actions: np.ndarray) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    n, state_len = states.shape
    x = np.zeros((n, state_len + N_ACTIONS))
    x[:, :state_len] = states
    x[np.arange(n), state_len + np.asarray(actions, dtype=int)] = 1.0
    return x


def _check_width(net: QNetwork, x: np.ndarray) -> None:
    if x.shape[-1] != net.weights[0].shape[0]:
        raise ValueError(
            f"input width {x.shape[-1]} does not match network input "
            f"width {net.weights[0].shape[0]}"
        )


def batch_values(net: QNetwork, x: np.ndarray) -> np.ndarray:
    """Q estimates for a (batch, input_width) matrix of encoded inputs."""
    _check_width(net, x)
    h = x
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        h = np.maximum(h @ w + b, 0.0)
    return (h @ net.weights[-1] + net.biases[-1])[:, 0]


def forward(net: QNetwork, state: np.ndarray, action: int) -> float:
    """Scalar Q(s, a) for one state-action pair."""
    x = encode_input(state, action)
    return float(batch_values(net, x[None, :])[0])


def action_values(net: QNetwork, state: np.ndarray) -> np.ndarray:
    """Q(s, a) for all five actions, one batched forward pass."""
    state = np.asarray(state, dtype=float)
    x = np.zeros((N_ACTIONS, state.shape[0] + N_ACTIONS))
    x[:, : state.shape[0]] = state
    x[:, state.shape[0]:] = _EYE
    return batch_values(net, x)


def batch_action_values(net: QNetwork, states: np.ndarray) -> np.ndarray:
    """Q(s, a) for every state in a (batch, state_len) matrix; (batch, 5)."""
    states = np.asarray(states, dtype=float)
    n, state_len = states.shape
    x = np.zeros((n * N_ACTIONS, state_len + N_ACTIONS))
    x[:, :state_len] = np.repeat(states, N_ACTIONS, axis=0)
    x[np.arange(n * N_ACTIONS), state_len + np.tile(np.arange(N_ACTIONS), n)] = 1.0
    return batch_values(net, x).reshape(n, N_ACTIONS)


def batch_loss_and_grads(net: QNetwork, x: np.ndarray, targets: np.ndarray):
    """Mean squared-error loss over a batch and its parameter gradients.

    Loss per sample is (target - Q)^2 / 2 with the target held constant;
    the returned gradients are of the batch mean.
    """
    _check_width(net, x)
    targets = np.asarray(targets, dtype=float)
    acts = [x]
    h = x
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        h = np.maximum(h @ w + b, 0.0)
        acts.append(h)
    q = (h @ net.weights[-1] + net.biases[-1])[:, 0]
    residual = q - targets
    loss = 0.5 * float(np.mean(residual * residual))
    if not math.isfinite(loss):
        raise NumericalFailureError(f"non-finite training loss: {loss}")
    delta = (residual / residual.shape[0])[:, None]
    grads_w: list[np.ndarray] = [np.empty(0)] * len(net.weights)
    grads_b: list[np.ndarray] = [np.empty(0)] * len(net.biases)
    for layer in range(len(net.weights) - 1, -1, -1):
        grads_w[layer] = acts[layer].T @ delta
        grads_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ net.weights[layer].T) * (acts[layer] > 0.0)
    return loss, (grads_w, grads_b)


def loss_and_grads(net: QNetwork, state: np.ndarray, action: int, target: float):
    """Single-sample loss (target - Q(s,a))^2 / 2 and its gradients."""
    x = encode_input(state, action)[None, :]
    return batch_loss_and_grads(net, x, np.array([target], dtype=float))


def rmsprop_update(net: QNetwork, opt: OptimizerState, grads) -> None:
    """One in-place RMSProp step: cache <- rho*cache + (1-rho)*g^2,
    w <- w - lr*g / (sqrt(cache) + eps)."""
    grads_w, grads_b = grads
    for w, cache, g in zip(net.weights, opt.cache_w, grads_w):
        cache *= opt.rho
        cache += (1.0 - opt.rho) * g * g
        w -= opt.lr * g / (np.sqrt(cache) + opt.eps)
        if not np.isfinite(w).all():
            raise NumericalFailureError("non-finite weight after RMSProp update")
    for b, cache, g in zip(net.biases, opt.cache_b, grads_b):
        cache *= opt.rho
        cache += (1.0 - opt.rho) * g * g
        b -= opt.lr * g / (np.sqrt(cache) + opt.eps)
        if not np.isfinite(b).all():
            raise NumericalFailureError("non-finite bias after RMSProp update")


def to_document(net: QNetwork) -> dict:
    """JSON-ready model document; float64 values round-trip bit-exactly."""
    return {
        "version": MODEL_VERSION,
        "sensor_mode": net.sensor_mode,
        "layer_sizes": net.layer_sizes,
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }


def from_document(doc: dict) -> QNetwork:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version: {doc.get('version')!r}")
    mode = doc.get("sensor_mode")
    if mode not in VALID_SENSOR_MODES:
        raise ModelFormatError(f"unknown sensor mode: {mode!r}")
    try:
        sizes = [int(s) for s in doc["layer_sizes"]]
        weights = [np.array(w, dtype=float) for w in doc["weights"]]
        biases = [np.array(b, dtype=float) for b in doc["biases"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from exc
    if tuple(sizes[1:]) != HIDDEN_WIDTHS + (1,):
        raise ModelFormatError(f"unsupported layer sizes: {sizes}")
    if len(weights) != len(sizes) - 1 or len(biases) != len(sizes) - 1:
        raise ModelFormatError("layer count does not match layer_sizes")
    for i, (w, b) in enumerate(zip(weights, biases)):
        if w.shape != (sizes[i], sizes[i + 1]) or b.shape != (sizes[i + 1],):
            raise ModelFormatError(
                f"layer {i} has shape {w.shape}, expected {(sizes[i], sizes[i + 1])}"
            )
    return QNetwork(sensor_mode=mode, weights=weights, biases=biases)


def save_model(net: QNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_document(net), fh)
        fh.write("\n")


def load_model(path, expected_sensor_mode: str | None = None) -> QNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model file is not valid JSON: {path}") from exc
    net = from_document(doc)
    if expected_sensor_mode is not None and net.sensor_mode != expected_sensor_mode:
        raise ModelFormatError(
            f"model was trained for sensor mode {net.sensor_mode!r}, "
            f"run requires {expected_sensor_mode!r}"
        )
    return net


def parameter_count(net: QNetwork) -> int:
    return sum(w.size for w in net.weights) + sum(b.size for b in net.biases)
