"""Building blocks for the recurrent classifier: LSTM and dense layers with
explicit forward/backward passes, inverted dropout, softmax and cross-entropy.

Everything is float64 numpy; backward passes return parameter gradients plus
the gradient with respect to the layer input so embeddings upstream can be
trained too.
"""

from __future__ import annotations

from typing import Optional

import numpy as np


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean negative log probability of the true classes."""
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= probs.shape[-1]:
        raise ValueError(f"label out of range for {probs.shape[-1]} classes")
    return float(-np.log(probs[np.arange(len(labels)), labels]).mean())


def cross_entropy_from_logits(
    logits: np.ndarray, labels: np.ndarray
) -> tuple[float, np.ndarray]:
    """(mean cross-entropy, gradient wrt logits) computed in the log domain."""
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= logits.shape[-1]:
        raise ValueError(f"label out of range for {logits.shape[-1]} classes")
    logp = log_softmax(logits)
    n = len(labels)
    loss = float(-logp[np.arange(n), labels].mean())
    dlogits = np.exp(logp)
    dlogits[np.arange(n), labels] -= 1.0
    return loss, dlogits / n


def dropout_mask(shape: tuple, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Inverted-scaling dropout mask: zeros with probability ``rate``, kept
    entries scaled by 1/(1-rate) so expectations match inference."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if rate == 0.0:
        return np.ones(shape)
    return (rng.random(shape) >= rate) / (1.0 - rate)


def _uniform_init(
    shape: tuple, fan_in: int, rng: Optional[np.random.Generator]
) -> np.ndarray:
    if rng is None:
        return np.zeros(shape)
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class LstmLayer:
    """Single LSTM layer over (batch, time, input) sequences.

    Gate blocks are packed [input, forget, candidate, output] along the last
    axis of ``wx``/``wh``/``b``; the forget-gate bias block is initialized to
    one so early training does not erase the cell state.
    """

    def __init__(self, input_size: int, hidden_size: int, rng: Optional[np.random.Generator]):
        if input_size < 1 or hidden_size < 1:
            raise ValueError("layer sizes must be positive")
        self.input_size = input_size
        self.hidden_size = hidden_size
        h = hidden_size
        self.wx = _uniform_init((input_size, 4 * h), input_size, rng)
        self.wh = _uniform_init((h, 4 * h), h, rng)
        self.b = np.zeros(4 * h)
        self.b[h : 2 * h] = 1.0

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, dict]:
        batch, steps, _ = x.shape
        h = self.hidden_size
        h_prev = np.zeros((batch, h))
        c_prev = np.zeros((batch, h))
        h_seq = np.zeros((batch, steps, h))
        cache = {"x": x, "h_prev": [], "c_prev": [], "gates": [], "tanh_c": []}
        for t in range(steps):
            z = x[:, t] @ self.wx + h_prev @ self.wh + self.b
            i = sigmoid(z[:, :h])
            f = sigmoid(z[:, h : 2 * h])
            g = np.tanh(z[:, 2 * h : 3 * h])
            o = sigmoid(z[:, 3 * h :])
            c = f * c_prev + i * g
            tanh_c = np.tanh(c)
            h_t = o * tanh_c
            cache["h_prev"].append(h_prev)
            cache["c_prev"].append(c_prev)
            cache["gates"].append((i, f, g, o))
            cache["tanh_c"].append(tanh_c)
            h_seq[:, t] = h_t
            h_prev, c_prev = h_t, c
        return h_seq, cache

    def backward(
        self, cache: dict, dh_seq: np.ndarray
    ) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        x = cache["x"]
        batch, steps, _ = x.shape
        h = self.hidden_size
        dwx = np.zeros_like(self.wx)
        dwh = np.zeros_like(self.wh)
        db = np.zeros_like(self.b)
        dx = np.zeros_like(x)
        dh_next = np.zeros((batch, h))
        dc_next = np.zeros((batch, h))
        for t in reversed(range(steps)):
            i, f, g, o = cache["gates"][t]
            tanh_c = cache["tanh_c"][t]
            dh = dh_seq[:, t] + dh_next
            dc = dh * o * (1.0 - tanh_c * tanh_c) + dc_next
            dz = np.concatenate(
                [
                    dc * g * i * (1.0 - i),
                    dc * cache["c_prev"][t] * f * (1.0 - f),
                    dc * i * (1.0 - g * g),
                    dh * tanh_c * o * (1.0 - o),
                ],
                axis=1,
            )
            dwx += x[:, t].T @ dz
            dwh += cache["h_prev"][t].T @ dz
            db += dz.sum(axis=0)
            dx[:, t] = dz @ self.wx.T
            dh_next = dz @ self.wh.T
            dc_next = dc * f
        return dx, {"wx": dwx, "wh": dwh, "b": db}


class DenseLayer:
    """Affine map with optional tanh activation."""

    def __init__(
        self,
        input_size: int,
        output_size: int,
        rng: Optional[np.random.Generator],
        activation: Optional[str] = None,
    ):
        if activation not in (None, "tanh"):
            raise ValueError(f"unsupported activation: {activation!r}")
        self.input_size = input_size
        self.output_size = output_size
        self.activation = activation
        self.w = _uniform_init((input_size, output_size), input_size, rng)
        self.b = np.zeros(output_size)

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, dict]:
        pre = x @ self.w + self.b
        out = np.tanh(pre) if self.activation == "tanh" else pre
        return out, {"x": x, "out": out}

    def backward(
        self, cache: dict, dout: np.ndarray
    ) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        if self.activation == "tanh":
            dpre = dout * (1.0 - cache["out"] * cache["out"])
        else:
            dpre = dout
        return dpre @ self.w.T, {"w": cache["x"].T @ dpre, "b": dpre.sum(axis=0)}
