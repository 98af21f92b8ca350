"""Feed-forward back-propagation network with one sigmoid hidden layer.

Naming follows the classic textbook presentation: ``v``/``v0`` are the
input->hidden weights and biases, ``w``/``w0`` the hidden->output ones.
Training is on-line: weights change after every sample.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numba
import numpy as np
from scipy.special import expit

from .dataset import Encoder
from .errors import (
    BadMagic, DimensionMismatch, EmptyDataset, TruncatedFile, VersionUnsupported, ZeroDimension,
)

FORMAT_NAME = "tp53nn-bpnn"
FORMAT_VERSION = 1
INIT_SCALE = 0.5
GRAD_FLOOR = 1e-12

sigmoid = expit


@dataclass
class Network:
    v: np.ndarray   # (n_in, n_hidden)
    v0: np.ndarray  # (n_hidden,)
    w: np.ndarray   # (n_hidden, n_out)
    w0: np.ndarray  # (n_out,)

    def __post_init__(self):
        n_in, n_hidden = self.v.shape
        if self.v0.shape != (n_hidden,) or self.w.shape[0] != n_hidden or self.w0.shape != (self.w.shape[1],):
            raise DimensionMismatch("weight shapes disagree with each other")

    @property
    def topology(self) -> tuple[int, int, int]:
        return (self.v.shape[0], self.v.shape[1], self.w.shape[1])

    def parameters(self) -> list[np.ndarray]:
        """Parameter arrays in fill order: v, v0, w, w0."""
        return [self.v, self.v0, self.w, self.w0]

    def copy(self) -> "Network":
        return Network(self.v.copy(), self.v0.copy(), self.w.copy(), self.w0.copy())

    def n_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def is_finite(self) -> bool:
        return all(np.isfinite(p).all() for p in self.parameters())

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return all(a.shape == b.shape and a.tobytes() == b.tobytes()
                   for a, b in zip(self.parameters(), other.parameters()))


def init_network(topology, seed: int) -> Network:
    n_in, n_hidden, n_out = (int(n) for n in topology)
    if min(n_in, n_hidden, n_out) < 1:
        raise ZeroDimension(f"topology {tuple(topology)} has a zero-sized layer")
    sizes = [n_in * n_hidden, n_hidden, n_hidden * n_out, n_out]
    flat = np.random.default_rng(seed).uniform(-INIT_SCALE, INIT_SCALE, size=sum(sizes))
    v, v0, w, w0 = np.split(flat, np.cumsum(sizes)[:-1])
    return Network(v.reshape(n_in, n_hidden), v0, w.reshape(n_hidden, n_out), w0)


def _check_input(net: Network, x, t=None):
    x = np.asarray(x, dtype=float)
    if x.shape != (net.v.shape[0],):
        raise DimensionMismatch(f"input has shape {x.shape}, network expects ({net.v.shape[0]},)")
    if t is None:
        return x
    t = np.asarray(t, dtype=float).reshape(-1)
    if t.shape != (net.w.shape[1],):
        raise DimensionMismatch(f"target has shape {t.shape}, network expects ({net.w.shape[1]},)")
    return x, t


def forward(net: Network, x) -> tuple[np.ndarray, np.ndarray]:
    """Return hidden activations ``z`` and outputs ``y`` for one input vector."""
    x = _check_input(net, x)
    z = sigmoid(net.v0 + x @ net.v)
    y = sigmoid(net.w0 + z @ net.w)
    return z, y


def predict(net: Network, X) -> np.ndarray:
    """Batch forward pass; rows of ``X`` are inputs."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != net.v.shape[0]:
        raise DimensionMismatch(f"inputs have {X.shape[1]} columns, network expects {net.v.shape[0]}")
    return sigmoid(net.w0 + sigmoid(net.v0 + X @ net.v) @ net.w)


def _backprop(net, x, t):
    """Error terms for one sample, before any weight is touched.

    Returns (dw, dw0, dv, dv0, sample_error) where each d* is the weight
    change per unit learning rate.
    """
    z = sigmoid(net.v0 + x @ net.v)
    y = sigmoid(net.w0 + z @ net.w)
    err = t - y
    delta_k = err * y * (1.0 - y)
    # hidden error uses the output weights as they were before this step
    delta_j = (net.w @ delta_k) * z * (1.0 - z)
    return np.outer(z, delta_k), delta_k, np.outer(x, delta_j), delta_j, float(err @ err)


def _step_inplace(net: Network, x, t, alpha: float) -> float:
    dw, dw0, dv, dv0, sample_error = _backprop(net, x, t)
    net.w += alpha * dw
    net.w0 += alpha * dw0
    net.v += alpha * dv
    net.v0 += alpha * dv0
    return sample_error


def train_step(net: Network, x, t, alpha: float) -> tuple[Network, float]:
    """One on-line update. Returns the updated copy and the pre-update squared error."""
    if not alpha > 0:
        raise ValueError("learning rate must be positive")
    x, t = _check_input(net, x, t)
    new = net.copy()
    return new, _step_inplace(new, x, t, alpha)


@numba.njit(cache=True)
def _epoch_kernel(v, v0, w, w0, X, T, order, alpha):
    """One on-line pass over ``X[order]``, updating the weights in place.

    Same arithmetic as ``_step_inplace``, written as loops so a whole epoch
    runs without per-sample interpreter overhead.
    """
    n_in, n_hidden = v.shape
    n_out = w.shape[1]
    z = np.empty(n_hidden)
    delta_k = np.empty(n_out)
    for s in order:
        x = X[s]
        t = T[s]
        for j in range(n_hidden):
            acc = v0[j]
            for i in range(n_in):
                acc += x[i] * v[i, j]
            z[j] = 1.0 / (1.0 + math.exp(-acc))
        for k in range(n_out):
            acc = w0[k]
            for j in range(n_hidden):
                acc += z[j] * w[j, k]
            y = 1.0 / (1.0 + math.exp(-acc))
            delta_k[k] = (t[k] - y) * y * (1.0 - y)
        for j in range(n_hidden):
            delta_in = 0.0
            for k in range(n_out):
                delta_in += delta_k[k] * w[j, k]  # w not yet updated for row j
            delta_j = delta_in * z[j] * (1.0 - z[j])
            for k in range(n_out):
                w[j, k] += alpha * delta_k[k] * z[j]
            for i in range(n_in):
                v[i, j] += alpha * delta_j * x[i]
            v0[j] += alpha * delta_j
        for k in range(n_out):
            w0[k] += alpha * delta_k[k]


def _as_arrays(net: Network, examples) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(examples, tuple) and len(examples) == 2 and isinstance(examples[0], np.ndarray) \
            and examples[0].ndim == 2:
        X, T = examples
    else:
        examples = list(examples)
        if not examples:
            raise EmptyDataset("no training examples")
        X = np.array([np.asarray(x, dtype=float) for x, _ in examples])
        T = np.array([np.asarray(t, dtype=float).reshape(-1) for _, t in examples])
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float).reshape(len(X), -1)
    if len(X) == 0:
        raise EmptyDataset("no training examples")
    if X.shape[1] != net.v.shape[0] or T.shape[1] != net.w.shape[1]:
        raise DimensionMismatch(
            f"examples are {X.shape[1]}->{T.shape[1]}, network is {net.topology}")
    return X, T


def mse(net: Network, examples) -> float:
    """Mean squared error over all examples and output nodes.

    The reduction is exactly rounded (``math.fsum``), so the result does not
    depend on summation order.
    """
    X, T = _as_arrays(net, examples)
    diff = T - predict(net, X)
    return math.fsum((diff * diff).ravel().tolist()) / diff.size


def accuracy(net: Network, examples, decode: Callable[[float], str], labels) -> float:
    X, _ = _as_arrays(net, examples)
    y = predict(net, X)[:, 0]
    hits = sum(decode(yi) == lab for yi, lab in zip(y, labels))
    return hits / len(labels)


@dataclass(frozen=True)
class TrainConfig:
    alpha: float = 0.3
    max_epochs: int = 100_000
    goal_mse: float = 1e-6
    seed: int = 42
    shuffle_each_epoch: bool = False

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.goal_mse < 0:
            raise ValueError("goal_mse must be >= 0")


class StopReason(str, enum.Enum):
    GOAL_REACHED = "GoalReached"
    MAX_EPOCHS = "MaxEpochs"


@dataclass
class TrainReport:
    epochs_run: int
    final_mse: float
    stopped_by: StopReason
    mse_history: list = field(default_factory=list)


def train(net: Network, examples, cfg: TrainConfig = TrainConfig(),
          on_epoch: Optional[Callable[[int, float], None]] = None) -> tuple[Network, TrainReport]:
    """Run on-line gradient descent until the MSE goal or the epoch limit.

    ``on_epoch(epoch, mse)`` is called after every epoch when given.
    """
    X, T = _as_arrays(net, examples)
    X, T = np.ascontiguousarray(X), np.ascontiguousarray(T)
    net = net.copy()
    shuffle_rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
    order = np.arange(len(X))
    history = []
    stopped = StopReason.MAX_EPOCHS
    for epoch in range(1, cfg.max_epochs + 1):
        if cfg.shuffle_each_epoch:
            order = shuffle_rng.permutation(len(X))
        _epoch_kernel(net.v, net.v0, net.w, net.w0, X, T, order, cfg.alpha)
        err = mse(net, (X, T))
        history.append(err)
        if on_epoch is not None:
            on_epoch(epoch, err)
        if err <= cfg.goal_mse:
            stopped = StopReason.GOAL_REACHED
            break
    return net, TrainReport(len(history), history[-1], stopped, history)


def _sigmoid_gap(a, b, a_minus_b):
    """sigmoid(a) - sigmoid(b) without subtracting two nearly equal numbers."""
    return -sigmoid(a) * sigmoid(-b) * np.expm1(-a_minus_b)


def gradient_check(net: Network, x, t, h: float = 1e-6) -> float:
    """Largest relative disagreement between back-propagated and numeric gradients.

    The numeric side is the central difference ``(E(p+h) - E(p-h)) / 2h`` of
    ``E = 0.5 * sum((t - y)**2)``. Rather than subtracting two rounded losses,
    the perturbation is carried through each layer as a difference, which keeps
    the estimate accurate for gradients far smaller than ``eps * E / h``. The
    analytic side is the weight change per unit learning rate, negated.
    Parameters where both sides are below ``GRAD_FLOOR`` count as agreeing.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    x, t = _check_input(net, x, t)
    dw, dw0, dv, dv0, _ = _backprop(net, x, t)
    z_in = net.v0 + x @ net.v
    z = sigmoid(z_in)
    y_in = net.w0 + z @ net.w
    n_in, n_hidden, n_out = net.topology

    def numeric(value, shift_out):
        """shift_out(step) -> (output pre-activation shift, its exact width)."""
        lo, hi = value - h, value + h
        width = hi - lo
        (up, down), gap = shift_out(hi - value, lo - value, width)
        b_up, b_down = y_in + up, y_in + down
        dy = _sigmoid_gap(b_up, b_down, gap)
        d_loss = -0.5 * math.fsum((dy * (2 * t - sigmoid(b_up) - sigmoid(b_down))).tolist())
        return d_loss / width

    def through_hidden(j, scale):
        def shift(up, down, width):
            a_up, a_down = z_in[j] + up * scale, z_in[j] + down * scale
            dz = float(_sigmoid_gap(a_up, a_down, width * scale))
            zu = float(sigmoid(a_up))
            return ((zu - z[j]) * net.w[j], (zu - dz - z[j]) * net.w[j]), dz * net.w[j]
        return shift

    def at_output(k, scale):
        def shift(up, down, width):
            e = np.zeros(n_out)
            e[k] = 1.0
            return (up * scale * e, down * scale * e), width * scale * e
        return shift

    pairs = []
    for i in range(n_in):
        for j in range(n_hidden):
            pairs.append((-dv[i, j], numeric(net.v[i, j], through_hidden(j, x[i]))))
    for j in range(n_hidden):
        pairs.append((-dv0[j], numeric(net.v0[j], through_hidden(j, 1.0))))
    for j in range(n_hidden):
        for k in range(n_out):
            pairs.append((-dw[j, k], numeric(net.w[j, k], at_output(k, z[j]))))
    for k in range(n_out):
        pairs.append((-dw0[k], numeric(net.w0[k], at_output(k, 1.0))))

    worst = 0.0
    for a, n in pairs:
        a = float(a)
        scale = max(abs(a), abs(n))
        if scale < GRAD_FLOOR:
            # both sides vanish; what is left is the O(h**2) truncation term
            continue
        worst = max(worst, abs(a - n) / scale)
    return worst


def save_model(net: Network, encoder: Optional[Encoder] = None) -> str:
    n_in, n_hidden, n_out = net.topology
    doc = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "topology": [n_in, n_hidden, n_out],
        "activation": "sigmoid",
        "v": net.v.ravel().tolist(),
        "v0": net.v0.tolist(),
        "w": net.w.ravel().tolist(),
        "w0": net.w0.tolist(),
        "encoder": None if encoder is None else encoder.to_json(),
    }
    # json writes floats with repr(), the shortest string that reads back bit-equal
    return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False) + "\n"


def load_model(text: str) -> tuple[Network, Optional[Encoder]]:
    if not isinstance(text, str):
        text = text.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        if text.lstrip().startswith("{"):
            raise TruncatedFile(f"model file is incomplete: {exc}") from None
        raise BadMagic("model file is not a JSON document") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise BadMagic(f"not a {FORMAT_NAME} model file")
    if doc.get("format_version") != FORMAT_VERSION:
        raise VersionUnsupported(f"model format version {doc.get('format_version')!r} is not supported")
    if doc.get("activation") != "sigmoid":
        raise BadMagic(f"unsupported activation {doc.get('activation')!r}")
    try:
        n_in, n_hidden, n_out = (int(n) for n in doc["topology"])
        arrays = {k: np.array(doc[k], dtype=float) for k in ("v", "v0", "w", "w0")}
    except (KeyError, TypeError, ValueError) as exc:
        raise TruncatedFile(f"model file is missing data: {exc}") from None
    expected = {"v": n_in * n_hidden, "v0": n_hidden, "w": n_hidden * n_out, "w0": n_out}
    for k, size in expected.items():
        if arrays[k].shape != (size,):
            raise DimensionMismatch(f"{k} has {arrays[k].size} entries, topology needs {size}")
    net = Network(arrays["v"].reshape(n_in, n_hidden), arrays["v0"],
                  arrays["w"].reshape(n_hidden, n_out), arrays["w0"])
    encoder = None if doc.get("encoder") is None else Encoder.from_json(doc["encoder"])
    return net, encoder
