"""Single-hidden-layer hypercomplex perceptrons with split activations.

The network maps N hypercomplex inputs to one hypercomplex output:
hidden unit i computes psi(sum_k y_ik * x_k + theta_i) with the algebra
product (weights multiply from the left, which matters for the
non-commutative algebras), and the output is sum_i alpha_i * h_i.

`forward` is the per-sample reference written directly on `mul_direct`.
Batched loss and gradients run through a vectorized engine that folds the
bilinear product matrices into plain real matrix multiplies; the two
paths agree to machine precision and the tests pin that equivalence.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import zoo
from .algebra import (
    Algebra,
    DimensionError,
    mul_direct,
    parse_algebra,
    serialize_algebra,
)
from .bilinear import build_bilinear_matrices


class DivergenceError(RuntimeError):
    """Training hit a non-finite loss.  `epoch` is 1-based; `trace` holds
    the per-epoch losses completed before the failure."""

    def __init__(self, epoch: int, trace: list[float]):
        super().__init__(f"non-finite loss in epoch {epoch}")
        self.epoch = epoch
        self.trace = trace


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # stable on both tails
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class SplitActivation(enum.Enum):
    """Real activation applied independently to every coefficient."""

    SIGMOID = "split-sigmoid"
    RELU = "split-relu"

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self is SplitActivation.SIGMOID:
            return _sigmoid(x)
        return np.maximum(x, 0.0)

    def derivative(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self is SplitActivation.SIGMOID:
            s = _sigmoid(x)
            return s * (1.0 - s)
        # subgradient 0 at the ReLU kink
        return (x > 0.0).astype(np.float64)

    @classmethod
    def from_name(cls, name: str) -> "SplitActivation":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(
            f"unknown activation {name!r}; known: "
            + ", ".join(m.value for m in cls)
        )


def split_apply(act: SplitActivation, x) -> np.ndarray:
    """Apply the activation to every coefficient of a hypercomplex value."""
    return act.apply(x)


@dataclass
class HMLPParams:
    """Trainable state of a hypercomplex perceptron.

    hidden_weights has shape (hidden, n_inputs, dim), hidden_biases and
    output_weights shape (hidden, dim), with dim = algebra dimension.
    """

    algebra: Algebra
    n_inputs: int
    hidden: int
    hidden_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray
    activation: SplitActivation

    def __post_init__(self):
        d = self.algebra.dim
        if self.n_inputs < 1 or self.hidden < 1:
            raise ValueError("need n_inputs >= 1 and hidden >= 1")
        expect = {
            "hidden_weights": (self.hidden, self.n_inputs, d),
            "hidden_biases": (self.hidden, d),
            "output_weights": (self.hidden, d),
        }
        for field_name, shape in expect.items():
            arr = np.ascontiguousarray(getattr(self, field_name), dtype=np.float64)
            if arr.shape != shape:
                raise DimensionError(
                    f"{field_name} must have shape {shape}, got {arr.shape}"
                )
            setattr(self, field_name, arr)

    def copy(self) -> "HMLPParams":
        return HMLPParams(
            algebra=self.algebra,
            n_inputs=self.n_inputs,
            hidden=self.hidden,
            hidden_weights=self.hidden_weights.copy(),
            hidden_biases=self.hidden_biases.copy(),
            output_weights=self.output_weights.copy(),
            activation=self.activation,
        )


@dataclass
class GradientBundle:
    """Loss partials, congruent with the trainable fields of HMLPParams."""

    hidden_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray


def forward(params: HMLPParams, x) -> np.ndarray:
    """Network output for one input tuple x of n_inputs hypercomplex values.

    Reference implementation: accumulates hidden sums and the output sum
    in ascending unit/input order via mul_direct.
    """
    alg = params.algebra
    d = alg.dim
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.n_inputs, d):
        raise DimensionError(
            f"input must have shape ({params.n_inputs}, {d}), got {x.shape}"
        )
    out = np.zeros(d)
    for i in range(params.hidden):
        s = np.zeros(d)
        for k in range(params.n_inputs):
            s += mul_direct(alg, params.hidden_weights[i, k], x[k])
        s += params.hidden_biases[i]
        h = params.activation.apply(s)
        out += mul_direct(alg, params.output_weights[i], h)
    return out


class _Engine:
    """Vectorized batch forward/backward over a fixed algebra.

    The product matrices P[j,a,c] (coefficient j of u*v equals
    u^T P[j] v) are folded with the current weights into ordinary real
    matrices, so batches reduce to deterministic gemms.
    """

    def __init__(self, algebra: Algebra):
        self.dim = algebra.dim
        self.P = build_bilinear_matrices(algebra).mats
        d = self.dim
        # P indexed [a, (j, c)] for weight folding and [(j, c), a] for grads
        self._P_a = np.ascontiguousarray(self.P.transpose(1, 0, 2).reshape(d, d * d))
        self._P_jc = np.ascontiguousarray(self.P.transpose(0, 2, 1).reshape(d * d, d))

    def hidden_matrix(self, weights: np.ndarray) -> np.ndarray:
        # W[(i,j),(k,c)] = sum_a weights[i,k,a] P[j,a,c]
        m, n, d = weights.shape
        w = (weights.reshape(m * n, d) @ self._P_a).reshape(m, n, d, d)
        return w.transpose(0, 2, 1, 3).reshape(m * d, n * d)

    def output_matrix(self, out_weights: np.ndarray) -> np.ndarray:
        # V[j,(i,c)] = sum_a out_weights[i,a] P[j,a,c]
        m, d = out_weights.shape
        v = (out_weights @ self._P_a).reshape(m, d, d)
        return v.transpose(1, 0, 2).reshape(d, m * d)

    def forward(self, params: HMLPParams, xs: np.ndarray):
        b = xs.shape[0]
        m, n, d = params.hidden_weights.shape
        w = self.hidden_matrix(params.hidden_weights)
        pre = (xs.reshape(b, n * d) @ w.T).reshape(b, m, d) + params.hidden_biases
        hid = params.activation.apply(pre)
        v = self.output_matrix(params.output_weights)
        out = hid.reshape(b, m * d) @ v.T
        return pre, hid, out

    def loss(self, params: HMLPParams, xs, ts) -> float:
        _, _, out = self.forward(params, xs)
        diff = out - ts
        return float(np.sum(diff * diff) / xs.shape[0])

    def loss_and_grad(self, params: HMLPParams, xs, ts):
        b = xs.shape[0]
        m, n, d = params.hidden_weights.shape
        pre, hid, out = self.forward(params, xs)
        diff = out - ts
        loss = float(np.sum(diff * diff) / b)

        g_out = (2.0 / b) * diff  # (b, d)
        # d/d alpha[i,a] = sum_{j,c} P[j,a,c] sum_b g_out[b,j] hid[b,i,c]
        gh = np.tensordot(g_out, hid, axes=([0], [0]))  # [j, i, c]
        g_alpha = gh.transpose(1, 0, 2).reshape(m, d * d) @ self._P_jc
        # d/d hid[b,i,c] = sum_j g_out[b,j] V[j,(i,c)]
        v = self.output_matrix(params.output_weights)
        g_hid = (g_out @ v).reshape(b, m, d)
        g_pre = g_hid * params.activation.derivative(pre)
        g_theta = g_pre.sum(axis=0)
        # d/d y[i,k,a] = sum_{j,c} P[j,a,c] sum_b g_pre[b,i,j] xs[b,k,c]
        gx = np.tensordot(g_pre, xs, axes=([0], [0]))  # [i, j, k, c]
        g_y = (
            gx.transpose(0, 2, 1, 3).reshape(m * n, d * d) @ self._P_jc
        ).reshape(m, n, d)
        grad = GradientBundle(
            hidden_weights=g_y, hidden_biases=g_theta, output_weights=g_alpha
        )
        return loss, grad


def _check_batch(params: HMLPParams, xs, ts):
    xs = np.asarray(xs, dtype=np.float64)
    ts = np.asarray(ts, dtype=np.float64)
    d = params.algebra.dim
    if xs.ndim != 3 or xs.shape[1:] != (params.n_inputs, d):
        raise DimensionError(
            f"inputs must have shape (batch, {params.n_inputs}, {d}), "
            f"got {xs.shape}"
        )
    if ts.shape != (xs.shape[0], d):
        raise DimensionError(
            f"targets must have shape ({xs.shape[0]}, {d}), got {ts.shape}"
        )
    if xs.shape[0] == 0:
        raise ValueError("empty batch")
    return xs, ts


def loss_mse(params: HMLPParams, xs, ts) -> float:
    """Mean over the batch of |output - target|^2 (squared absolute value)."""
    xs, ts = _check_batch(params, xs, ts)
    return _Engine(params.algebra).loss(params, xs, ts)


def backward(params: HMLPParams, xs, ts) -> GradientBundle:
    """Exact gradient of loss_mse for every trainable coefficient."""
    xs, ts = _check_batch(params, xs, ts)
    _, grad = _Engine(params.algebra).loss_and_grad(params, xs, ts)
    return grad


def init(
    algebra: Algebra,
    n_inputs: int,
    hidden: int,
    activation: SplitActivation,
    seed: int,
) -> HMLPParams:
    """Seeded uniform initialization on [-1/sqrt(N*dim), +1/sqrt(N*dim)].

    Draw order is fixed (hidden weights, hidden biases, output weights,
    each row-major), so a seed pins the parameters bit for bit.
    """
    d = algebra.dim
    bound = 1.0 / math.sqrt(n_inputs * d)
    rng = np.random.default_rng(seed)
    return HMLPParams(
        algebra=algebra,
        n_inputs=n_inputs,
        hidden=hidden,
        hidden_weights=rng.uniform(-bound, bound, (hidden, n_inputs, d)),
        hidden_biases=rng.uniform(-bound, bound, (hidden, d)),
        output_weights=rng.uniform(-bound, bound, (hidden, d)),
        activation=activation,
    )


def train_sgd(
    params: HMLPParams,
    dataset,
    epochs: int,
    batch_size: int,
    learning_rate: float,
    seed: int,
):
    """Plain mini-batch gradient descent.

    `dataset` is an (inputs, targets) pair with shapes (S, n_inputs, dim)
    and (S, dim).  Data is reshuffled every epoch from a generator seeded
    by `seed`.  Returns (trained params, per-epoch mean loss over the
    full dataset); raises DivergenceError on a non-finite loss.
    """
    xs, ts = dataset
    xs, ts = _check_batch(params, xs, ts)
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if learning_rate < 0:
        raise ValueError("learning_rate must be >= 0")

    work = params.copy()
    engine = _Engine(params.algebra)
    rng = np.random.default_rng(seed)
    count = xs.shape[0]
    trace: list[float] = []
    for epoch in range(1, epochs + 1):
        order = rng.permutation(count)
        for start in range(0, count, batch_size):
            idx = order[start : start + batch_size]
            loss, grad = engine.loss_and_grad(work, xs[idx], ts[idx])
            if not math.isfinite(loss):
                raise DivergenceError(epoch, trace)
            work.hidden_weights -= learning_rate * grad.hidden_weights
            work.hidden_biases -= learning_rate * grad.hidden_biases
            work.output_weights -= learning_rate * grad.output_weights
        epoch_loss = engine.loss(work, xs, ts)
        if not math.isfinite(epoch_loss):
            raise DivergenceError(epoch, trace)
        trace.append(epoch_loss)
    return work, trace


CHECKPOINT_MAGIC = "hxnn-model v1"


def _zoo_name_for(alg: Algebra) -> str | None:
    try:
        candidate = zoo.from_spec_string(alg.name)
    except ValueError:
        return None
    same = (
        candidate.unit_labels == alg.unit_labels
        and candidate.sc.n == alg.sc.n
        and np.array_equal(candidate.sc.p, alg.sc.p)
        and candidate.sc.exact == alg.sc.exact
    )
    return alg.name if same else None


def save_checkpoint(params: HMLPParams, path, seed: int = 0) -> None:
    """Write a text checkpoint: header, then one hex-float line per tensor."""
    lines = [CHECKPOINT_MAGIC]
    name = _zoo_name_for(params.algebra)
    if name is not None:
        lines.append(f"algebra {name}")
    else:
        spec = serialize_algebra(params.algebra).splitlines()
        lines.append(f"algebra-spec {len(spec)}")
        lines.extend(spec)
    lines.append(f"inputs {params.n_inputs}")
    lines.append(f"hidden {params.hidden}")
    lines.append(f"activation {params.activation.value}")
    lines.append(f"seed {seed}")
    for field_name in ("hidden_weights", "hidden_biases", "output_weights"):
        values = getattr(params, field_name).ravel()
        lines.append(field_name + " " + " ".join(float.hex(float(v)) for v in values))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_checkpoint(path) -> tuple[HMLPParams, int]:
    """Read a checkpoint back; returns (params, seed)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a {CHECKPOINT_MAGIC!r} checkpoint")
    pos = 1
    fields: dict[str, str] = {}
    algebra = None
    while pos < len(lines):
        key, _, rest = lines[pos].partition(" ")
        if key == "algebra":
            algebra = zoo.from_spec_string(rest.strip())
            pos += 1
        elif key == "algebra-spec":
            k = int(rest)
            algebra = parse_algebra("\n".join(lines[pos + 1 : pos + 1 + k]))
            pos += 1 + k
        else:
            fields[key] = rest
            pos += 1
    if algebra is None:
        raise ValueError(f"{path}: checkpoint missing algebra")
    for required in ("inputs", "hidden", "activation", "seed",
                     "hidden_weights", "hidden_biases", "output_weights"):
        if required not in fields:
            raise ValueError(f"{path}: checkpoint missing {required!r}")
    n_inputs = int(fields["inputs"])
    hidden = int(fields["hidden"])
    act = SplitActivation.from_name(fields["activation"])
    d = algebra.dim

    def tensor(key: str, shape) -> np.ndarray:
        vals = [float.fromhex(tok) for tok in fields[key].split()]
        arr = np.array(vals, dtype=np.float64)
        if arr.size != int(np.prod(shape)):
            raise ValueError(f"{path}: {key} has {arr.size} values, want {shape}")
        return arr.reshape(shape)

    params = HMLPParams(
        algebra=algebra,
        n_inputs=n_inputs,
        hidden=hidden,
        hidden_weights=tensor("hidden_weights", (hidden, n_inputs, d)),
        hidden_biases=tensor("hidden_biases", (hidden, d)),
        output_weights=tensor("output_weights", (hidden, d)),
        activation=act,
    )
    return params, int(fields["seed"])
