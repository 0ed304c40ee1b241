"""Dense float64 tensors with reverse-mode gradients, plus optimizers.

The tape is a plain parent-pointer graph: each op returns a tensor holding
a closure that scatters the output gradient back to its parents. Model
sizes here (two-layer GNNs, five-layer MLPs at most) never justify
anything fancier. No broadcasting beyond bias addition.
"""

from __future__ import annotations

import math

import numpy as np


class Tensor:
    """A float64 array plus an optional gradient and backward closure."""

    __slots__ = ("data", "grad", "requires_grad", "_backward", "_parents")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.asarray(data, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise FloatingPointError("tensor initialized with non-finite values")
        self.data = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._backward = None
        self._parents: tuple[Tensor, ...] = ()

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def numpy(self) -> np.ndarray:
        return np.array(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def _accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64)
        else:
            self.grad = self.grad + g

    def backward(self) -> None:
        """Reverse-mode sweep from a scalar output."""
        if self.data.size != 1:
            raise ValueError("backward() requires a scalar tensor")
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in seen:
                    stack.append((p, False))
        self._accumulate(np.ones_like(self.data))
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


class Parameter(Tensor):
    """A trainable tensor; gradients accumulate between optimizer steps."""

    def __init__(self, data):
        super().__init__(data, requires_grad=True)


def _result(data: np.ndarray, parents: tuple[Tensor, ...], backward) -> Tensor:
    if not np.all(np.isfinite(data)):
        raise FloatingPointError("non-finite values produced in forward pass")
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(p for p in parents if p.requires_grad)
        out._backward = backward
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ValueError("matmul expects 2-D tensors")
    if a.data.shape[1] != b.data.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.data.shape} @ {b.data.shape}")
    out_data = a.data @ b.data

    def backward(g: np.ndarray) -> None:
        if a.requires_grad:
            a._accumulate(g @ b.data.T)
        if b.requires_grad:
            b._accumulate(a.data.T @ g)

    return _result(out_data, (a, b), backward)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise addition; ``b`` may be a 1-D bias matching ``a``'s columns."""
    bias = a.data.ndim == 2 and b.data.ndim == 1
    if not bias and a.data.shape != b.data.shape:
        raise ValueError(f"add shape mismatch: {a.data.shape} + {b.data.shape}")
    if bias and b.data.shape[0] != a.data.shape[1]:
        raise ValueError(f"bias length {b.data.shape[0]} != columns {a.data.shape[1]}")
    out_data = a.data + b.data

    def backward(g: np.ndarray) -> None:
        if a.requires_grad:
            a._accumulate(g)
        if b.requires_grad:
            b._accumulate(g.sum(axis=0) if bias else g)

    return _result(out_data, (a, b), backward)


def scalar_mul(x: Tensor, s: Tensor) -> Tensor:
    """Multiply every element of ``x`` by the single value held in ``s``."""
    if s.data.size != 1:
        raise ValueError("scalar_mul expects a one-element scale tensor")
    sval = float(s.data.reshape(()))
    out_data = x.data * sval

    def backward(g: np.ndarray) -> None:
        if x.requires_grad:
            x._accumulate(g * sval)
        if s.requires_grad:
            s._accumulate(np.full_like(s.data, np.sum(g * x.data)))

    return _result(out_data, (x, s), backward)


def relu(x: Tensor) -> Tensor:
    out_data = np.maximum(x.data, 0.0)

    def backward(g: np.ndarray) -> None:
        x._accumulate(g * (x.data > 0.0))

    return _result(out_data, (x,), backward)


def leaky_relu(x: Tensor, slope: float = 0.2) -> Tensor:
    out_data = np.where(x.data > 0.0, x.data, slope * x.data)

    def backward(g: np.ndarray) -> None:
        x._accumulate(g * np.where(x.data > 0.0, 1.0, slope))

    return _result(out_data, (x,), backward)


def concat_cols(tensors: list[Tensor]) -> Tensor:
    if not tensors:
        raise ValueError("concat_cols needs at least one tensor")
    rows = tensors[0].data.shape[0]
    for t in tensors:
        if t.data.ndim != 2 or t.data.shape[0] != rows:
            raise ValueError("concat_cols expects 2-D tensors with equal row counts")
    out_data = np.concatenate([t.data for t in tensors], axis=1)
    widths = [t.data.shape[1] for t in tensors]

    def backward(g: np.ndarray) -> None:
        off = 0
        for t, w in zip(tensors, widths):
            if t.requires_grad:
                t._accumulate(g[:, off:off + w])
            off += w

    return _result(out_data, tuple(tensors), backward)


def outer_sum(col: Tensor, row: Tensor) -> Tensor:
    """``out[i, j] = col[i, 0] + row[j, 0]`` for two column vectors."""
    if col.data.ndim != 2 or col.data.shape[1] != 1:
        raise ValueError("outer_sum expects (n, 1) column tensors")
    if row.data.ndim != 2 or row.data.shape[1] != 1:
        raise ValueError("outer_sum expects (n, 1) column tensors")
    out_data = col.data + row.data.T

    def backward(g: np.ndarray) -> None:
        if col.requires_grad:
            col._accumulate(g.sum(axis=1, keepdims=True))
        if row.requires_grad:
            row._accumulate(g.sum(axis=0)[:, None])

    return _result(out_data, (col, row), backward)


def masked_row_softmax(scores: Tensor, mask: np.ndarray) -> Tensor:
    """Row-wise softmax restricted to ``mask``; masked-out cells stay zero.

    Every row must have at least one admissible cell.
    """
    mask = np.asarray(mask, dtype=bool)
    if scores.data.shape != mask.shape:
        raise ValueError("mask shape must match scores")
    if not mask.any(axis=1).all():
        raise ValueError("every row needs at least one unmasked cell")
    neg = np.where(mask, scores.data, -np.inf)
    m = neg.max(axis=1, keepdims=True)
    ex = np.exp(np.where(mask, scores.data - m, -np.inf))
    out_data = ex / ex.sum(axis=1, keepdims=True)

    def backward(g: np.ndarray) -> None:
        inner = (g * out_data).sum(axis=1, keepdims=True)
        scores._accumulate(out_data * (g - inner))

    return _result(out_data, (scores,), backward)


def dropout(x: Tensor, rate: float, training: bool, rng: np.random.Generator | None = None) -> Tensor:
    """Zero each element with probability ``rate`` and rescale survivors."""
    if not (0.0 <= rate < 1.0):
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x
    if rng is None:
        raise ValueError("training-mode dropout needs an explicit rng")
    keep = rng.random(x.data.shape) >= rate
    scale = 1.0 / (1.0 - rate)
    out_data = x.data * keep * scale

    def backward(g: np.ndarray) -> None:
        x._accumulate(g * keep * scale)

    return _result(out_data, (x,), backward)


def softmax_with_temperature(logits: Tensor, temperature: float = 1.0) -> Tensor:
    """Row-wise ``softmax(z / T)`` with max-subtraction stabilization."""
    if temperature <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if logits.data.ndim != 2:
        raise ValueError("softmax expects a 2-D [batch x classes] tensor")
    z = logits.data / temperature
    z = z - z.max(axis=1, keepdims=True)
    ex = np.exp(z)
    out_data = ex / ex.sum(axis=1, keepdims=True)

    def backward(g: np.ndarray) -> None:
        inner = (g * out_data).sum(axis=1, keepdims=True)
        logits._accumulate(out_data * (g - inner) / temperature)

    return _result(out_data, (logits,), backward)


def softmax_cross_entropy(logits: Tensor, labels) -> tuple[Tensor, np.ndarray]:
    """Mean cross-entropy of ``softmax(logits)`` against integer labels.

    Returns the scalar loss tensor (gradient flows to the logits) and the
    softmax posteriors as a plain array.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if logits.data.ndim != 2:
        raise ValueError("cross entropy expects 2-D logits")
    batch, classes = logits.data.shape
    if labels.shape != (batch,):
        raise ValueError(f"labels shape {labels.shape} does not match batch {batch}")
    if labels.size and (labels.min() < 0 or labels.max() >= classes):
        raise ValueError("label out of range")
    z = logits.data - logits.data.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(z).sum(axis=1, keepdims=True))
    logp = z - logsumexp
    posteriors = np.exp(logp)
    loss_val = -logp[np.arange(batch), labels].mean()

    def backward(g: np.ndarray) -> None:
        onehot = np.zeros_like(posteriors)
        onehot[np.arange(batch), labels] = 1.0
        logits._accumulate(float(g) * (posteriors - onehot) / batch)

    loss = _result(np.asarray(loss_val), (logits,), backward)
    return loss, posteriors


def cross_entropy_loss(posteriors: np.ndarray, labels) -> float:
    """Mean negative log-probability of the true class.

    ``posteriors`` rows must already be probability distributions.
    """
    p = np.asarray(posteriors, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if p.ndim != 2 or labels.shape != (p.shape[0],):
        raise ValueError("posteriors must be [batch x classes] with one label per row")
    if labels.size and (labels.min() < 0 or labels.max() >= p.shape[1]):
        raise ValueError("label out of range")
    if np.any(p < -1e-9) or np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-6):
        raise ValueError("posterior rows must be probability distributions")
    return float(-np.log(p[np.arange(p.shape[0]), labels]).mean())


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape: tuple[int, ...]) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def cosine_anneal(lr0: float, epoch: int, total: int) -> float:
    """Cosine schedule ``lr0 * (1 + cos(pi * epoch / total)) / 2``."""
    if total <= 0:
        raise ValueError("total epochs must be positive")
    if not (0 <= epoch <= total):
        raise ValueError(f"epoch {epoch} outside [0, {total}]")
    return lr0 * 0.5 * (1.0 + math.cos(math.pi * epoch / total))


class Adam:
    """Adam with the canonical constants; only the learning rate varies."""

    kind = "Adam"

    def __init__(self, params: list[Parameter], learning_rate: float = 0.001,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.first_moment = [np.zeros_like(p.data) for p in self.params]
        self.second_moment = [np.zeros_like(p.data) for p in self.params]
        self.step_count = 0

    def step(self) -> None:
        """Apply one update; gradients are zeroed afterwards."""
        self.step_count += 1
        t = self.step_count
        for i, p in enumerate(self.params):
            g = p.grad if p.grad is not None else np.zeros_like(p.data)
            m = self.beta1 * self.first_moment[i] + (1.0 - self.beta1) * g
            v = self.beta2 * self.second_moment[i] + (1.0 - self.beta2) * g * g
            self.first_moment[i] = m
            self.second_moment[i] = v
            m_hat = m / (1.0 - self.beta1 ** t)
            v_hat = v / (1.0 - self.beta2 ** t)
            p.data = p.data - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
            p.grad = None

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None


class Sgd:
    """Plain stochastic gradient descent."""

    kind = "SGD"

    def __init__(self, params: list[Parameter], learning_rate: float = 0.001):
        self.params = list(params)
        self.learning_rate = learning_rate
        self.step_count = 0

    def step(self) -> None:
        self.step_count += 1
        for p in self.params:
            if p.grad is not None:
                p.data = p.data - self.learning_rate * p.grad
            p.grad = None

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None
