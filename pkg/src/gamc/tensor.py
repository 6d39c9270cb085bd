"""2-D float64 tensors with a dynamic reverse-mode tape.

Every differentiable operation is a module-level function. When any operand
is tracked on a Tape the result is tracked too and a vector-Jacobian closure
is recorded; backward() then replays the records in exact reverse execution
order. Tensors are immutable once produced, scalars are 1x1 tensors, and
everything is float64 throughout.
"""

import numpy as np

from . import kernels
from .errors import ContractError, DataError, NumericError, ShapeError


class Tensor2:
    """Immutable 2-D float64 matrix, optionally tracked on a tape."""

    __slots__ = ("data", "tape")

    def __init__(self, data, tape=None, _checked=False):
        arr = np.ascontiguousarray(data, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeError(f"Tensor2 needs a 2-D array, got shape {arr.shape}")
        if not _checked and not np.isfinite(arr).all():
            raise NumericError("Tensor2 holds non-finite values")
        self.data = arr
        self.tape = tape

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def tracked(self):
        return self.tape is not None

    def item(self):
        if self.shape != (1, 1):
            raise ContractError(f"item() needs a 1x1 tensor, got {self.shape}")
        return float(self.data[0, 0])

    def __repr__(self):
        return f"Tensor2({self.rows}x{self.cols}, tracked={self.tracked})"


class Tape:
    """Single-owner record of one forward pass."""

    def __init__(self):
        self._records = []

    def leaf(self, data):
        """Track an array (typically a parameter) as a differentiable leaf."""
        return Tensor2(data, tape=self)

    def _record(self, out, vjp):
        self._records.append((out, vjp))


class Gradients:
    """Gradient accumulators from one backward pass, keyed by tensor identity."""

    def __init__(self, grads):
        self._grads = grads

    def __getitem__(self, tensor):
        g = self._grads.get(id(tensor))
        if g is None:
            # Parameter never touched the loss: its gradient is zero.
            return np.zeros(tensor.shape)
        return g


def backward(tape, loss):
    """Propagate d(loss)/d(x) to every tracked tensor on the tape."""
    if not isinstance(loss, Tensor2) or loss.tape is not tape:
        raise ContractError("loss was not produced on this tape")
    if loss.shape != (1, 1):
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
    grads = {id(loss): np.ones((1, 1))}
    for out, vjp in reversed(tape._records):
        g = grads.pop(id(out), None)
        if g is None:
            continue
        for pair in vjp(g):
            if pair is None:
                continue
            t, pg = pair
            acc = grads.get(id(t))
            grads[id(t)] = pg if acc is None else acc + pg
    return Gradients(grads)


def _as_tensor(x):
    return x if isinstance(x, Tensor2) else Tensor2(x)

def _tape_of(*tensors):
    tape = None
    for t in tensors:
        if t.tape is None:
            continue
        if tape is None:
            tape = t.tape
        elif tape is not t.tape:
            raise ContractError("operands live on different tapes")
    return tape

def _emit(tape, data, vjp):
    out = Tensor2(data, tape=tape)
    if tape is not None:
        tape._record(out, vjp)
    return out


def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    if a.cols != b.rows:
        raise ShapeError(f"matmul: inner dims differ, {a.shape} x {b.shape}")
    tape = _tape_of(a, b)
    data = a.data @ b.data

    def vjp(g):
        return (
            (a, g @ b.data.T) if a.tracked else None,
            (b, a.data.T @ g) if b.tracked else None,
        )

    return _emit(tape, data, vjp)


def spmm_neighbors(adj, h):
    """Row i of the result sums the h rows of i's neighbors (symmetric adjacency)."""
    h = _as_tensor(h)
    if adj.num_nodes != h.rows:
        raise ShapeError(f"spmm: adjacency has {adj.num_nodes} nodes, h has {h.rows} rows")
    cols = adj.cols
    if cols.shape[0] and (cols.min() < 0 or cols.max() >= h.rows):
        raise DataError("spmm: corrupt graph, neighbor index out of range")
    data = kernels.neighbor_sum(adj.offsets, cols, h.data)

    def vjp(g):
        # A is symmetric, so the adjoint is the same aggregation.
        return ((h, kernels.neighbor_sum(adj.offsets, cols, g)),) if h.tracked else ()

    return _emit(h.tape, data, vjp)


def relu(x):
    x = _as_tensor(x)

    def vjp(g):
        return ((x, g * (x.data > 0)),) if x.tracked else ()

    return _emit(x.tape, np.maximum(x.data, 0.0), vjp)


def _same_shape(a, b, op):
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shapes differ, {a.shape} vs {b.shape}")


def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _same_shape(a, b, "add")

    def vjp(g):
        return ((a, g) if a.tracked else None, (b, g) if b.tracked else None)

    return _emit(_tape_of(a, b), a.data + b.data, vjp)


def sub(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _same_shape(a, b, "sub")

    def vjp(g):
        return ((a, g) if a.tracked else None, (b, -g) if b.tracked else None)

    return _emit(_tape_of(a, b), a.data - b.data, vjp)


def mul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _same_shape(a, b, "mul")

    def vjp(g):
        return (
            (a, g * b.data) if a.tracked else None,
            (b, g * a.data) if b.tracked else None,
        )

    return _emit(_tape_of(a, b), a.data * b.data, vjp)


def div(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _same_shape(a, b, "div")

    def vjp(g):
        return (
            (a, g / b.data) if a.tracked else None,
            (b, -g * a.data / (b.data * b.data)) if b.tracked else None,
        )

    return _emit(_tape_of(a, b), a.data / b.data, vjp)


def add_bias(x, bias):
    """Add a 1 x d row vector to every row of x."""
    x, bias = _as_tensor(x), _as_tensor(bias)
    if bias.rows != 1 or bias.cols != x.cols:
        raise ShapeError(f"add_bias: bias {bias.shape} does not broadcast over {x.shape}")

    def vjp(g):
        return (
            (x, g) if x.tracked else None,
            (bias, g.sum(axis=0, keepdims=True)) if bias.tracked else None,
        )

    return _emit(_tape_of(x, bias), x.data + bias.data, vjp)


def scale(x, c):
    """Multiply by a constant (not differentiated through c)."""
    x = _as_tensor(x)
    c = float(c)

    def vjp(g):
        return ((x, c * g),) if x.tracked else ()

    return _emit(x.tape, c * x.data, vjp)


def add_const(x, c):
    x = _as_tensor(x)

    def vjp(g):
        return ((x, g),) if x.tracked else ()

    return _emit(x.tape, x.data + float(c), vjp)


def maximum_const(x, c):
    """Elementwise max(x, c); subgradient 0 where x <= c."""
    x = _as_tensor(x)
    c = float(c)

    def vjp(g):
        return ((x, g * (x.data > c)),) if x.tracked else ()

    return _emit(x.tape, np.maximum(x.data, c), vjp)


def smul(s, x):
    """Scale a matrix by a 1x1 tensor, differentiable in both."""
    s, x = _as_tensor(s), _as_tensor(x)
    if s.shape != (1, 1):
        raise ShapeError(f"smul: scalar operand must be 1x1, got {s.shape}")

    def vjp(g):
        return (
            (s, np.array([[np.sum(g * x.data)]])) if s.tracked else None,
            (x, s.data[0, 0] * g) if x.tracked else None,
        )

    return _emit(_tape_of(s, x), s.data[0, 0] * x.data, vjp)


def _check_rows(rows, n, op):
    rows = np.asarray(rows, dtype=np.int64).reshape(-1)
    if rows.shape[0] and (rows.min() < 0 or rows.max() >= n):
        raise ContractError(f"{op}: row index out of range for {n} rows")
    return rows


def replace_rows(x, rows, row):
    """Copy of x with the given rows replaced by a 1 x d row vector."""
    x, row = _as_tensor(x), _as_tensor(row)
    if row.rows != 1 or row.cols != x.cols:
        raise ShapeError(f"replace_rows: row {row.shape} does not fit {x.shape}")
    rows = _check_rows(rows, x.rows, "replace_rows")
    data = x.data.copy()
    data[rows] = row.data[0]

    def vjp(g):
        gx = None
        if x.tracked:
            gx = g.copy()
            gx[rows] = 0.0
        return (
            (x, gx) if x.tracked else None,
            (row, g[rows].sum(axis=0, keepdims=True)) if row.tracked else None,
        )

    return _emit(_tape_of(x, row), data, vjp)


def keep_rows(x, rows):
    """Copy of x with every row outside `rows` zeroed."""
    x = _as_tensor(x)
    rows = _check_rows(rows, x.rows, "keep_rows")
    mask = np.zeros((x.rows, 1))
    mask[rows] = 1.0

    def vjp(g):
        return ((x, g * mask),) if x.tracked else ()

    return _emit(x.tape, x.data * mask, vjp)


def row_sum(x):
    """Sum over rows, producing a 1 x d vector (sum pooling)."""
    x = _as_tensor(x)

    def vjp(g):
        return ((x, np.broadcast_to(g, x.shape).copy()),) if x.tracked else ()

    return _emit(x.tape, x.data.sum(axis=0, keepdims=True), vjp)


def frobenius_dot(a, b):
    """Sum of the elementwise product, as a 1x1 tensor."""
    a, b = _as_tensor(a), _as_tensor(b)
    _same_shape(a, b, "frobenius_dot")
    data = np.array([[np.sum(a.data * b.data)]])

    def vjp(g):
        s = g[0, 0]
        return (
            (a, s * b.data) if a.tracked else None,
            (b, s * a.data) if b.tracked else None,
        )

    return _emit(_tape_of(a, b), data, vjp)


def frobenius_norm(x):
    x = _as_tensor(x)
    val = float(np.sqrt(np.sum(x.data * x.data)))

    def vjp(g):
        return ((x, (g[0, 0] / max(val, 1e-12)) * x.data),) if x.tracked else ()

    return _emit(x.tape, np.array([[val]]), vjp)


def row_cosine_mean(a, b, floor=1e-12):
    """Mean over rows of the per-row cosine similarity."""
    a, b = _as_tensor(a), _as_tensor(b)
    _same_shape(a, b, "row_cosine_mean")
    n = a.rows
    na = np.linalg.norm(a.data, axis=1)
    nb = np.linalg.norm(b.data, axis=1)
    den = np.maximum(na * nb, floor)
    dots = np.sum(a.data * b.data, axis=1)
    cos = dots / den

    def vjp(g):
        s = g[0, 0] / n
        live = (na * nb > floor)[:, None]
        ga = gb = None
        if a.tracked:
            ga = s * live * (b.data / den[:, None]
                             - (cos / np.maximum(na * na, floor))[:, None] * a.data)
        if b.tracked:
            gb = s * live * (a.data / den[:, None]
                             - (cos / np.maximum(nb * nb, floor))[:, None] * b.data)
        return ((a, ga) if a.tracked else None, (b, gb) if b.tracked else None)

    return _emit(_tape_of(a, b), np.array([[cos.mean()]]), vjp)
