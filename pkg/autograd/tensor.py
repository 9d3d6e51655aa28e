"""
Dense reverse-mode autodiff over numpy arrays.

Every Tensor records the tensors it was computed from and a closure that pushes
its gradient back to them. backward() walks the graph in reverse topological
order. Parameters are 32-bit; the gradient checker runs the same graph in 64-bit.
"""
from contextlib import contextmanager
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union
from util.exceptions import DomainError, NonScalarLossError, ShapeError
import numpy as np
import threading


DEFAULT_DTYPE = np.float32

# Used in place of -inf before a softmax; exp() of it underflows to exactly 0
MASK_VALUE = -1e30

# Graph recording is per thread
_local = threading.local()

# Process-wide; raises on NaN/Inf after every op when on
_debug_checks = False


def set_debug_checks(enabled: bool):
    global _debug_checks
    _debug_checks = bool(enabled)


def debug_checks() -> bool:
    return _debug_checks


def grad_enabled() -> bool:
    return getattr(_local, 'enabled', True)


@contextmanager
def no_grad():
    """
    Build no graph inside this block (inference)
    """
    previous = grad_enabled()
    _local.enabled = False
    try:
        yield
    finally:
        _local.enabled = previous


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """
    Sum a broadcast gradient back down to the shape of the operand
    """
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


ArrayLike = Union['Tensor', np.ndarray, float, int]


class Tensor:
    __slots__ = ('data', 'grad', 'requires_grad', '_prev', '_backward', '_op', 'name')

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None):
        data = np.asarray(data)
        if not np.issubdtype(data.dtype, np.floating):
            data = data.astype(DEFAULT_DTYPE)
        self.data: np.ndarray = data
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self._prev: Tuple['Tensor', ...] = ()
        self._backward: Callable[[], None] = lambda: None
        self._op = ''
        self.name = name

    def __repr__(self):
        label = f' name={self.name}' if self.name else ''
        if self._op:
            label += f' op={self._op}'
        return f'Tensor(shape={self.shape}, dtype={self.dtype}{label})'

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> 'Tensor':
        return Tensor(self.data)

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def zero_grad(self):
        self.grad = None

    def _accumulate(self, grad: np.ndarray):
        grad = unbroadcast(np.asarray(grad), self.shape).astype(self.dtype, copy=False)
        if self.grad is None:
            self.grad = np.array(grad, dtype=self.dtype, copy=True).reshape(self.shape)
        else:
            self.grad += grad.reshape(self.shape)

    def _const(self, other: ArrayLike) -> 'Tensor':
        if isinstance(other, Tensor):
            return other
        return Tensor(np.asarray(other, dtype=self.dtype))

    # ---- graph plumbing ----

    @staticmethod
    def _result(data: np.ndarray, parents: Sequence['Tensor'], backward: Callable[[np.ndarray], None], op: str) -> 'Tensor':
        if _debug_checks and not np.all(np.isfinite(data)):
            raise DomainError(op, 'produced a non-finite value')
        requires = grad_enabled() and any(p.requires_grad for p in parents)
        out = Tensor(data, requires_grad=requires)
        out._op = op
        if requires:
            out._prev = tuple(parents)

            def _backward():
                if out.grad is not None:
                    backward(out.grad)

            out._backward = _backward
        return out

    def backward(self):
        """
        Reverse-mode gradients for every reachable tensor that requires them
        """
        if self.size != 1:
            raise NonScalarLossError(self.shape)

        topo: List[Tensor] = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._prev:
                if id(parent) not in visited:
                    stack.append((parent, False))

        self.grad = np.ones(self.shape, dtype=self.dtype)
        for node in reversed(topo):
            node._backward()
        # Release intermediate graph state
        for node in topo:
            if node._prev:
                node._prev = ()
                node._backward = lambda: None

    # ---- elementwise ----

    def __add__(self, other: ArrayLike) -> 'Tensor':
        other = self._const(other)

        def backward(g):
            if self.requires_grad:
                self._accumulate(g)
            if other.requires_grad:
                other._accumulate(g)

        return Tensor._result(self.data + other.data, (self, other), backward, 'add')

    def __radd__(self, other: ArrayLike) -> 'Tensor':
        return self + other

    def __sub__(self, other: ArrayLike) -> 'Tensor':
        other = self._const(other)

        def backward(g):
            if self.requires_grad:
                self._accumulate(g)
            if other.requires_grad:
                other._accumulate(-g)

        return Tensor._result(self.data - other.data, (self, other), backward, 'sub')

    def __rsub__(self, other: ArrayLike) -> 'Tensor':
        return self._const(other) - self

    def __mul__(self, other: ArrayLike) -> 'Tensor':
        other = self._const(other)

        def backward(g):
            if self.requires_grad:
                self._accumulate(g * other.data)
            if other.requires_grad:
                other._accumulate(g * self.data)

        return Tensor._result(self.data * other.data, (self, other), backward, 'mul')

    def __rmul__(self, other: ArrayLike) -> 'Tensor':
        return self * other

    def __truediv__(self, other: ArrayLike) -> 'Tensor':
        other = self._const(other)
        if np.any(other.data == 0):
            raise DomainError('div', 'division by zero')

        def backward(g):
            if self.requires_grad:
                self._accumulate(g / other.data)
            if other.requires_grad:
                other._accumulate(-g * self.data / (other.data * other.data))

        return Tensor._result(self.data / other.data, (self, other), backward, 'div')

    def __rtruediv__(self, other: ArrayLike) -> 'Tensor':
        return self._const(other) / self

    def __neg__(self) -> 'Tensor':
        def backward(g):
            self._accumulate(-g)

        return Tensor._result(-self.data, (self,), backward, 'neg')

    def __pow__(self, p: float) -> 'Tensor':
        if p < 0 and np.any(self.data == 0):
            raise DomainError('pow', 'negative power of zero')

        def backward(g):
            self._accumulate(g * p * self.data ** (p - 1))

        return Tensor._result(self.data ** p, (self,), backward, 'pow')

    def sigmoid(self) -> 'Tensor':
        out_data = np.empty_like(self.data)
        positive = self.data >= 0
        out_data[positive] = 1.0 / (1.0 + np.exp(-self.data[positive]))
        e = np.exp(self.data[~positive])
        out_data[~positive] = e / (1.0 + e)

        def backward(g):
            self._accumulate(g * out_data * (1.0 - out_data))

        return Tensor._result(out_data, (self,), backward, 'sigmoid')

    def tanh(self) -> 'Tensor':
        out_data = np.tanh(self.data)

        def backward(g):
            self._accumulate(g * (1.0 - out_data * out_data))

        return Tensor._result(out_data, (self,), backward, 'tanh')

    def relu(self) -> 'Tensor':
        positive = self.data > 0

        def backward(g):
            self._accumulate(g * positive)

        return Tensor._result(np.where(positive, self.data, 0.0).astype(self.dtype), (self,), backward, 'relu')

    def exp(self) -> 'Tensor':
        with np.errstate(over='ignore'):
            out_data = np.exp(self.data)
        if not np.all(np.isfinite(out_data)):
            raise DomainError('exp', 'overflow')

        def backward(g):
            self._accumulate(g * out_data)

        return Tensor._result(out_data, (self,), backward, 'exp')

    def log(self) -> 'Tensor':
        if np.any(self.data <= 0):
            raise DomainError('log', 'non-positive argument')

        def backward(g):
            self._accumulate(g / self.data)

        return Tensor._result(np.log(self.data), (self,), backward, 'log')

    def abs(self) -> 'Tensor':
        def backward(g):
            self._accumulate(g * np.sign(self.data))

        return Tensor._result(np.abs(self.data), (self,), backward, 'abs')

    def clip(self, low: float, high: float) -> 'Tensor':
        inside = (self.data >= low) & (self.data <= high)

        def backward(g):
            self._accumulate(g * inside)

        return Tensor._result(np.clip(self.data, low, high), (self,), backward, 'clip')

    def masked_fill(self, mask: np.ndarray, value: float) -> 'Tensor':
        """
        Replace entries where mask is True with a constant; no gradient flows there
        """
        mask = np.broadcast_to(np.asarray(mask, dtype=bool), self.shape)

        def backward(g):
            self._accumulate(np.where(mask, 0.0, g))

        return Tensor._result(np.where(mask, value, self.data).astype(self.dtype), (self,), backward, 'masked_fill')

    def apply_mask(self, mask: np.ndarray) -> 'Tensor':
        """
        Multiply by a constant 0/1 (dropout) mask
        """
        return self * np.asarray(mask, dtype=self.dtype)

    # ---- reductions ----

    def sum(self, axis: Optional[Union[int, Tuple[int, ...]]] = None, keepdims: bool = False) -> 'Tensor':
        def backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            self._accumulate(np.broadcast_to(g, self.shape))

        return Tensor._result(self.data.sum(axis=axis, keepdims=keepdims), (self,), backward, 'sum')

    def mean(self, axis: Optional[Union[int, Tuple[int, ...]]] = None, keepdims: bool = False) -> 'Tensor':
        if axis is None:
            count = self.size
        else:
            axes = axis if isinstance(axis, tuple) else (axis,)
            count = int(np.prod([self.shape[a] for a in axes]))
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    def max(self, axis: int = -1, keepdims: bool = False) -> 'Tensor':
        """
        Maximum along one axis; the gradient goes to the first maximal entry
        """
        axis = axis % self.ndim
        index = np.expand_dims(np.argmax(self.data, axis=axis), axis)
        out_data = np.take_along_axis(self.data, index, axis=axis)

        def backward(g):
            if not keepdims:
                g = np.expand_dims(g, axis)
            full = np.zeros(self.shape, dtype=self.dtype)
            np.put_along_axis(full, index, g, axis=axis)
            self._accumulate(full)

        return Tensor._result(out_data if keepdims else np.squeeze(out_data, axis), (self,), backward, 'max')

    def prod(self, axis: int = -1) -> 'Tensor':
        """
        Product along one axis with an exact (division-free) backward
        """
        axis = axis % self.ndim
        moved = np.moveaxis(self.data, axis, -1)
        ones = np.ones(moved.shape[:-1] + (1,), dtype=self.dtype)
        out_data = np.prod(moved, axis=-1)

        def backward(g):
            before = np.cumprod(np.concatenate([ones, moved[..., :-1]], axis=-1), axis=-1)
            after = np.cumprod(np.concatenate([ones, moved[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
            others = np.moveaxis(before * after, -1, axis)
            self._accumulate(np.expand_dims(g, axis) * others)

        return Tensor._result(out_data, (self,), backward, 'prod')

    def softmax(self, axis: int = -1) -> 'Tensor':
        shifted = self.data - self.data.max(axis=axis, keepdims=True)
        e = np.exp(shifted)
        out_data = e / e.sum(axis=axis, keepdims=True)

        def backward(g):
            dot = (g * out_data).sum(axis=axis, keepdims=True)
            self._accumulate(out_data * (g - dot))

        return Tensor._result(out_data, (self,), backward, 'softmax')

    # ---- linear algebra and shape ----

    def __matmul__(self, other: ArrayLike) -> 'Tensor':
        other = self._const(other)
        if self.ndim < 2 or other.ndim < 2 or self.shape[-1] != other.shape[-2]:
            raise ShapeError('matmul', self.shape, other.shape)

        def backward(g):
            if self.requires_grad:
                self._accumulate(g @ np.swapaxes(other.data, -1, -2))
            if other.requires_grad:
                other._accumulate(np.swapaxes(self.data, -1, -2) @ g)

        return Tensor._result(self.data @ other.data, (self, other), backward, 'matmul')

    def reshape(self, *shape) -> 'Tensor':
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        try:
            out_data = self.data.reshape(shape)
        except ValueError:
            raise ShapeError('reshape', self.shape, shape)

        def backward(g):
            self._accumulate(g.reshape(self.shape))

        return Tensor._result(out_data, (self,), backward, 'reshape')

    def swapaxes(self, a: int, b: int) -> 'Tensor':
        def backward(g):
            self._accumulate(np.swapaxes(g, a, b))

        return Tensor._result(np.swapaxes(self.data, a, b), (self,), backward, 'swapaxes')

    def transpose(self, *axes) -> 'Tensor':
        inverse = np.argsort(axes)

        def backward(g):
            self._accumulate(np.transpose(g, inverse))

        return Tensor._result(np.transpose(self.data, axes), (self,), backward, 'transpose')

    def expand_dims(self, axis: int) -> 'Tensor':
        shape = np.expand_dims(self.data, axis).shape
        return self.reshape(shape)

    def broadcast_to(self, shape: Tuple[int, ...]) -> 'Tensor':
        try:
            out_data = np.broadcast_to(self.data, shape)
        except ValueError:
            raise ShapeError('broadcast', self.shape, shape)

        def backward(g):
            self._accumulate(g)

        return Tensor._result(np.ascontiguousarray(out_data), (self,), backward, 'broadcast')

    def __getitem__(self, index) -> 'Tensor':
        out_data = self.data[index]

        def backward(g):
            full = np.zeros(self.shape, dtype=self.dtype)
            np.add.at(full, index, g)
            self._accumulate(full)

        return Tensor._result(np.array(out_data, copy=True), (self,), backward, 'getitem')


def tensor(data, requires_grad: bool = False, dtype=None) -> Tensor:
    return Tensor(np.asarray(data, dtype=dtype or DEFAULT_DTYPE), requires_grad=requires_grad)


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    tensors = list(tensors)
    try:
        out_data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        raise ShapeError('concat', *[t.shape for t in tensors])
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        for t, part in zip(tensors, np.split(g, splits, axis=axis)):
            if t.requires_grad:
                t._accumulate(part)

    return Tensor._result(out_data, tensors, backward, 'concat')


def stack(tensors: Iterable[Tensor], axis: int = 0) -> Tensor:
    return concat([t.expand_dims(axis) for t in tensors], axis=axis)


def where(condition: np.ndarray, a: Tensor, b: Tensor) -> Tensor:
    """
    Elementwise selection by a constant boolean condition
    """
    condition = np.asarray(condition, dtype=bool)

    def backward(g):
        if a.requires_grad:
            a._accumulate(np.where(condition, g, 0.0))
        if b.requires_grad:
            b._accumulate(np.where(condition, 0.0, g))

    return Tensor._result(np.where(condition, a.data, b.data), (a, b), backward, 'where')


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    mu = x.mean(axis=-1, keepdims=True)
    centered = x - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    return centered * ((var + eps) ** -0.5) * gamma + beta


def attention(q: Tensor, k: Tensor, v: Tensor, heads: int, key_mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Scaled dot-product multi-head attention.

    q: (..., Q, d), k and v: (..., K, d). key_mask: (..., K) with True for usable keys;
    masked keys receive zero weight (and therefore zero gradient).
    """
    if q.shape[-1] != k.shape[-1] or k.shape[:-1] != v.shape[:-1] or q.shape[-1] % heads:
        raise ShapeError('attention', q.shape, k.shape, v.shape)
    d = q.shape[-1]
    head_dim = d // heads

    def split(t: Tensor) -> Tensor:
        # (..., L, d) -> (..., heads, L, head_dim)
        shaped = t.reshape(t.shape[:-1] + (heads, head_dim))
        return shaped.swapaxes(-2, -3)

    qh, kh, vh = split(q), split(k), split(v)
    scores = (qh @ kh.swapaxes(-1, -2)) * (1.0 / np.sqrt(head_dim))
    if key_mask is not None:
        # (..., K) -> (..., 1, 1, K)
        blocked = ~np.asarray(key_mask, dtype=bool)[..., None, None, :]
        scores = scores.masked_fill(blocked, MASK_VALUE)
    weights = scores.softmax(axis=-1)
    out = weights @ vh
    out = out.swapaxes(-2, -3)
    return out.reshape(out.shape[:-2] + (d,))
