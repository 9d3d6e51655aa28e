"""
Central finite-difference checks in 64-bit precision
"""
from dataclass.grad_check import GradCheckResult
from typing import Callable, Dict, List, Sequence, Tuple
from util.rng import HARNESS, stream
from .param_store import ParamStore
from .tensor import Tensor, attention, concat, layer_norm, no_grad, stack, where
import numpy as np


_MASK = np.array([[True, False, True], [False, False, True]])
_KEY_MASK = np.array([[True, True, True, False], [True, False, True, True]])

# name -> (function, input shapes, (low, high) of the uniform inputs)
OP_CASES: Dict[str, Tuple[Callable[..., Tensor], List[Tuple[int, ...]], Tuple[float, float]]] = {
    'add': (lambda a, b: a + b, [(3, 4), (4,)], (-1.0, 1.0)),
    'sub': (lambda a, b: a - b, [(3, 4), (3, 1)], (-1.0, 1.0)),
    'mul': (lambda a, b: a * b, [(2, 3), (2, 3)], (-1.0, 1.0)),
    'div': (lambda a, b: a / b, [(4,), (4,)], (0.5, 2.0)),
    'pow': (lambda a: a ** 1.5, [(4,)], (0.5, 2.0)),
    'log': (lambda a: a.log(), [(4,)], (0.5, 2.0)),
    'matmul': (lambda a, b: a @ b, [(2, 3, 4), (4, 5)], (-1.0, 1.0)),
    'sigmoid': (lambda a: a.sigmoid(), [(5,)], (-1.0, 1.0)),
    'tanh': (lambda a: a.tanh(), [(5,)], (-1.0, 1.0)),
    'exp': (lambda a: a.exp(), [(5,)], (-1.0, 1.0)),
    'relu': (lambda a: a.relu(), [(6,)], (-1.0, 1.0)),
    'abs': (lambda a: a.abs(), [(6,)], (-1.0, 1.0)),
    'clip': (lambda a: a.clip(-0.5, 0.5), [(6,)], (-1.0, 1.0)),
    'softmax': (lambda a: a.softmax(axis=-1), [(3, 6)], (-1.0, 1.0)),
    'sum_mean': (lambda a: a.sum(axis=0) + a.mean(axis=1, keepdims=True), [(4, 4)], (-1.0, 1.0)),
    'prod': (lambda a: a.prod(axis=-1), [(3, 5)], (-1.0, 1.0)),
    'max': (lambda a: a.max(axis=-1), [(3, 5)], (-1.0, 1.0)),
    'reshape_swap': (lambda a: a.reshape(2, 6).swapaxes(0, 1), [(3, 4)], (-1.0, 1.0)),
    'getitem': (lambda a: a[1:, ::2], [(3, 4)], (-1.0, 1.0)),
    'broadcast': (lambda a: a.broadcast_to((3, 2, 4)), [(2, 4)], (-1.0, 1.0)),
    'concat': (lambda a, b: concat([a, b], axis=0), [(2, 3), (1, 3)], (-1.0, 1.0)),
    'stack': (lambda a, b: stack([a, b], axis=1), [(2, 3), (2, 3)], (-1.0, 1.0)),
    'masked_fill': (lambda a: a.masked_fill(_MASK, 0.0), [(2, 3)], (-1.0, 1.0)),
    'where': (lambda a, b: where(_MASK, a, b), [(2, 3), (2, 3)], (-1.0, 1.0)),
    'layer_norm': (lambda x, g, b: layer_norm(x, g, b), [(3, 8), (8,), (8,)], (-1.0, 1.0)),
    'attention': (lambda q, k, v: attention(q, k, v, heads=2, key_mask=_KEY_MASK),
                  [(2, 3, 4), (2, 4, 4), (2, 4, 4)], (-1.0, 1.0)),
}


def relative_error(analytic: float, numeric: float, floor: float = 1e-6) -> float:
    return abs(analytic - numeric) / max(abs(analytic) + abs(numeric), floor)


def check_function(fn: Callable[..., Tensor], inputs: Sequence[np.ndarray], eps: float = 1e-6,
                   seed: int = 0, tolerance: float = 1e-4) -> GradCheckResult:
    """
    Compare backward() of fn against finite differences for every input entry.

    Non-scalar outputs are reduced with a fixed random projection so every output
    entry contributes.
    """
    rng = stream(seed, HARNESS)
    arrays = [np.array(x, dtype=np.float64, copy=True) for x in inputs]
    sample = fn(*[Tensor(a) for a in arrays])
    weights = rng.standard_normal(sample.shape)

    def scalar(*tensors: Tensor) -> Tensor:
        return (fn(*tensors) * weights).sum()

    tensors = [Tensor(a.copy(), requires_grad=True) for a in arrays]
    scalar(*tensors).backward()

    result = GradCheckResult(max_tolerance=tolerance, median_tolerance=tolerance)
    for i, array in enumerate(arrays):
        analytic = tensors[i].grad if tensors[i].grad is not None else np.zeros_like(array)
        for index in np.ndindex(array.shape):
            original = array[index]
            with no_grad():
                array[index] = original + eps
                plus = scalar(*[Tensor(a) for a in arrays]).item()
                array[index] = original - eps
                minus = scalar(*[Tensor(a) for a in arrays]).item()
            array[index] = original
            result.errors.append(relative_error(float(analytic[index]), (plus - minus) / (2 * eps)))
    return result


def check_store(loss_fn: Callable[[ParamStore], Tensor], store: ParamStore, samples: int = 100,
                eps: float = 1e-3, seed: int = 0) -> GradCheckResult:
    """
    Finite-difference check of a full loss on randomly sampled parameter entries.

    The store is copied to 64-bit first; loss_fn must be deterministic.
    """
    store = store.astype(np.float64)
    store.zero_grad()
    loss_fn(store).backward()

    names = store.names
    sizes = np.array([store[name].size for name in names])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    rng = stream(seed, HARNESS, 1)
    picks = rng.choice(int(offsets[-1]), size=min(samples, int(offsets[-1])), replace=False)

    result = GradCheckResult()
    for flat in np.sort(picks):
        owner = int(np.searchsorted(offsets, flat, side='right') - 1)
        name = names[owner]
        param = store[name]
        index = np.unravel_index(int(flat - offsets[owner]), param.shape)
        analytic = float(store.grad_of(name)[index])

        original = param.data[index]
        with no_grad():
            param.data[index] = original + eps
            plus = loss_fn(store).item()
            param.data[index] = original - eps
            minus = loss_fn(store).item()
        param.data[index] = original
        result.errors.append(relative_error(analytic, (plus - minus) / (2 * eps)))
    return result


def op_inputs(name: str, seed: int = 0) -> List[np.ndarray]:
    _, shapes, (low, high) = OP_CASES[name]
    rng = stream(seed, HARNESS, 2)
    return [rng.uniform(low, high, size=shape) for shape in shapes]


def op_suite(seed: int = 0) -> Dict[str, GradCheckResult]:
    """
    check_function over every op in OP_CASES, keyed by op name
    """
    return {name: check_function(fn, op_inputs(name, seed), seed=seed) for name, (fn, _, _) in OP_CASES.items()}
