from typing import Dict, Iterator, List, Tuple
from util.exceptions import ParameterError
from .tensor import DEFAULT_DTYPE, Tensor
import numpy as np


class ParamStore:
    """
    Named trainable parameters, their gradients and the optimizer moments
    """

    def __init__(self, dtype=DEFAULT_DTYPE):
        self.dtype = np.dtype(dtype)
        self._params: Dict[str, Tensor] = {}
        self.moments: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}
        self.step = 0

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __getitem__(self, name: str) -> Tensor:
        try:
            return self._params[name]
        except KeyError:
            raise ParameterError(name, 'not registered')

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def __len__(self) -> int:
        return len(self._params)

    def add(self, name: str, value: np.ndarray) -> Tensor:
        if name in self._params:
            raise ParameterError(name, 'already registered')
        param = Tensor(np.array(value, dtype=self.dtype, copy=True), requires_grad=True, name=name)
        self._params[name] = param
        return param

    def items(self) -> List[Tuple[str, Tensor]]:
        return list(self._params.items())

    @property
    def names(self) -> List[str]:
        return list(self._params)

    @property
    def num_values(self) -> int:
        return sum(p.size for p in self._params.values())

    def zero_grad(self):
        for param in self._params.values():
            param.grad = None

    def grad_of(self, name: str) -> np.ndarray:
        """
        Gradient of a parameter, zeros if it received none
        """
        param = self[name]
        return param.grad if param.grad is not None else np.zeros(param.shape, dtype=self.dtype)

    def set(self, name: str, value: np.ndarray):
        param = self[name]
        value = np.asarray(value, dtype=self.dtype)
        if value.shape != param.shape:
            raise ParameterError(name, f'shape {value.shape} does not match {param.shape}')
        param.data = value.copy()

    def astype(self, dtype) -> 'ParamStore':
        """
        Copy of the store in another precision (moments included)
        """
        store = ParamStore(dtype)
        for name, param in self._params.items():
            store.add(name, param.data)
        store.moments = {
            name: (m.astype(dtype), v.astype(dtype)) for name, (m, v) in self.moments.items()
        }
        store.step = self.step
        return store

    def copy(self) -> 'ParamStore':
        return self.astype(self.dtype)
