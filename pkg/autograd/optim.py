from .param_store import ParamStore
import numpy as np


def clip_grad_norm(store: ParamStore, max_norm: float) -> float:
    """
    Scale all gradients so their global L2 norm is at most max_norm.
    Returns the norm before clipping.
    """
    total = 0.0
    for name in store:
        grad = store[name].grad
        if grad is not None:
            total += float(np.sum(grad.astype(np.float64) ** 2))
    norm = float(np.sqrt(total))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for name in store:
            param = store[name]
            if param.grad is not None:
                param.grad *= param.grad.dtype.type(scale)
    return norm


class AdamW:
    """
    Adam with decoupled weight decay. Moments and the step counter live in the
    store, so a checkpoint of the store resumes the optimizer exactly.
    """

    def __init__(self, store: ParamStore, lr: float = 6e-4, weight_decay: float = 1e-2,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.store = store
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def step(self):
        store = self.store
        store.step += 1
        t = store.step
        dtype = store.dtype.type
        correction1 = 1.0 - self.beta1 ** t
        correction2 = 1.0 - self.beta2 ** t

        for name in store:
            param = store[name]
            grad = store.grad_of(name)
            m, v = store.moments.get(name, (np.zeros_like(param.data), np.zeros_like(param.data)))
            m = dtype(self.beta1) * m + dtype(1.0 - self.beta1) * grad
            v = dtype(self.beta2) * v + dtype(1.0 - self.beta2) * grad * grad
            store.moments[name] = (m, v)

            param.data = param.data * dtype(1.0 - self.lr * self.weight_decay)
            m_hat = m / dtype(correction1)
            v_hat = v / dtype(correction2)
            param.data = param.data - dtype(self.lr) * m_hat / (np.sqrt(v_hat) + dtype(self.eps))

    def zero_grad(self):
        self.store.zero_grad()
