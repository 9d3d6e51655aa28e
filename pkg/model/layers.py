"""
Functional layers over a ParamStore. Each layer owns the parameters under its
name prefix; init_* registers them and the matching function applies them.
"""
from autograd.param_store import ParamStore
from autograd.tensor import Tensor, attention, layer_norm
from numpy.random import Generator
from typing import Optional
import numpy as np


def init_linear(store: ParamStore, prefix: str, fan_in: int, fan_out: int, rng: Generator, bias: bool = True):
    store.add(f'{prefix}.w', rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, fan_out)))
    if bias:
        store.add(f'{prefix}.b', np.zeros(fan_out))


def linear(store: ParamStore, prefix: str, x: Tensor) -> Tensor:
    out = x @ store[f'{prefix}.w']
    bias = f'{prefix}.b'
    return out + store[bias] if bias in store else out


def init_mlp(store: ParamStore, prefix: str, fan_in: int, hidden: int, fan_out: int, rng: Generator):
    init_linear(store, f'{prefix}.l1', fan_in, hidden, rng)
    init_linear(store, f'{prefix}.l2', hidden, fan_out, rng)


def mlp(store: ParamStore, prefix: str, x: Tensor, activation: str = 'tanh') -> Tensor:
    hidden = linear(store, f'{prefix}.l1', x)
    hidden = hidden.tanh() if activation == 'tanh' else hidden.relu()
    return linear(store, f'{prefix}.l2', hidden)


def init_layer_norm(store: ParamStore, prefix: str, d: int):
    store.add(f'{prefix}.g', np.ones(d))
    store.add(f'{prefix}.b', np.zeros(d))


def norm(store: ParamStore, prefix: str, x: Tensor) -> Tensor:
    return layer_norm(x, store[f'{prefix}.g'], store[f'{prefix}.b'])


def init_attention(store: ParamStore, prefix: str, d_query: int, d_key: int, d: int, rng: Generator):
    init_linear(store, f'{prefix}.q', d_query, d, rng, bias=False)
    init_linear(store, f'{prefix}.k', d_key, d, rng, bias=False)
    init_linear(store, f'{prefix}.v', d_key, d, rng, bias=False)
    init_linear(store, f'{prefix}.o', d, d, rng, bias=False)


def multi_head(store: ParamStore, prefix: str, query: Tensor, memory: Tensor, heads: int,
               key_mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Projected multi-head attention of query rows over memory rows
    """
    q = linear(store, f'{prefix}.q', query)
    k = linear(store, f'{prefix}.k', memory)
    v = linear(store, f'{prefix}.v', memory)
    return linear(store, f'{prefix}.o', attention(q, k, v, heads, key_mask))


def init_decoder_layer(store: ParamStore, prefix: str, d: int, ffn_mult: int, rng: Generator):
    init_layer_norm(store, f'{prefix}.ln_self', d)
    init_attention(store, f'{prefix}.self', d, d, d, rng)
    init_layer_norm(store, f'{prefix}.ln_cross', d)
    init_attention(store, f'{prefix}.cross', d, d, d, rng)
    init_layer_norm(store, f'{prefix}.ln_ffn', d)
    init_mlp(store, f'{prefix}.ffn', d, ffn_mult * d, d, rng)


def decoder_layer(store: ParamStore, prefix: str, slots: Tensor, memory: Tensor, heads: int,
                  memory_mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Pre-norm decoder block over slot states.

    slots: (B, T, d). memory: (B, T, L, d), a separate literal view per slot.
    memory_mask: (B, L) usable literal columns.
    """
    normed = norm(store, f'{prefix}.ln_self', slots)
    x = slots + multi_head(store, f'{prefix}.self', normed, normed, heads)

    # Each slot attends only over its own view: one query row per (episode, slot)
    b, t, d = x.shape
    query = norm(store, f'{prefix}.ln_cross', x).reshape(b, t, 1, d)
    cross_mask = None if memory_mask is None else np.asarray(memory_mask, dtype=bool)[:, None, :]
    cross = multi_head(store, f'{prefix}.cross', query, memory, heads, cross_mask)
    x = x + cross.reshape(b, t, d)

    return x + mlp(store, f'{prefix}.ffn', norm(store, f'{prefix}.ln_ffn', x), activation='relu')
