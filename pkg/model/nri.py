from autograd.param_store import ParamStore
from autograd.tensor import Tensor, concat
from dataclass.model_config import GateOutputs, ModelConfig, STATS_FEATURES
from numpy.random import Generator
from typing import Optional, Tuple
from util.exceptions import DimensionMismatchError
from util.rng import INIT, stream
from .adapt import adapt_input_dim, pad_inputs
from .batch import EpisodeBatch
from .layers import (decoder_layer, init_attention, init_decoder_layer, init_layer_norm, init_linear, init_mlp,
                     linear, mlp, multi_head, norm)
import logging
import numpy as np


logger = logging.getLogger(__name__)

# Initial literal-gate bias: gates start near sigmoid(-1) instead of 0.5
LITERAL_GATE_BIAS = -1.0
SUMMARY_EPS = 1e-7

# Parameters indexed by clause slot along their first axis
SLOT_PARAMETERS = ('film.gamma', 'film.beta', 'slots.query')


def orthogonal_rows(rng: Generator, rows: int, cols: int) -> np.ndarray:
    if rows <= cols:
        q, _ = np.linalg.qr(rng.standard_normal((cols, rows)))
        return q.T
    q, _ = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q


def init_params(config: ModelConfig, seed: int = 0, dtype=np.float32) -> ParamStore:
    """
    Fresh parameters drawn from the (seed, INIT) stream
    """
    rng = stream(seed, INIT)
    store = ParamStore(dtype)
    d, t = config.d, config.T

    init_mlp(store, 'stats', STATS_FEATURES, d, d, rng)
    init_mlp(store, 'keys_y', 3, d, d, rng)
    init_mlp(store, 'keys_x', 2 * config.n_train, config.example_key_bottleneck, d, rng)
    init_attention(store, 'encoder', d, d, d, rng)

    store.add('film.gamma', rng.normal(1.0, 0.5, size=(t, d)))
    store.add('film.beta', orthogonal_rows(rng, t, d))
    store.add('slots.query', rng.normal(0.0, 0.5, size=(t, d)))
    for i in range(config.decoder_layers):
        init_decoder_layer(store, f'decoder.{i}', d, config.ffn_mult, rng)
    init_layer_norm(store, 'decoder.out', d)

    init_linear(store, 'gate.s', d, d, rng, bias=False)
    init_linear(store, 'gate.h', d, d, rng, bias=False)
    store.add('gate.bias', np.full(1, LITERAL_GATE_BIAS))
    init_mlp(store, 'clause', 3 * d + 1, d, 1, rng)

    logger.debug(f'Initialized {len(store)} parameter arrays ({store.num_values} values)')
    return store


def prune_mask(z: np.ndarray) -> np.ndarray:
    """
    Keep the higher-scoring literal of each (x_i, NOT x_i) pair; ties keep x_i
    """
    keep_positive = z[..., 0::2] >= z[..., 1::2]
    keep = np.empty(z.shape, dtype=bool)
    keep[..., 0::2] = keep_positive
    keep[..., 1::2] = ~keep_positive
    return keep


class NriModel:
    """
    Statistics encoder, example attention, FiLM slot views, slot decoder and gates.
    """

    def __init__(self, config: ModelConfig, store: Optional[ParamStore] = None, seed: int = 0):
        self.config = config
        self.seed = seed
        self.store = store if store is not None else init_params(config, seed)

    def _const(self, value: np.ndarray) -> Tensor:
        return Tensor(np.asarray(value, dtype=self.store.dtype))

    def _example_keys(self, batch: EpisodeBatch) -> Tensor:
        store = self.store
        y = batch.y[..., None]
        label_in = np.concatenate([y, 1.0 - y, np.ones_like(y)], axis=-1)
        from_label = mlp(store, 'keys_y', self._const(label_in))

        trained = store['keys_x.l1.w']
        if batch.num_literals > trained.shape[0]:
            # Wider than training: expanded constant weight, inference only
            weight = self._const(adapt_input_dim(trained.data, batch.num_literals // 2, self.seed))
            hidden = self._const(batch.key_lits) @ weight + store['keys_x.l1.b']
        else:
            hidden = self._const(pad_inputs(batch.key_lits, trained.shape[0])) @ trained + store['keys_x.l1.b']
        from_literals = linear(store, 'keys_x.l2', hidden.tanh())
        return from_label + from_literals

    def encode(self, batch: EpisodeBatch) -> Tensor:
        """
        Literal embeddings h1 (B, L, d): statistics MLP plus attention over example keys
        """
        if batch.num_rows == 0:
            raise DimensionMismatchError('episode rows', '>= 1', 0)
        h0 = mlp(self.store, 'stats', self._const(batch.phi))
        keys = self._example_keys(batch)
        return h0 + multi_head(self.store, 'encoder', h0, keys, self.config.heads, batch.row_mask)

    def decode(self, h1: Tensor, batch: EpisodeBatch) -> GateOutputs:
        store = self.store
        b, L, d = h1.shape
        t = self.config.T
        lit_mask = batch.lit_mask

        counts = lit_mask.sum(axis=1, keepdims=True).astype(np.float64)
        h_bar = (h1 * self._const(lit_mask[..., None])).sum(axis=1) * self._const(1.0 / counts)

        # Per-slot literal views (B, T, L, d)
        views = h1.reshape(b, 1, L, d) * store['film.gamma'].reshape(1, t, 1, d) + store['film.beta'].reshape(1, t, 1, d)

        slots = store['slots.query'].reshape(1, t, d) + h_bar.reshape(b, 1, d)
        for i in range(self.config.decoder_layers):
            slots = decoder_layer(store, f'decoder.{i}', slots, views, self.config.heads, lit_mask)
        s = norm(store, 'decoder.out', slots)

        # Scaled bilinear literal scores
        proj_s = linear(store, 'gate.s', s).reshape(b, t, d, 1)
        proj_h = linear(store, 'gate.h', views)
        logits = (proj_h @ proj_s).reshape(b, t, L) * (1.0 / np.sqrt(d)) + store['gate.bias']
        z_raw = logits.sigmoid()

        keep = prune_mask(z_raw.data) & lit_mask[:, None, :]
        z = z_raw.masked_fill(~keep, 0.0)

        p = 1.0 - (1.0 - z).prod(axis=-1)
        weight = z.sum(axis=-1, keepdims=True) + SUMMARY_EPS
        summary = (z.reshape(b, t, 1, L) @ views).reshape(b, t, d) / weight

        clause_in = concat([h_bar.reshape(b, 1, d).broadcast_to((b, t, d)), summary, s, p.reshape(b, t, 1)], axis=-1)
        w = mlp(store, 'clause', clause_in).reshape(b, t).sigmoid()
        return GateOutputs(z=z, w=w, p=p, s=s, lit_mask=lit_mask)

    def execute(self, z: Tensor, w: Tensor, lits: np.ndarray, slot_mask: Optional[np.ndarray] = None) -> Tuple[Tensor, Tensor]:
        """
        Product T-norm execution: clause truths (B, M, T) and predictions (B, M)
        """
        b, t, L = z.shape
        m = lits.shape[1]
        values = self._const(lits).reshape(b, m, 1, L)
        clause_truths = (1.0 - z.reshape(b, 1, t, L) * (1.0 - values)).prod(axis=-1)
        active = w if slot_mask is None else w.apply_mask(slot_mask)
        prediction = 1.0 - (1.0 - active.reshape(b, 1, t) * clause_truths).prod(axis=-1)
        return clause_truths, prediction

    def forward(self, batch: EpisodeBatch, slot_mask: Optional[np.ndarray] = None) -> GateOutputs:
        gates = self.decode(self.encode(batch), batch)
        gates.C, gates.y_hat = self.execute(gates.z, gates.w, batch.exec_lits, slot_mask)
        gates.slot_mask = slot_mask
        return gates
