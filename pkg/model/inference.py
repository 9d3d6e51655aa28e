from autograd.tensor import no_grad
from concurrent.futures import ThreadPoolExecutor
from dataclass.checkpoint import Checkpoint
from dataclass.episode import Episode
from dataclass.model_config import GateOutputs
from dataclass.rule import Clause, DnfRule, Literal
from typing import List, Optional, Sequence
from .batch import make_batch
from .nri import NriModel
import numpy as np


def extract_rule(z: np.ndarray, w: np.ndarray, num_variables: int, tau_z: float = 0.5, tau_w: float = 0.5) -> DnfRule:
    """
    Hard rule from one episode's gates: slots with w >= tau_w, literals with z >= tau_z.
    Empty clauses are dropped and duplicates collapse.
    """
    clauses = set()
    for k in np.flatnonzero(np.asarray(w) >= tau_w):
        columns = np.flatnonzero(np.asarray(z[k]) >= tau_z)
        if columns.size:
            clauses.add(Clause.of(Literal.from_column(int(c)) for c in columns))
    return DnfRule(frozenset(clauses), num_variables)


def discrimination_scores(C: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    d_k = mean clause truth over positives minus mean over negatives
    """
    C = np.asarray(C, dtype=np.float64)
    y = np.asarray(y, dtype=bool)
    return C[y].mean(axis=0) - C[~y].mean(axis=0)


def top_k_filter(w: np.ndarray, scores: np.ndarray, k: int) -> np.ndarray:
    """
    Zero the clause gates of every slot outside the k best discrimination scores
    """
    w = np.array(w, copy=True)
    if k <= 0 or k >= w.shape[0]:
        return w
    # Stable ordering so ties resolve to the lower slot index
    keep = np.argsort(-np.asarray(scores), kind='stable')[:k]
    filtered = np.zeros_like(w)
    filtered[keep] = w[keep]
    return filtered


class RuleInducer:
    """
    Zero-shot rule induction with a fixed checkpoint
    """

    def __init__(self, checkpoint: Checkpoint, tau_z: Optional[float] = None, tau_w: Optional[float] = None):
        self.checkpoint = checkpoint
        self.model = NriModel(checkpoint.model, checkpoint.store, checkpoint.seed)
        self.tau_z = checkpoint.model.tau_z if tau_z is None else tau_z
        self.tau_w = checkpoint.model.tau_w if tau_w is None else tau_w

    def gates(self, episode: Episode) -> GateOutputs:
        """
        Gates and soft execution for a single episode, as numpy arrays
        """
        batch = make_batch([episode])
        with no_grad():
            gates = self.model.forward(batch)
        gates = gates.numpy()
        return GateOutputs(
            z=gates.z[0],
            w=gates.w[0],
            p=gates.p[0],
            s=gates.s[0],
            lit_mask=gates.lit_mask[0],
            C=gates.C[0],
            y_hat=gates.y_hat[0]
        )

    def induce(self, episode: Episode, top_k: int = 0) -> DnfRule:
        gates = self.gates(episode)
        w = gates.w
        if top_k:
            w = top_k_filter(w, discrimination_scores(gates.C, episode.y), top_k)
        return extract_rule(gates.z, w, episode.width, self.tau_z, self.tau_w)

    def induce_many(self, episodes: Sequence[Episode], threads: int = 1, top_k: int = 0) -> List[DnfRule]:
        if threads <= 1 or len(episodes) <= 1:
            return [self.induce(e, top_k) for e in episodes]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda e: self.induce(e, top_k), episodes))


def induce(checkpoint: Checkpoint, episode: Episode, top_k: int = 0) -> DnfRule:
    return RuleInducer(checkpoint).induce(episode, top_k)
