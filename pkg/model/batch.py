from dataclasses import dataclass
from dataclass.episode import Episode
from dnf.evaluate import to_literals
from stats.literal_stats import compute_stats
from typing import List, Optional, Sequence
import numpy as np


@dataclass
class EpisodeBatch:
    """
    Episodes padded to a common literal width L = 2 max(N') and row count M.

    Padded literal columns carry zero statistics and zero key inputs; padded rows
    are excluded from attention and losses through row_mask.
    """
    phi: np.ndarray          # (B, L, 18)
    key_lits: np.ndarray     # (B, M, L) literal values for example keys, unknown = 0.5, padding = 0
    exec_lits: np.ndarray    # (B, M, L) literal values for execution, unknown = 0.5, padding = 1
    y: np.ndarray            # (B, M) labels as 0/1 floats
    row_mask: np.ndarray     # (B, M)
    lit_mask: np.ndarray     # (B, L)
    widths: List[int]        # N' per episode
    rows: List[int]          # M per episode

    @property
    def size(self) -> int:
        return self.phi.shape[0]

    @property
    def num_literals(self) -> int:
        return self.phi.shape[1]

    @property
    def num_rows(self) -> int:
        return self.y.shape[1]


def make_batch(episodes: Sequence[Episode], phis: Optional[Sequence[np.ndarray]] = None,
               min_literals: int = 0) -> EpisodeBatch:
    """
    Pad a list of episodes into one batch; phis are computed when not given
    """
    if phis is None:
        phis = [compute_stats(e).phi for e in episodes]
    b = len(episodes)
    width = max(max(2 * e.width for e in episodes), min_literals)
    rows = max(e.m for e in episodes)

    phi = np.zeros((b, width, phis[0].shape[1]))
    key_lits = np.zeros((b, rows, width))
    exec_lits = np.ones((b, rows, width))
    y = np.zeros((b, rows))
    row_mask = np.zeros((b, rows), dtype=bool)
    lit_mask = np.zeros((b, width), dtype=bool)

    for i, (episode, stats) in enumerate(zip(episodes, phis)):
        lits = to_literals(episode.X, unknown=0.5)
        m, n_lits = lits.shape
        phi[i, :n_lits] = stats
        key_lits[i, :m, :n_lits] = lits
        exec_lits[i, :m, :n_lits] = lits
        y[i, :m] = episode.y
        row_mask[i, :m] = True
        lit_mask[i, :n_lits] = True

    return EpisodeBatch(
        phi=phi,
        key_lits=key_lits,
        exec_lits=exec_lits,
        y=y,
        row_mask=row_mask,
        lit_mask=lit_mask,
        widths=[e.width for e in episodes],
        rows=[e.m for e in episodes]
    )
