"""
Dynamic input-width adaptation for the example-key MLP.

The first layer of that MLP is trained on 2 * n_train literal inputs. Narrower
episodes are zero-padded up to the trained width; wider episodes get an expanded
weight whose extra rows are drawn with the spread of the trained block.
"""
from util.rng import ADAPT, stream
import numpy as np


def adapt_input_dim(weight: np.ndarray, num_variables: int, seed: int = 0) -> np.ndarray:
    """
    First-layer weight for an episode with num_variables columns.

    Returned unchanged when the episode fits the trained width (the caller pads
    the inputs); otherwise the trained rows are copied and the remainder sampled
    from N(0, std(weight)^2) on the (seed, ADAPT) stream.
    """
    trained = weight.shape[0]
    needed = 2 * num_variables
    if needed <= trained:
        return weight
    rng = stream(seed, ADAPT, needed)
    extra = rng.normal(0.0, float(np.std(weight)), size=(needed - trained, weight.shape[1]))
    return np.concatenate([weight, extra.astype(weight.dtype)], axis=0)


def pad_inputs(lits: np.ndarray, width: int) -> np.ndarray:
    """
    Zero-pad the literal axis up to width
    """
    missing = width - lits.shape[-1]
    if missing <= 0:
        return lits
    pad = [(0, 0)] * (lits.ndim - 1) + [(0, missing)]
    return np.pad(lits, pad)
