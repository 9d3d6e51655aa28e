"""
Counter-based random streams.

Every consumer derives its own numpy Philox stream from (seed, stream id, index):
the key is the 64-bit seed, the stream id occupies the top counter word and the
index jumps (2^128 draws each) within that lane. Streams never overlap, so episode i of a
run is reproducible without generating episodes 0..i-1.
"""
from numpy.random import Generator, Philox


MASK_64 = (1 << 64) - 1

# Stream ids
EPISODES = 0
DROPOUT = 1
INIT = 2
ADAPT = 3
HARNESS = 4
FOLDS = 5


def stream(seed: int, stream_id: int = EPISODES, index: int = 0) -> Generator:
    """
    Generator for (seed, stream id, index)
    """
    bit_generator = Philox(key=int(seed) & MASK_64, counter=[0, 0, 0, int(stream_id) & MASK_64])
    if index:
        bit_generator = bit_generator.jumped(int(index))
    return Generator(bit_generator)


def episode_rng(seed: int, episode_index: int) -> Generator:
    return stream(seed, EPISODES, episode_index)
