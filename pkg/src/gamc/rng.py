"""Seeded, splittable random streams.

Every stochastic operation in the package draws from a stream derived from
(seed, *key) where the key names the consumer (domain constant plus indices
such as epoch or graph position). Streams are independent of each other and
of the order in which they are created, so any loop over them can be
reordered or parallelized without changing results. There is no hidden
global RNG anywhere.
"""

import numpy as np

# Domain constants keep unrelated consumers on disjoint streams.
INIT = 1
VIEWS = 2
SHUFFLE = 3
SYNTH = 4
SPLIT = 5
RUN = 6
SWEEP = 7


def seed_sequence(seed, *key):
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))


def stream(seed, *key):
    """Generator for the stream named by (seed, *key)."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *key)))


def derive_seed(seed, *key):
    """Deterministic 63-bit integer sub-seed, for configs that carry a seed."""
    return int(seed_sequence(seed, *key).generate_state(1, dtype=np.uint64)[0] >> 1)


def stream_label(gen):
    """Stable human-readable id of a generator's underlying stream."""
    ss = gen.bit_generator.seed_seq
    return f"{ss.entropy}:{','.join(str(k) for k in ss.spawn_key)}"
