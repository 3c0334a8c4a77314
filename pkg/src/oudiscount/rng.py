"""Deterministic random-number streams.

Every stochastic routine derives its generator through :func:`stream`,
keyed by a master seed plus integer sub-keys (replicate index, purpose
tag, ...).  Streams are independent of each other and of execution
order, so replicate loops can run on any number of threads and still
produce identical results.
"""

from __future__ import annotations

import numpy as np

SeedLike = "int | tuple"


def stream(seed, *key: int) -> np.random.Generator:
    """Generator for ``(seed, *key)``.

    ``seed`` may itself be a tuple ``(entropy, *prefix)``; the prefix is
    prepended to ``key``.  That lets a routine hand out sub-seeds
    (``(master, tag)``) without its callees knowing the nesting depth.
    """
    if isinstance(seed, tuple):
        entropy, prefix = seed[0], tuple(int(k) for k in seed[1:])
    else:
        entropy, prefix = seed, ()
    entropy = int(entropy)
    if entropy < 0:
        raise ValueError(f"seed entropy must be non-negative, got {entropy}")
    ss = np.random.SeedSequence(entropy=entropy,
                                spawn_key=prefix + tuple(int(k) for k in key))
    return np.random.default_rng(ss)
