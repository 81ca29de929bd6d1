"""Shared helpers for the test suite: cached expansions and braid corpora."""

from __future__ import annotations

import functools
import random

from stringlinks import Braid, build_special, filtration_degree
from stringlinks.words import braid_commutator


@functools.lru_cache(maxsize=None)
def shared_expansion(n, trunc, strategy="canonical", seed=0):
    """Session-cached special expansions (building the big ones is not free)."""
    return build_special(n, trunc, strategy=strategy, seed=seed)


def gens(n):
    return [Braid.gen(n, i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def random_braid(n, length, rng):
    out = Braid.identity(n)
    pool = gens(n)
    for _ in range(length):
        g = rng.choice(pool)
        out = out * (g if rng.random() < 0.5 else g.inverse())
    return out


def random_filtration_braid(n, k, rng, max_tries=40):
    """A random braid with Milnor filtration level exactly >= k (and nontrivial).

    Built as nested commutators of random short braids, which lands in the
    k-th lower central series of the pure braid group; degenerate samples
    (trivial or deeper than wanted) are rejected and retried.
    """
    for _ in range(max_tries):
        out = random_braid(n, rng.randint(1, 3), rng)
        for _level in range(k - 1):
            other = random_braid(n, rng.randint(1, 2), rng)
            out = braid_commutator(out, other)
        level = filtration_degree(out, k + 1)
        if level == k:
            return out
    raise RuntimeError(f"could not sample a level-{k} braid")


def nested_commutator_corpus(n=3):
    """Named small braids used across tests: filtration levels 1, 2, 3, 5."""
    g12, g13, g23 = Braid.gen(n, 1, 2), Braid.gen(n, 1, 3), Braid.gen(n, 2, 3)
    c2a = braid_commutator(g12, g13)
    c2b = braid_commutator(g12, g23)
    c2c = braid_commutator(g13, g23)
    c3a = braid_commutator(g12, c2a)
    c3b = braid_commutator(c2a, g13)
    c3c = braid_commutator(g23, c2a)
    c5 = braid_commutator(c2a, c3a)
    return {
        "g": (g12, g13, g23),
        "level2": (c2a, c2b, c2c),
        "level3": (c3a, c3b, c3c),
        "level5": (c5,),
    }


def seeded(seed: int) -> random.Random:
    return random.Random(seed)
