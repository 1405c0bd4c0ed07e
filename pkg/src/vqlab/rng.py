"""Deterministic random-stream derivation.

Every source of randomness in the package flows from a single root seed.
Named sub-streams are derived by hashing the label, so results do not depend
on the order in which streams are created or consumed.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _label_words(label: str) -> list[int]:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def derive(seed: int, label: str) -> np.random.Generator:
    """Return a generator for the sub-stream `label` of the root `seed`."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, *_label_words(label)])
    return np.random.default_rng(ss)


def spawn(seed: int, label: str, n: int) -> list[np.random.Generator]:
    """n independent generators under one label (one per task/worker)."""
    return [derive(seed, f"{label}/{i}") for i in range(n)]
