"""Deterministic child-seed derivation from one master seed.

Every random stream in the package is derived from the scenario's master seed
and a short text label, so independent streams stay independent and any run can
be reproduced bit-for-bit from (seed, label) alone.  Labels in use:

* ``"channel/bob"``, ``"channel/eve"``, ``"channel/eve-<i>"``  -- CSI draws
* ``"bits/<sweep>-<i>"``, ``"noise/<sweep>-<i>"``              -- per-point Monte-Carlo streams
* ``"mc-starts"``                                              -- relaxation multi-start points
* ``"net-init"``, ``"net-batches"``                            -- pruning-net weights / batch order
* ``"instance/<role>-<i>"``                                    -- generated problem instances
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["child_seed", "child_rng"]


def child_seed(master: int, label: str) -> int:
    """Stable 128-bit integer derived from a master seed and a stream label."""
    if not isinstance(master, (int, np.integer)):
        raise ValueError("master seed must be an integer")
    digest = hashlib.sha256(f"{int(master)}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "big")


def child_rng(master: int, label: str) -> np.random.Generator:
    """Generator seeded from ``child_seed(master, label)``."""
    return np.random.default_rng(child_seed(master, label))
