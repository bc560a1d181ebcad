"""Deterministic named random substreams.

Every stochastic effect (datalink dropout, sensor noise, fuzz scenario
generation) draws from its own substream so that adding or removing one
consumer never shifts the draws seen by another. Substreams are derived
from the scenario root seed plus a stable name; the derivation is a hash,
not Python's default seeding, so it is identical across platforms and
process restarts.
"""

from __future__ import annotations

import hashlib
import random


def substream(root_seed: int, name: str) -> random.Random:
    """Independent generator keyed by (root_seed, name)."""
    digest = hashlib.sha256(f"{root_seed}:{name}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "little"))


class StreamBank:
    """Lazy cache of named substreams for one scenario run."""

    def __init__(self, root_seed: int):
        self.root_seed = root_seed
        self._streams: dict[str, random.Random] = {}

    def get(self, name: str) -> random.Random:
        s = self._streams.get(name)
        if s is None:
            s = substream(self.root_seed, name)
            self._streams[name] = s
        return s
