"""Deterministic random stream construction.

Every random artifact in the package is a pure function of (seed, parameters).
Streams come from numpy's Philox bit generator, which is counter based and
keyed rather than stateful: the user seed fills the low 64 bits of the key and
a hash of a short purpose string fills the high 64 bits, so distinct
(component, purpose) pairs never share a stream and no draw order between
components can change the results.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, purpose: str) -> np.random.Generator:
    """Return the generator for a (seed, purpose) pair.

    The same pair always yields the same stream, independent of platform,
    thread schedule, and any other streams drawn before it.
    """
    tag = int.from_bytes(
        hashlib.blake2s(purpose.encode("utf-8"), digest_size=8).digest(), "big"
    )
    key = (int(seed) & _MASK64) | (tag << 64)
    return np.random.Generator(np.random.Philox(key=key))
