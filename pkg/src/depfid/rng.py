"""Deterministic pseudo-random streams.

The generator is counter-based SplitMix64: output ``i`` of the stream keyed
by ``(seed, stream)`` is ``mix64(key + (i+1) * GOLDEN)`` where ``mix64`` is
the SplitMix64 finalizer and ``key`` is a fixed hash of the seed and stream
id. Because outputs are a pure function of (seed, stream, index), streams
are splittable, order-independent, and bit-reproducible on any platform
with IEEE-754 doubles and 64-bit wrapping arithmetic.

Uniform doubles are ``((bits >> 11) + 0.5) * 2**-53``, strictly inside
(0, 1). Normal variates are produced by the inverse CDF of those uniforms
(see :func:`depfid.special.normal_quantile`), never by rejection, so the
normal stream consumes exactly one uniform per variate.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_STREAM_SALT = np.uint64(0xD1B54A32D192ED03)

_U64 = np.uint64
_INV_2_53 = 2.0**-53


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


def _mix_scalar(z: int) -> int:
    return int(_mix64(np.array([z], dtype=np.uint64))[0])


def derive(seed: int, *path: int) -> int:
    """Fold one or more stream labels into a fresh 64-bit seed."""
    key = _mix_scalar((seed & 0xFFFFFFFFFFFFFFFF) ^ int(GOLDEN))
    for label in path:
        key = _mix_scalar((key + (label & 0xFFFFFFFFFFFFFFFF) * int(_STREAM_SALT)) & 0xFFFFFFFFFFFFFFFF)
    return key


class Stream:
    """A deterministic uniform/normal stream keyed by ``(seed, stream)``."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        self._key = _U64(derive(seed, stream))
        self._counter = 0

    def uniforms(self, n: int) -> np.ndarray:
        """Next ``n`` doubles, strictly inside (0, 1)."""
        idx = np.arange(self._counter + 1, self._counter + n + 1, dtype=np.uint64)
        self._counter += n
        bits = _mix64(self._key + idx * GOLDEN)
        return ((bits >> _U64(11)).astype(np.float64) + 0.5) * _INV_2_53

    def normals(self, n: int) -> np.ndarray:
        """Next ``n`` standard-normal variates via inverse CDF."""
        from .special import normal_quantile

        return normal_quantile(self.uniforms(n))

    def integers(self, bound: int, n: int) -> np.ndarray:
        """Next ``n`` integers uniform on [0, bound) derived from uniforms."""
        u = self.uniforms(n)
        idx = (u * bound).astype(np.int64)
        return np.minimum(idx, bound - 1)

    def choose_distinct(self, bound: int, k: int) -> np.ndarray:
        """``k`` distinct integers from [0, bound) via partial Fisher-Yates."""
        if k > bound:
            raise ValueError("cannot choose more distinct values than the range holds")
        pool = np.arange(bound)
        u = self.uniforms(k)
        for t in range(k):
            j = t + int(u[t] * (bound - t))
            j = min(j, bound - 1)
            pool[t], pool[j] = pool[j], pool[t]
        return pool[:k].copy()
