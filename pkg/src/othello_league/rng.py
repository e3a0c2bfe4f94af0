"""Deterministic random streams built on splitmix64.

Every stochastic component in this package draws from a :class:`RandomStream`.
Substream seeds are derived by hashing a (seed, index) pair, so each unit of
work (a double game, a mutation, a walk) owns an independent stream that does
not depend on scheduling or worker count.
"""
from __future__ import annotations

import math

MASK64 = (1 << 64) - 1

# splitmix64 constants (Steele, Lea & Flood's finalizer).
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """Bijective finalizing hash of a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return (z ^ (z >> 31)) & MASK64


def substream_seed(seed: int, index: int) -> int:
    """Seed of the ``index``-th substream of ``seed``.

    The derivation is a pure function of (seed, index); substreams can be
    created in any order, on any worker, with identical results.
    """
    if index < 0:
        raise ValueError("substream index must be non-negative")
    return mix64((seed + (index + 1) * GOLDEN) & MASK64)


def chain_seed(seed: int, *indices: int) -> int:
    """Chained substream derivation, e.g. seed -> generation -> individual."""
    for index in indices:
        seed = substream_seed(seed, index)
    return seed


class RandomStream:
    """splitmix64 generator; its output is a pure function of the seed."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV53

    def randbelow(self, n: int) -> int:
        """Integer in [0, n). Modulo bias is of order n / 2**64, negligible."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def gauss(self) -> float:
        """Standard normal deviate (Box-Muller, one of the pair kept)."""
        # uniform() can return 0.0; shift into (0, 1] for the log.
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def __repr__(self) -> str:
        return f"RandomStream(state=0x{self.state:016x})"
