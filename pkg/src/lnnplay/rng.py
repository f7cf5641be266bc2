"""Deterministic 64-bit linear congruential generator.

Every stochastic choice in the project (layout generation, baseline agents,
exploration) draws from this generator so that runs are reproducible from a
single integer seed, independent of Python's hash randomization or the
platform's default RNG.
"""

from __future__ import annotations

_MULT = 6364136223846793005
_INC = 1442695040888963407
_MASK = (1 << 64) - 1


class Lcg:
    """64-bit LCG: state' = state * 6364136223846793005 + 1442695040888963407."""

    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state * _MULT + _INC) & _MASK
        return self.state

    def below(self, n: int) -> int:
        """Next value reduced modulo ``n`` (n >= 1)."""
        if n < 1:
            raise ValueError("modulus must be >= 1")
        return self.next_u64() % n

    def choice(self, seq):
        if not seq:
            raise ValueError("cannot choose from an empty sequence")
        return seq[self.below(len(seq))]

    def chance(self, p: float) -> bool:
        """True with probability ``p`` (53-bit uniform draw)."""
        return (self.next_u64() >> 11) / float(1 << 53) < p
