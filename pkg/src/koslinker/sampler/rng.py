"""Portable seedable generator shared by every sampler backend.

splitmix64 (Steele, Lea & Flood's SplittableRandom finalizer) is used for
all sampling decisions: it is trivially implementable bit-for-bit in both
Python and C, so the compiled kernel and the pure-Python fallback consume
the identical stream and training runs reproduce across platforms and
backends. The algorithm name is recorded in every model file.
"""

from __future__ import annotations

RNG_ALGORITHM = "splitmix64"

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2POW53 = 1.0 / 9007199254740992.0  # 2**-53


def next_u64(state: int) -> tuple[int, int]:
    """Advance one step; returns (value, new_state)."""
    state = (state + _GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return (z ^ (z >> 31)), state


class SplitMix64:
    """Stateful wrapper; uniform doubles take the top 53 bits."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        value, self.state = next_u64(self.state)
        return value

    def next_double(self) -> float:
        # in [0, 1)
        return (self.next_u64() >> 11) * _INV_2POW53

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) via the double path.

        The tiny floor bias is irrelevant here (n is a label-set size) and
        taking the double path keeps all backends on one code shape.
        """
        idx = int(self.next_double() * n)
        return n - 1 if idx >= n else idx
