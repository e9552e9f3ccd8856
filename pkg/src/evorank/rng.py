"""Self-contained 64-bit PRNG for reproducible simulations.

xoshiro256** with its state seeded through splitmix64, implemented on plain
Python integers so the stream is identical everywhere for a given seed.
Index sampling uses the high bits of a 64-bit product and never touches
floating point; uniform doubles take the conventional 53 high bits.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_DOUBLE_SCALE = 1.0 / (1 << 53)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256StarStar:
    """Named, portable generator; equal seeds give equal streams."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        state = seed & _MASK
        words = []
        for _ in range(4):
            # splitmix64 expansion of the seed into four state words
            state = (state + 0x9E3779B97F4A7C15) & _MASK
            z = state
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
            words.append(z ^ (z >> 31))
        if not any(words):
            words[0] = 1
        self.s0, self.s1, self.s2, self.s3 = words

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _DOUBLE_SCALE

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via the 128-bit product trick."""
        return (self.next_u64() * n) >> 64
