"""xoshiro256** seeded through splitmix64.

Pure-integer and platform independent, so experiment draws can be
reproduced bit for bit in any language.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1

NAME = "xoshiro256** (splitmix64-seeded)"


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)


class Xoshiro256StarStar:
    """64-bit generator. ``Xoshiro256StarStar(seed)`` fills the 256-bit
    state with four splitmix64 outputs; ``from_state`` sets it directly."""

    def __init__(self, seed: int = 0):
        sm = SplitMix64(seed)
        self.s = [sm.next() for _ in range(4)]

    @classmethod
    def from_state(cls, s0: int, s1: int, s2: int, s3: int) -> "Xoshiro256StarStar":
        g = cls.__new__(cls)
        g.s = [s0 & _MASK, s1 & _MASK, s2 & _MASK, s3 & _MASK]
        return g

    def next(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def randbelow(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection of the biased tail."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = ((1 << 64) // n) * n
        while True:
            r = self.next()
            if r < limit:
                return r % n

    def random(self) -> float:
        """Uniform float in ``[0, 1)`` from the top 53 bits."""
        return (self.next() >> 11) * (1.0 / (1 << 53))
