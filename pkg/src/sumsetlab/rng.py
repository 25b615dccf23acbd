"""Seeded random bits for sampling: SplitMix64.

Every seeded feature in this package (sampled verification, random subset
draws, seeded coset-representative choices) derives its bits from this one
generator so that identical seeds reproduce identical output on any platform,
forever.  The algorithm is the public-domain SplitMix64 mixer: 64-bit state,
one addition and three xor-multiply-shift rounds per output word.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator with a tiny, fixed algorithm."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1F4EE3B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % bound

    def bit_mask(self, width: int) -> int:
        """Uniform bit mask of the given width (possibly zero)."""
        bits = 0
        for shift in range(0, width, 64):
            bits |= self.next_u64() << shift
        return bits & ((1 << width) - 1)

    def nonempty_mask(self, width: int) -> int:
        """Uniform bit mask over the 2**width - 1 nonempty masks."""
        if width <= 0:
            raise ValueError("width must be positive")
        while True:
            bits = self.bit_mask(width)
            if bits:
                return bits

    def subset_of_size(self, width: int, size: int) -> int:
        """Uniform mask with exactly ``size`` of ``width`` bits set.

        Partial Fisher-Yates shuffle of 0..width-1, taking the first
        ``size`` slots.
        """
        if not 0 <= size <= width:
            raise ValueError(f"size {size} not in 0..{width}")
        pool = list(range(width))
        bits = 0
        for i in range(size):
            j = i + self.below(width - i)
            pool[i], pool[j] = pool[j], pool[i]
            bits |= 1 << pool[i]
        return bits
