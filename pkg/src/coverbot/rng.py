"""Portable seeded random numbers.

Every stochastic choice in the simulator goes through :class:`Xoshiro256`, so
layouts, agent behaviour and network initialization reproduce bit-for-bit on
any platform and in any language that implements the same three pieces:

* ``splitmix64`` (Steele, Lea & Flood) expands a 64-bit seed into state words
  and doubles as the mixing function for seed derivation.
* ``xoshiro256**`` (Blackman & Vigna, 2018) is the generator proper.
* Bounded integers use rejection on ``next_u64() % n`` with threshold
  ``(2**64 - n) % n``; floats use the top 53 bits, ``(x >> 11) * 2**-53``.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """The splitmix64 output finalizer (a bijection on 64-bit words)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    state = (state + GOLDEN_GAMMA) & MASK64
    return state, mix64(state)


def derive_seed(master_seed: int, stream: int, index: int) -> int:
    """Derive an independent 64-bit seed for item ``index`` of ``stream``.

    ``mix64(mix64(mix64(master) ^ mix64(stream * GOLDEN)) + index)``; distinct
    streams keep training, evaluation and agent randomness apart.
    """
    base = mix64(mix64(master_seed & MASK64) ^ mix64((stream * GOLDEN_GAMMA) & MASK64))
    return mix64((base + index) & MASK64)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** seeded through splitmix64."""

    __slots__ = ("_s",)

    def __init__(self, seed: int) -> None:
        sm = seed & MASK64
        words = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            words.append(out)
        self._s = words

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def randbelow(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` without modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = ((1 << 64) - n) % n
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]`` (both inclusive)."""
        return lo + self.randbelow(hi - lo + 1)

    def random(self) -> float:
        """Uniform float in ``[0, 1)`` with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def getstate(self) -> tuple[int, ...]:
        return tuple(self._s)

    def setstate(self, state: tuple[int, ...]) -> None:
        self._s = list(state)
