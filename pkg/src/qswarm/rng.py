"""Seedable random number generation with a stable, documented algorithm.

All stochastic code in this package draws from xoshiro256++ (Blackman &
Vigna), seeded through the splitmix64 mixer.  Both algorithms are fixed
bit-for-bit, so a (seed, draw-order) pair reproduces the same stream on
any platform and in both the Python and compiled engines.  Uniform doubles
use the top 53 bits of each output word, giving values in [0, 1).
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def _mix64(z: int) -> int:
    """splitmix64 finalizer: a 64-bit avalanche permutation."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _splitmix64_stream(seed: int, count: int) -> list[int]:
    state = seed & _MASK64
    out = []
    for _ in range(count):
        state = (state + _GOLDEN) & _MASK64
        out.append(_mix64(state))
    return out


def derive_seed(base_seed: int, *indices: int) -> int:
    """Mix a base seed with integer indices into an independent 64-bit seed.

    Used by the experiment harness so that the stream of run (q-index,
    A-index, run-index) never changes when other cells are added to a grid.
    """
    h = _mix64((base_seed + _GOLDEN) & _MASK64)
    for idx in indices:
        h = _mix64(h ^ _mix64(((idx + 1) * _GOLDEN) & _MASK64))
    return h


class Xoshiro256PlusPlus:
    """xoshiro256++ generator with splitmix64 state initialization."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        s = _splitmix64_stream(seed, 4)
        self._s0, self._s1, self._s2, self._s3 = s

    @property
    def state(self) -> tuple[int, int, int, int]:
        return (self._s0, self._s1, self._s2, self._s3)

    def next_uint64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        tmp = (s0 + s3) & _MASK64
        result = (((tmp << 23) | (tmp >> 41)) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def uniform(self) -> float:
        """Next double in [0, 1) with 53 random bits."""
        return (self.next_uint64() >> 11) * _INV_2_53
