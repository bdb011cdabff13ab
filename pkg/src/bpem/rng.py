"""Deterministic, platform-independent randomness: splitmix64.

All seeded sampling in this package derives from one fixed generator so that
results are bit-reproducible everywhere. The algorithm (Steele, Lea, Flood,
"Fast splittable pseudorandom number generators", 2014; the finalizer used by
java.util.SplittableRandom) is, with all arithmetic mod 2**64:

    out_k = mix(seed + (k+1) * 0x9E3779B97F4A7C15)    for k = 0, 1, 2, ...
    mix(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
            z ^= z >> 27; z *= 0x94D049BB133111EB
            return z ^ (z >> 31)

Because out_k depends only on the counter, the stream can be produced either
scalar (SplitMix64) or as a numpy batch (splitmix_array) with identical output.

Derived rules, also fixed:

  * bits(w): a width-w value is the low w bits of the big-endian concatenation
    of ceil(w/64) consecutive outputs.
  * fisher_yates(count, seed): table = [0..count); for i = count-1 down to 1,
    j = next output mod (i+1), swap table[i] and table[j]. With 64-bit draws
    the modulo bias is below 2**-40 for every table size supported here.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


class SplitMix64:
    """Scalar reference implementation; also the stateful stream object."""

    __slots__ = ("_counter",)

    def __init__(self, seed: int):
        self._counter = seed & MASK64

    def next64(self) -> int:
        self._counter = (self._counter + GAMMA) & MASK64
        z = self._counter
        z = ((z ^ (z >> 30)) * _M1) & MASK64
        z = ((z ^ (z >> 27)) * _M2) & MASK64
        return z ^ (z >> 31)

    def bits(self, width: int) -> int:
        v = 0
        for _ in range((width + 63) // 64):
            v = (v << 64) | self.next64()
        return v & ((1 << width) - 1)


def splitmix_array(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Outputs start .. start+count-1 of the stream, as uint64. Identical to
    repeated SplitMix64.next64()."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + idx * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def fisher_yates(count: int, seed: int) -> list[int]:
    """Seeded uniform permutation of range(count) as a list."""
    table = list(range(count))
    if count < 2:
        return table
    draws = splitmix_array(seed, count - 1)
    bounds = np.arange(count, 1, -1, dtype=np.uint64)
    js = (draws % bounds).tolist()
    i = count - 1
    for j in js:
        table[i], table[j] = table[j], table[i]
        i -= 1
    return table
