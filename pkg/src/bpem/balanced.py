"""Balanced permutations and the two-round LR construction.

A permutation p of {0,1}^m is balanced when x -> x xor p(x) is itself a
permutation. One LR round maps w = (wl, wr) to (wr, wl xor f(wr)) for a
round function f on half-width strings; f need not be invertible, the round
is a permutation regardless, and its inverse evaluates f in the forward
direction only. Two rounds under the same f give a permutation with no
halves swapped:

    s = wl xor f(wr),  t = wr xor f(s),  output (s, t)

which is balanced whenever f is a permutation.
"""

from dataclasses import dataclass

import numpy as np

from .bitstring import BitString
from .permutation import Permutation, SWEEP_WIDTH_CAP


def _check_halves(f, w: BitString) -> int:
    if w.width % 2 != 0:
        raise ValueError(f"input width {w.width} is odd")
    n = w.width // 2
    if f.width != n:
        raise ValueError(f"round function width {f.width} != half-width {n}")
    return n


def lr_round(f, w: BitString) -> BitString:
    """One LR round: (wl, wr) -> (wr, wl xor f(wr))."""
    n = _check_halves(f, w)
    mask = (1 << n) - 1
    wl, wr = w.value >> n, w.value & mask
    return BitString(w.width, (wr << n) | (wl ^ f.forward_int(wr)))


def lr_round_inverse(f, w: BitString) -> BitString:
    """Inverse of one LR round; uses f forward only."""
    n = _check_halves(f, w)
    mask = (1 << n) - 1
    left, right = w.value >> n, w.value & mask
    return BitString(w.width, ((right ^ f.forward_int(left)) << n) | left)


def lr_chain(fs, w: BitString) -> BitString:
    """LR rounds applied in order: fs[0] first."""
    if not fs:
        raise ValueError("need at least one round function")
    for f in fs:
        w = lr_round(f, w)
    return w


def lr_chain_inverse(fs, w: BitString) -> BitString:
    if not fs:
        raise ValueError("need at least one round function")
    for f in reversed(fs):
        w = lr_round_inverse(f, w)
    return w


def lr2(f, w: BitString) -> BitString:
    """Two LR rounds under the same f, in closed form."""
    n = _check_halves(f, w)
    mask = (1 << n) - 1
    wl, wr = w.value >> n, w.value & mask
    s = wl ^ f.forward_int(wr)
    t = wr ^ f.forward_int(s)
    return BitString(w.width, (s << n) | t)


def lr2_inverse(f, w: BitString) -> BitString:
    n = _check_halves(f, w)
    mask = (1 << n) - 1
    s, t = w.value >> n, w.value & mask
    wr = t ^ f.forward_int(s)
    wl = s ^ f.forward_int(wr)
    return BitString(w.width, (wl << n) | wr)


def lr2_permutation(f) -> Permutation:
    """The two-round LR construction as a width-2n permutation handle."""
    n = f.width
    if 2 * n > 256:
        raise ValueError(f"doubled width {2 * n} exceeds 256")
    mask = (1 << n) - 1
    fint = f.forward_int

    def fwd(w: int) -> int:
        wl, wr = w >> n, w & mask
        s = wl ^ fint(wr)
        t = wr ^ fint(s)
        return (s << n) | t

    def bwd(w: int) -> int:
        s, t = w >> n, w & mask
        wr = t ^ fint(s)
        wl = s ^ fint(wr)
        return (wl << n) | wr

    builder = None
    if 2 * n <= SWEEP_WIDTH_CAP and hasattr(f, "table"):
        def builder() -> np.ndarray:
            F = f.table().astype(np.uint32)
            w = np.arange(1 << (2 * n), dtype=np.uint32)
            wl, wr = w >> n, w & np.uint32(mask)
            s = wl ^ F[wr]
            t = wr ^ F[s]
            return (s << n) | t

    return Permutation(2 * n, fwd, bwd,
                       descriptor=f"lr2({f.descriptor})",
                       table_builder=builder)


@dataclass(frozen=True)
class XorProfile:
    """Census of x -> x xor p(x) over the full domain.

    histogram maps multiplicity -> number of output values reached that many
    times (multiplicity 0 counts the values never reached). A permutation is
    balanced exactly when histogram == {1: 2**width}.
    """

    width: int
    distinct_count: int
    histogram: dict

    @property
    def balanced(self) -> bool:
        return self.distinct_count == 1 << self.width


def _full_table(p) -> np.ndarray:
    if p.width > SWEEP_WIDTH_CAP:
        raise ValueError(f"width {p.width} too wide for an exhaustive sweep")
    t = np.asarray(p.table(), dtype=np.int64)
    counts = np.bincount(t, minlength=t.size)
    if (counts != 1).any():
        raise ValueError("map is not a bijection")
    return t


def xor_profile(p) -> XorProfile:
    """Exhaustive census of x xor p(x) for a permutation of width <= 20."""
    t = _full_table(p)
    y = np.arange(t.size, dtype=np.int64) ^ t
    counts = np.bincount(y, minlength=t.size)
    mults, freqs = np.unique(counts, return_counts=True)
    hist = {int(m): int(c) for m, c in zip(mults, freqs)}
    return XorProfile(width=p.width,
                      distinct_count=t.size - hist.get(0, 0),
                      histogram=hist)


def is_balanced(p) -> bool:
    """True when x -> x xor p(x) is a permutation; exhaustive, width <= 20."""
    t = _full_table(p)
    y = np.arange(t.size, dtype=np.int64) ^ t
    return np.unique(y).size == t.size
