"""Even-Mansour compositions and the balanced-permutation variant (BPEM).

The generic r-round Even-Mansour cipher alternates XOR with secret keys and
application of public permutations:

    c = P_r(... P_1(m xor K0) xor K1 ...) xor K_r

BPEM is the two-round case with P_i = LR2[f_i]. Because each LR2[f_i] is
balanced when f_i is a permutation, the XOR profile of the public layers is
exactly uniform.

BPEM has an equivalent form as a four-round keyed LR cipher: with round
functions f^{xor K}(x) = f(x xor K) xor K and derived keys K'1..K'6 obtained
from the secret key halves by a fixed lower-triangular GF(2) matrix,

    BPEM[K0,K1,K2; f1,f2]
      = LR[f1^{K'1}, f1^{K'2}, f2^{K'3}, f2^{K'4}] xor (K'6 * K'5)

with K'6 XORed onto the left half. When K0 = K1 = K2 = K the schedule
collapses to three keys (K_R, K_R xor K_L, K_L), round keys
(K'1, K'2, K'2, K'3), and no final XOR.
"""

from dataclasses import dataclass

from .bitstring import BitString, concat
from .permutation import FormatError, Gf2Matrix
from .rng import SplitMix64

VARIANTS = (
    "three-key/two-perm",
    "three-key/one-perm",
    "one-key/two-perm",
    "one-key/one-perm",
)

# rows act on the key-half vector (K0_R, K0_L, K1_R, K1_L, K2_R, K2_L),
# MSB-first; lower triangular, hence invertible
DERIVATION_MATRIX = Gf2Matrix((
    0b100000,   # K'1 = K0_R
    0b110000,   # K'2 = K0_R + K0_L
    0b011000,   # K'3 = K0_L + K1_R
    0b101100,   # K'4 = K0_R + K1_R + K1_L
    0b110110,   # K'5 = K0_R + K0_L + K1_L + K2_R
    0b101101,   # K'6 = K0_R + K1_R + K1_L + K2_L
))

# rows act on (K_R, K_L): K'1 = K_R, K'2 = K_R + K_L, K'3 = K_L
SINGLE_KEY_ROWS = (0b10, 0b11, 0b01)


# -- generic Even-Mansour ----------------------------------------------------

def _check_em_args(perms, keys, msg):
    if len(perms) < 1:
        raise ValueError("need at least one permutation")
    if len(keys) != len(perms) + 1:
        raise ValueError(f"need {len(perms) + 1} keys for {len(perms)} rounds, "
                         f"got {len(keys)}")
    m = msg.width
    for p in perms:
        if p.width != m:
            raise ValueError(f"permutation width {p.width} != message width {m}")
    for k in keys:
        if k.width != m:
            raise ValueError(f"key width {k.width} != message width {m}")


def em_encrypt(perms, keys, msg: BitString) -> BitString:
    """r-round Even-Mansour: alternate key XOR and permutation, ending on a
    key XOR. perms has r entries, keys has r+1."""
    _check_em_args(perms, keys, msg)
    c = msg ^ keys[0]
    for p, k in zip(perms, keys[1:]):
        c = p.forward(c) ^ k
    return c


def em_decrypt(perms, keys, msg: BitString) -> BitString:
    _check_em_args(perms, keys, msg)
    c = msg
    for p, k in zip(reversed(perms), reversed(keys[1:])):
        c = p.backward(c ^ k)
    return c ^ keys[0]


def single_key_round(f, key: BitString, x: BitString) -> BitString:
    """The one-round single-key map f(x xor K) xor K."""
    if not (f.width == key.width == x.width):
        raise ValueError("f, key, and input widths must all match")
    k = key.value
    return BitString(x.width, f.forward_int(x.value ^ k) ^ k)


class KeyedFunction:
    """The round function f^{xor K}: x -> f(x xor K) xor K, as a handle."""

    __slots__ = ("width", "descriptor", "_fint", "_k")

    def __init__(self, f, key: BitString):
        if f.width != key.width:
            raise ValueError(f"key width {key.width} != function width {f.width}")
        self.width = f.width
        self.descriptor = f"keyed({f.descriptor}, k={key.to_hex()})"
        self._fint = f.forward_int
        self._k = key.value

    def forward_int(self, v: int) -> int:
        k = self._k
        return self._fint(v ^ k) ^ k

    def forward(self, x: BitString) -> BitString:
        if x.width != self.width:
            raise ValueError(f"input width {x.width} != function width {self.width}")
        return BitString(self.width, self.forward_int(x.value))


def keyed_function(f, key: BitString) -> KeyedFunction:
    return KeyedFunction(f, key)


# -- BPEM key sets -----------------------------------------------------------

class BpemKeySet:
    """Secret keys for BPEM on 2n-bit blocks, tagged with the cipher variant.

    One-key variants store the single key once; k0/k1/k2 expand on read.
    """

    __slots__ = ("n", "variant", "_keys")

    def __init__(self, variant: str, keys):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        keys = tuple(keys)
        expected = 1 if variant.startswith("one-key") else 3
        if len(keys) != expected:
            raise ValueError(f"variant {variant} takes {expected} key(s), "
                             f"got {len(keys)}")
        w = keys[0].width
        if any(k.width != w for k in keys):
            raise ValueError("all keys must have the same width")
        if w % 2 != 0:
            raise ValueError(f"key width {w} is odd; blocks are 2n bits")
        self.n = w // 2
        self.variant = variant
        self._keys = keys

    @property
    def one_key(self) -> bool:
        return self.variant.startswith("one-key")

    @property
    def one_perm(self) -> bool:
        return self.variant.endswith("one-perm")

    @property
    def k0(self) -> BitString:
        return self._keys[0]

    @property
    def k1(self) -> BitString:
        return self._keys[0] if self.one_key else self._keys[1]

    @property
    def k2(self) -> BitString:
        return self._keys[0] if self.one_key else self._keys[2]

    @classmethod
    def three_key(cls, k0, k1, k2, one_perm=False) -> "BpemKeySet":
        v = "three-key/one-perm" if one_perm else "three-key/two-perm"
        return cls(v, (k0, k1, k2))

    @classmethod
    def one_key_set(cls, k, one_perm=True) -> "BpemKeySet":
        v = "one-key/one-perm" if one_perm else "one-key/two-perm"
        return cls(v, (k,))

    @classmethod
    def random(cls, n: int, seed: int, variant="three-key/two-perm") -> "BpemKeySet":
        """Keys drawn from the package PRNG; deterministic under seed."""
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        rng = SplitMix64(seed)
        count = 1 if variant.startswith("one-key") else 3
        return cls(variant,
                   tuple(BitString(2 * n, rng.bits(2 * n)) for _ in range(count)))

    def __eq__(self, other):
        return (isinstance(other, BpemKeySet)
                and self.variant == other.variant and self._keys == other._keys)

    def __repr__(self):
        return f"<BpemKeySet {self.variant} n={self.n}>"


def save_keys(ks: BpemKeySet, file) -> None:
    """Write `bpem-keys variant=<variant> n=<n>` then one hex key per line."""
    own = isinstance(file, str)
    fh = open(file, "w") if own else file
    try:
        fh.write(f"bpem-keys variant={ks.variant} n={ks.n}\n")
        for k in ks._keys:
            fh.write(k.to_hex() + "\n")
    finally:
        if own:
            fh.close()


def load_keys(file) -> BpemKeySet:
    own = isinstance(file, str)
    fh = open(file) if own else file
    try:
        lines = [ln.strip() for ln in fh if ln.strip()]
    finally:
        if own:
            fh.close()
    if not lines:
        raise FormatError("empty key file")
    head = lines[0].split()
    if (len(head) != 3 or head[0] != "bpem-keys"
            or not head[1].startswith("variant=") or not head[2].startswith("n=")):
        raise FormatError("expected header 'bpem-keys variant=<variant> n=<n>'")
    variant = head[1][len("variant="):]
    if variant not in VARIANTS:
        raise FormatError(f"unknown variant {variant!r}")
    try:
        n = int(head[2][len("n="):])
    except ValueError:
        raise FormatError("bad n in header") from None
    if not 1 <= n <= 128:
        raise FormatError(f"n={n} out of range")
    expected = 1 if variant.startswith("one-key") else 3
    if len(lines) - 1 != expected:
        raise FormatError(f"variant {variant} takes {expected} key line(s), "
                          f"found {len(lines) - 1}")
    try:
        keys = tuple(BitString.from_hex(ln, 2 * n) for ln in lines[1:])
    except ValueError as e:
        raise FormatError(f"bad key line: {e}") from None
    return BpemKeySet(variant, keys)


# -- BPEM --------------------------------------------------------------------

def _check_bpem_args(ks: BpemKeySet, f1, f2, msg=None):
    n = ks.n
    if f1.width != n or f2.width != n:
        raise ValueError(f"round functions must have width {n}, "
                         f"got {f1.width} and {f2.width}")
    if ks.one_perm and f1 is not f2 and f1.descriptor != f2.descriptor:
        raise ValueError(f"variant {ks.variant} requires f1 = f2")
    if msg is not None and msg.width != 2 * n:
        raise ValueError(f"message width {msg.width} != block width {2 * n}")


def bpem_int_encryptor(ks: BpemKeySet, f1, f2):
    """Integer fast path: returns enc(v) for 2n-bit values v."""
    _check_bpem_args(ks, f1, f2)
    n = ks.n
    mask = (1 << n) - 1
    a0, b0 = ks.k0.value >> n, ks.k0.value & mask
    a1, b1 = ks.k1.value >> n, ks.k1.value & mask
    a2, b2 = ks.k2.value >> n, ks.k2.value & mask
    g1, g2 = f1.forward_int, f2.forward_int

    def enc(v: int) -> int:
        wl = (v >> n) ^ a0
        wr = (v & mask) ^ b0
        s = wl ^ g1(wr)
        t = wr ^ g1(s)
        yl, yr = s ^ a1, t ^ b1
        u = yl ^ g2(yr)
        return ((u ^ a2) << n) | (yr ^ g2(u) ^ b2)

    return enc


def bpem_int_decryptor(ks: BpemKeySet, f1, f2):
    _check_bpem_args(ks, f1, f2)
    n = ks.n
    mask = (1 << n) - 1
    a0, b0 = ks.k0.value >> n, ks.k0.value & mask
    a1, b1 = ks.k1.value >> n, ks.k1.value & mask
    a2, b2 = ks.k2.value >> n, ks.k2.value & mask
    g1, g2 = f1.forward_int, f2.forward_int

    def dec(v: int) -> int:
        u = (v >> n) ^ a2
        t2 = (v & mask) ^ b2
        yr = t2 ^ g2(u)
        yl = u ^ g2(yr)
        s, t = yl ^ a1, yr ^ b1
        wr = t ^ g1(s)
        wl = s ^ g1(wr)
        return ((wl ^ a0) << n) | (wr ^ b0)

    return dec


def bpem_encrypt(ks: BpemKeySet, f1, f2, msg: BitString) -> BitString:
    """Two-round Even-Mansour with P_i = LR2[f_i]."""
    _check_bpem_args(ks, f1, f2, msg)
    return BitString(msg.width, bpem_int_encryptor(ks, f1, f2)(msg.value))


def bpem_decrypt(ks: BpemKeySet, f1, f2, msg: BitString) -> BitString:
    _check_bpem_args(ks, f1, f2, msg)
    return BitString(msg.width, bpem_int_decryptor(ks, f1, f2)(msg.value))


# -- the keyed-LR equivalent form --------------------------------------------

@dataclass(frozen=True)
class DerivedKeySchedule:
    """K'1..K'6 (three-key variants) or K'1..K'3 (one-key variants)."""

    n: int
    kprime: tuple


def derive_lr_keys(ks: BpemKeySet) -> DerivedKeySchedule:
    """Map the secret key halves to the keyed-LR round keys."""
    n = ks.n
    if ks.one_key:
        kl = BitString(n, ks.k0.value >> n)
        kr = BitString(n, ks.k0.value & ((1 << n) - 1))
        return DerivedKeySchedule(n, (kr, kr ^ kl, kl))
    mask = (1 << n) - 1
    # half-key vector ordering is (K0_R, K0_L, K1_R, K1_L, K2_R, K2_L)
    vec = (BitString(n, ks.k0.value & mask), BitString(n, ks.k0.value >> n),
           BitString(n, ks.k1.value & mask), BitString(n, ks.k1.value >> n),
           BitString(n, ks.k2.value & mask), BitString(n, ks.k2.value >> n))
    out = []
    for row in DERIVATION_MATRIX.rows:
        acc = BitString.zeros(n)
        for j in range(6):
            if row & (1 << (5 - j)):
                acc = acc ^ vec[j]
        out.append(acc)
    return DerivedKeySchedule(n, tuple(out))


def bpem_via_lr(sched: DerivedKeySchedule, f1, f2, msg: BitString) -> BitString:
    """Evaluate BPEM through its keyed four-round LR form.

    A six-key schedule uses round keys (K'1, K'2, K'3, K'4) and ends with a
    whole-state XOR of K'6 * K'5 (K'6 on the left); a three-key schedule uses
    round keys (K'1, K'2, K'2, K'3) and no final XOR.
    """
    n = sched.n
    if msg.width != 2 * n:
        raise ValueError(f"message width {msg.width} != block width {2 * n}")
    if f1.width != n or f2.width != n:
        raise ValueError(f"round functions must have width {n}")
    ks_ = sched.kprime
    if len(ks_) == 6:
        round_keys = (ks_[0], ks_[1], ks_[2], ks_[3])
        final = concat(ks_[5], ks_[4])
    elif len(ks_) == 3:
        round_keys = (ks_[0], ks_[1], ks_[1], ks_[2])
        final = None
    else:
        raise ValueError(f"schedule must hold 3 or 6 keys, got {len(ks_)}")
    mask = (1 << n) - 1
    left, right = msg.value >> n, msg.value & mask
    for f, key in zip((f1, f1, f2, f2), round_keys):
        k = key.value
        left, right = right, left ^ f.forward_int(right ^ k) ^ k
    out = (left << n) | right
    if final is not None:
        out ^= final.value
    return BitString(msg.width, out)


# -- one-round BPEM (insecure; kept to demonstrate the leak) ------------------

def _check_bpem1_args(k0, k1, f, msg):
    if k0.width != msg.width or k1.width != msg.width:
        raise ValueError("keys must match the message width")
    if msg.width != 2 * f.width:
        raise ValueError(f"message width {msg.width} != 2 x function width {f.width}")


def bpem1_encrypt(k0: BitString, k1: BitString, f, msg: BitString) -> BitString:
    """One-round BPEM, two keys. Ciphertexts leak plaintext-half relations:
    equal right halves in m1, m2 force (E(m1) xor E(m2))_L = (m1 xor m2)_L."""
    _check_bpem1_args(k0, k1, f, msg)
    n = f.width
    mask = (1 << n) - 1
    w = msg.value ^ k0.value
    wl, wr = w >> n, w & mask
    s = wl ^ f.forward_int(wr)
    t = wr ^ f.forward_int(s)
    return BitString(msg.width, ((s << n) | t) ^ k1.value)


def bpem1_decrypt(k0: BitString, k1: BitString, f, msg: BitString) -> BitString:
    _check_bpem1_args(k0, k1, f, msg)
    n = f.width
    mask = (1 << n) - 1
    w = msg.value ^ k1.value
    s, t = w >> n, w & mask
    wr = t ^ f.forward_int(s)
    wl = s ^ f.forward_int(wr)
    return BitString(msg.width, ((wl << n) | wr) ^ k0.value)
