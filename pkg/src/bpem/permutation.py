"""Invertible maps on fixed-width bit strings, and ways to build them.

A Permutation packages a width, a forward map, a backward map, and a short
descriptor. The integer forms (forward_int/backward_int) act on the canonical
integer value of a width-n BitString; the table() method materializes the full
mapping for exhaustive work at small widths.

Constructors: explicit tables, seeded random tables (Fisher-Yates over the
package PRNG), linear maps x -> A.x over GF(2), multiplication by a fixed
nonzero, non-identity element of GF(2^n), and AES-128 under a caller-supplied
key for width 128.
"""

import threading

import numpy as np

from .bitstring import BitString
from .rng import fisher_yates

TABLE_WIDTH_CAP = 16   # explicit tables: at most 2**16 entries
SWEEP_WIDTH_CAP = 20   # table() materialization for exhaustive sweeps


class FormatError(ValueError):
    """A text file does not parse as the expected format."""


class Permutation:
    """An invertible map on width-bit strings."""

    __slots__ = ("width", "descriptor", "_fwd", "_bwd",
                 "_table", "_inv_table", "_table_builder")

    def __init__(self, width, fwd, bwd, descriptor,
                 table=None, inv_table=None, table_builder=None):
        self.width = width
        self._fwd = fwd
        self._bwd = bwd
        self.descriptor = descriptor
        self._table = table
        self._inv_table = inv_table
        self._table_builder = table_builder

    def forward(self, x: BitString) -> BitString:
        if x.width != self.width:
            raise ValueError(f"input width {x.width} != permutation width {self.width}")
        return BitString(self.width, self._fwd(x.value))

    def backward(self, y: BitString) -> BitString:
        if y.width != self.width:
            raise ValueError(f"input width {y.width} != permutation width {self.width}")
        return BitString(self.width, self._bwd(y.value))

    def forward_int(self, v: int) -> int:
        return self._fwd(v)

    def backward_int(self, v: int) -> int:
        return self._bwd(v)

    def table(self) -> np.ndarray:
        """Full output table as uint32, index = input value. Width <= 20."""
        if self._table is None:
            if self.width > SWEEP_WIDTH_CAP:
                raise ValueError(f"width {self.width} too wide to materialize")
            if self._table_builder is not None:
                self._table = self._table_builder()
            else:
                fwd = self._fwd
                self._table = np.fromiter(
                    (fwd(v) for v in range(1 << self.width)),
                    dtype=np.uint32, count=1 << self.width)
        return self._table

    def inverse_table(self) -> np.ndarray:
        if self._inv_table is None:
            t = self.table()
            inv = np.empty_like(t)
            inv[t] = np.arange(t.size, dtype=np.uint32)
            self._inv_table = inv
        return self._inv_table

    def __repr__(self):
        return f"<Permutation {self.descriptor}>"


class TableFunction:
    """A width-n map given by an output table; bijectivity not required.

    Usable anywhere a round function is expected (only the forward direction
    and the width are needed there).
    """

    __slots__ = ("width", "descriptor", "_table")

    def __init__(self, outputs, descriptor="function"):
        size = len(outputs)
        n = size.bit_length() - 1
        if size != 1 << n or n < 1:
            raise ValueError(f"table size {size} is not a power of two >= 2")
        if n > TABLE_WIDTH_CAP:
            raise ValueError(f"width {n} exceeds table cap {TABLE_WIDTH_CAP}")
        outs = [int(v) for v in outputs]
        if any(not 0 <= v < size for v in outs):
            raise ValueError("table entry out of range")
        self.width = n
        self.descriptor = descriptor
        self._table = np.asarray(outs, dtype=np.uint32)

    def forward(self, x: BitString) -> BitString:
        if x.width != self.width:
            raise ValueError(f"input width {x.width} != function width {self.width}")
        return BitString(self.width, int(self._table[x.value]))

    def forward_int(self, v: int) -> int:
        return int(self._table[v])

    def table(self) -> np.ndarray:
        return self._table

    def __repr__(self):
        return f"<TableFunction {self.descriptor}>"


# -- GF(2) matrices ---------------------------------------------------------

class Gf2Matrix:
    """Square 0/1 matrix; row i is an n-bit mask in the same MSB-first order
    as BitString values, so (A.x)_i = parity(rows[i] & x)."""

    __slots__ = ("n", "rows")

    def __init__(self, rows):
        rows = tuple(int(r) for r in rows)
        n = len(rows)
        if n < 1:
            raise ValueError("matrix must have at least one row")
        if any(not 0 <= r < (1 << n) for r in rows):
            raise ValueError("row mask out of range for matrix size")
        self.n = n
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(tuple(1 << (n - 1 - i) for i in range(n)))

    def __xor__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.n != other.n:
            raise ValueError("size mismatch")
        return Gf2Matrix(tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def mul_vec(self, x: int) -> int:
        y = 0
        for r in self.rows:
            y = (y << 1) | ((r & x).bit_count() & 1)
        return y

    def _eliminate(self, augment: bool):
        # Gauss-Jordan; returns reduced augmented rows or None if singular
        n = self.n
        rows = list(self.rows)
        aug = [1 << (n - 1 - i) for i in range(n)] if augment else [0] * n
        for col in range(n):
            bit = 1 << (n - 1 - col)
            pivot = next((r for r in range(col, n) if rows[r] & bit), None)
            if pivot is None:
                return None
            rows[col], rows[pivot] = rows[pivot], rows[col]
            aug[col], aug[pivot] = aug[pivot], aug[col]
            for r in range(n):
                if r != col and rows[r] & bit:
                    rows[r] ^= rows[col]
                    aug[r] ^= aug[col]
        return aug

    def is_invertible(self) -> bool:
        return self._eliminate(augment=False) is not None

    def inverse(self) -> "Gf2Matrix":
        aug = self._eliminate(augment=True)
        if aug is None:
            raise ValueError("matrix is singular")
        return Gf2Matrix(tuple(aug))

    def __eq__(self, other):
        return (isinstance(other, Gf2Matrix)
                and self.n == other.n and self.rows == other.rows)

    def __repr__(self):
        return f"Gf2Matrix({[format(r, f'0{self.n}b') for r in self.rows]})"


def adjacent_xor_matrix(n: int) -> Gf2Matrix:
    """The default balanced linear map: output bit i = x_i xor x_{i+1} for
    i < n-1, and output bit n-1 = x_0. Both A and I xor A are invertible for
    every n >= 2, so x -> A.x is a balanced permutation."""
    if n < 2:
        raise ValueError("need n >= 2")
    rows = [(1 << (n - 1 - i)) | (1 << (n - 2 - i)) for i in range(n - 1)]
    rows.append(1 << (n - 1))
    return Gf2Matrix(tuple(rows))


# -- constructors -----------------------------------------------------------

def table_permutation(outputs, descriptor=None) -> Permutation:
    """Permutation from an explicit table of 2**n outputs, n <= 16."""
    size = len(outputs)
    n = size.bit_length() - 1
    if size != 1 << n or n < 1:
        raise ValueError(f"table size {size} is not a power of two >= 2")
    if n > TABLE_WIDTH_CAP:
        raise ValueError(f"width {n} exceeds table cap {TABLE_WIDTH_CAP}")
    outs = [int(v) for v in outputs]
    if any(not 0 <= v < size for v in outs):
        raise ValueError("table entry out of range")
    table = np.asarray(outs, dtype=np.uint32)
    seen = np.zeros(size, dtype=bool)
    seen[table] = True
    if not seen.all():
        raise ValueError("table is not a bijection")
    inv = np.empty_like(table)
    inv[table] = np.arange(size, dtype=np.uint32)
    tl, il = table.tolist(), inv.tolist()
    return Permutation(n, tl.__getitem__, il.__getitem__,
                       descriptor or f"table(n={n})",
                       table=table, inv_table=inv)


def random_permutation(n: int, seed: int) -> Permutation:
    """Seeded uniform permutation of {0,1}^n, n <= 16. Deterministic across
    platforms (splitmix64 + Fisher-Yates; see the rng module)."""
    if not 1 <= n <= TABLE_WIDTH_CAP:
        raise ValueError(f"n must be in 1..{TABLE_WIDTH_CAP}, got {n}")
    return table_permutation(fisher_yates(1 << n, seed),
                             descriptor=f"random(n={n}, seed={seed})")


def linear_permutation(matrix: Gf2Matrix) -> Permutation:
    """x -> A.x over GF(2); raises if A is singular."""
    inv = matrix.inverse()   # raises ValueError("matrix is singular")
    n = matrix.n
    return Permutation(n, matrix.mul_vec, inv.mul_vec,
                       descriptor=f"linear(n={n})")


# default reduction polynomials, degree 2..16: the irreducible trinomial
# x^n + x^k + 1 with smallest k, else the irreducible pentanomial with
# smallest integer encoding
DEFAULT_POLYS = {
    2: 0x7, 3: 0xb, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11b,
    9: 0x203, 10: 0x409, 11: 0x805, 12: 0x1009, 13: 0x201b, 14: 0x4021,
    15: 0x8003, 16: 0x1002b,
}


def _poly_mod(a: int, b: int) -> int:
    db = b.bit_length() - 1
    while a.bit_length() - 1 >= db and a:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def is_irreducible(poly: int, n: int) -> bool:
    """Exhaustive trial division by every polynomial of degree 1..n/2."""
    if poly >> n != 1:
        return False
    for d in range(1, n // 2 + 1):
        for q in range(1 << d, 1 << (d + 1)):
            if _poly_mod(poly, q) == 0:
                return False
    return True


def _gf_mul(a: int, b: int, poly: int, n: int) -> int:
    top = 1 << n
    p = 0
    while b:
        if b & 1:
            p ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return p


def gf2n_mul_permutation(n: int, a, reduction_poly: int | None = None) -> Permutation:
    """x -> a*x in GF(2^n) for a outside {0, 1}; bits are polynomial
    coefficients (bit k of the integer value = coefficient of x^k)."""
    av = a.value if isinstance(a, BitString) else int(a)
    if isinstance(a, BitString) and a.width != n:
        raise ValueError(f"a has width {a.width}, expected {n}")
    if not 0 <= av < (1 << n):
        raise ValueError("a out of range")
    if av in (0, 1):
        raise ValueError("a must differ from 0 and 1")
    if reduction_poly is None:
        if n not in DEFAULT_POLYS:
            raise ValueError(f"no default reduction polynomial for n={n}")
        reduction_poly = DEFAULT_POLYS[n]
    if reduction_poly >> n != 1 or reduction_poly & 1 == 0:
        raise ValueError("reduction polynomial must have degree n and term 1")
    if n <= 16 and not is_irreducible(reduction_poly, n):
        raise ValueError("reduction polynomial is reducible")
    # a^(2^n - 2) = a^-1
    ainv = 1
    sq = av
    e = (1 << n) - 2
    while e:
        if e & 1:
            ainv = _gf_mul(ainv, sq, reduction_poly, n)
        sq = _gf_mul(sq, sq, reduction_poly, n)
        e >>= 1
    return Permutation(
        n,
        lambda v: _gf_mul(av, v, reduction_poly, n),
        lambda v: _gf_mul(ainv, v, reduction_poly, n),
        descriptor=f"gf2n-mul(n={n}, a=0x{av:x}, poly=0x{reduction_poly:x})")


def aes_permutation(key: BitString) -> Permutation:
    """AES-128 under the given key as a width-128 permutation. The canonical
    byte mapping is the BitString encoding (big-endian, 16 bytes)."""
    from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

    if key.width != 128:
        raise ValueError(f"AES-128 key must have width 128, got {key.width}")
    cipher = Cipher(algorithms.AES(key.to_bytes()), modes.ECB())
    enc = cipher.encryptor()
    dec = cipher.decryptor()
    lock = threading.Lock()   # contexts are not reentrant

    def fwd(v: int) -> int:
        with lock:
            return int.from_bytes(enc.update(v.to_bytes(16, "big")), "big")

    def bwd(v: int) -> int:
        with lock:
            return int.from_bytes(dec.update(v.to_bytes(16, "big")), "big")

    return Permutation(128, fwd, bwd,
                       descriptor=f"aes-128(key={key.to_hex()})")


# -- table serialization ----------------------------------------------------

def save_table(perm, file) -> None:
    """Write `perm n=<n>` then one hex output per line (canonical encoding,
    input order). Works for any handle of width <= 16."""
    n = perm.width
    if n > TABLE_WIDTH_CAP:
        raise ValueError(f"width {n} exceeds table cap {TABLE_WIDTH_CAP}")
    own = isinstance(file, str)
    fh = open(file, "w") if own else file
    try:
        fh.write(f"perm n={n}\n")
        for v in perm.table().tolist():
            fh.write(BitString(n, v).to_hex() + "\n")
    finally:
        if own:
            fh.close()


def load_table(file) -> Permutation:
    """Read the save_table format; raises FormatError on malformed input and
    ValueError if the table is not a bijection."""
    own = isinstance(file, str)
    fh = open(file) if own else file
    try:
        lines = [ln.strip() for ln in fh if ln.strip()]
    finally:
        if own:
            fh.close()
    if not lines or not lines[0].startswith("perm n="):
        raise FormatError("expected header 'perm n=<n>'")
    try:
        n = int(lines[0][len("perm n="):])
    except ValueError:
        raise FormatError("bad width in header") from None
    if not 1 <= n <= TABLE_WIDTH_CAP:
        raise FormatError(f"width {n} out of range")
    if len(lines) - 1 != 1 << n:
        raise FormatError(f"expected {1 << n} entries, found {len(lines) - 1}")
    try:
        outputs = [BitString.from_hex(ln, n).value for ln in lines[1:]]
    except ValueError as e:
        raise FormatError(f"bad table entry: {e}") from None
    return table_permutation(outputs)
