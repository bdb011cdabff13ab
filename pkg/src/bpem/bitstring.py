"""Fixed-width bit strings.

A BitString is an immutable sequence of 1..256 bits. Bit 0 is the leftmost
(most significant) bit. The canonical byte encoding is big-endian: bit 0 is
the high bit of the first byte, and when the width is not a multiple of 8 the
unused low bits of the final byte are zero. Textual encoding is lowercase hex
of the canonical bytes, with the width stated separately.

The integer `value` of a width-w BitString is the ordinary binary reading of
its bits (MSB first), so 0 <= value < 2**w.
"""

MAX_WIDTH = 256


class BitString:
    __slots__ = ("width", "value")

    def __init__(self, width: int, value: int):
        if not 1 <= width <= MAX_WIDTH:
            raise ValueError(f"width must be in 1..{MAX_WIDTH}, got {width}")
        if not 0 <= value < (1 << width):
            raise ValueError(f"value out of range for width {width}")
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, v):
        raise AttributeError("BitString is immutable")

    def __delattr__(self, name):
        raise AttributeError("BitString is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, width: int) -> "BitString":
        return cls(width, 0)

    @classmethod
    def from_binary(cls, bits: str) -> "BitString":
        """Parse a string of '0'/'1' characters, leftmost bit first."""
        if not bits or bits.strip("01"):
            raise ValueError("expected a nonempty string of 0s and 1s")
        return cls(len(bits), int(bits, 2))

    @classmethod
    def from_bytes(cls, data: bytes, width: int) -> "BitString":
        nbytes = (width + 7) // 8
        if len(data) != nbytes:
            raise ValueError(f"width {width} needs {nbytes} bytes, got {len(data)}")
        pad = nbytes * 8 - width
        raw = int.from_bytes(data, "big")
        if raw & ((1 << pad) - 1):
            raise ValueError("padding bits of final byte must be zero")
        return cls(width, raw >> pad)

    @classmethod
    def from_hex(cls, text: str, width: int) -> "BitString":
        return cls.from_bytes(bytes.fromhex(text), width)

    # -- encodings ---------------------------------------------------------

    def to_bytes(self) -> bytes:
        nbytes = (self.width + 7) // 8
        return (self.value << (nbytes * 8 - self.width)).to_bytes(nbytes, "big")

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    def to_binary(self) -> str:
        return format(self.value, f"0{self.width}b")

    # -- operations --------------------------------------------------------

    def __xor__(self, other: "BitString") -> "BitString":
        if self.width != other.width:
            raise ValueError(f"width mismatch: {self.width} vs {other.width}")
        return BitString(self.width, self.value ^ other.value)

    def split(self) -> tuple["BitString", "BitString"]:
        """Halves (left, right); the left half is the first width/2 bits."""
        if self.width % 2:
            raise ValueError(f"cannot split odd width {self.width}")
        n = self.width // 2
        return (BitString(n, self.value >> n),
                BitString(n, self.value & ((1 << n) - 1)))

    def concat(self, other: "BitString") -> "BitString":
        w = self.width + other.width
        if w > MAX_WIDTH:
            raise ValueError(f"concatenated width {w} exceeds {MAX_WIDTH}")
        return BitString(w, (self.value << other.width) | other.value)

    # -- protocol ----------------------------------------------------------

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __reduce__(self):
        return (BitString, (self.width, self.value))

    def __eq__(self, other):
        return (isinstance(other, BitString)
                and self.width == other.width and self.value == other.value)

    def __hash__(self):
        return hash((self.width, self.value))

    def __len__(self):
        return self.width

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.width:
            raise IndexError("bit index out of range")
        return (self.value >> (self.width - 1 - i)) & 1

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"BitString({self.width}, 0b{self.to_binary()})" if self.width <= 16 \
            else f"BitString({self.width}, 0x{self.to_hex()})"


def xor(x: BitString, y: BitString) -> BitString:
    return x ^ y


def split(x: BitString) -> tuple[BitString, BitString]:
    return x.split()


def concat(x: BitString, y: BitString) -> BitString:
    return x.concat(y)
