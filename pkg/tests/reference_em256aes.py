"""Independent straight-line reference for EM256AES known-answer vectors.

This file deliberately shares no code with the library. Each 256-bit block is
encrypted by literal transcription of the construction: XOR the first whitening
key, run two Feistel rounds with AES under the first public key, XOR the middle
whitening key, run two Feistel rounds with AES under the second public key, XOR
the last whitening key. Everything is plain bytes; the only dependency is the
AES-128 primitive itself.

Run as a script to (re)generate the pinned KAT file:

    python tests/reference_em256aes.py tests/data/em256aes_kats.txt

The library must never be used to regenerate these vectors.
"""

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes


def _aes_block(key16: bytes, block16: bytes) -> bytes:
    enc = Cipher(algorithms.AES(key16), modes.ECB()).encryptor()
    return enc.update(block16) + enc.finalize()


def _x(a: bytes, b: bytes) -> bytes:
    return bytes(p ^ q for p, q in zip(a, b, strict=True))


def reference_encrypt(ell1: bytes, ell2: bytes, k0: bytes, k1: bytes,
                      k2: bytes, pt: bytes) -> bytes:
    assert len(ell1) == len(ell2) == 16
    assert len(k0) == len(k1) == len(k2) == 32
    assert len(pt) == 32

    # whitening key 0
    w = _x(pt, k0)
    wl, wr = w[:16], w[16:]

    # two Feistel rounds, round function AES-128 under ell1
    s = _x(wl, _aes_block(ell1, wr))
    t = _x(wr, _aes_block(ell1, s))

    # whitening key 1
    x = _x(s + t, k1)
    xl, xr = x[:16], x[16:]

    # two Feistel rounds, round function AES-128 under ell2
    u = _x(xl, _aes_block(ell2, xr))
    v = _x(xr, _aes_block(ell2, u))

    # whitening key 2
    return _x(u + v, k2)


def _vec(ell1, ell2, k0, k1, k2, pt):
    ct = reference_encrypt(ell1, ell2, k0, k1, k2, pt)
    return (f"ell1={ell1.hex()} ell2={ell2.hex()} k0={k0.hex()} "
            f"k1={k1.hex()} k2={k2.hex()} pt={pt.hex()} ct={ct.hex()}")


def generate_vectors():
    """The pinned suite: zero keys, single-bit keys, fixed random material,
    in both general and single-key modes."""
    z16, z32 = bytes(16), bytes(32)
    lines = []

    # 1: everything zero (single-key shape: ell1 == ell2, k0 == k1 == k2)
    lines.append(_vec(z16, z16, z32, z32, z32, z32))

    # 2: single bit in the plaintext
    pt = bytes(31) + b"\x01"
    lines.append(_vec(z16, z16, z32, z32, z32, pt))

    # 3: single bit in k0, general mode otherwise zero
    k0 = b"\x80" + bytes(31)
    lines.append(_vec(z16, z16, k0, z32, z32, z32))

    # 4: single bit in each of k1, k2
    k1 = bytes(16) + b"\x80" + bytes(15)
    k2 = bytes(31) + b"\x01"
    lines.append(_vec(z16, z16, z32, k1, k2, z32))

    # 5: single bit in ell1 (distinct public permutations)
    e1 = b"\x01" + bytes(15)
    lines.append(_vec(e1, z16, z32, z32, z32, z32))

    # 6: fixed "random" material, general mode (digits of a fixed pattern,
    #    pinned literally so the file never depends on any generator)
    e1 = bytes.fromhex("000102030405060708090a0b0c0d0e0f")
    e2 = bytes.fromhex("f0e1d2c3b4a5968778695a4b3c2d1e0f")
    k0 = bytes.fromhex("00112233445566778899aabbccddeeff"
                       "102132435465768798a9bacbdcedfe0f")
    k1 = bytes.fromhex("fedcba98765432100123456789abcdef"
                       "0f1e2d3c4b5a69788796a5b4c3d2e1f0")
    k2 = bytes.fromhex("5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a"
                       "a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5")
    pt = bytes.fromhex("00112233445566778899aabbccddeeff"
                       "ffeeddccbbaa99887766554433221100")
    lines.append(_vec(e1, e2, k0, k1, k2, pt))

    # 7: single-key mode with the same fixed material (ell1=ell2, k0=k1=k2)
    lines.append(_vec(e1, e1, k0, k0, k0, pt))

    # 8: single-key mode, high-bit key, all-ones plaintext
    k = b"\x80" + bytes(31)
    lines.append(_vec(e2, e2, k, k, k, b"\xff" * 32))

    # 9: general mode, all-ones everything
    o16, o32 = b"\xff" * 16, b"\xff" * 32
    lines.append(_vec(o16, o16, o32, o32, o32, o32))

    # 10: general mode, counting pattern plaintext under counting keys
    e1 = bytes(range(16))
    e2 = bytes(range(16, 32))
    k0 = bytes(range(32))
    k1 = bytes(range(32, 64))
    k2 = bytes(range(64, 96))
    pt = bytes(range(128, 160))
    lines.append(_vec(e1, e2, k0, k1, k2, pt))

    return lines


if __name__ == "__main__":
    import sys

    out = sys.argv[1] if len(sys.argv) > 1 else "tests/data/em256aes_kats.txt"
    lines = generate_vectors()
    with open(out, "w") as fh:
        fh.write("# EM256AES known answers, written by tests/reference_em256aes.py\n")
        fh.write("# fields: ell1 ell2 k0 k1 k2 pt ct (hex)\n")
        for line in lines:
            fh.write(line + "\n")
    print(f"wrote {len(lines)} vectors to {out}")
