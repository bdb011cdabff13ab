"""Command-line driver: one binary, nine subcommands.

Exit codes: 0 success (verdict computed), 1 usage error, 2 I/O or file-format
error, 3 verification failure (KAT mismatch, bad padding, non-bijective
table). Analysis subcommands (attack, advantage, bench) print a single JSON
document; balance-check, xor-profile and kat print text by default and JSON
under --json. Every randomized subcommand takes --seed and its output is
bit-reproducible given the seed, except the measured throughput fields of
bench (timings are not reproducible; the seed fixes key/buffer material
only).
"""

import argparse
import json
import sys
from dataclasses import asdict

from . import __version__
from .attack import (
    estimate_advantage,
    reference_upper_bounds,
    run_attack,
)
from .balanced import xor_profile
from .bitstring import BitString
from .em_cipher import (
    VARIANTS,
    BpemKeySet,
    bpem_int_encryptor,
    load_keys,
    save_keys,
)
from .em256aes import (
    Em256AesInstance,
    PaddingError,
    benchmark,
    verify_kat_file,
)
from .permutation import FormatError, load_table, random_permutation
from .rng import SplitMix64, fisher_yates

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VERIFY = 3

# accepted names for --variant: the two shorthands pick the variant the text
# usually means by them
_VARIANT_NAMES = {
    "three-key": "three-key/two-perm",
    "one-key": "one-key/one-perm",
    **{v: v for v in VARIANTS},
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(obj) -> None:
    print(json.dumps(obj))


def _hex_bits(text: str, width: int, what: str) -> BitString:
    try:
        return BitString.from_hex(text, width)
    except ValueError as exc:
        raise SystemExit(_fail(EXIT_USAGE, f"bad {what}: {exc}"))


def _fail(code: int, message: str) -> int:
    print(f"bpem: error: {message}", file=sys.stderr)
    return code


# -- subcommand bodies --------------------------------------------------------

def _cmd_keygen(args) -> int:
    variant = _VARIANT_NAMES[args.variant]
    ks = BpemKeySet.random(args.n, args.seed, variant=variant)
    if args.output is None:
        save_keys(ks, sys.stdout)
    else:
        save_keys(ks, args.output)
    return EXIT_OK


def _load_instance(args) -> Em256AesInstance:
    ks = load_keys(args.keys)
    if ks.n != 128:
        raise SystemExit(_fail(
            EXIT_USAGE, f"key file has n={ks.n}; stream mode needs n=128"))
    ell1 = _hex_bits(args.ell1, 128, "--ell1") if args.ell1 else BitString.zeros(128)
    if args.ell2 is None:
        ell2 = ell1 if ks.one_perm else BitString.zeros(128)
    else:
        ell2 = _hex_bits(args.ell2, 128, "--ell2")
    if ks.one_perm and ell1 != ell2:
        raise SystemExit(_fail(
            EXIT_USAGE, "one-perm variants need ell1 == ell2"))
    return Em256AesInstance(ell1, ell2, ks)


def _cmd_encrypt(args) -> int:
    inst = _load_instance(args)
    with open(args.infile, "rb") as fh:
        data = fh.read()
    with open(args.outfile, "wb") as fh:
        fh.write(inst.encrypt_stream(data))
    return EXIT_OK


def _cmd_decrypt(args) -> int:
    inst = _load_instance(args)
    with open(args.infile, "rb") as fh:
        data = fh.read()
    try:
        plain = inst.decrypt_stream(data)
    except PaddingError as exc:
        return _fail(EXIT_VERIFY, str(exc))
    with open(args.outfile, "wb") as fh:
        fh.write(plain)
    return EXIT_OK


def _cmd_balance_check(args) -> int:
    try:
        perm = load_table(args.table)
    except FormatError:
        raise
    except ValueError as exc:        # table parsed but is not a bijection
        return _fail(EXIT_VERIFY, str(exc))
    profile = xor_profile(perm)
    if args.json:
        _emit({"n": profile.width, "balanced": profile.balanced})
    else:
        print(f"balanced: {'yes' if profile.balanced else 'no'}")
    return EXIT_OK


def _cmd_xor_profile(args) -> int:
    try:
        perm = load_table(args.table)
    except FormatError:
        raise
    except ValueError as exc:
        return _fail(EXIT_VERIFY, str(exc))
    profile = xor_profile(perm)
    if args.json:
        _emit({"n": profile.width,
               "distinct_count": profile.distinct_count,
               "histogram": {str(m): c for m, c in sorted(profile.histogram.items())}})
    else:
        print("multiplicity,count")
        for mult, count in sorted(profile.histogram.items()):
            print(f"{mult},{count}")
    return EXIT_OK


def _cmd_attack(args) -> int:
    n, q = args.n, args.q
    rho = _hex_bits(args.rho, n, "--rho") if args.rho else None
    master = SplitMix64(args.seed)
    if args.oracle == "bpem":
        f1 = random_permutation(n, master.next64())
        f2 = random_permutation(n, master.next64())
        ks = BpemKeySet.random(n, master.next64())
        enc = bpem_int_encryptor(ks, f1, f2)
    else:
        if n > 12:
            raise SystemExit(_fail(
                EXIT_USAGE, "--oracle random needs n <= 12 (full 2^{2n} table)"))
        table = fisher_yates(1 << (2 * n), master.next64())

        def enc(v, table=table):
            return int(table[v])

    def oracle(m):
        return BitString(2 * n, enc(m.value))

    report = run_attack(oracle, n, q, rho=rho)
    _emit({"n": report.n,
           "q": report.q,
           "rho": report.rho.to_hex(),
           "collision_found": report.collision_found,
           "colliding_indices": (list(report.colliding_indices)
                                 if report.colliding_indices else None),
           "verdict": report.verdict})
    return EXIT_OK


def _cmd_advantage(args) -> int:
    est = estimate_advantage(args.n, args.q, args.trials, args.seed)
    out = asdict(est)
    out["reference_upper_bounds"] = reference_upper_bounds(args.n, args.q)
    _emit(out)
    return EXIT_OK


def _cmd_kat(args) -> int:
    total, failed = verify_kat_file(args.verify)
    if args.json:
        _emit({"total": total, "failed": failed})
    else:
        if failed:
            print(f"failed vectors: {', '.join(map(str, failed))} "
                  f"({len(failed)} of {total})")
        else:
            print(f"ok: {total} vectors")
    return EXIT_VERIFY if failed else EXIT_OK


def _cmd_bench(args) -> int:
    rng = SplitMix64(args.seed)
    ell1 = BitString(128, rng.bits(128))
    ell2 = BitString(128, rng.bits(128))
    ks = BpemKeySet.random(128, rng.next64())
    inst = Em256AesInstance(ell1, ell2, ks)
    report = benchmark(inst, args.mode, args.bytes,
                       seed=args.seed, repeats=args.repeats)
    _emit({"mode": report.mode,
           "bytes": report.total_bytes,
           "em256aes_Bps": report.em256aes_bps,
           "aes_Bps": report.aes_bps,
           "ratio": report.ratio})
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="bpem",
                     description="Balanced-permutation Even-Mansour toolkit")
    parser.add_argument("--version", action="version",
                        version=f"bpem {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("keygen", help="generate a key file")
    p.add_argument("--variant", default="three-key",
                   choices=sorted(_VARIANT_NAMES),
                   help="key/permutation sharing variant")
    p.add_argument("--n", type=int, default=128, help="half-block bits")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="key file path (default stdout)")
    p.set_defaults(func=_cmd_keygen)

    for name, func in (("encrypt", _cmd_encrypt), ("decrypt", _cmd_decrypt)):
        p = sub.add_parser(name, help=f"{name} a file (EM256AES stream mode)")
        p.add_argument("--keys", required=True, help="key file from keygen")
        p.add_argument("--in", dest="infile", required=True, metavar="PATH")
        p.add_argument("--out", dest="outfile", required=True, metavar="PATH")
        p.add_argument("--ell1", help="public AES key 1, 32 hex digits "
                                      "(default zeros)")
        p.add_argument("--ell2", help="public AES key 2 (default: ell1 for "
                                      "one-perm keys, zeros otherwise)")
        p.set_defaults(func=func)

    p = sub.add_parser("balance-check",
                       help="is the table's permutation balanced?")
    p.add_argument("table", help="table file (header 'perm n=<n>')")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_balance_check)

    p = sub.add_parser("xor-profile",
                       help="multiplicity census of x XOR P(x)")
    p.add_argument("table", help="table file (header 'perm n=<n>')")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_xor_profile)

    p = sub.add_parser("attack", help="run the collision distinguisher once")
    p.add_argument("--n", type=int, default=8, help="half-block bits")
    p.add_argument("--q", type=int, default=64, help="query count")
    p.add_argument("--rho", help="fixed right half, hex (default zeros)")
    p.add_argument("--oracle", choices=("bpem", "random"), default="bpem")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("advantage",
                       help="Monte-Carlo distinguishing advantage")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--q", type=int, default=32)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_advantage)

    p = sub.add_parser("kat", help="verify known-answer test vectors")
    p.add_argument("--verify", required=True, metavar="FILE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_kat)

    p = sub.add_parser("bench", help="EM256AES vs AES-128 throughput")
    p.add_argument("--mode", choices=("serial", "parallel"),
                   default="parallel")
    p.add_argument("--bytes", type=int, default=1 << 20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except PaddingError as exc:
        return _fail(EXIT_VERIFY, str(exc))
    except FormatError as exc:
        return _fail(EXIT_IO, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))


if __name__ == "__main__":
    sys.exit(main())
