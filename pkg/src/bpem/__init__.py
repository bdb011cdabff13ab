"""Balanced-permutation Even-Mansour ciphers: constructions, analysis, CLI."""

__version__ = "0.1.0"

from .bitstring import BitString, concat, split, xor
from .permutation import (
    DEFAULT_POLYS,
    FormatError,
    Gf2Matrix,
    Permutation,
    TableFunction,
    adjacent_xor_matrix,
    aes_permutation,
    gf2n_mul_permutation,
    linear_permutation,
    load_table,
    random_permutation,
    save_table,
    table_permutation,
)
from .rng import SplitMix64, fisher_yates
from .balanced import (
    XorProfile,
    is_balanced,
    lr2,
    lr2_inverse,
    lr2_permutation,
    lr_chain,
    lr_chain_inverse,
    lr_round,
    lr_round_inverse,
    xor_profile,
)
from .em_cipher import (
    VARIANTS,
    BpemKeySet,
    DerivedKeySchedule,
    KeyedFunction,
    bpem1_decrypt,
    bpem1_encrypt,
    bpem_decrypt,
    bpem_encrypt,
    bpem_via_lr,
    derive_lr_keys,
    em_decrypt,
    em_encrypt,
    keyed_function,
    load_keys,
    save_keys,
)
from .attack import (
    AdvantageEstimate,
    AttackReport,
    analytic_lower_bound,
    estimate_advantage,
    reference_upper_bounds,
    run_attack,
)
from .em256aes import (
    Em256AesInstance,
    KatVector,
    PaddingError,
    ThroughputReport,
    benchmark,
    em256aes_decrypt_block,
    em256aes_decrypt_stream,
    em256aes_encrypt_block,
    em256aes_encrypt_stream,
    has_aes_acceleration,
    load_kat_file,
    verify_kat,
    verify_kat_file,
)

__all__ = [
    "BitString", "concat", "split", "xor",
    "SplitMix64", "fisher_yates",
    "Permutation", "TableFunction", "Gf2Matrix", "FormatError",
    "adjacent_xor_matrix", "aes_permutation", "gf2n_mul_permutation",
    "linear_permutation", "random_permutation", "table_permutation",
    "load_table", "save_table", "DEFAULT_POLYS",
    "lr_round", "lr_round_inverse", "lr_chain", "lr_chain_inverse",
    "lr2", "lr2_inverse", "lr2_permutation",
    "XorProfile", "xor_profile", "is_balanced",
    "VARIANTS", "BpemKeySet", "KeyedFunction", "keyed_function",
    "em_encrypt", "em_decrypt", "bpem_encrypt", "bpem_decrypt",
    "bpem1_encrypt", "bpem1_decrypt",
    "DerivedKeySchedule", "derive_lr_keys", "bpem_via_lr",
    "save_keys", "load_keys",
    "AttackReport", "run_attack", "analytic_lower_bound",
    "AdvantageEstimate", "estimate_advantage", "reference_upper_bounds",
    "Em256AesInstance", "em256aes_encrypt_block", "em256aes_decrypt_block",
    "em256aes_encrypt_stream", "em256aes_decrypt_stream", "PaddingError",
    "KatVector", "load_kat_file", "verify_kat", "verify_kat_file",
    "ThroughputReport", "benchmark", "has_aes_acceleration",
    "__version__",
]
