"""Command-line front end.

Simulation subcommands demand an explicit seed (no silent
nondeterminism) and accept a config file of `key = value` lines whose
entries any command-line flag overrides.  Reports are CSV, written to
--out or stdout.
"""

import argparse
import hashlib
import sys

import numpy as np

from .channel import ChannelProfile
from .equalizer import EqualizerKind
from .errors import (
    BruteForceCostError,
    IqFormatError,
    KeyFormatError,
    ShapeError,
    SingularChannelError,
)
from .fileio import (
    parse_bool,
    parse_float_list,
    parse_int_list,
    read_config,
    read_iq,
    read_key_file,
    write_iq,
    write_key_file,
)
from .harness import (
    AttackRecoveryConfig,
    BerExperimentConfig,
    FIVE_TAP_PROFILE,
    SerAttackConfig,
    SnrAnalysisConfig,
    analyze_snr,
    measure_ici,
    run_attack_recovery_experiment,
    run_ber_experiment,
    run_ser_attack_experiment,
)
from .permcipher import (
    Permutation,
    SecretKey,
    decrypt_block,
    derive_permutation,
    encrypt_block,
    transpose_interleaver,
)


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _merged(args, schema: dict, aliases: dict | None = None) -> dict:
    """Resolve each option: CLI flag beats config file beats default."""
    conf = read_config(args.config) if getattr(args, "config", None) else {}
    for old, new in (aliases or {}).items():
        if old in conf and new not in conf:
            conf[new] = conf.pop(old)
    out = {}
    for name, (convert, default) in schema.items():
        cli_val = getattr(args, name, None)
        if cli_val is not None:
            out[name] = cli_val
        elif name in conf:
            out[name] = convert(conf[name])
        else:
            out[name] = default
    return out


def _load_profile(path):
    return ChannelProfile.from_file(path) if path else FIVE_TAP_PROFILE


def _load_key(path):
    return read_key_file(path) if path else None


def _require_seed(parser, value):
    if value is None:
        parser.error("--seed is required (set it on the command line or in the config file)")
    if value < 0:
        parser.error("--seed must be non-negative")
    return value


def _cmd_keygen(args, parser):
    n = args.n_bytes
    if n < 16:
        parser.error("--bytes must be >= 16")
    if args.seed is not None:
        blocks = []
        counter = 0
        while sum(len(b) for b in blocks) < n:
            blocks.append(hashlib.sha256(
                b"permofdm keygen" + int(args.seed).to_bytes(8, "big")
                + counter.to_bytes(4, "big")
            ).digest())
            counter += 1
        key = SecretKey(b"".join(blocks)[:n])
    else:
        key = SecretKey.generate(n)
    write_key_file(args.out, key, hex_text=not args.raw)
    return 0


def _run_cipher(args, parser, direction):
    key = read_key_file(args.key)
    n, l_depth = args.n, args.l
    if n < 1 or l_depth < 1:
        parser.error("--n and --l must be >= 1")
    size = n * l_depth
    samples = read_iq(args.input)
    if samples.size == 0 or samples.size % size:
        raise IqFormatError(
            f"{args.input}: {samples.size} samples is not a whole number of "
            f"blocks of L*N = {size}"
        )
    out = np.empty_like(samples)
    ell = args.ell
    for start in range(0, samples.size, size):
        perm = derive_permutation(key, ell, size)
        block = samples[start:start + size]
        out[start:start + size] = (
            encrypt_block(block, perm) if direction == "enc" else decrypt_block(block, perm)
        )
        ell += 1
    write_iq(args.out, out)
    return 0


def _equalizer_from(opts) -> EqualizerKind:
    return EqualizerKind(
        variant=opts["equalizer"],
        zf_floor=opts["zf_floor"],
        discard_below=opts["discard_below"],
        fade_bias=opts["fade_bias"],
    )


_BER_SCHEMA = {
    "seed": (int, None),
    "n": (int, 256),
    "m": (int, 4),
    "n_cp": (int, 16),
    "interleaver": (str, "transpose"),
    "l_depth": (int, 1),
    "equalizer": (str, "zf"),
    "zf_floor": (float, 1e-12),
    "discard_below": (float, None),
    "fade_bias": (float, None),
    "snr_db": (parse_float_list, (10.0,)),
    "blocks": (int, 200),
    "min_blocks": (int, None),
    "min_errors": (int, 200),
    "max_bits": (float, 1e8),
    "channel": (str, "rayleigh"),
    "profile": (str, None),
    "key": (str, None),
    "workers": (int, 1),
}


def _cmd_simulate_ber(args, parser):
    o = _merged(args, _BER_SCHEMA)
    _require_seed(parser, o["seed"])
    cfg = BerExperimentConfig(
        seed=o["seed"], n=o["n"], m=o["m"], n_cp=o["n_cp"],
        interleaver=o["interleaver"], l_depth=o["l_depth"],
        equalizer=_equalizer_from(o),
        snr_db=tuple(o["snr_db"]), blocks=o["blocks"],
        min_blocks=o["min_blocks"], min_errors=o["min_errors"],
        max_bits=o["max_bits"], channel=o["channel"],
        profile=_load_profile(o["profile"]), key=_load_key(o["key"]),
    )
    report = run_ber_experiment(cfg, workers=o["workers"])
    _emit(report.to_csv(), args.out)
    return 0


_SER_SCHEMA = {
    "seed": (int, None),
    "n": (int, 256),
    "m_values": (parse_int_list, (4, 16, 64)),
    "k_values": (parse_int_list, (0, 8, 16, 32, 56, 128, 256)),
    "snr_db": (float, 30.0),
    "trials": (int, 400),
    "workers": (int, 1),
}


def _cmd_simulate_attack_ser(args, parser):
    o = _merged(args, _SER_SCHEMA)
    _require_seed(parser, o["seed"])
    cfg = SerAttackConfig(
        seed=o["seed"], n=o["n"], m_values=tuple(o["m_values"]),
        k_values=tuple(o["k_values"]), snr_db=o["snr_db"], trials=o["trials"],
    )
    report = run_ser_attack_experiment(cfg, workers=o["workers"])
    _emit(report.to_csv(), args.out)
    return 0


_RECOVERY_SCHEMA = {
    "seed": (int, None),
    "size": (int, 64),
    "snr_db": (float, 0.0),
    "repeats": (int, 10000),
    "trials": (int, 20),
    "fresh_perm": (parse_bool, False),
    "key": (str, None),
    "workers": (int, 1),
}


def _cmd_simulate_attack_recovery(args, parser):
    o = _merged(args, _RECOVERY_SCHEMA,
                aliases={"k": "repeats", "fresh_perm_per_block": "fresh_perm"})
    _require_seed(parser, o["seed"])
    cfg = AttackRecoveryConfig(
        seed=o["seed"], size=o["size"], snr_db=o["snr_db"],
        repeats=o["repeats"], trials=o["trials"],
        fresh_perm_per_block=bool(o["fresh_perm"]), key=_load_key(o["key"]),
    )
    report = run_attack_recovery_experiment(cfg, workers=o["workers"])
    _emit(report.to_csv(), args.out)
    return 0


_SNR_SCHEMA = {
    "seed": (int, None),
    "n": (int, 256),
    "m": (int, 4),
    "snr_db": (parse_float_list, (10.0,)),
    "blocks": (int, 200),
    "profile": (str, None),
    "zf_floor": (float, 1e-12),
}


def _cmd_analyze_snr(args, parser):
    o = _merged(args, _SNR_SCHEMA)
    _require_seed(parser, o["seed"])
    cfg = SnrAnalysisConfig(
        seed=o["seed"], n=o["n"], m=o["m"], snr_db=tuple(o["snr_db"]),
        blocks=o["blocks"], profile=_load_profile(o["profile"]),
        zf_floor=o["zf_floor"],
    )
    _emit(analyze_snr(cfg).to_csv(), args.out)
    return 0


_ICI_SCHEMA = {
    "seed": (int, None),
    "n": (int, 256),
    "m": (int, 4),
    "trials": (int, 20000),
    "perm": (str, "random"),
    "key": (str, None),
    "ell": (int, 0),
}


def _cmd_measure_ici(args, parser):
    o = _merged(args, _ICI_SCHEMA)
    _require_seed(parser, o["seed"])
    n = o["n"]
    kind = o["perm"]
    if kind == "identity":
        perm = Permutation.identity(n)
    elif kind == "reversal":
        perm = Permutation(map=np.arange(n, dtype=np.int64)[::-1].copy())
    elif kind == "random":
        perm = Permutation(map=np.random.default_rng((o["seed"], 0xFACE)).permutation(n))
    elif kind == "transpose":
        perm = transpose_interleaver(n)
    elif kind == "keyed":
        key = _load_key(o["key"])
        if key is None:
            parser.error("--perm keyed needs --key")
        perm = derive_permutation(key, o["ell"], n)
    else:
        parser.error(f"unknown --perm {kind!r}")
        return 2
    report = measure_ici(perm, o["trials"], n, m=o["m"], seed=o["seed"])
    lines = ["l,k,alpha_re,alpha_im,alpha_abs2,beta_power"]
    a = report.alpha
    b = report.beta_power
    for l in range(a.shape[0]):
        for k in range(a.shape[1]):
            lines.append(
                f"{l},{k},{a[l, k].real:.6g},{a[l, k].imag:.6g},"
                f"{abs(a[l, k]) ** 2:.6g},{b[l, k]:.6g}"
            )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permofdm",
        description="Permutation-secured OFDM link simulator and attack bench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key file")
    p.add_argument("--out", required=True)
    p.add_argument("--bytes", dest="n_bytes", type=int, default=32)
    p.add_argument("--seed", type=int, default=None,
                   help="deterministic key derivation (testing only)")
    p.add_argument("--raw", action="store_true", help="write raw bytes, not hex")
    p.set_defaults(handler=_cmd_keygen)

    for name, direction in (("encrypt", "enc"), ("decrypt", "dec")):
        p = sub.add_parser(name, help=f"{name} a binary IQ sample file")
        p.add_argument("input")
        p.add_argument("--out", required=True)
        p.add_argument("--key", required=True)
        p.add_argument("--n", type=int, required=True, help="samples per OFDM symbol")
        p.add_argument("--l", type=int, default=1, help="symbols per interleaving block")
        p.add_argument("--ell", type=int, default=0, help="starting block counter")
        p.set_defaults(handler=lambda a, pr, d=direction: _run_cipher(a, pr, d))

    p = sub.add_parser("simulate-ber", help="Monte-Carlo BER over the fading chain")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n-cp", dest="n_cp", type=int)
    p.add_argument("--interleaver", choices=["none", "transpose", "keyed"])
    p.add_argument("--l-depth", dest="l_depth", type=int)
    p.add_argument("--equalizer", choices=["zf", "mmse"])
    p.add_argument("--zf-floor", dest="zf_floor", type=float)
    p.add_argument("--discard-below", dest="discard_below", type=float)
    p.add_argument("--fade-bias", dest="fade_bias", type=float)
    p.add_argument("--snr-db", dest="snr_db", type=parse_float_list)
    p.add_argument("--blocks", type=int)
    p.add_argument("--min-blocks", dest="min_blocks", type=int)
    p.add_argument("--min-errors", dest="min_errors", type=int)
    p.add_argument("--max-bits", dest="max_bits", type=float)
    p.add_argument("--channel", choices=["rayleigh", "awgn"])
    p.add_argument("--profile")
    p.add_argument("--key")
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_simulate_ber)

    p = sub.add_parser("simulate-attack-ser",
                       help="eavesdropper SER vs number of displaced samples")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m-values", dest="m_values", type=parse_int_list)
    p.add_argument("--k-values", dest="k_values", type=parse_int_list)
    p.add_argument("--snr-db", dest="snr_db", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_simulate_attack_ser)

    p = sub.add_parser("simulate-attack-recovery",
                       help="noise-averaging permutation recovery attack")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--size", type=int)
    p.add_argument("--snr-db", dest="snr_db", type=float)
    p.add_argument("--repeats", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--fresh-perm", dest="fresh_perm", action="store_const", const=True)
    p.add_argument("--key")
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_simulate_attack_recovery)

    p = sub.add_parser("analyze-snr", help="semi-analytic scrambled-ZF BER")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--snr-db", dest="snr_db", type=parse_float_list)
    p.add_argument("--blocks", type=int)
    p.add_argument("--profile")
    p.add_argument("--zf-floor", dest="zf_floor", type=float)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_analyze_snr)

    p = sub.add_parser("measure-ici",
                       help="per-subcarrier attenuation/self-interference of a permutation")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--perm", choices=["identity", "reversal", "random", "transpose", "keyed"])
    p.add_argument("--key")
    p.add_argument("--ell", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_measure_ici)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, parser)
    except (ShapeError, KeyFormatError, IqFormatError, SingularChannelError,
            BruteForceCostError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
