"""hypersketch - linear sketches for hypergraph cut sparsification

v0.4.0 - MPC simulator, selftest subcommand, sparsifier text format
v0.3.0 - Strength decomposition and layered sparsify decode
v0.2.0 - Fingerprinted sampler banks, connectivity banks, bank files
v0.1.0 - Exact oracle, l0 samplers, stream encoder
"""

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from hypersketch.core.config import Settings, SketchConfig, load_settings
from hypersketch.core.errors import (
    EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFICATION_FAILED, HypersketchError, ParameterError,
)
from hypersketch.schemas.hypergraph import Hypergraph
from hypersketch.services.hypergraph.generators import random_shards
from hypersketch.services.hypergraph.text_format import format_sparsifier, parse_sparsifier, parse_stream
from hypersketch.services.incidence.bundle import SketchBundle, merge_bundles
from hypersketch.services.mpc.simulator import mpc_simulate
from hypersketch.services.oracle.exact_oracle import (
    count_small_kcuts, min_normalized_kcut, min_two_cut, strength_recursive, verify_sparsifier,
)
from hypersketch.services.selftest import CHECKS, run_selftest
from hypersketch.services.sparsify.pipeline import decode_bundle
from hypersketch.services.stream.encoder import stream_encode
from hypersketch.version import VERSION

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
logger = logging.getLogger("hypersketch")


# ─── Helpers ───

def _settings(args: argparse.Namespace) -> Settings:
    return load_settings(
        args.config,
        M_MAX=args.m_max,
        EPSILON=args.eps,
        STRENGTH_C=args.strength_c,
        C_REP=args.c_rep,
        C_CONN=args.c_conn,
        DELTA=args.delta,
        ORACLE_VERTEX_CAP=args.oracle_cap,
        MASTER_SEED=args.seed,
        MEMORY_BUDGET=getattr(args, "budget", None),
        LOG_LEVEL=args.log_level,
        N_VERTICES=getattr(args, "n", None),
        R_MAX=args.r_max,
        TWO_CUT_CAP=args.two_cut_cap,
        KAPPA=args.kappa,
    )


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _read_stream(path: str):
    return parse_stream(_read_text(path), source=path)


def _read_multiset(path: str) -> Hypergraph:
    """Final multiset of a hypergraph or stream file."""
    n, r_max, updates = _read_stream(path)
    H = Hypergraph(n, r_max=r_max)
    for u in updates:
        H.add_edge(u.edge, u.delta)
    return H


def _stream_config(args: argparse.Namespace, settings: Settings, n: int, header_r_max: int) -> SketchConfig:
    """Config for a stream file; --r-max may widen the header arity bound, never narrow it."""
    r_max = args.r_max or header_r_max
    if r_max < header_r_max:
        raise ParameterError(f"--r-max {r_max} is below the stream header r={header_r_max}")
    return settings.sketch_config(n=n, r_max=r_max)


def _read_bundle(path: str, settings: Settings) -> SketchBundle:
    return SketchBundle.from_bytes(Path(path).read_bytes(), settings.prf())


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


# ─── Subcommands ───

def cmd_encode(args: argparse.Namespace, settings: Settings) -> int:
    n, r_max, updates = _read_stream(args.stream)
    config = _stream_config(args, settings, n, r_max)
    bundle = stream_encode(updates, config, settings.prf(), strict=not args.lenient)
    Path(args.out).write_bytes(bundle.to_bytes())
    logger.info(f"Encoded {len(updates)} updates into {args.out} ({bundle.byte_size()} bytes)")
    return EXIT_OK


def cmd_merge(args: argparse.Namespace, settings: Settings) -> int:
    merged = merge_bundles(_read_bundle(p, settings) for p in args.banks)
    Path(args.out).write_bytes(merged.to_bytes())
    logger.info(f"Merged {len(args.banks)} bank files into {args.out}")
    return EXIT_OK


def cmd_decode(args: argparse.Namespace, settings: Settings) -> int:
    bundle = merge_bundles(_read_bundle(p, settings) for p in args.banks)
    output = decode_bundle(bundle)
    _emit(format_sparsifier(output), args.out)
    ok, bound = output.within_size_bound(slack=10)
    if not ok:
        logger.warning(f"Sparsifier has {len(output)} edges, more than 10x the size bound {bound}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    H = _read_multiset(args.hypergraph)
    output = parse_sparsifier(_read_text(args.sparsifier), source=args.sparsifier)
    eps = Fraction(args.eps) if args.eps is not None else output.eps
    result = verify_sparsifier(H, output.as_hypergraph(), eps, kcuts=args.kcuts,
                               two_cut_cap=settings.TWO_CUT_CAP, vertex_cap=settings.ORACLE_VERTEX_CAP)
    print(f"ok {result.ok}")
    print(f"eps {eps}")
    print(f"worst_ratio {result.worst_ratio} ({float(result.worst_ratio):.4f})")
    print(f"edges {len(output)} of {len(H)}")
    return EXIT_OK if result.ok else EXIT_VERIFICATION_FAILED


def cmd_oracle(args: argparse.Namespace, settings: Settings) -> int:
    H = _read_multiset(args.hypergraph)
    cap = settings.ORACLE_VERTEX_CAP
    phi, witness = min_normalized_kcut(H, cap)
    print(f"phi {phi}")
    print(f"partition {witness}")
    if H.n <= settings.TWO_CUT_CAP:
        weight, side = min_two_cut(H, settings.TWO_CUT_CAP)
        print(f"min_2cut {weight} side {','.join(str(v) for v in sorted(side))}")
    for e, strength in strength_recursive(H, cap).items():
        print(f"strength {e} {strength}")
    for t in args.census or []:
        print(f"kcuts t={t} count={count_small_kcuts(H, Fraction(t), cap)}")
    return EXIT_OK


def cmd_mpc_sim(args: argparse.Namespace, settings: Settings) -> int:
    if args.shards < 1:
        raise ParameterError(f"--shards must be positive, got {args.shards}")
    n, r_max, updates = _read_stream(args.stream)
    config = _stream_config(args, settings, n, r_max)
    shards = random_shards(np.random.default_rng(args.shard_seed), updates, args.shards)
    report = mpc_simulate(shards, config, settings.prf(), settings.MEMORY_BUDGET, decode=not args.no_decode)
    for line in report.summary_lines():
        print(line)
    if report.output is not None and args.out:
        _emit(format_sparsifier(report.output), args.out)
    if args.bank_out:
        Path(args.bank_out).write_bytes(report.coordinator_bank)
    if not report.rounds_match:
        logger.error(f"MPC took {report.rounds} rounds, expected {report.expected_rounds}")
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace, settings: Settings) -> int:
    results = run_selftest(settings.sketch_config(), settings.prf(), trials=args.trials,
                           seed=args.rng_seed, only=args.only)
    for result in results:
        print(result.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFICATION_FAILED if failed else EXIT_OK


# ─── Parser ───

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="env-style config file")
    common.add_argument("--seed", help="master seed (hex)")
    common.add_argument("--m-max", type=int, dest="m_max")
    common.add_argument("--eps", help="target error, e.g. 1/2")
    common.add_argument("--strength-c", type=int, dest="strength_c")
    common.add_argument("--c-rep", type=int, dest="c_rep")
    common.add_argument("--c-conn", type=int, dest="c_conn")
    common.add_argument("--delta", help="l0 failure probability")
    common.add_argument("--oracle-cap", type=int, dest="oracle_cap")
    common.add_argument("--r-max", type=int, dest="r_max", help="arity bound (at least the stream header's)")
    common.add_argument("--two-cut-cap", type=int, dest="two_cut_cap", help="largest n checked on every 2-cut")
    common.add_argument("--kappa", help="strength threshold override, e.g. 12")
    common.add_argument("--log-level", dest="log_level")

    parser = argparse.ArgumentParser(prog="hypersketch", description="Hypergraph cut sparsification sketches")
    parser.add_argument("--version", action="version", version=f"hypersketch {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", parents=[common], help="stream file -> bank file")
    p.add_argument("stream")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--lenient", action="store_true", help="allow negative multiplicities")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("merge", parents=[common], help="bank files -> bank file")
    p.add_argument("banks", nargs="+")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("decode", parents=[common], help="bank files -> sparsifier file")
    p.add_argument("banks", nargs="+")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("verify", parents=[common], help="check a sparsifier against its hypergraph")
    p.add_argument("hypergraph")
    p.add_argument("sparsifier")
    p.add_argument("--kcuts", action="store_true", help="also check every k-cut")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="exact Phi and strengths")
    p.add_argument("hypergraph")
    p.add_argument("--census", action="append", help="count k-cuts of size <= t * Phi")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("mpc-sim", parents=[common], help="simulate the MPC merge protocol")
    p.add_argument("stream")
    p.add_argument("--shards", type=int, required=True)
    p.add_argument("--budget", type=int, help="memory budget per machine in bytes")
    p.add_argument("--shard-seed", type=int, default=0, dest="shard_seed")
    p.add_argument("--no-decode", action="store_true", dest="no_decode")
    p.add_argument("-o", "--out")
    p.add_argument("--bank-out", dest="bank_out")
    p.set_defaults(func=cmd_mpc_sim)

    p = sub.add_parser("selftest", parents=[common], help="run the property suite")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--rng-seed", type=int, default=0, dest="rng_seed")
    p.add_argument("--n", type=int)
    p.add_argument("--only", action="append", choices=CHECKS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = _settings(args)
    except ValidationError as e:
        logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
        logger.error(f"Invalid configuration: {e}")
        return EXIT_INPUT_ERROR
    logging.basicConfig(level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO), format=LOG_FORMAT)
    logger.debug(f"hypersketch v{VERSION}: {args.command}")
    try:
        return args.func(args, settings)
    except HypersketchError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error(f"Cannot access file: {e}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
