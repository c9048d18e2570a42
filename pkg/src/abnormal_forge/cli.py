"""Command-line interface.

Subcommands: ``construct`` (run the pipeline, write digit + certificate
files), ``verify`` (recheck certificates against a digit stream),
``analyze`` (digit statistics for partial quotients or base digits),
and ``nt`` (number-theory utilities).

Exit codes: 0 success, 1 verification failure, 2 usage/parse/domain
error, 3 search exhaustion or resource budget exceeded (partial outputs
are flushed with a ``partial: true`` header).

The environment variable ``ABNORMAL_FORGE_MEM_BUDGET`` (bytes) caps the
tail-digit size and the discrete-log table.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import nt
from .construction import (ConstructionAborted, ConstructionConfig, Mode,
                           SearchBudget, block_boundary, construct,
                           verify_certificate)
from .errors import (InfeasibleError, InputFormatError,
                     ResourceBudgetExceeded, SearchExhausted)
from .formats import (read_certificate_file, read_digit_file, run_header,
                      unlimited_int_strings, write_certificate_file,
                      write_digit_file)
from .radix import NON_TERMINATING, TERMINATING, base_expansion, max_run
from .radix import cf_normality_report
from .seed import DEFAULT_DIGIT_CAP, FileDigitSource, RngDigitSource

MEM_BUDGET_ENV = "ABNORMAL_FORGE_MEM_BUDGET"

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _budget_from_env() -> SearchBudget:
    raw = os.environ.get(MEM_BUDGET_ENV)
    if raw is None:
        return SearchBudget()
    try:
        return SearchBudget.from_mem_bytes(int(raw))
    except ValueError as exc:
        raise InputFormatError(f"bad {MEM_BUDGET_ENV}: {exc}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abnormal-forge",
        description="Forge continued fractions whose scheduled convergent "
                    "denominators are exact base powers, and verify the "
                    "resulting certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    con = sub.add_parser("construct", help="run the construction pipeline")
    seed_group = con.add_mutually_exclusive_group(required=True)
    seed_group.add_argument("--seed-rng", type=int, metavar="U64",
                            help="seed for the reproducible digit sampler")
    seed_group.add_argument("--seed-file", metavar="PATH",
                            help="digit file supplying seed partial quotients")
    con.add_argument("--block-size", type=int, required=True, metavar="N",
                     help="even length of the first block")
    con.add_argument("--blocks", type=int, required=True, metavar="B",
                     help="number of blocks to plan")
    con.add_argument("--mode", default="paper", metavar="MODE",
                     help="paper | relaxed:<scale> | toy")
    con.add_argument("--tail-offset", type=int, default=0, metavar="T",
                     help="add T to every tail digit (distinct valid streams)")
    con.add_argument("--search-limit", type=int, default=100_000,
                     metavar="COUNT", help="candidate cap for prime searches")
    con.add_argument("--digit-cap", type=int, default=DEFAULT_DIGIT_CAP,
                     metavar="CAP", help="clamp sampled seed digits at CAP")
    con.add_argument("--total-digits", type=int, default=None, metavar="M",
                     help="digits to write (default: through the last tail)")
    con.add_argument("--out-digits", required=True, metavar="PATH")
    con.add_argument("--out-cert", required=True, metavar="PATH")

    ver = sub.add_parser("verify", help="recheck certificates from the digits")
    ver.add_argument("--cert", required=True, metavar="PATH")
    ver.add_argument("--digits", required=True, metavar="PATH")
    ver.add_argument("--sample-window", type=int, default=10_000, metavar="W",
                     help="cap on the base-digit comparison length")

    ana = sub.add_parser("analyze", help="digit statistics")
    ana_sub = ana.add_subparsers(dest="analyze_kind", required=True)
    cf_p = ana_sub.add_parser("cf", help="partial-quotient statistics vs "
                                         "Gauss-measure references")
    cf_p.add_argument("--digits", required=True, metavar="PATH")
    cf_p.add_argument("--strings", required=True, metavar="S",
                      help="semicolon-separated patterns, e.g. '1;2;1,1'")
    cf_p.add_argument("--prefix", type=int, required=True, metavar="N")
    base_p = ana_sub.add_parser("base", help="base-b expansion of a rational")
    base_p.add_argument("--num", type=int, required=True)
    base_p.add_argument("--den", type=int, required=True)
    base_p.add_argument("--base", type=int, required=True)
    base_p.add_argument("--places", type=int, required=True)
    base_p.add_argument("--symbol", type=int, default=None,
                        help="symbol for the run report (default: base-1)")
    base_p.add_argument("--convention", default=NON_TERMINATING,
                        choices=[TERMINATING, NON_TERMINATING])

    ntp = sub.add_parser("nt", help="number-theory utilities")
    nt_sub = ntp.add_subparsers(dest="nt_kind", required=True)
    dlog = nt_sub.add_parser("dlog", help="discrete logarithm (BSGS)")
    dlog.add_argument("--g", type=int, required=True)
    dlog.add_argument("--h", type=int, required=True)
    dlog.add_argument("--p", type=int, required=True)
    primroot = nt_sub.add_parser("primroot", help="primitive-root test")
    primroot.add_argument("--g", type=int, required=True)
    primroot.add_argument("--p", type=int, required=True)
    artin = nt_sub.add_parser("artin", help="least prime in a class with a "
                                            "prescribed primitive root")
    artin.add_argument("--g", type=int, required=True)
    artin.add_argument("--f", type=int, required=True)
    artin.add_argument("--a", type=int, required=True)
    artin.add_argument("--search-limit", type=int, default=100_000)
    kron = nt_sub.add_parser("kronecker", help="Kronecker symbol (d/n)")
    kron.add_argument("--d", type=int, required=True)
    kron.add_argument("--n", type=int, required=True)
    lenstra = nt_sub.add_parser("lenstra", help="finiteness test for the "
                                                "primitive-root prime class")
    lenstra.add_argument("--g", type=int, required=True)
    lenstra.add_argument("--f", type=int, required=True)
    lenstra.add_argument("--a", type=int, required=True)
    crt = nt_sub.add_parser("crt", help="least positive solution of residue "
                                        "constraints")
    crt.add_argument("--constraint", action="append", required=True,
                     metavar="M:R1[,R2...]",
                     help="modulus and admitted residues; repeatable")
    return parser


def _make_source(args):
    if args.seed_file is not None:
        return FileDigitSource(args.seed_file)
    if args.seed_rng is None:
        raise InputFormatError("a seed source is required")
    return RngDigitSource(args.seed_rng, cap=args.digit_cap)


def _cmd_construct(args) -> int:
    from dataclasses import replace
    budget = replace(_budget_from_env(), artin_limit=args.search_limit)
    config = ConstructionConfig(block_size=args.block_size,
                                blocks=args.blocks,
                                mode=Mode.parse(args.mode),
                                tail_offset=args.tail_offset,
                                budget=budget)
    source = _make_source(args)
    seed_descriptor = source.descriptor()
    header_config = dict(config.echo(), total_digits=args.total_digits)

    try:
        result = construct(config, source)
    except ConstructionAborted as aborted:
        header = run_header(header_config, seed_descriptor, partial=True)
        write_digit_file(args.out_digits, aborted.digits, header)
        write_certificate_file(args.out_cert, aborted.certificates, header)
        print(f"error: {aborted}", file=sys.stderr)
        print(f"partial outputs flushed to {args.out_digits} and "
              f"{args.out_cert}", file=sys.stderr)
        if isinstance(aborted.cause, InputFormatError):
            return EXIT_USAGE  # bad or exhausted seed input, not a budget wall
        return EXIT_RESOURCE

    total = args.total_digits
    if total is None:
        if config.blocks:
            total = block_boundary(config.block_size, config.blocks) + 4
        elif args.seed_file is not None:
            total = len(source)
        else:
            raise InputFormatError(
                "--total-digits is required for blocks=0 with an rng seed")
    digits = result.prefix(total)

    header = run_header(header_config, seed_descriptor, partial=False)
    write_digit_file(args.out_digits, digits, header)
    write_certificate_file(args.out_cert, result.certificates, header)

    for cert in result.certificates:
        q1, q2, q3 = cert.denoms_after
        tail = cert.inserted[3]
        print(f"block {cert.index}: base={cert.base} end={cert.block_end} "
              f"exponent={cert.exponent} digit_bound={cert.digit_bound} "
              f"prime_bits={q2.bit_length()} power_bits={q3.bit_length()} "
              f"tail_bits={tail.bit_length()} mode={cert.mode}")
    print(f"wrote {len(digits)} digits to {args.out_digits}; "
          f"{len(result.certificates)} certificates to {args.out_cert}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    certs, _header = read_certificate_file(args.cert)
    digits, _ = read_digit_file(args.digits)
    needed = max((c.block_end + 4 for c in certs), default=0)
    if len(digits) < needed:
        raise InputFormatError(
            f"digit file too short: certificates need {needed} digits, "
            f"found {len(digits)}")
    blocks = []
    all_passed = True
    for cert in certs:
        report = verify_certificate(cert, digits,
                                    sample_window=args.sample_window)
        all_passed = all_passed and report.passed
        blocks.append({
            "index": report.index,
            "passed": report.passed,
            "tail_bound_met": report.tail_bound_met,
            "checks": [{"name": c.name, "passed": c.passed,
                        "required": c.required, "detail": c.detail}
                       for c in report.checks],
        })
    print(json.dumps({"all_passed": all_passed, "blocks": blocks}, indent=2))
    return EXIT_OK if all_passed else EXIT_VERIFY_FAILED


def _parse_patterns(text: str) -> list[list[int]]:
    patterns = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            pattern = [int(part) for part in chunk.split(",")]
        except ValueError:
            raise InputFormatError(f"bad pattern {chunk!r}") from None
        if not pattern or any(d < 1 for d in pattern):
            raise InputFormatError(f"patterns need digits >= 1: {chunk!r}")
        patterns.append(pattern)
    if not patterns:
        raise InputFormatError("no patterns given")
    return patterns


def _cmd_analyze_cf(args) -> int:
    digits, _ = read_digit_file(args.digits)
    if args.prefix > len(digits):
        raise InputFormatError(
            f"prefix {args.prefix} exceeds the {len(digits)} digits on file")
    report = cf_normality_report(digits, _parse_patterns(args.strings),
                                 args.prefix)
    records = [{"string": list(s.pattern), "count": s.count,
                "prefix": s.prefix_len, "ratio": float(s.ratio),
                "reference": float(s.reference),
                "discrepancy": float(s.discrepancy)} for s in report]
    print(json.dumps(records, indent=2))
    return EXIT_OK


def _cmd_analyze_base(args) -> int:
    if args.den < 1:
        raise InputFormatError(f"denominator must be >= 1, got {args.den}")
    x = Fraction(args.num, args.den)
    expansion = base_expansion(x, args.base, args.places,
                               convention=args.convention)
    symbol = args.symbol if args.symbol is not None else args.base - 1
    runs = max_run(expansion.digits, symbol, args.places)
    if args.base <= 10:
        rendered = "".join(str(d) for d in expansion.digits)
    else:
        rendered = ",".join(str(d) for d in expansion.digits)
    print(json.dumps({"base": args.base, "convention": expansion.convention,
                      "places": args.places, "digits": rendered,
                      "symbol": symbol, "longest_run": runs.longest_run,
                      "differing": runs.differing}, indent=2))
    return EXIT_OK


def _parse_crt_constraints(specs):
    constraints = []
    for spec in specs:
        try:
            mod_text, residue_text = spec.split(":", 1)
            modulus = int(mod_text)
            residues = [int(r) for r in residue_text.split(",")]
        except ValueError:
            raise InputFormatError(
                f"constraint must look like M:R1[,R2...], got {spec!r}") from None
        constraints.append((modulus, residues))
    return constraints


def _cmd_nt(args) -> int:
    budget = _budget_from_env()
    with unlimited_int_strings():
        if args.nt_kind == "dlog":
            print(nt.discrete_log(args.g, args.h, args.p,
                                  max_table_entries=budget.bsgs_entries))
        elif args.nt_kind == "primroot":
            print("true" if nt.is_primitive_root(args.g, args.p) else "false")
        elif args.nt_kind == "artin":
            hit = nt.find_artin_prime(args.g, args.f, args.a,
                                      args.search_limit)
            print(f"ell={hit.ell} p={hit.prime} "
                  f"candidates_tested={hit.candidates_tested}")
        elif args.nt_kind == "kronecker":
            print(nt.kronecker_symbol(args.d, args.n))
        elif args.nt_kind == "lenstra":
            verdict = nt.lenstra_finiteness(args.g, args.f, args.a)
            if verdict.finite:
                witness = (f" q={verdict.prime_witness}"
                           if verdict.prime_witness is not None else "")
                print(f"finite condition={verdict.condition}{witness} "
                      f"discriminant={verdict.discriminant}")
            else:
                print(f"infinite (no finiteness condition fires; "
                      f"GRH-conditional) discriminant={verdict.discriminant}")
        elif args.nt_kind == "crt":
            print(nt.crt_min_solution(_parse_crt_constraints(args.constraint)))
        else:  # pragma: no cover - argparse enforces choices
            raise InputFormatError(f"unknown nt subcommand {args.nt_kind!r}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "construct":
            return _cmd_construct(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "analyze":
            if args.analyze_kind == "cf":
                return _cmd_analyze_cf(args)
            return _cmd_analyze_base(args)
        if args.command == "nt":
            return _cmd_nt(args)
        raise InputFormatError(f"unknown command {args.command!r}")
    except (InputFormatError, InfeasibleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SearchExhausted, ResourceBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
