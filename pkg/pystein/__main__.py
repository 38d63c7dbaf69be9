# -*- coding: utf-8 -*-
"""
This is used when pystein is used as a script
"""

import argparse
import logging
import sys

from .configuration import load_config, update, validate_config
from .sweep import Sweep
from .util import BoundViolation, NumericConsistencyError, start_logging

logger = logging.getLogger(f"{__package__}.cli")

#:dict: subcommand to step name
SUBCOMMANDS = {
    "limit-law": "limit_law",
    "stein-check": "stein_check",
    "audit": "audit",
    "oracle": "oracle",
    "rate-fit": "rate_fit",
}

#:dict: exit code of each failure
EXIT_CODES = {
    BoundViolation: 2,
    NumericConsistencyError: 3,
    ValueError: 1,
    KeyError: 1,
    OSError: 1,
}


def threads(value):
    if value == "auto":
        return value
    return int(value)


def add_common(parser):
    parser.add_argument("--config", help="json configuration file")
    parser.add_argument("--log", help="also log to this file")
    parser.add_argument("--format", choices=["csv", "json"], help="output format")
    parser.add_argument("--out", help="output file, may contain {step} and {format}")
    parser.add_argument("--threads", type=threads, help="worker threads, or auto")


def get_parser():
    parser = argparse.ArgumentParser(
        description="Stein bound audits of critical Curie-Weiss and monomer-dimer models",
        prog="pystein",
    )
    subparsers = parser.add_subparsers(dest="script", metavar="script")
    subparsers.required = True

    sub = subparsers.add_parser(
        "limit-law", help="normalizers, moments and tail bounds"
    )
    sub.add_argument("--law", action="append", help="limiting law K:A, repeatable")
    add_common(sub)

    sub = subparsers.add_parser(
        "stein-check", help="check the Stein solution on a grid"
    )
    sub.add_argument("--law", action="append", help="limiting law K:A, repeatable")
    sub.add_argument("--z", type=float, action="append", help="threshold, repeatable")
    add_common(sub)

    sub = subparsers.add_parser("audit", help="weighted distances and bound terms")
    sub.add_argument("--model", help="curie_weiss or monomer_dimer")
    sub.add_argument("--n", type=int, action="append", help="system size, repeatable")
    sub.add_argument(
        "--p", type=float, action="append", help="weight exponent, repeatable"
    )
    sub.add_argument("--beta", type=float, help="inverse temperature")
    sub.add_argument("--a", type=float, help="truncation level for --a-rule fixed")
    sub.add_argument("--a-rule", choices=["support-bound", "fixed"], dest="a_rule")
    sub.add_argument("--weight", choices=["power", "polynomial"])
    sub.add_argument("--refine", type=int, help="bisection intervals between atoms")
    add_common(sub)

    sub = subparsers.add_parser("oracle", help="brute force enumeration checks")
    sub.add_argument("--model", action="append", help="model to check, repeatable")
    sub.add_argument("--max-n", type=int, dest="max_n", help="largest system size")
    add_common(sub)

    sub = subparsers.add_parser("rate-fit", help="log-log fits of distances over n")
    sub.add_argument("--input", help="audit csv file")
    sub.add_argument("--model", help="model whose rate is used for the constant")
    sub.add_argument("--n", type=int, action="append", help="system size, repeatable")
    sub.add_argument("--d", type=float, action="append", help="distance, repeatable")
    sub.add_argument("--rate", type=float, help="rate of the empirical constant")
    add_common(sub)
    return parser


def overrides(args):
    """The configuration given by the command line flags"""
    step = SUBCOMMANDS[args.script]
    section = {}
    if step == "limit_law" or step == "stein_check":
        if args.law is not None:
            section["laws"] = args.law
    if step == "stein_check" and args.z is not None:
        section["z"] = args.z
    if step == "audit":
        for key in ["model", "n", "p", "beta", "a", "a_rule", "weight", "refine"]:
            value = getattr(args, key)
            if value is not None:
                section[key] = value
        if args.a is not None and args.a_rule is None:
            section["a_rule"] = "fixed"
    if step == "oracle":
        if args.model is not None:
            section["models"] = args.model
        if args.max_n is not None:
            section["max_n"] = args.max_n
    if step == "rate_fit":
        for key in ["input", "model", "n", "d", "rate"]:
            value = getattr(args, key)
            if value is not None:
                section[key] = value

    output = {}
    for key in ["format", "out", "threads"]:
        value = getattr(args, key)
        if value is not None:
            output[key] = value
    return {step: section, "output": output}


def main(argv=None):
    """
    Run a subcommand

    Returns
    -------
    code : int
        0 on success, 1 for invalid input, 2 if a bound is violated,
        3 if a numerical consistency check fails
    """
    args = get_parser().parse_args(argv)
    step = SUBCOMMANDS[args.script]
    if args.log is not None:
        start_logging(args.log)

    try:
        model = args.model if step == "audit" else None
        config = load_config(args.config, model)
        config = update(config, overrides(args))
        # flags are checked by the same schema as files
        validate_config(config)
        Sweep(config).run_module(step)
    except tuple(EXIT_CODES) as ex:
        code = next(c for cls, c in EXIT_CODES.items() if isinstance(ex, cls))
        logger.error("%s failed: %s", args.script, ex)
        return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
