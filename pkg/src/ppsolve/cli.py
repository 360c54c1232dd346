"""Command-line front end: ``ppsolve <command> [options] FILE``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

from .bmdp import parse_bmdp, bmdp_to_system
from .bssg import solve_exhaustive
from .gnm import GnmInvariantError, solve
from .policy import epsilon_policy
from .qualitative import PolicyEnumerationError, reduce
from .snf import to_snf
from .system import Kind, ModelError
from .textio import ParseError, format_fraction, format_system, parse_system

COMMANDS = ("solve", "qualitative", "policy", "bssg", "convert", "normalize")


class InputError(Exception):
    """Bad command line or unreadable input; exit status 1."""


@dataclass(frozen=True)
class CliConfig:
    command: str
    path: str
    j: int = 20
    epsilon: Fraction = Fraction(1, 1024)
    format: str = "human"
    exact: bool = False
    differential_lp: bool = False
    override_precision: int | None = None
    flavor: str | None = None
    objective: str = "maximize"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.j < 1:
            raise InputError("--j must be >= 1")
        if not 0 < self.epsilon <= 1:
            raise InputError("--epsilon must lie in (0, 1]")
        if self.override_precision is not None and self.override_precision < 1:
            raise InputError("--override-precision must be >= 1")


def certified_digits(j: int) -> int:
    return math.ceil(j * math.log10(2))


def truncate_decimal(x: Fraction, digits: int) -> str:
    """``x`` truncated (not rounded) to ``digits`` decimals."""
    x = Fraction(x)
    scaled = x.numerator * 10 ** digits // x.denominator
    whole, frac = divmod(scaled, 10 ** digits)
    return f"{whole}.{frac:0{digits}d}" if digits else str(whole)


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _vector(names, values, cfg: CliConfig, digits: int) -> dict:
    if cfg.exact:
        return {n: format_fraction(v) for n, v in zip(names, values)}
    return {n: truncate_decimal(v, digits) for n, v in zip(names, values)}


def _named_choices(system, policy) -> dict:
    """Policy keyed by variable name; general choices report the alternative index."""
    out = {}
    for i, c in sorted(policy.items()):
        eq = system.equations[i]
        out[system.names[i]] = system.names[c] if eq.kind is Kind.CHOICE else str(c)
    return out


def _cmd_solve(cfg, system):
    if system.flavor == "maxmin":
        raise InputError("mixed max/min systems are solved with the bssg command")
    rep = solve(system, cfg.j, use_lp=cfg.differential_lp)
    digits = certified_digits(cfg.j)
    doc = {"j": cfg.j, "h": rep.h, "size": rep.size, "iterations": rep.iterations_run,
           "method": rep.method, "values": _vector(system.names, rep.approximation, cfg, digits)}
    if cfg.differential_lp and rep.method == "lp" and system.is_pure():
        newton = solve(system, cfg.j)
        doc["differential"] = "agree" if newton.approximation == rep.approximation else "disagree"
        if doc["differential"] == "disagree":
            raise GnmInvariantError("LP and Newton iterations disagree")
    lines = [f"{n} ≈ {v}" for n, v in doc["values"].items()]
    return doc, lines


def _cmd_qualitative(cfg, system):
    snf = to_snf(system)
    rep = reduce(snf.system)
    names = snf.system.names
    doc = {"zero": [names[i] for i in sorted(rep.zero_set)],
           "one": [names[i] for i in sorted(rep.one_set)],
           "reduced": format_system(rep.reduced)}
    lines = [f"zero: {' '.join(doc['zero']) or '-'}", f"one: {' '.join(doc['one']) or '-'}",
             "reduced system:", doc["reduced"].rstrip("\n")]
    return doc, lines


def _cmd_policy(cfg, system):
    if system.flavor not in ("max", "min"):
        raise InputError("the policy command needs a max or min system")
    rep = epsilon_policy(system, cfg.epsilon, j=cfg.override_precision)
    digits = certified_digits(rep.value_j)
    named = _named_choices(system, rep.policy)
    doc = {"policy": named,
           "certificate": {"epsilon": format_fraction(cfg.epsilon), "j": rep.j,
                           "kind": rep.certificate, "repair_switches": rep.switches,
                           "value": _vector(system.names, rep.value, cfg, digits)}}
    lines = [f"{k} -> {v}" for k, v in named.items()]
    lines.append(f"certificate: {rep.certificate} (epsilon={format_fraction(cfg.epsilon)}, j={rep.j})")
    return doc, lines


def _cmd_bssg(cfg, system):
    if system.flavor != "maxmin":
        system = system.with_flavor("maxmin")
    cert = solve_exhaustive(system, cfg.epsilon)
    names = system.names
    digits = certified_digits(cert.j)
    doc = {"sigma": _named_choices(system, cert.sigma), "tau": _named_choices(system, cert.tau),
           "epsilon": format_fraction(cert.epsilon), "gap": format_fraction(cert.gap),
           "values": _vector(names, cert.value, cfg, digits)}
    lines = [f"sigma: {doc['sigma']}", f"tau: {doc['tau']}"]
    lines += [f"{n} ≈ {v}" for n, v in doc["values"].items()]
    return doc, lines


def _cmd_convert(cfg, text):
    system = bmdp_to_system(parse_bmdp(text), cfg.objective)
    out = format_system(system)
    return {"system": out}, [out.rstrip("\n")]


def _cmd_normalize(cfg, system):
    out = format_system(to_snf(system).system)
    return {"system": out}, [out.rstrip("\n")]


def run(cfg: CliConfig, out=None) -> int:
    """Execute ``cfg``; returns the exit status."""
    out = out or sys.stdout
    text = _read(cfg.path)
    if cfg.command == "convert":
        doc, lines = _cmd_convert(cfg, text)
    else:
        flavor = cfg.flavor
        if cfg.command == "bssg" and flavor is None:
            flavor = "maxmin"
        system = parse_system(text, flavor)
        handler = {"solve": _cmd_solve, "qualitative": _cmd_qualitative, "policy": _cmd_policy,
                   "bssg": _cmd_bssg, "normalize": _cmd_normalize}[cfg.command]
        doc, lines = handler(cfg, system)
    if cfg.format == "json":
        json.dump(doc, out, indent=2, sort_keys=False)
        out.write("\n")
    else:
        out.write("\n".join(lines) + "\n")
    return 0


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ppsolve",
                                description="Least fixed points of max/min probabilistic polynomial systems.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("path", help="input file, or - for stdin")
    p.add_argument("--j", type=int, default=20, help="precision exponent: error <= 2^-j")
    p.add_argument("--epsilon", type=_fraction, default=Fraction(1, 1024))
    p.add_argument("--format", choices=("human", "json"), default="human")
    p.add_argument("--exact", action="store_true", help="print exact rationals")
    p.add_argument("--differential-lp", action="store_true",
                   help="use the LP path for pure systems and compare with Newton")
    p.add_argument("--override-precision", type=int, default=None,
                   help="precision exponent for policy extraction (certificate becomes heuristic)")
    p.add_argument("--flavor", choices=("pps", "max", "min", "maxmin"), default=None)
    p.add_argument("--objective", choices=("maximize", "minimize"), default="maximize",
                   help="objective used by convert")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        cfg = CliConfig(args.command, args.path, args.j, args.epsilon, args.format, args.exact,
                        args.differential_lp, args.override_precision, args.flavor, args.objective)
        return run(cfg)
    except (InputError, ParseError, ModelError, PolicyEnumerationError, ValueError) as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return 1
    except (GnmInvariantError, ArithmeticError, AssertionError) as exc:
        print(f"error: internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
