"""Command-line interface: ``ltlmine <command> ...``.

Exit codes: 0 success, 1 user error, 2 no formula exists within the limits,
3 deadline reached.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .automata import DfaTooLarge, to_dfa
from .bench import BenchSpec, format_rows, run_bench
from .dtree import learn_tree
from .formula import FormulaSyntaxError, dag_size, parse_formula, print_formula
from .generate import SampleGenerationError, gen_sample, inject_noise
from .learning import LearnStatus, learn_exact, learn_noisy
from .occ import OccConfig, OccStatus, learn_minimal_enumerative, learn_minimal_guided
from .traces import SampleFormatError, misclassification, parse_sample, serialize_sample

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNSAT = 2
EXIT_TIMEOUT = 3


class UserError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _unit_float(text: str) -> float:
    value = float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"expected a number in [0, 1], got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _csv_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _float_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values or not all(0 <= v <= 1 for v in values):
        raise argparse.ArgumentTypeError(f"expected numbers in [0, 1], got {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ltlmine", description="Learn LTLf formulas from example traces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("learn", help="learn a formula from a labeled sample")
    p.add_argument("--input", "-i", required=True, help="sample file (.trc), '-' for stdin")
    p.add_argument("--mode", choices=("exact", "noisy", "tree"), default="exact")
    p.add_argument("--kappa", type=_unit_float, default=0.10, help="misclassification threshold")
    p.add_argument("--max-size", type=_positive_int, default=8)
    p.add_argument("--timeout", type=_positive_float, default=None, help="seconds")
    p.add_argument("--strategy", choices=("decision", "optimize"), default="decision",
                   help="noisy mode: cardinality bound or maximization per size")
    p.add_argument("--predicate-size", type=_positive_int, default=3, help="tree mode")
    p.add_argument("--max-depth", type=_positive_int, default=4, help="tree mode")
    p.add_argument("--output", choices=("text", "json"), default="text")

    p = sub.add_parser("eval", help="misclassification of a formula on a sample")
    p.add_argument("--formula", "-f", required=True)
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", choices=("text", "json"), default="text")

    p = sub.add_parser("gen", help="generate a sample from a ground-truth formula")
    p.add_argument("--formula", "-f", required=True)
    p.add_argument("--pos", type=_positive_int, default=150)
    p.add_argument("--neg", type=_nonneg_int, default=150)
    p.add_argument("--len-min", type=_positive_int, default=2)
    p.add_argument("--len-max", type=_positive_int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--aps", type=_csv_list, default=None,
                   help="comma-separated proposition names (default: those of the formula)")
    p.add_argument("--out", "-o", default="-")

    p = sub.add_parser("noise", help="flip the labels of a fraction of the traces")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--rate", type=_unit_float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o", default="-")

    p = sub.add_parser("occ", help="language-minimal formula from positive traces")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--max-size", type=_positive_int, default=3)
    p.add_argument("--method", choices=("guided", "enumerative"), default="guided")
    p.add_argument("--all", action="store_true", help="list every minimal language (enumerative)")
    p.add_argument("--timeout", type=_positive_float, default=None)
    p.add_argument("--output", choices=("text", "json"), default="text")

    p = sub.add_parser("bench", help="run the benchmark grid and write CSV")
    p.add_argument("--spec", help="bench spec JSON file; flags below override its fields")
    p.add_argument("--ground-truths", type=lambda s: [x.strip() for x in s.split(";") if x.strip()],
                   default=None, help="semicolon-separated formulas")
    p.add_argument("--aps", type=_csv_list, default=None)
    p.add_argument("--pos", type=_positive_int, default=None)
    p.add_argument("--neg", type=_positive_int, default=None)
    p.add_argument("--len-min", type=_positive_int, default=None)
    p.add_argument("--len-max", type=_positive_int, default=None)
    p.add_argument("--noise", type=_float_list, default=None, help="comma-separated noise rates")
    p.add_argument("--kappas", type=_float_list, default=None)
    p.add_argument("--modes", type=_csv_list, default=None)
    p.add_argument("--max-size", type=_positive_int, default=None)
    p.add_argument("--timeout", type=_positive_float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=_positive_int, default=None)
    p.add_argument("--out", "-o", default="-")

    p = sub.add_parser("dfa", help="print the DFA of a formula in DOT format")
    p.add_argument("--formula", "-f", required=True)
    p.add_argument("--aps", type=_csv_list, default=None)
    p.add_argument("--out", "-o", default="-")
    return parser


# ---------------------------------------------------------------------------


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UserError(f"cannot read {path}: {exc.strerror}") from None


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UserError(f"cannot write {path}: {exc.strerror}") from None


def _load_sample(path: str):
    try:
        return parse_sample(_read_text(path))
    except SampleFormatError as exc:
        raise UserError(f"{path}: {exc}") from None


def _parse(text: str):
    try:
        return parse_formula(text)
    except FormulaSyntaxError as exc:
        raise UserError(f"cannot parse formula {text!r}: {exc}") from None


def _emit(payload: dict, output: str) -> None:
    if output == "json":
        print(json.dumps(payload))
        return
    for key, value in payload.items():
        if key == "tree":
            continue
        print(f"{key}: {'-' if value is None else value}")


_LEARN_EXIT = {
    LearnStatus.EXACT: EXIT_OK,
    LearnStatus.WITHIN_THRESHOLD: EXIT_OK,
    LearnStatus.UNSAT: EXIT_UNSAT,
    LearnStatus.TIMEOUT: EXIT_TIMEOUT,
}


def _cmd_learn(args) -> int:
    sample = _load_sample(args.input)
    if not sample.positives:
        raise UserError("the sample has no positive traces")
    if args.mode == "exact":
        res = learn_exact(sample, max_n=args.max_size, timeout=args.timeout)
        payload = res.to_dict()
    elif args.mode == "noisy":
        res = learn_noisy(sample, kappa=args.kappa, max_n=args.max_size, mode=args.strategy, timeout=args.timeout)
        payload = res.to_dict()
    else:
        tree, res = learn_tree(
            sample, kappa=args.kappa, predicate_size=args.predicate_size,
            max_depth=args.max_depth, timeout=args.timeout,
        )
        payload = res.to_dict()
        payload["tree"] = tree.to_dict()
    _emit(payload, args.output)
    return _LEARN_EXIT[res.status]


def _cmd_eval(args) -> int:
    sample = _load_sample(args.input)
    f = _parse(args.formula)
    try:
        count, rate = misclassification(sample, f)
    except ValueError as exc:
        raise UserError(str(exc)) from None
    payload = {
        "formula": print_formula(f),
        "size": dag_size(f),
        "misclassified": count,
        "total": len(sample),
        "rate": float(rate),
    }
    if args.output == "json":
        print(json.dumps(payload))
    else:
        print(f"misclassified: {count}/{len(sample)}")
        print(f"rate: {float(rate)}")
    return EXIT_OK


def _cmd_gen(args) -> int:
    f = _parse(args.formula)
    if args.len_min > args.len_max:
        raise UserError("--len-min must not exceed --len-max")
    try:
        sample = gen_sample(f, args.pos, args.neg, args.len_min, args.len_max, args.seed, args.aps)
    except (SampleGenerationError, ValueError) as exc:
        raise UserError(str(exc)) from None
    _write_text(args.out, serialize_sample(sample))
    return EXIT_OK


def _cmd_noise(args) -> int:
    sample = _load_sample(args.input)
    _write_text(args.out, serialize_sample(inject_noise(sample, args.rate, args.seed)))
    return EXIT_OK


def _cmd_occ(args) -> int:
    sample = _load_sample(args.input)
    if sample.negatives:
        raise UserError("one-class learning takes positive traces only; remove the '---' section")
    if not sample.positives:
        raise UserError("the sample has no positive traces")
    cfg = OccConfig(n=args.max_size, timeout=args.timeout)
    try:
        if args.method == "enumerative" or args.all:
            res = learn_minimal_enumerative(sample, cfg)
        else:
            res = learn_minimal_guided(sample, cfg)
    except DfaTooLarge as exc:
        raise UserError(str(exc)) from None
    payload = res.to_dict(sample)
    if args.all:
        payload["minimal"] = [print_formula(g) for g in res.minimal]
    if args.output == "json":
        print(json.dumps(payload))
    else:
        _emit({k: v for k, v in payload.items() if k != "minimal"}, "text")
        for g in payload.get("minimal", []):
            print(f"minimal: {g}")
    if res.status is OccStatus.UNSAT:
        return EXIT_UNSAT
    if res.status in (OccStatus.TIMEOUT, OccStatus.NOT_CERTIFIED):
        return EXIT_TIMEOUT
    return EXIT_OK


_BENCH_FLAGS = {
    "ground_truths": "ground_truths",
    "aps": "propositions",
    "pos": "pos",
    "neg": "neg",
    "len_min": "len_min",
    "len_max": "len_max",
    "noise": "noise_rates",
    "kappas": "kappas",
    "modes": "modes",
    "max_size": "max_size",
    "timeout": "timeout",
    "seed": "seed",
    "jobs": "jobs",
}


def _cmd_bench(args) -> int:
    data: dict = {}
    if args.spec:
        try:
            data = json.loads(_read_text(args.spec))
        except json.JSONDecodeError as exc:
            raise UserError(f"{args.spec}: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise UserError(f"{args.spec}: expected a JSON object")
    for flag, name in _BENCH_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            data[name] = value
    try:
        spec = BenchSpec.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UserError(f"invalid bench spec: {exc}") from None
    rows = run_bench(spec)
    _write_text(args.out, format_rows(rows))
    return EXIT_OK


def _cmd_dfa(args) -> int:
    f = _parse(args.formula)
    try:
        dfa = to_dfa(f, args.aps)
    except (DfaTooLarge, ValueError) as exc:
        raise UserError(str(exc)) from None
    _write_text(args.out, dfa.to_dot())
    return EXIT_OK


_COMMANDS = {
    "learn": _cmd_learn,
    "eval": _cmd_eval,
    "gen": _cmd_gen,
    "noise": _cmd_noise,
    "occ": _cmd_occ,
    "bench": _cmd_bench,
    "dfa": _cmd_dfa,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except UserError as exc:
        print(f"ltlmine {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
