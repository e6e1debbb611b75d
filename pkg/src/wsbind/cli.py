"""Command-line front door: validate, discover, abstract, bind, explain.

Exit codes: 0 success, 1 no candidate / unbound activity, 2 invalid input,
3 internal error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import bpel
from .errors import AlreadyBound, NoCandidate, UnboundActivity, UnknownActivity, WsbindError
from .matcher import DEFAULT_POLICY_WEIGHT, DEFAULT_TAU, Weights, discover, match_activity
from .ontology import load_ontology
from .policy import DEFAULT_ASSERTION_TAU
from .process import parse_process, validate_process
from .registry import load_registry, parse_service
from .report import explain_lines, parse_report, serialize_report

EXIT_OK = 0
EXIT_UNMATCHED = 1
EXIT_INVALID = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    process_path: Path
    registry_dir: Optional[Path] = None
    ontology_path: Optional[Path] = None
    tau: int = DEFAULT_TAU
    weights: Weights = Weights()
    policy_weight: float = DEFAULT_POLICY_WEIGHT
    assertion_tau: int = DEFAULT_ASSERTION_TAU
    ignore_policy: bool = False
    rank: int = 1
    out_path: Optional[Path] = None
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.tau < 0 or self.assertion_tau < 0:
            raise UsageError("--tau and --assertion-tau must be >= 0")
        if self.rank < 1:
            raise UsageError("--rank must be >= 1")
        if not 0.0 <= self.policy_weight <= 1.0:
            raise UsageError("--policy-weight must lie in [0, 1]")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")


def _weights(text: str) -> Weights:
    try:
        return Weights.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wsbind", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("validate", help="check a process document")
    p.add_argument("--process", required=True, type=Path)

    p = subs.add_parser("discover", help="rank registered services for each abstract activity")
    p.add_argument("--process", required=True, type=Path)
    p.add_argument("--registry", required=True, type=Path)
    p.add_argument("--ontology", required=True, type=Path)
    p.add_argument("--tau", type=int, default=DEFAULT_TAU)
    p.add_argument("--weights", type=_weights, default=Weights(), metavar="d,f,i,o")
    p.add_argument("--policy-weight", type=float, default=DEFAULT_POLICY_WEIGHT)
    p.add_argument("--assertion-tau", type=int, default=DEFAULT_ASSERTION_TAU)
    p.add_argument("--ignore-policy", action="store_true")
    p.add_argument("--out", type=Path)
    p.add_argument("--jobs", type=int, default=1)

    p = subs.add_parser("abstract", help="emit the abstract BPEL document")
    p.add_argument("--process", required=True, type=Path)
    p.add_argument("--out", type=Path)

    p = subs.add_parser("bind", help="emit a BPEL document bound to discovered services")
    p.add_argument("--process", required=True, type=Path)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matches", type=Path, help="discovery report")
    src.add_argument("--binding", type=Path, help="explicit binding selection file")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--out", type=Path)

    p = subs.add_parser("explain", help="show the staged match of one activity against one service")
    p.add_argument("--process", required=True, type=Path)
    p.add_argument("--activity", required=True)
    p.add_argument("--service", required=True, type=Path)
    p.add_argument("--ontology", required=True, type=Path)
    p.add_argument("--tau", type=int, default=DEFAULT_TAU)
    p.add_argument("--weights", type=_weights, default=Weights(), metavar="d,f,i,o")
    return parser


def _emit(data: bytes, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        out.write_bytes(data)


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def cmd_validate(args) -> int:
    try:
        doc = parse_process(_read(args.process), strict=False)
    except WsbindError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    violations = validate_process(doc)
    if violations:
        for v in violations:
            print(v)
        return EXIT_INVALID
    print("OK")
    return EXIT_OK


def cmd_discover(args) -> int:
    config = RunConfig(
        process_path=args.process,
        registry_dir=args.registry,
        ontology_path=args.ontology,
        tau=args.tau,
        weights=args.weights,
        policy_weight=args.policy_weight,
        assertion_tau=args.assertion_tau,
        ignore_policy=args.ignore_policy,
        out_path=args.out,
        jobs=args.jobs,
    )
    doc = parse_process(_read(config.process_path))
    ontology = load_ontology(_read(config.ontology_path))
    try:
        registry = load_registry(config.registry_dir, jobs=config.jobs)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    report = discover(
        doc, registry, ontology,
        tau=config.tau,
        weights=config.weights,
        policy_weight=config.policy_weight,
        ignore_policy=config.ignore_policy,
        assertion_tau=config.assertion_tau,
        jobs=config.jobs,
    )
    _emit(serialize_report(report), config.out_path)
    missing = [a.activity_id for a in report.activities if not a.candidates]
    for aid in missing:
        print(f"no candidate for activity {aid}", file=sys.stderr)
    return EXIT_UNMATCHED if missing else EXIT_OK


def cmd_abstract(args) -> int:
    doc = parse_process(_read(args.process))
    _emit(bpel.serialize_bpel(bpel.emit_abstract_bpel(doc)), args.out)
    return EXIT_OK


def cmd_bind(args) -> int:
    if args.rank < 1:
        raise UsageError("--rank must be >= 1")
    doc = parse_process(_read(args.process))
    abstract = bpel.emit_abstract_bpel(doc)
    if args.matches is not None:
        report = parse_report(_read(args.matches))
        if report.process_id != doc.id:
            raise UsageError(f"report is for process {report.process_id!r}, not {doc.id!r}")
        selection = bpel.select_top(report, args.rank)
    else:
        selection = bpel.parse_binding(_read(args.binding))
    try:
        bound = bpel.bind(abstract, selection)
    except (UnboundActivity, AlreadyBound) as exc:
        print(exc, file=sys.stderr)
        return EXIT_UNMATCHED
    _emit(bpel.serialize_bpel(bound), args.out)
    return EXIT_OK


def cmd_explain(args) -> int:
    if args.tau < 0:
        raise UsageError("--tau must be >= 0")
    doc = parse_process(_read(args.process))
    service = parse_service(_read(args.service))
    ontology = load_ontology(_read(args.ontology))
    try:
        activity = doc.activity(args.activity)
    except KeyError:
        raise UsageError(f"unknown activity {args.activity!r}") from None
    if not activity.is_abstract or activity.kind != "task":
        raise UsageError(f"activity {args.activity!r} is not an abstract task")
    result = match_activity(activity, service, ontology, args.tau, args.weights, doc.type_table())
    for line in explain_lines(activity.id, service.id, args.tau, result):
        print(line)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "discover": cmd_discover,
    "abstract": cmd_abstract,
    "bind": cmd_bind,
    "explain": cmd_explain,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (NoCandidate, UnboundActivity) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNMATCHED
    except UnknownActivity as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (UsageError, WsbindError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
