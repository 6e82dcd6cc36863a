"""Operator-facing command line.

Subcommands: ``ingest`` (append evidence or assessments), ``evaluate``
(score one merchant), ``compare`` (rank several), ``rules`` (generate or
validate rulebase files), ``surface`` (export a mapping-surface CSV).

Exit codes: 0 success, 1 domain error, 2 usage error, 3 storage error.
Payloads go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Sequence

from .errors import StorageFailure, TrustError, UnknownVariable
from .fuzzy import (
    dump_rulebase,
    generate_rulebase,
    make_variable,
    surface_grid,
    validate_rulebase_data,
)
from .pipeline import (
    PipelineConfig,
    TrustReport,
    compare_merchants,
    evaluate_merchant,
    load_config,
    merchant_rulebase,
    module_rulebase,
)
from .store import (
    STORE_ENV_VAR,
    DirectAssessment,
    EvidenceRecord,
    EvidenceStore,
    NEGATIVE,
    POSITIVE,
    record_from_dict,
)
from .variables import MERCHANT_MODULE, normalize_name

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_STORAGE = 3


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _assessment(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'c,t_scaled', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}") from exc


def _module_override(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected 'Module=value', got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a numeric value in {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="certaintrust",
        description="Evidence-based merchant trust scoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_store(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--store",
            default=None,
            help=f"evidence log path (default: ${STORE_ENV_VAR})",
        )

    def add_config(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None, help="pipeline config JSON")

    p = sub.add_parser("ingest", help="append evidence or assessments to the store")
    add_store(p)
    p.add_argument("--merchant", help="merchant identifier")
    p.add_argument("--variable", help="pipeline variable name")
    p.add_argument("--positive", type=_nonneg_int, default=None, metavar="N")
    p.add_argument("--negative", type=_nonneg_int, default=None, metavar="N")
    p.add_argument("--assessment", type=_assessment, default=None, metavar="C,T")
    p.add_argument("--from-file", default=None, metavar="PATH",
                   help="append records from a JSON-lines file")
    p.add_argument("--timestamp", type=int, default=None,
                   help="record timestamp (default: now)")
    p.add_argument("--allow-unknown", action="store_true",
                   help="accept variables outside the configured twelve")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("evaluate", help="score one merchant")
    add_store(p)
    add_config(p)
    p.add_argument("--merchant", required=True)
    p.add_argument("--format", choices=("human", "json"), default="human")
    p.add_argument("--module-trust", type=_module_override, action="append",
                   default=None, metavar="MODULE=T",
                   help="pin a module trust percentage directly (repeatable)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="rank merchants by trust")
    add_store(p)
    add_config(p)
    p.add_argument("--merchant", action="append", required=True,
                   help="merchant identifier (repeat for each)")
    p.add_argument("--format", choices=("human", "json"), default="human")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("rules", help="generate or validate rulebase files")
    rules_sub = p.add_subparsers(dest="rules_command", required=True)
    g = rules_sub.add_parser("generate", help="write a full Cartesian rulebase")
    g.add_argument("--inputs", type=int, required=True, metavar="N")
    g.add_argument("--out", required=True, metavar="PATH")
    g.set_defaults(func=cmd_rules_generate)
    v = rules_sub.add_parser("validate", help="check a rulebase file")
    v.add_argument("path")
    v.set_defaults(func=cmd_rules_validate)

    p = sub.add_parser("surface", help="export a mapping surface as CSV")
    add_config(p)
    p.add_argument("--module", required=True,
                   help="Existence, Affiliation, Fulfillment, Policy, or Merchant Trust")
    p.add_argument("--x", required=True, help="input swept along x")
    p.add_argument("--y", required=True, help="input swept along y")
    p.add_argument("--resolution", type=int, default=51, metavar="K")
    p.add_argument("--out", required=True, metavar="PATH.csv")
    p.set_defaults(func=cmd_surface)

    return parser


def _open_store(args: argparse.Namespace, permissive: bool = False) -> EvidenceStore | None:
    path = args.store or os.environ.get(STORE_ENV_VAR)
    if not path:
        print(f"error: no store given (use --store or ${STORE_ENV_VAR})", file=sys.stderr)
        return None
    return EvidenceStore(path, permissive=permissive)


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    if args.config:
        return load_config(args.config)
    return PipelineConfig()


def cmd_ingest(args: argparse.Namespace) -> int:
    store = _open_store(args, permissive=args.allow_unknown)
    if store is None:
        return EXIT_USAGE
    now = args.timestamp if args.timestamp is not None else int(time.time())

    records = []
    if args.from_file is not None:
        if args.merchant or args.variable:
            print("error: --from-file cannot be combined with --merchant/--variable",
                  file=sys.stderr)
            return EXIT_USAGE
        try:
            with open(args.from_file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise StorageFailure(f"cannot read {args.from_file}: {exc}") from exc
        for i, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(record_from_dict(json.loads(line)))
            except (json.JSONDecodeError, ValueError) as exc:
                raise ValueError(f"{args.from_file}:{i}: {exc}") from exc
    else:
        if not args.merchant or not args.variable:
            print("error: --merchant and --variable are required", file=sys.stderr)
            return EXIT_USAGE
        if args.positive is None and args.negative is None and args.assessment is None:
            print("error: nothing to ingest (use --positive/--negative/--assessment)",
                  file=sys.stderr)
            return EXIT_USAGE
        variable = store.normalize(args.variable)
        for _ in range(args.positive or 0):
            records.append(EvidenceRecord(args.merchant, variable, POSITIVE, now))
        for _ in range(args.negative or 0):
            records.append(EvidenceRecord(args.merchant, variable, NEGATIVE, now))
        if args.assessment is not None:
            c, t_scaled = args.assessment
            records.append(DirectAssessment(args.merchant, variable, c, t_scaled, now))

    for record in records:
        store.append(record)
    print(f"Appended {len(records)} record(s) to {store.path}")
    return EXIT_OK


def _format_report(report: TrustReport) -> str:
    lines = [
        f"Merchant: {report.merchant}",
        f"Merchant trust: {report.merchant_trust:.4f}%",
        f"Trust class: {report.trust_class}",
        f"Behavioral probability: {report.behavioral.value:+.4f}% ({report.behavioral.direction})",
        "Module trusts:",
    ]
    for name, value in report.module_trusts.items():
        lines.append(f"  {name:<24} {value:>9.4f}%")
    lines.append("Variable trusts:")
    for name, value in report.variable_trusts.items():
        lines.append(f"  {name:<24} {value:>9.4f}%")
    return "\n".join(lines)


def cmd_evaluate(args: argparse.Namespace) -> int:
    store = _open_store(args)
    if store is None:
        return EXIT_USAGE
    cfg = _load_config(args)
    overrides = dict(args.module_trust) if args.module_trust else None
    report = evaluate_merchant(args.merchant, cfg, store=store, module_overrides=overrides)
    if args.format == "json":
        print(report.to_json())
    else:
        print(_format_report(report))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    merchants = args.merchant
    if len(merchants) < 2:
        print("error: compare needs at least two --merchant arguments", file=sys.stderr)
        return EXIT_USAGE
    store = _open_store(args)
    if store is None:
        return EXIT_USAGE
    cfg = _load_config(args)
    ordered = compare_merchants([evaluate_merchant(m, cfg, store=store) for m in merchants])
    if args.format == "json":
        print(json.dumps([r.to_dict() for r in ordered], indent=2, sort_keys=True))
    else:
        print(f"{'rank':<6}{'merchant':<20}{'trust%':>10}{'behavioral%':>14}  class")
        for rank, report in enumerate(ordered, start=1):
            print(
                f"{rank:<6}{report.merchant:<20}{report.merchant_trust:>10.4f}"
                f"{report.behavioral.value:>+14.4f}  {report.trust_class}"
            )
    return EXIT_OK


def cmd_rules_generate(args: argparse.Namespace) -> int:
    if args.inputs < 1:
        print("error: --inputs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    inputs = [make_variable(f"input_{i + 1}", 0.0, 100.0) for i in range(args.inputs)]
    rb = generate_rulebase(inputs, make_variable("output", 0.0, 100.0))
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dump_rulebase(rb, policy="mean"))
    except OSError as exc:
        raise StorageFailure(f"cannot write {args.out}: {exc}") from exc
    print(f"Wrote {len(rb.rules)} rules to {args.out}")
    return EXIT_OK


def _rule_lines(text: str) -> list[int]:
    """1-based line number of each rule entry in a rulebase file."""
    return [i for i, line in enumerate(text.splitlines(), start=1) if '"if"' in line]


def cmd_rules_validate(args: argparse.Namespace) -> int:
    try:
        with open(args.path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise StorageFailure(f"cannot read {args.path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"{args.path}:{exc.lineno}: not valid JSON: {exc.msg}", file=sys.stderr)
        return EXIT_DOMAIN
    issues = validate_rulebase_data(data)
    if issues:
        lines = _rule_lines(text)
        for issue in issues:
            location = args.path
            if issue.startswith("rule "):
                number = int(issue.split()[1].rstrip(":"))
                if 1 <= number <= len(lines):
                    location = f"{args.path}:{lines[number - 1]}"
            print(f"{location}: {issue}", file=sys.stderr)
        print(f"error: {len(issues)} issue(s) found", file=sys.stderr)
        return EXIT_DOMAIN
    rules = data.get("rules", [])
    print(f"OK: {len(rules)} rules over {len(data['inputs'])} inputs")
    return EXIT_OK


def cmd_surface(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    names = cfg.module_names() + (MERCHANT_MODULE,)
    try:
        module = normalize_name(args.module, names)
    except UnknownVariable:
        print(f"error: unknown module {args.module!r} (expected one of: {', '.join(names)})",
              file=sys.stderr)
        return EXIT_USAGE
    if module == MERCHANT_MODULE:
        rb = merchant_rulebase(cfg)
        inputs = cfg.module_names()
    else:
        spec = next(m for m in cfg.modules if m.name == module)
        rb = module_rulebase(spec)
        inputs = spec.variables
    try:
        x_index = inputs.index(normalize_name(args.x, inputs))
        y_index = inputs.index(normalize_name(args.y, inputs))
    except UnknownVariable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if x_index == y_index:
        print("error: --x and --y must name different inputs", file=sys.stderr)
        return EXIT_USAGE
    if args.resolution < 2:
        print("error: --resolution must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    grid = surface_grid(rb, x_index, y_index, resolution=args.resolution)
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(grid.to_csv())
    except OSError as exc:
        raise StorageFailure(f"cannot write {args.out}: {exc}") from exc
    print(f"Wrote {args.resolution}x{args.resolution} surface for {module} to {args.out}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (StorageFailure, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_STORAGE
    except (TrustError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
