"""Command-line front end.

Subcommands: ``catalog`` (list pairs with validation summaries), ``validate``,
``model``, ``eval`` (single dual operation on a class literal), ``run``
(evaluate a file of cobordism words), ``series`` (Poincare series).

Exit codes: 0 success, 2 catalog/validation failure, 3 literal or word parse
error, 4 unsupported operation, 5 signature or label mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .catalog import (CatalogError, PairDatum, builtin_pairs, ensure_validated,
                      load_catalog, validate_pair)
from .dsl import (DegreeCapExceeded, Evaluator, SignatureError, check_signature,
                  normalize, parse as parse_word)
from .field import FieldError, field_from_name
from .grobner import series_quotient
from .literals import ParseError
from .models import TensorClass
from .whistle import (OperationError, WhistleModels, bv_operator,
                      dmu_whistle, dmu_whistle_op)

EXIT_OK = 0
EXIT_LOAD = 2
EXIT_PARSE = 3
EXIT_UNSUPPORTED = 4
EXIT_SIGNATURE = 5


@dataclass
class RunConfig:
    catalog_paths: list
    field: object | None
    cap: int | None
    fmt: str
    strict: bool
    seed: int

    def __post_init__(self):
        if self.cap is not None and self.cap < 2:
            raise CatalogError("degree cap must be at least 2")


def _config(args) -> RunConfig:
    fld = None
    if args.field:
        fld = field_from_name(args.field)
    return RunConfig(list(args.catalog or []), fld, args.cap, args.format,
                     args.strict, args.seed)


def _load_pairs(config: RunConfig) -> dict:
    pairs = {p.name: p for p in builtin_pairs()}
    for path in config.catalog_paths:
        for pair in load_catalog(path):
            pairs[pair.name] = pair  # user catalogs override builtins by name
    return pairs


def _get_pair(pairs: dict, name: str, config: RunConfig) -> PairDatum:
    pair = pairs.get(name)
    if pair is None:
        raise CatalogError(f"unknown pair {name!r}")
    if config.field is not None and config.field != pair.field:
        pair = pair.with_field(config.field)
    return pair


def _emit(payload, config: RunConfig) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_catalog(args) -> int:
    config = _config(args)
    try:
        pairs = _load_pairs(config)
    except CatalogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    rows = []
    for name in sorted(pairs):
        pair = _get_pair(pairs, name, config)
        cap = config.cap or 2 * sum(v.degree for v in pair.u_ring.variables)
        report = validate_pair(pair, degree_cap=cap, koszul_cap=min(cap, 8))
        quotient_dim = None
        check = report.get("poincare")
        if check and check.passed:
            quotient_dim = pair.restriction_quotient().total_dimension()
        rows.append({
            "name": pair.name,
            "field": pair.field.name,
            "group": pair.group.name,
            "subgroup": pair.subgroup.name,
            "rank": pair.rank,
            "status": report.summary(),
            "quotient_dimension": quotient_dim,
        })
    if config.fmt == "json":
        _emit({"pairs": rows}, config)
    else:
        for row in rows:
            dim = f", dim G/H quotient = {row['quotient_dimension']}" \
                if row["quotient_dimension"] is not None else ""
            print(f"{row['name']:12s} {row['field']:4s} rank {row['rank']}  "
                  f"{row['status']}{dim}")
    return EXIT_OK


def cmd_validate(args) -> int:
    config = _config(args)
    try:
        pairs = _load_pairs(config)
        pair = _get_pair(pairs, args.pair, config)
    except (CatalogError, FieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    report = validate_pair(pair, degree_cap=config.cap)
    if config.fmt == "json":
        _emit({"pair": pair.name, "field": pair.field.name, "ok": report.ok,
               "checks": [{"name": c.name, "passed": c.passed,
                           "mandatory": c.mandatory, "detail": c.detail}
                          for c in report.checks]}, config)
    else:
        for c in report.checks:
            status = "PASS" if c.passed else "FAIL"
            kind = "mandatory" if c.mandatory else "optional"
            print(f"{status}  {c.name:22s} [{kind}] {c.detail}")
        print(f"pair {pair.name}: {report.summary()}")
    return EXIT_OK if report.ok else EXIT_LOAD


def cmd_model(args) -> int:
    config = _config(args)
    try:
        pairs = _load_pairs(config)
        pair = _get_pair(pairs, args.pair, config)
        models = WhistleModels(pair, config.cap)
    except (CatalogError, FieldError, OperationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    loop_gens = ", ".join(f"{v.name}:{v.degree}"
                          for v in models.loop.even_ring.variables)
    odd = ", ".join(f"{n}:{d}" for n, d in zip(models.loop.odd_names,
                                               models.loop.odd_degrees))
    interval_rels = [models.interval.class_literal(
        TensorClass(models.interval, rel)) for rel in models.interval.relations]
    payload = {
        "pair": pair.name,
        "field": pair.field.name,
        "loop_model": {"even": loop_gens, "odd": odd},
        "whistle_model": {"even": ", ".join(
            f"{v.name}:{v.degree}" for v in models.whistle.even_ring.variables),
            "odd": odd},
        "interval_relations": interval_rels,
        "groebner_size": len(models.interval.quotient.groebner),
        "zeta": [[str(p) for p in row] for row in models.zeta.matrix.rows],
        "det_zeta": models.interval.class_literal(models.det_class),
    }
    try:
        jac = models.jacobian
        payload["fundamental_class"] = str(jac.lambda_w)
        payload["lambda"] = pair.field.to_str(jac.scalar)
        payload["b_top"] = pair.u_ring.mono_str(jac.b_top)
    except OperationError as exc:
        payload["fundamental_class"] = f"unavailable: {exc}"
    if config.fmt == "json":
        _emit(payload, config)
    else:
        print(f"pair {pair.name} over {pair.field.name}")
        print(f"  loop model:     K[{loop_gens}] (x) Lambda({odd})")
        print(f"  whistle model:  K[{payload['whistle_model']['even']}] (x) "
              f"Lambda({odd})")
        print(f"  interval model: quotient by {len(interval_rels)} relations, "
              f"Groebner basis size {payload['groebner_size']}")
        for rel in interval_rels:
            print(f"    {rel}")
        print(f"  zeta matrix (telescoping order {models.zeta.order}):")
        for row in payload["zeta"]:
            print("    [" + ", ".join(row) + "]")
        print(f"  det(zeta) class: {payload['det_zeta']}")
        if "lambda" in payload:
            print(f"  fundamental class: {payload['fundamental_class']} "
                  f"== {payload['lambda']} * {payload['b_top']} in the quotient")
        else:
            print(f"  fundamental class: {payload['fundamental_class']}")
    return EXIT_OK


_EVAL_OPS = ("dmu_whistle", "dmu_whistle_op", "composite_W_Wop",
             "composite_Wop_W", "bv")


def cmd_eval(args) -> int:
    config = _config(args)
    try:
        pairs = _load_pairs(config)
        pair = _get_pair(pairs, args.pair, config)
    except (CatalogError, FieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    if args.op not in _EVAL_OPS:
        print(f"error: unsupported op {args.op!r}; choose from {_EVAL_OPS}",
              file=sys.stderr)
        return EXIT_UNSUPPORTED
    try:
        models = WhistleModels(pair, config.cap)
    except OperationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    try:
        if args.op in ("dmu_whistle", "composite_W_Wop", "bv"):
            cls = models.loop.parse(args.cls)
        else:
            cls = models.interval.parse(args.cls)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    in_degree = cls.degree() if not getattr(cls, "is_zero", False) else None
    try:
        if args.op == "dmu_whistle":
            out = dmu_whistle(cls, models)
            rendered = models.interval.class_literal(out)
        elif args.op == "dmu_whistle_op":
            out = dmu_whistle_op(cls, models)
            rendered = str(out)
        elif args.op == "bv":
            out = bv_operator(cls)
            rendered = str(out)
        elif args.op == "composite_W_Wop":
            out = dmu_whistle_op(dmu_whistle(cls, models), models)
            rendered = str(out)
        else:
            out = dmu_whistle(dmu_whistle_op(cls, models), models)
            rendered = models.interval.class_literal(out)
    except OperationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    out_degree = out.degree()
    shift = (out_degree - in_degree
             if out_degree is not None and in_degree is not None else None)
    if config.fmt == "json":
        _emit({"pair": pair.name, "field": pair.field.name, "op": args.op,
               "input": args.cls, "output": rendered, "zero": out_degree is None,
               "degree_shift": shift, "up_to_scalar": False}, config)
    else:
        print(rendered)
    return EXIT_OK


def cmd_run(args) -> int:
    config = _config(args)
    try:
        pairs = _load_pairs(config)
        if config.field is not None:
            pairs = {name: _get_pair(pairs, name, config) for name in pairs}
    except (CatalogError, FieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    try:
        with open(args.file, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_LOAD
    evaluator = Evaluator(pairs, cap=config.cap, group=args.group)
    reports = []
    saw_unsupported = False
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            expr = normalize(parse_word(text))
            in_sig, out_sig = check_signature(expr, pairs)
            value = evaluator.evaluate(expr)
        except ParseError as exc:
            print(f"error: line {lineno}: {exc}", file=sys.stderr)
            return EXIT_PARSE
        except SignatureError as exc:
            print(f"error: line {lineno}: {exc}", file=sys.stderr)
            return EXIT_SIGNATURE
        except DegreeCapExceeded as exc:
            print(f"error: line {lineno}: {exc}", file=sys.stderr)
            return EXIT_LOAD
        except OperationError as exc:
            print(f"error: line {lineno}: {exc}", file=sys.stderr)
            return EXIT_LOAD
        entry = {
            "word": value.word,
            "line": lineno,
            "in_signature": [str(b) for b in in_sig],
            "out_signature": [str(b) for b in out_sig],
            "cap": value.cap,
            "zero": value.zero,
            "up_to_scalar": value.up_to_scalar,
            "unsupported": value.unsupported,
            "degree_shift": None if value.unsupported else value.degree_shift(),
            "entries": [] if value.unsupported else value.lines(),
        }
        if value.unsupported:
            saw_unsupported = True
        reports.append(entry)
    if config.fmt == "json":
        _emit({"reports": reports}, config)
    else:
        for entry in reports:
            print(f"== {entry['word']}")
            print(f"   geometric: {', '.join(entry['in_signature'])} -> "
                  f"{', '.join(entry['out_signature'])}  (cap {entry['cap']})")
            if entry["unsupported"]:
                print(f"   unsupported: {entry['unsupported']}")
                continue
            if entry["zero"]:
                print("   zero table")
                continue
            print(f"   degree shift: {entry['degree_shift']}")
            for line in entry["entries"]:
                print(f"   {line}")
    if saw_unsupported and config.strict:
        return EXIT_UNSUPPORTED
    return EXIT_OK


def cmd_series(args) -> int:
    config = _config(args)
    try:
        pairs = _load_pairs(config)
        pair = _get_pair(pairs, args.pair, config)
    except (CatalogError, FieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    report = ensure_validated(pair, config.cap)
    if not report.ok:
        print(f"error: pair {pair.name} failed validation: {report.summary()}",
              file=sys.stderr)
        return EXIT_LOAD
    cap = config.cap or 2 * sum(v.degree for v in pair.u_ring.variables)
    series = series_quotient([v.degree for v in pair.x_ring.variables],
                             [v.degree for v in pair.u_ring.variables], cap)
    if config.fmt == "json":
        _emit({"pair": pair.name, "closed_form": series.closed_form(),
               "coefficients": list(series.coefficients),
               "total": series.finite_total}, config)
    else:
        print(f"{pair.name}: {series.closed_form()}")
        print(f"  {series}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="octqft",
        description="Exact dual cobordism operations for classifying-space "
                    "string topology")
    parser.add_argument("--catalog", action="append", metavar="PATH",
                        help="extra catalog JSON file (may repeat; overrides "
                             "builtins by name)")
    parser.add_argument("--cap", type=int, default=None,
                        help="degree cap for graded tables and checks")
    parser.add_argument("--field", default=None, metavar="Q|Fp:<p>",
                        help="override the coefficient field")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--strict", action="store_true",
                        help="exit nonzero when a word is unsupported")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed recorded in the run configuration "
                             "(randomized property tests live in the test suite)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="list pairs with validation summaries")

    p = sub.add_parser("validate", help="full validation report for a pair")
    p.add_argument("pair")

    p = sub.add_parser("model", help="print the whistle-sector presentations")
    p.add_argument("pair")

    p = sub.add_parser("eval", help="evaluate one dual operation on a class")
    p.add_argument("pair")
    p.add_argument("op", help="|".join(_EVAL_OPS))
    p.add_argument("cls", metavar="class")

    p = sub.add_parser("run", help="evaluate a file of cobordism words")
    p.add_argument("file")
    p.add_argument("--group", default=None,
                   help="group name anchoring label-free words")

    p = sub.add_parser("series", help="Poincare series of a pair")
    p.add_argument("pair")
    return parser


_COMMANDS = {
    "catalog": cmd_catalog,
    "validate": cmd_validate,
    "model": cmd_model,
    "eval": cmd_eval,
    "run": cmd_run,
    "series": cmd_series,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD


if __name__ == "__main__":
    sys.exit(main())
