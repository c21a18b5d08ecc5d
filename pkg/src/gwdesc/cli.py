"""Batch command-line interface.

Subcommands: ``correlator`` (one exact value or a summed series),
``intersect`` (genus-0 cotangent integrals), ``transform`` (dump the
coordinate change and its inverse), ``potential`` (dump a generating
potential), ``validate`` (model diagnostics) and ``verify`` (identity
suites).  Exit codes: 0 success, 1 identity failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .engine import CorrelatorEngine, PrimaryTable, UnsupportedQueryError
from .exact import format_rational
from .fixtures import FIXTURE_NAMES, genus1_taut_table, load_fixture
from .geometry import GeometryModel, ModelError, load_geometry
from .moduli import TautTable, psi_integral_genus0
from .phase import (
    build_transform,
    potential_modified,
    potential_primary,
    potential_standard,
)
from .verify import SUITE_NAMES, run_suite

_TOKEN = re.compile(r"^tau\((\d+)(?:,(\d+))?\):([A-Za-z0-9_]+)$")


class CliError(ValueError):
    pass


def parse_insertions(text: str) -> list[tuple[int, int, str]]:
    """Parse "tau(d[,e]):label" tokens separated by commas."""
    tokens = re.split(r",(?=\s*tau\()", text.strip())
    out = []
    for pos, token in enumerate(tokens, start=1):
        token = token.strip()
        match = _TOKEN.match(token)
        if not match:
            raise CliError(f"insertion {pos} ({token!r}) is not of the form tau(d[,e]):label")
        d, e, label = match.groups()
        out.append((int(d), int(e) if e is not None else 0, label))
    return out


def parse_beta(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise CliError(f"curve class {text!r} must be a comma-separated integer vector") from exc


def resolve_model(args) -> tuple[GeometryModel, PrimaryTable, TautTable | None]:
    name = args.model
    if name in FIXTURE_NAMES:
        fixture = load_fixture(name)
        model, primary = fixture.model, fixture.primary
        taut = genus1_taut_table()
    else:
        model = load_geometry(name)
        primary = (
            PrimaryTable.from_file(model, args.primary)
            if getattr(args, "primary", None)
            else PrimaryTable(model)
        )
        taut = None
    if getattr(args, "taut", None):
        taut = TautTable.from_file(args.taut)
    return model, primary, taut


def _evaluate_query(engine: CorrelatorEngine, genus: int, beta, triples) -> object:
    if any(e for _, e, _ in triples):
        if genus != 0:
            raise CliError("insertions with pulled-back powers are genus-0 only")
        return engine.generalized(beta, triples)
    return engine.descendant(genus, beta, [(d, cls) for d, _, cls in triples])


def cmd_correlator(args) -> int:
    model, primary, taut = resolve_model(args)
    engine = CorrelatorEngine(model, primary, taut=taut)
    insertions = parse_insertions(args.ins)
    triples = [(d, e, model.class_from_map({label: 1})) for d, e, label in insertions]
    if args.beta is not None:
        beta = parse_beta(args.beta)
        if len(beta) != model.lattice_rank:
            raise CliError(f"curve class needs rank {model.lattice_rank}")
        print(format_rational(_evaluate_query(engine, args.genus, beta, triples)))
        return 0
    if args.qmax is None:
        raise CliError("give either --beta or --qmax")
    if args.genus != 0:
        raise CliError("summed series are genus-0 only")
    policy = model.policy(args.qmax)
    terms = {}
    for beta in policy.iter_effective():
        value = _evaluate_query(engine, 0, beta, triples)
        if value:
            terms[beta] = value
    from .exact import NovikovSeries

    print(NovikovSeries(policy, terms))
    return 0


def cmd_intersect(args) -> int:
    exponents = [int(part) for part in args.psi.split(",")]
    if len(exponents) != args.n:
        raise CliError(f"need exactly {args.n} exponents, got {len(exponents)}")
    print(format_rational(psi_integral_genus0(exponents)))
    return 0


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_transform(args) -> int:
    model, primary, taut = resolve_model(args)
    engine = CorrelatorEngine(model, primary, taut=taut)
    policy = model.policy(args.qmax, max_descendant=args.dmax)
    transform = build_transform(engine, policy)
    inverse = transform.inverse()
    if not transform.compose(inverse).is_identity():
        print("error: inverse does not compose to the identity", file=sys.stderr)
        return 1
    payload = {
        "model": model.name,
        "max_beta_degree": args.qmax,
        "max_descendant": args.dmax,
        "transform": transform.to_records(model),
        "inverse": inverse.to_records(model),
    }
    _emit(payload, args.out)
    return 0


def cmd_potential(args) -> int:
    model, primary, taut = resolve_model(args)
    engine = CorrelatorEngine(model, primary, taut=taut)
    policy = model.policy(args.qmax, max_x_degree=args.xdeg, max_descendant=args.dmax)
    builder = {
        "standard": potential_standard,
        "modified": potential_modified,
        "primary": potential_primary,
    }[args.which]
    potential = builder(engine, policy)
    payload = {
        "model": model.name,
        "which": args.which,
        "max_beta_degree": args.qmax,
        "max_x_degree": args.xdeg,
        "max_descendant": args.dmax,
        "coefficients": potential.to_records(model),
    }
    _emit(payload, args.out)
    return 0


def cmd_validate(args) -> int:
    if args.model in FIXTURE_NAMES:
        model = load_fixture(args.model).model
    else:
        with open(args.model, encoding="utf-8") as handle:
            model = GeometryModel.from_dict(json.load(handle))
    report = model.validate()
    print(report)
    return 0 if report.ok else 2


def cmd_verify(args) -> int:
    model, primary, _ = resolve_model(args)
    names = list(SUITE_NAMES) if args.suite == "all" else [args.suite]
    overall = True
    for name in names:
        result = run_suite(
            name,
            model,
            primary,
            qmax=args.qmax,
            xdeg=args.xdeg,
            dmax=args.dmax,
            nmax=args.nmax,
            count=args.count,
            seed=args.seed,
        )
        print(result.render())
        overall = overall and result.ok
    return 0 if overall else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwdesc",
        description="Exact genus-zero descendant correlators from finite quantum-cohomology input.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p):
        p.add_argument("--model", required=True, help="fixture name (P1, P2, point) or geometry JSON path")
        p.add_argument("--primary", help="primary-table JSON path (for file models)")
        p.add_argument("--taut", help="tautological-table JSON path")

    p = sub.add_parser("correlator", help="evaluate one correlator or its summed series")
    add_model_flags(p)
    p.add_argument("--beta", help="curve class, e.g. '2' or '1,0'")
    p.add_argument("--qmax", type=int, help="sum the series up to this class degree instead")
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--ins", required=True, help="insertions, e.g. 'tau(1):one,tau(0,2):h'")
    p.set_defaults(func=cmd_correlator)

    p = sub.add_parser("intersect", help="genus-0 cotangent-power integral")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--psi", required=True, help="comma-separated exponents")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("transform", help="dump the coordinate change and its inverse")
    add_model_flags(p)
    p.add_argument("--qmax", type=int, default=1)
    p.add_argument("--dmax", type=int, default=2)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("potential", help="dump a generating potential")
    add_model_flags(p)
    p.add_argument("--which", choices=("standard", "modified", "primary"), default="standard")
    p.add_argument("--qmax", type=int, default=2)
    p.add_argument("--xdeg", type=int, default=3)
    p.add_argument("--dmax", type=int, default=1)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("validate", help="run model diagnostics")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("verify", help="run identity suites")
    add_model_flags(p)
    p.add_argument("--suite", default="all", choices=SUITE_NAMES + ("all",))
    p.add_argument("--qmax", type=int, default=3)
    p.add_argument("--xdeg", type=int, default=4)
    p.add_argument("--dmax", type=int, default=3)
    p.add_argument("--nmax", type=int, default=7)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=20240801)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ModelError, UnsupportedQueryError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
