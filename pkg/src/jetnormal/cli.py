"""Command-line interface.

Exit codes: 0 success, 1 structural or parse error, 2 domain error,
3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any

from .connection_normalizer import normalize_connection, normalize_connection_checked, torsion
from .errors import InvariantViolation, JetError, StructuralError
from .jet_groups import ConnectionJet, MetricJet, PoissonJet, TensorJet, UnipotentFactors
from .jet_algebra import ScalarJet
from .metric_normalizer import metric_invariants, normalize_metric
from .natural_ops import laplacian_at_point
from .quantization import DEFAULT_HBAR_ORDER, canonical_star_at_point, poisson_bracket
from .serialization import dumps, format_rational, jet_to_document, parse_jet_file
from .verify import SUITES, run_suites


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load(path: str, expected: type, what: str):
    source = sys.stdin.read() if path == "-" else Path(path)
    jet = parse_jet_file(source)
    if not isinstance(jet, expected):
        raise StructuralError(f"{what} must be a {expected.__name__} document, got {type(jet).__name__}")
    return jet


def _matrix(mat) -> list[list[str]]:
    return [[format_rational(x) for x in row] for row in mat]


def _factors(normalizer: UnipotentFactors, packing: str) -> list[dict]:
    out = []
    for degree, term in enumerate(normalizer.terms, start=2):
        vec = TensorJet(normalizer.dim, degree, (1, 0), {(a,): c for a, c in enumerate(term)})
        out.append({"degree": degree, "term": jet_to_document(vec, packing)})
    return out


def _certified(doc: dict) -> dict:
    failed = sorted(k for k, v in doc["certification"].items() if not v)
    if failed:
        raise InvariantViolation(f"certification failed: {', '.join(failed)}")
    return doc


def cmd_normalize_metric(args) -> dict:
    h = _load(args.input, MetricJet, "metric")
    nf = normalize_metric(h, args.order)
    return _certified({
        "command": "normalize-metric",
        "order": nf.order,
        "h0": _matrix(nf.h0),
        "invariants": [
            {"degree": n, "slot": jet_to_document(a, args.packing)} for n, a in enumerate(nf.invariants, start=2)
        ],
        "normal_form": jet_to_document(nf.jet(), args.packing),
        "normalizer": {"factors": _factors(nf.normalizer, args.packing), "chart": jet_to_document(nf.chart(), args.packing)},
        "certification": nf.certify(h),
    })


def cmd_metric_invariants(args) -> dict:
    h = _load(args.input, MetricJet, "metric")
    inv = metric_invariants(h, args.order)
    nf = normalize_metric(h, args.order)
    return _certified({
        "command": "metric-invariants",
        "det_inverse": format_rational(inv.det_inverse),
        "h0": _matrix(inv.h0),
        "curvatures": [
            {"degree": n, "slot": jet_to_document(a, args.packing)} for n, a in enumerate(inv.curvatures, start=2)
        ],
        "certification": nf.certify(h),
    })


def cmd_normalize_connection(args) -> dict:
    theta = _load(args.input, ConnectionJet, "connection")
    nf = normalize_connection_checked(theta, args.order)
    cert = nf.certify(theta)
    cert["closed_form_matches_probing"] = True  # the checked solver raises otherwise
    return _certified({
        "command": "normalize-connection",
        "order": nf.order,
        "invariants": [
            {"degree": n, "slot": jet_to_document(p, args.packing)} for n, p in enumerate(nf.invariants)
        ],
        "normal_form": jet_to_document(nf.jet(), args.packing),
        "normalizer": {"factors": _factors(nf.normalizer, args.packing), "chart": jet_to_document(nf.chart(), args.packing)},
        "certification": cert,
    })


def cmd_torsion(args) -> dict:
    theta = _load(args.input, ConnectionJet, "connection")
    psi0 = torsion(theta)
    expected = theta.truncate(0).antisymmetric_part()
    return _certified({
        "command": "torsion",
        "torsion": jet_to_document(psi0, args.packing),
        "certification": {"equals_antisymmetric_part": psi0 == expected},
    })


def cmd_adapted_chart(args) -> dict:
    theta = _load(args.input, ConnectionJet, "connection")
    n = theta.order if args.order is None else args.order
    nf = normalize_connection(theta, n)
    return _certified({
        "command": "adapted-chart",
        "order": n,
        "chart": jet_to_document(nf.chart(), args.packing),
        "factors": _factors(nf.normalizer, args.packing),
        "certification": nf.certify(theta),
    })


def cmd_laplacian(args) -> dict:
    h = _load(args.metric, MetricJet, "metric")
    v = _load(args.function, ScalarJet, "function")
    value = laplacian_at_point(h, v)
    return {"command": "laplacian", "value": format_rational(value)}


def cmd_star(args) -> dict:
    theta = _load(args.connection, ConnectionJet, "connection")
    omega = _load(args.poisson, PoissonJet, "poisson")
    f = _load(args.f, ScalarJet, "f")
    g = _load(args.g, ScalarJet, "g")
    N = args.hbar_order
    series = canonical_star_at_point(theta, omega, f, g, N)
    swapped = canonical_star_at_point(theta, omega, g, f, N)
    cert = {"hbar0_is_product": series[0] == f.constant_term * g.constant_term}
    if N >= 1:
        cert["hbar1_skew_is_bracket"] = series[1] - swapped[1] == poisson_bracket(omega, f, g).constant_term
    return _certified({
        "command": "star",
        "hbar_order": N,
        "series": [format_rational(c) for c in series.coefficients],
        "certification": cert,
    })


def cmd_verify(args) -> dict:
    reports = run_suites(args.seed, args.cases, args.suite or None)
    return {
        "command": "verify",
        "seed": args.seed,
        "suites": {r.name: {k: v for k, v in r.as_dict().items() if k != "name"} for r in reports},
        "certification": {r.name: r.ok for r in reports},
    }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "pretty"), default="json")
    common.add_argument(
        "--paper-taylor-packing",
        dest="packing",
        action="store_const",
        const="multinomial",
        default="taylor",
        help="export coefficients scaled by |multi_index|! (multinomial packing)",
    )
    common.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="jetnormal", description="Normal forms and invariants of metric and connection jets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_input(name: str, help_text: str):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--input", "-i", required=True, help="jet document ('-' for stdin)")
        p.add_argument("--order", "-k", type=int, default=None)
        return p

    with_input("normalize-metric", "normal form of a metric jet").set_defaults(run=cmd_normalize_metric)
    with_input("metric-invariants", "curvature invariants of a metric jet").set_defaults(run=cmd_metric_invariants)
    with_input("normalize-connection", "normal form of a connection jet").set_defaults(run=cmd_normalize_connection)
    with_input("torsion", "order-0 connection invariant").set_defaults(run=cmd_torsion)
    with_input("adapted-chart", "chart adapted to a connection jet").set_defaults(run=cmd_adapted_chart)

    p = sub.add_parser("laplacian", parents=[common], help="Laplacian of a function at the origin")
    p.add_argument("--metric", required=True)
    p.add_argument("--function", required=True)
    p.set_defaults(run=cmd_laplacian)

    p = sub.add_parser("star", parents=[common], help="canonical star product at the origin")
    p.add_argument("--connection", required=True)
    p.add_argument("--poisson", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--hbar-order", "-N", type=int, default=DEFAULT_HBAR_ORDER)
    p.set_defaults(run=cmd_star)

    p = sub.add_parser("verify", parents=[common], help="run the randomized invariant suites")
    p.add_argument("--cases", type=int, default=20)
    p.add_argument("--suite", action="append", choices=sorted(SUITES), help="repeatable; default: all")
    p.set_defaults(run=cmd_verify)
    return parser


def _pretty(value: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict) and "entries" in value and "kind" in value:
        head = f"{value['kind']} jet, dim {value['dim']}, order {value['order']}"
        if not value["entries"]:
            return [pad + head + ": 0"]
        lines = [pad + head + ":"]
        for e in value["entries"]:
            lines.append(f"{pad}  {e['indices']} z^{e['multi_index']}: {e['value']}")
        return lines
    if isinstance(value, dict):
        lines = []
        for k in sorted(value):
            v = value[k]
            if isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v):
                lines.append(f"{pad}{k}: " + _pretty(v)[0])
            elif isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return lines
    if isinstance(value, list) and all(not isinstance(x, (dict, list)) for x in value):
        return [pad + "[" + ", ".join(str(x) for x in value) + "]"]
    if isinstance(value, list):
        lines = []
        for item in value:
            if isinstance(item, dict):
                lines.append(pad + "-")
                lines.extend(_pretty(item, indent + 1))
            elif isinstance(item, list):
                lines.extend(_pretty(item, indent))
            else:
                lines.append(f"{pad}- {item}")
        return lines
    return [pad + str(value)]


def render(doc: dict, fmt: str) -> str:
    if fmt == "pretty":
        return "\n".join(_pretty(doc)) + "\n"
    return dumps(doc)


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else 1
    try:
        doc = args.run(args)
        exit_code = 0
        if args.command == "verify" and not all(doc["certification"].values()):
            exit_code = 3
    except JetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    text = render(doc, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return exit_code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
