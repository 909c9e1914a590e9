"""Batch front-end emitting deterministic JSON reports.

Exit codes: 0 success, 1 a property violation was found, 2 usage error,
3 bounds did not meet within the budget.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .halo import HaloDescriptor, RenormBudget, check_halo_axioms, parse_samples, renorm_infimum
from .linalg import matrix_to_json, parse_matrix, parse_vector
from .module import TreeBudget, coordinate_lattice, operator_norm, tree_norm
from .norms import PExponent
from .scalar import as_fraction
from .tensor import PresentationBudget, presentation_norm
from .isometry import (
    enumerate_Kn_Z,
    generate_relations,
    siso_membership_int,
    siso_membership_padic,
    siso_membership_real,
    siso_phi_membership,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_GAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_json(arg: str, inputs: list):
    """Inline JSON or a path to a JSON file; the raw text joins the input digest."""
    text = arg if arg.lstrip().startswith(("[", "{")) else Path(arg).read_text()
    inputs.append(text)
    return json.loads(text)


def _halo(args, inputs) -> HaloDescriptor:
    if args.config is None:
        return HaloDescriptor.integers()
    return HaloDescriptor.from_config(_load_json(args.config, inputs))


def _cmd_halo_check(args, inputs):
    H = _halo(args, inputs)
    report = check_halo_axioms(H, parse_samples(args.samples))
    out = report.to_json()
    code = EXIT_OK
    if args.expect == "pass" and not report.passed or args.expect == "fail" and report.passed:
        code = EXIT_VIOLATION
    elif args.expect is None and not report.passed:
        code = EXIT_VIOLATION
    return out, code


def _cert_result(cert):
    return cert.to_json(), (EXIT_GAP if cert.gap else EXIT_OK)


def _cmd_renorm(args, inputs):
    H = _halo(args, inputs)
    budget = RenormBudget(args.budget, args.max_magnitude)
    return _cert_result(renorm_infimum(H, PExponent.parse(args.p), as_fraction(args.element), budget))


def _cmd_treenorm(args, inputs):
    H = _halo(args, inputs)
    element = parse_vector(args.element)
    if any(x.denominator != 1 for x in element):
        raise UsageError("tree norm elements must be integers")
    lattice = coordinate_lattice(H, 1)
    parts = [(lattice, (int(x),)) for x in element]
    cert = tree_norm(parts, as_fraction(args.C), TreeBudget(args.budget, args.max_magnitude))
    return _cert_result(cert)


def _cmd_opnorm(args, inputs):
    A = parse_matrix(_load_json(args.matrix, inputs))
    cert = operator_norm(A, args.q, args.context)
    out = cert.to_json()
    out["exact"] = cert.meets
    return out, EXIT_OK


def _membership(U, context, flow):
    if context == "real":
        return siso_membership_real(U, flow)
    if context == "int":
        return siso_membership_int(U, flow)
    if context.startswith("padic:"):
        return siso_membership_padic(U, int(context.split(":", 1)[1]), flow)
    raise UsageError(f"unknown context {context!r}")


def _cmd_kn_check(args, inputs):
    U = parse_matrix(_load_json(args.matrix, inputs))
    flow = as_fraction(args.flow)
    if args.phi is not None:
        Phi = parse_matrix(_load_json(args.phi, inputs))
        cert = siso_phi_membership(U, Phi, args.context, flow)
    else:
        cert = _membership(U, args.context, flow)
    code = EXIT_OK
    if args.expect is not None and cert.verdict != args.expect:
        code = EXIT_VIOLATION
    return cert.to_json(), code


def _cmd_kn_enumerate(args, inputs):
    mats = enumerate_Kn_Z(args.n)
    return {"n": args.n, "count": len(mats), "matrices": [matrix_to_json(U) for U in mats]}, EXIT_OK


def _cmd_kn_relations(args, inputs):
    rels = generate_relations(args.n)
    return {"n": args.n, "count": len(rels), "relations": [str(r) for r in rels]}, EXIT_OK


def _cmd_presentation_norm(args, inputs):
    cfg = _load_json(args.base, inputs)
    halo = HaloDescriptor.from_config(cfg["halo"]) if "halo" in cfg else None
    base = coordinate_lattice(halo, int(cfg["rank"]), cfg.get("q", "inf"))
    if args.context == "real":
        S = HaloDescriptor.reals()
    elif args.context.startswith("padic:"):
        S = HaloDescriptor.padic(int(args.context.split(":", 1)[1]))
    else:
        raise UsageError(f"unknown context {args.context!r}")
    budget = PresentationBudget(max_terms=args.budget)
    return _cert_result(presentation_norm(parse_vector(args.target), base, S, budget))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="halos", description=__doc__.splitlines()[0])
    parser.add_argument("--output", choices=("json", "table"), default="json")
    parser.add_argument("--timings", action="store_true", help="add wall-clock timings to the report")
    parser.add_argument("--version", action="version", version=__version__)
    # the same options are accepted after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=("json", "table"), default=argparse.SUPPRESS)
    common.add_argument("--timings", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("halo-check", help="check halo axioms on samples", parents=[common])
    p.add_argument("--config")
    p.add_argument("--samples", default="-5..5")
    p.add_argument("--expect", choices=("pass", "fail"))
    p.set_defaults(func=_cmd_halo_check)

    p = sub.add_parser("renorm", help="re-normalised norm of an integer", parents=[common])
    p.add_argument("--config")
    p.add_argument("--p", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--budget", type=int, default=None, help="maximum number of parts")
    p.add_argument("--max-magnitude", type=int, default=None)
    p.set_defaults(func=_cmd_renorm)

    p = sub.add_parser("treenorm", help="tree-infimum norm on a direct sum of copies of the ring", parents=[common])
    p.add_argument("--config")
    p.add_argument("--element", required=True)
    p.add_argument("--C", required=True)
    p.add_argument("--budget", type=int, default=8, help="maximum number of leaves")
    p.add_argument("--max-magnitude", type=int, default=None)
    p.set_defaults(func=_cmd_treenorm)

    p = sub.add_parser("opnorm", help="operator norm of a matrix", parents=[common])
    p.add_argument("--matrix", required=True)
    p.add_argument("--q", choices=("1", "2", "inf"), default="2")
    p.add_argument("--context", default="real")
    p.set_defaults(func=_cmd_opnorm)

    kn = sub.add_parser("kn", help="short isometry groups", parents=[common])
    kn_sub = kn.add_subparsers(dest="kn_command", parser_class=_Parser)
    kn_sub.required = True
    p = kn_sub.add_parser("check", parents=[common])
    p.add_argument("--context", default="real")
    p.add_argument("--phi")
    p.add_argument("--matrix", required=True)
    p.add_argument("--flow", default="1")
    p.add_argument("--expect", choices=("member", "non-member"))
    p.set_defaults(func=_cmd_kn_check)
    p = kn_sub.add_parser("enumerate", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_kn_enumerate)
    p = kn_sub.add_parser("relations", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_kn_relations)

    tensor = sub.add_parser("tensor", help="scalar extension norms", parents=[common])
    t_sub = tensor.add_subparsers(dest="tensor_command", parser_class=_Parser)
    t_sub.required = True
    p = t_sub.add_parser("presentation-norm", parents=[common])
    p.add_argument("--base", required=True)
    p.add_argument("--context", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--budget", type=int, default=2, help="maximum number of terms")
    p.set_defaults(func=_cmd_presentation_norm)
    return parser


def _table(obj, prefix="") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            lines.extend(_table(obj[k], f"{prefix}{k}."))
        return lines
    if isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        lines = []
        for i, v in enumerate(obj):
            lines.extend(_table(v, f"{prefix}{i}."))
        return lines
    return [f"{prefix.rstrip('.')}\t{json.dumps(obj, sort_keys=True, ensure_ascii=False)}"]


def _attach_values(argv: list[str]) -> list[str]:
    """``--samples -5..5`` would read as a flag; glue such values to their option."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _DASHED_VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


_DASHED_VALUE_OPTIONS = {"--samples", "--element", "--target"}


def run(argv) -> tuple[int, str]:
    """Execute a command line; returns (exit code, text written to stdout)."""
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_values(argv))
    except UsageError as exc:
        return EXIT_USAGE, f"usage error: {exc}\n"
    inputs: list[str] = []
    start = time.perf_counter()
    try:
        result, code = args.func(args, inputs)
    except (UsageError, ValueError, FileNotFoundError, json.JSONDecodeError, ZeroDivisionError) as exc:
        return EXIT_USAGE, f"usage error: {exc}\n"
    report = {
        "command": argv,
        "inputs_sha256": hashlib.sha256("\0".join(inputs).encode()).hexdigest(),
        "result": result,
        "version": __version__,
    }
    if args.timings:
        report["timings"] = {"seconds": round(time.perf_counter() - start, 6)}
    if args.output == "table":
        text = "\n".join(_table(report)) + "\n"
    else:
        text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    return code, text


def main(argv=None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    (sys.stdout if code != EXIT_USAGE else sys.stderr).write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
