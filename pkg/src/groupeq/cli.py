"""Command-line front end.

Every command prints one JSON report to stdout (sorted keys, so identical
inputs give byte-identical reports apart from the ``timings`` object) and a
one-line human summary to stderr.  Exit codes: 0 ok, 2 parse/validation
error, 3 precondition error, 4 search-space cap, 5 internal-check failure.
Output files are written to a temporary name and renamed, never partially.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from . import structure as st
from .dimacs import parse_cnf, parse_graph
from .eqfile import format_equation, read_equation_file
from .errors import GroupEqError, ParseError
from .groupfile import (format_document, read_group_file, table_document)
from .groups import FiniteGroup
from .reductions import (ReductionOutput, reduce_coloring, reduce_sat,
                         translate_witness, verify_reduction)
from .solver import DEFAULT_CAP, check_id, default_workers, solve_eq
from .terms import format_term, term_length


def _digest(path: str) -> dict:
    data = Path(path).read_bytes()
    return {"path": str(path), "sha256": hashlib.sha256(data).hexdigest()}


def _subgroup_json(sub: st.Subgroup) -> dict:
    return {"order": sub.order, "members": list(sub.sorted_members)}


def _series_json(series: list[st.Subgroup]) -> dict:
    return {"orders": [s.order for s in series],
            "members": [list(s.sorted_members) for s in series]}


def _classification_json(cls: st.Classification) -> dict:
    out = {"kind": cls.kind}
    if cls.last_non_nilpotent is not None:
        out["last_non_nilpotent"] = _subgroup_json(cls.last_non_nilpotent)
        out["fitting_order"] = cls.fitting_order
        out["quotient_exponent"] = cls.quotient_exponent
    return out


def _chain_json(target: st.ReductionTarget) -> list[dict]:
    return [{"kernel_order": q.kernel.order,
             "kernel_members": list(q.kernel.sorted_members),
             "quotient_order": q.quotient.order} for q in target.chain]


def _target_json(target: st.ReductionTarget) -> dict:
    return {
        "group": {"order": target.group.order,
                  "mul_table": [list(map(int, row))
                                for row in target.group.mul_table]},
        "minimal_normal": _subgroup_json(target.minimal_normal),
        "driver": target.driver,
        "cycle_witness": target.cycle_witness,
        "chain": _chain_json(target),
        "index_over_2": target.index_over_2,
        "base_exponent": target.base_exponent,
        "source_order": target.source_order,
        "fitting_order": target.fitting_order,
    }


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _witness_json(witness: dict[int, int] | None) -> dict | None:
    if witness is None:
        return None
    return {f"x{var}": value for var, value in sorted(witness.items())}


# --- command implementations --------------------------------------------------

def _cmd_group_info(args) -> dict:
    group = read_group_file(args.group)
    return {
        "name": group.name,
        "order": group.order,
        "exponent": group.exponent,
        "center_order": st.center(group).order,
        "abelian": group.is_abelian,
        "nilpotent": st.is_nilpotent(group),
        "solvable": st.is_solvable(group),
    }


def _cmd_structure(args) -> dict:
    group = read_group_file(args.group)
    cls = st.classify(group)
    result = {
        "name": group.name,
        "order": group.order,
        "series": {
            "derived": _series_json(st.derived_series(group)),
            "lower_central": _series_json(st.lower_central_series(group)),
            "upper_central": _series_json(st.upper_central_series(group)),
        },
        "fitting": _subgroup_json(st.fitting_subgroup(group)),
        "minimal_normal_subgroups": [
            _subgroup_json(s) for s in st.minimal_normal_subgroups(group)],
        "classification": _classification_json(cls),
        "targets": None,
    }
    if cls.kind in (st.CASE_ONE, st.CASE_TWO):
        result["targets"] = {
            "eq": _target_json(st.equation_target(group)),
            "id": _target_json(st.identity_target(group)),
        }
    return result


def _cmd_construct(args) -> dict:
    group = read_group_file(args.group)
    target = (st.equation_target(group) if args.mode == "eq"
              else st.identity_target(group))
    result = {"mode": args.mode, "target": _target_json(target)}
    if args.emit_group:
        out = Path(args.emit_group)
        _atomic_write(out, format_document(table_document(target.group)))
        result["emitted_group"] = str(out)
    return result


def _build_reduction(args, group: FiniteGroup) -> ReductionOutput:
    target = (st.equation_target(group) if args.variant == "eq"
              else st.identity_target(group))
    text = Path(args.instance).read_text(encoding="utf-8")
    if args.mode == "coloring":
        return reduce_coloring(target.group, target.minimal_normal,
                               parse_graph(text), args.variant)
    return reduce_sat(target.group, target.minimal_normal,
                      parse_cnf(text), args.variant)


def _role_map_json(out: ReductionOutput) -> dict:
    role = {
        "kind": out.kind,
        "variant": out.variant,
        "rhs_kind": out.rhs_kind,
        "instance_vars": {str(i): f"x{var}"
                          for i, var in enumerate(out.instance_vars)},
        "z_vars": [f"x{var}" for var in out.z_vars],
        "target_subgroup": list(out.target_subgroup.sorted_members),
        "centralizer": list(out.centralizer.sorted_members),
    }
    if out.colors is not None:
        role["colors"] = out.colors
    if out.flip_const is not None:
        role["flip_const"] = out.flip_const
    return role


def _cmd_reduce(args) -> dict:
    group = read_group_file(args.group)
    out = _build_reduction(args, group)
    base = Path(args.output)
    group_path = base.with_suffix(".group")
    eq_path = base.with_suffix(".eq")
    role_path = base.with_suffix(".role.json")
    _atomic_write(group_path, format_document(table_document(out.equation.group)))
    _atomic_write(eq_path, format_equation(out.equation, group_path.name))
    role = _role_map_json(out)
    _atomic_write(role_path, json.dumps(role, indent=2, sort_keys=True) + "\n")
    return {
        "mode": args.mode,
        "variant": args.variant,
        "files": {"equation": str(eq_path), "group": str(group_path),
                  "role_map": str(role_path)},
        "lhs_length": term_length(out.equation.lhs),
        "lhs": format_term(out.equation.lhs),
        "rhs": format_term(out.equation.rhs),
        "role_map": role,
    }


def _cmd_solve(args) -> dict:
    inst = read_equation_file(args.equation)
    result = solve_eq(inst, workers=args.workers, cap=args.cap)
    return {
        "solvable": result.solvable,
        "witness": _witness_json(result.witness),
        "assignments_examined": result.assignments_examined,
    }


def _cmd_check_id(args) -> dict:
    inst = read_equation_file(args.equation)
    result = check_id(inst, workers=args.workers, cap=args.cap)
    return {
        "holds": result.holds,
        "counterexample": _witness_json(result.counterexample),
        "assignments_examined": result.assignments_examined,
    }


def _cmd_verify(args) -> dict:
    group = read_group_file(args.group)
    out = _build_reduction(args, group)
    report = verify_reduction(out, out.source, workers=args.workers,
                              cap=args.cap)
    return {
        "mode": args.mode,
        "variant": args.variant,
        "agreement": report.agreement,
        "solver_ok": report.solver_ok,
        "oracle_ok": report.oracle_ok,
        "restricted_agrees": report.restricted_agrees,
        "translated_witness": list(report.translated)
        if report.translated is not None else None,
        "assignments_examined": report.assignments_examined,
    }


_COMMANDS = {
    "group-info": _cmd_group_info,
    "structure": _cmd_structure,
    "construct": _cmd_construct,
    "reduce": _cmd_reduce,
    "solve": _cmd_solve,
    "check-id": _cmd_check_id,
    "verify": _cmd_verify,
}


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: GROUPEQ_WORKERS or 1)")
    parser.add_argument("--cap", type=int, default=DEFAULT_CAP,
                        help="search-space cap (assignments)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupeq",
        description="finite-group structure analysis, gadget compilation "
                    "and exhaustive equation solving")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group-info", help="order, exponent, basic flags")
    p.add_argument("group", help="group file")

    p = sub.add_parser("structure", help="series, Fitting subgroup, "
                                         "classification, reduction targets")
    p.add_argument("group", help="group file")

    p = sub.add_parser("construct", help="build the (H, N) reduction target")
    p.add_argument("group", help="group file")
    p.add_argument("--mode", choices=("eq", "id"), required=True)
    p.add_argument("--emit-group", default=None,
                   help="also write H as a table group file")

    p = sub.add_parser("reduce", help="compile a coloring/SAT instance")
    p.add_argument("group", help="group file")
    p.add_argument("instance", help="DIMACS graph or CNF file")
    p.add_argument("--mode", choices=("coloring", "sat"), required=True)
    p.add_argument("--variant", choices=("eq", "id"), default="eq")
    p.add_argument("-o", "--output", required=True,
                   help="output base path (writes .eq, .group, .role.json)")

    p = sub.add_parser("solve", help="decide equation solvability")
    p.add_argument("equation", help="equation file")
    _add_solver_flags(p)

    p = sub.add_parser("check-id", help="decide identity validity")
    p.add_argument("equation", help="equation file")
    _add_solver_flags(p)

    p = sub.add_parser("verify", help="compile, decide, and compare against "
                                      "the combinatorial oracle")
    p.add_argument("group", help="group file")
    p.add_argument("instance", help="DIMACS graph or CNF file")
    p.add_argument("--mode", choices=("coloring", "sat"), required=True)
    p.add_argument("--variant", choices=("eq", "id"), default="eq")
    _add_solver_flags(p)

    return parser


def _input_digests(args) -> dict:
    digests = {}
    for field in ("group", "instance", "equation"):
        path = getattr(args, field, None)
        if path is not None:
            digests[field] = _digest(path)
    return digests


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", None) is None and hasattr(args, "workers"):
        args.workers = default_workers()

    report = {"command": args.command, "inputs": None, "result": None,
              "error": None, "timings": None}
    start = time.perf_counter()
    code = 0
    try:
        report["inputs"] = _input_digests(args)
        report["result"] = _COMMANDS[args.command](args)
    except GroupEqError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = exc.exit_code
    except FileNotFoundError as exc:
        report["error"] = {"type": "FileNotFound", "message": str(exc)}
        code = 2
    report["timings"] = {"seconds": round(time.perf_counter() - start, 6)}

    print(json.dumps(report, indent=2, sort_keys=True))
    if report["error"] is None:
        print(f"groupeq {args.command}: ok", file=sys.stderr)
    else:
        print(f"groupeq {args.command}: {report['error']['type']}: "
              f"{report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
