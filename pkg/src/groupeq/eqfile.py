"""Equation files: a group reference, two term strings, optional domains.

    group k4.group
    lhs [x0,x1]*g3
    rhs 1
    domain x0 = {0,1,2}

The group line is a path resolved against the equation file's directory.
Domain lines restrict single variables to non-empty element subsets; a
domain for a variable that never occurs in the terms is rejected.  The
printer emits the canonical form (domains sorted by variable, members
sorted, no spaces inside braces), so parse -> print -> parse is byte-stable.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import ParseError
from .groupfile import read_group_file
from .solver import EquationInstance
from .terms import format_term, parse_term, variables

_DOMAIN_RE = re.compile(r"^x(\d+)\s*=\s*\{([0-9,\s]*)\}$")


def parse_equation_text(text: str, base_dir: str | Path = ".") -> EquationInstance:
    group_ref = None
    lhs = rhs = None
    domains: dict[int, tuple[int, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "group":
            if not rest:
                raise ParseError(f"line {lineno}: empty group reference")
            group_ref = rest
        elif key == "lhs":
            lhs = parse_term(rest)
        elif key == "rhs":
            rhs = parse_term(rest)
        elif key == "domain":
            m = _DOMAIN_RE.match(rest)
            if not m:
                raise ParseError(
                    f"line {lineno}: expected 'domain x<i> = {{i1,i2,...}}'")
            var = int(m.group(1))
            if var in domains:
                raise ParseError(f"line {lineno}: duplicate domain for x{var}")
            items = [s for s in m.group(2).replace(",", " ").split() if s]
            if not items:
                raise ParseError(f"line {lineno}: empty domain for x{var}")
            domains[var] = tuple(int(s) for s in items)
        else:
            raise ParseError(f"line {lineno}: unexpected field {key!r}")
    if group_ref is None or lhs is None or rhs is None:
        raise ParseError("equation file needs group, lhs and rhs lines")

    group = read_group_file(Path(base_dir) / group_ref)
    occurring = set(variables(lhs)) | set(variables(rhs))
    for var in domains:
        if var not in occurring:
            raise ParseError(f"domain given for x{var}, which is unbound "
                             "(does not occur in lhs or rhs)")
    try:
        return EquationInstance(group, lhs, rhs, domains)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_equation_file(path: str | Path) -> EquationInstance:
    path = Path(path)
    return parse_equation_text(path.read_text(encoding="utf-8"), path.parent)


def format_equation(inst: EquationInstance, group_ref: str) -> str:
    lines = [f"group {group_ref}",
             f"lhs {format_term(inst.lhs)}",
             f"rhs {format_term(inst.rhs)}"]
    for var in sorted(inst.domains):
        members = ",".join(str(m) for m in inst.domains[var])
        lines.append(f"domain x{var} = {{{members}}}")
    return "\n".join(lines) + "\n"
