"""Plain-text group descriptions.

Three kinds, selected by the first field:

    kind builtin          kind perm             kind table
    name dihedral(6)      points 3              order 2
                          gen 1 0 2             row 0 1
                          gen 1 2 0             row 1 0
                                                labels e s   (optional)

Blank lines and ``#`` comments are ignored when parsing; the printer emits
the canonical form above (no comments, fields in the order shown, single
spaces, trailing newline), so parse -> print -> parse is byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError
from .groups import FiniteGroup, build_from_permutations, build_from_table, builtin


@dataclass(frozen=True)
class GroupDocument:
    kind: str                                   # "table" | "perm" | "builtin"
    name: str | None = None                     # builtin spec
    points: int | None = None                   # perm
    generators: tuple[tuple[int, ...], ...] = ()
    order: int | None = None                    # table
    rows: tuple[tuple[int, ...], ...] = ()
    labels: tuple[str, ...] | None = None


def _fields(text: str) -> list[tuple[int, str, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        out.append((lineno, key, rest))
    return out


def parse_document(text: str) -> GroupDocument:
    fields = _fields(text)
    if not fields:
        raise ParseError("empty group file")
    lineno, key, rest = fields[0]
    if key != "kind" or len(rest) != 1:
        raise ParseError(f"line {lineno}: expected 'kind table|perm|builtin'")
    kind = rest[0]
    body = fields[1:]

    if kind == "builtin":
        if len(body) != 1 or body[0][1] != "name" or len(body[0][2]) != 1:
            raise ParseError("builtin group file needs exactly one 'name' line")
        return GroupDocument("builtin", name=body[0][2][0].lower())

    if kind == "perm":
        if not body or body[0][1] != "points" or len(body[0][2]) != 1:
            raise ParseError("perm group file must start with 'points N'")
        try:
            points = int(body[0][2][0])
        except ValueError:
            raise ParseError("bad point count") from None
        gens = []
        for lineno, key, rest in body[1:]:
            if key != "gen":
                raise ParseError(f"line {lineno}: expected 'gen' line")
            try:
                img = tuple(int(x) for x in rest)
            except ValueError:
                raise ParseError(f"line {lineno}: bad generator") from None
            if len(img) != points:
                raise ParseError(f"line {lineno}: generator has {len(img)} "
                                 f"points, expected {points}")
            gens.append(img)
        return GroupDocument("perm", points=points, generators=tuple(gens))

    if kind == "table":
        if not body or body[0][1] != "order" or len(body[0][2]) != 1:
            raise ParseError("table group file must start with 'order N'")
        try:
            order = int(body[0][2][0])
        except ValueError:
            raise ParseError("bad order") from None
        rows = []
        labels = None
        for lineno, key, rest in body[1:]:
            if key == "row":
                try:
                    rows.append(tuple(int(x) for x in rest))
                except ValueError:
                    raise ParseError(f"line {lineno}: bad row") from None
            elif key == "labels":
                labels = tuple(rest)
            else:
                raise ParseError(f"line {lineno}: unexpected field {key!r}")
        if len(rows) != order:
            raise ParseError(f"expected {order} rows, found {len(rows)}")
        if labels is not None and len(labels) != order:
            raise ParseError(f"expected {order} labels, found {len(labels)}")
        return GroupDocument("table", order=order, rows=tuple(rows),
                             labels=labels)

    raise ParseError(f"unknown group kind {kind!r}")


def format_document(doc: GroupDocument) -> str:
    lines = [f"kind {doc.kind}"]
    if doc.kind == "builtin":
        lines.append(f"name {doc.name}")
    elif doc.kind == "perm":
        lines.append(f"points {doc.points}")
        lines += ["gen " + " ".join(str(x) for x in g) for g in doc.generators]
    else:
        lines.append(f"order {doc.order}")
        lines += ["row " + " ".join(str(x) for x in row) for row in doc.rows]
        if doc.labels is not None:
            lines.append("labels " + " ".join(doc.labels))
    return "\n".join(lines) + "\n"


def document_to_group(doc: GroupDocument) -> FiniteGroup:
    if doc.kind == "builtin":
        return builtin(doc.name)
    if doc.kind == "perm":
        return build_from_permutations(doc.generators)
    return build_from_table(doc.rows, labels=doc.labels)


def table_document(group: FiniteGroup) -> GroupDocument:
    """Dump any group as an explicit-table document."""
    labels = group.labels
    if labels is not None and any(" " in l or not l for l in labels):
        labels = None  # labels must be single whitespace-free tokens
    return GroupDocument("table", order=group.order,
                         rows=tuple(tuple(int(x) for x in row)
                                    for row in group.mul_table),
                         labels=labels)


def parse_group_text(text: str) -> FiniteGroup:
    return document_to_group(parse_document(text))


def read_group_file(path: str | Path) -> FiniteGroup:
    return parse_group_text(Path(path).read_text(encoding="utf-8"))
