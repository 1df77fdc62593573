"""Graph and CNF instances with DIMACS readers/writers.

Vertices and variables are 1-based in DIMACS text and 0-based (vertices) /
1-based signed literals (CNF) internally, matching the usual conventions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError


@dataclass(frozen=True)
class ColoringInstance:
    """Simple undirected graph: vertex count plus normalized edge list.

    Edges are stored sorted with u < v and duplicates removed; self-loops are
    rejected.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError("vertex count must be non-negative")
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u},{v}) outside 0..{self.vertex_count - 1}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))


@dataclass(frozen=True)
class CnfInstance:
    """3-CNF formula: clauses are exactly three signed 1-based literals.

    Shorter clauses are padded by repeating their last literal.
    """

    variable_count: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.variable_count < 0:
            raise ValueError("variable count must be non-negative")
        norm = []
        for clause in self.clauses:
            lits = [int(l) for l in clause]
            if not lits or len(lits) > 3:
                raise ValueError(f"clause {clause} must have 1..3 literals")
            for lit in lits:
                if lit == 0 or abs(lit) > self.variable_count:
                    raise ValueError(f"literal {lit} out of range")
            while len(lits) < 3:
                lits.append(lits[-1])
            norm.append(tuple(lits))
        object.__setattr__(self, "clauses", tuple(norm))


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield lineno, line


def parse_graph(text: str) -> ColoringInstance:
    """DIMACS edge format: ``p edge N M`` then ``e U V`` lines (1-based)."""
    vertex_count = None
    edges = []
    for lineno, line in _content_lines(text):
        fields = line.split()
        if fields[0] == "p":
            if len(fields) != 4 or fields[1] != "edge":
                raise ParseError(f"bad problem line on line {lineno}: {line!r}")
            vertex_count = int(fields[2])
        elif fields[0] == "e":
            if vertex_count is None:
                raise ParseError(f"edge before problem line on line {lineno}")
            if len(fields) != 3:
                raise ParseError(f"bad edge line on line {lineno}: {line!r}")
            u, v = int(fields[1]), int(fields[2])
            if u < 1 or v < 1 or u > vertex_count or v > vertex_count:
                raise ParseError(f"vertex out of range on line {lineno}")
            if u == v:
                raise ParseError(f"self-loop on line {lineno}")
            edges.append((u - 1, v - 1))
        else:
            raise ParseError(f"unrecognized line {lineno}: {line!r}")
    if vertex_count is None:
        raise ParseError("missing 'p edge' problem line")
    return ColoringInstance(vertex_count, tuple(edges))


def format_graph(graph: ColoringInstance) -> str:
    lines = [f"p edge {graph.vertex_count} {len(graph.edges)}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def parse_cnf(text: str) -> CnfInstance:
    """DIMACS CNF: ``p cnf N M`` then 0-terminated clauses of <= 3 literals."""
    variable_count = None
    clauses = []
    pending: list[int] = []
    for lineno, line in _content_lines(text):
        fields = line.split()
        if fields[0] == "p":
            if len(fields) != 4 or fields[1] != "cnf":
                raise ParseError(f"bad problem line on line {lineno}: {line!r}")
            variable_count = int(fields[2])
            continue
        if variable_count is None:
            raise ParseError(f"clause before problem line on line {lineno}")
        for tok in fields:
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r} on line {lineno}") from None
            if lit == 0:
                if not pending:
                    raise ParseError(f"empty clause on line {lineno}")
                if len(pending) > 3:
                    raise ParseError(
                        f"clause with {len(pending)} literals on line {lineno}; "
                        "at most 3 are supported")
                clauses.append(tuple(pending))
                pending = []
            else:
                if abs(lit) > variable_count:
                    raise ParseError(f"literal {lit} out of range on line {lineno}")
                pending.append(lit)
    if pending:
        raise ParseError("unterminated clause at end of input")
    if variable_count is None:
        raise ParseError("missing 'p cnf' problem line")
    return CnfInstance(variable_count, tuple(clauses))


def format_cnf(cnf: CnfInstance) -> str:
    lines = [f"p cnf {cnf.variable_count} {len(cnf.clauses)}"]
    lines += [" ".join(str(l) for l in clause) + " 0" for clause in cnf.clauses]
    return "\n".join(lines) + "\n"
