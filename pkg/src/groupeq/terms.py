"""Terms over the extended group signature {*, 1, ^-1, [.,.], w}.

Grammar (canonical text form):

    term   := factor ('*' factor)*            multiplication, left-associative
    factor := atom ('^-1')*                   postfix inversion
    atom   := 'x'INT | 'g'INT | '1'
            | '[' term ',' term ']'           commutator
            | 'w(' term ',' term ',' term ',' term ')'
            | '(' term ')'

``x<i>`` is a variable, ``g<i>`` a group-element constant, ``1`` the
identity.  The commutator evaluates as x^-1 y^-1 x y and
w(x, y1, y2, y3) as x^8 * [[[x, y1], y2], y3].

Terms are immutable nodes compared structurally; chains built with shared
subterms stay linear-size in memory, and evaluation walks the DAG once per
node (keyed by node identity), with no recursion on deep chains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

from .errors import ParseError, UnboundVariable
from .groups import FiniteGroup


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    index: int


@dataclass(frozen=True)
class Const(Term):
    element: int


@dataclass(frozen=True)
class Identity(Term):
    pass


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Inv(Term):
    child: Term


@dataclass(frozen=True)
class Comm(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class W(Term):
    x: Term
    y1: Term
    y2: Term
    y3: Term


IDENTITY = Identity()

SIG_GROUP = "group"
SIG_COMMUTATOR = "commutator"
SIG_W = "w"


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Mul):
        return (t.left, t.right)
    if isinstance(t, Inv):
        return (t.child,)
    if isinstance(t, Comm):
        return (t.left, t.right)
    if isinstance(t, W):
        return (t.x, t.y1, t.y2, t.y3)
    return ()


def postorder(t: Term) -> Iterator[Term]:
    """Each distinct node (by identity) once, children before parents."""
    seen: set[int] = set()
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        node, ready = stack.pop()
        if ready:
            yield node
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for child in children(node):
            stack.append((child, False))


def variables(t: Term) -> tuple[int, ...]:
    """Sorted distinct variable indices occurring in t."""
    return tuple(sorted({n.index for n in postorder(t) if isinstance(n, Var)}))


def signature_of(t: Term) -> str:
    """Smallest signature containing the term: group / commutator / w."""
    sig = SIG_GROUP
    for node in postorder(t):
        if isinstance(node, W):
            return SIG_W
        if isinstance(node, Comm):
            sig = SIG_COMMUTATOR
    return sig


def term_length(t: Term) -> int:
    """Symbol count of the printed tree: leaves count 1, operators 1 + children."""
    size: dict[int, int] = {}
    for node in postorder(t):
        size[id(node)] = 1 + sum(size[id(c)] for c in children(node))
    return size[id(t)]


def evaluate(t: Term, group: FiniteGroup, assignment: Mapping[int, int]) -> int:
    """Evaluate under the assignment; raises UnboundVariable on a free index."""
    rows = group.rows
    inv = group.inv_list
    vals: dict[int, int] = {}
    for node in postorder(t):
        if isinstance(node, Var):
            v = assignment.get(node.index)
            if v is None:
                raise UnboundVariable(f"variable x{node.index} has no value")
            vals[id(node)] = v
        elif isinstance(node, Const):
            if not 0 <= node.element < group.order:
                raise UnboundVariable(
                    f"constant g{node.element} outside group of order {group.order}")
            vals[id(node)] = node.element
        elif isinstance(node, Identity):
            vals[id(node)] = 0
        elif isinstance(node, Mul):
            vals[id(node)] = rows[vals[id(node.left)]][vals[id(node.right)]]
        elif isinstance(node, Inv):
            vals[id(node)] = inv[vals[id(node.child)]]
        elif isinstance(node, Comm):
            a = vals[id(node.left)]
            b = vals[id(node.right)]
            vals[id(node)] = rows[rows[rows[inv[a]][inv[b]]][a]][b]
        else:  # W
            x = vals[id(node.x)]
            c = x
            for y in (node.y1, node.y2, node.y3):
                b = vals[id(y)]
                c = rows[rows[rows[inv[c]][inv[b]]][c]][b]
            vals[id(node)] = rows[group.power(x, 8)][c]
    return vals[id(t)]


def power_term(t: Term, k: int) -> Term:
    """t^k for k >= 0 as a balanced square-and-multiply product."""
    if k < 0:
        raise ValueError("power_term takes a non-negative exponent")
    if k == 0:
        return IDENTITY
    result: Term | None = None
    square = t
    while k:
        if k & 1:
            result = square if result is None else Mul(result, square)
        k >>= 1
        if k:
            square = Mul(square, square)
    assert result is not None
    return result


def _rewrite(t: Term, make: Callable[[Term, dict[int, Term]], Term]) -> Term:
    out: dict[int, Term] = {}
    for node in postorder(t):
        out[id(node)] = make(node, out)
    return out[id(t)]


def _expanded_comm(a: Term, b: Term) -> Term:
    return Mul(Mul(Inv(a), Inv(b)), Mul(a, b))


def expand(t: Term) -> Term:
    """Rewrite commutator and w nodes into the plain group signature.

    The result evaluates identically on every assignment.
    """
    def make(node: Term, out: dict[int, Term]) -> Term:
        if isinstance(node, Mul):
            return Mul(out[id(node.left)], out[id(node.right)])
        if isinstance(node, Inv):
            return Inv(out[id(node.child)])
        if isinstance(node, Comm):
            return _expanded_comm(out[id(node.left)], out[id(node.right)])
        if isinstance(node, W):
            x = out[id(node.x)]
            c = x
            for y in (node.y1, node.y2, node.y3):
                c = _expanded_comm(c, out[id(y)])
            return Mul(power_term(x, 8), c)
        return node

    return _rewrite(t, make)


def eliminate_inversion(t: Term, group: FiniteGroup) -> Term:
    """Inversion-free term evaluating identically over ``group``.

    Pushes inversions inward ((a*b)^-1 -> b^-1 a^-1, [a,b]^-1 -> [b,a]) and
    replaces the leftover leaf inversions by |G|-1 powers.
    """
    n = group.order
    pos: dict[int, Term] = {}
    neg: dict[int, Term] = {}

    # two-phase worklist: each node may be needed in plain and inverted form
    def need(node: Term, inverted: bool) -> Term | None:
        memo = neg if inverted else pos
        return memo.get(id(node))

    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        node, inverted = stack[-1]
        memo = neg if inverted else pos
        if id(node) in memo:
            stack.pop()
            continue
        if not inverted:
            if isinstance(node, (Var, Const, Identity)):
                pos[id(node)] = node
                stack.pop()
                continue
            if isinstance(node, Inv):
                sub = need(node.child, True)
                if sub is None:
                    stack.append((node.child, True))
                    continue
                pos[id(node)] = sub
                stack.pop()
                continue
            deps = [(c, False) for c in children(node)]
            missing = [d for d in deps if need(*d) is None]
            if missing:
                stack.extend(missing)
                continue
            parts = [pos[id(c)] for c in children(node)]
            if isinstance(node, Mul):
                pos[id(node)] = Mul(parts[0], parts[1])
            elif isinstance(node, Comm):
                pos[id(node)] = Comm(parts[0], parts[1])
            else:  # W
                pos[id(node)] = W(*parts)
            stack.pop()
        else:
            if isinstance(node, Identity):
                neg[id(node)] = IDENTITY
                stack.pop()
                continue
            if isinstance(node, (Var, Const)):
                neg[id(node)] = power_term(node, n - 1)
                stack.pop()
                continue
            if isinstance(node, Inv):
                sub = need(node.child, False)
                if sub is None:
                    stack.append((node.child, False))
                    continue
                neg[id(node)] = sub
                stack.pop()
                continue
            if isinstance(node, Mul):
                deps = [(node.right, True), (node.left, True)]
            elif isinstance(node, Comm):
                deps = [(node.right, False), (node.left, False)]
            else:  # W: no commutator-free inverse shape; invert the whole value
                deps = [(node, False)]
            missing = [d for d in deps if need(*d) is None]
            if missing:
                stack.extend(missing)
                continue
            if isinstance(node, Mul):
                neg[id(node)] = Mul(neg[id(node.right)], neg[id(node.left)])
            elif isinstance(node, Comm):
                neg[id(node)] = Comm(pos[id(node.right)], pos[id(node.left)])
            else:
                neg[id(node)] = power_term(pos[id(node)], n - 1)
            stack.pop()
    return pos[id(t)]


def substitute(t: Term, var: int, replacement: Term) -> Term:
    """Replace every occurrence of variable ``var`` by ``replacement``."""
    def make(node: Term, out: dict[int, Term]) -> Term:
        if isinstance(node, Var) and node.index == var:
            return replacement
        if isinstance(node, Mul):
            return Mul(out[id(node.left)], out[id(node.right)])
        if isinstance(node, Inv):
            return Inv(out[id(node.child)])
        if isinstance(node, Comm):
            return Comm(out[id(node.left)], out[id(node.right)])
        if isinstance(node, W):
            return W(out[id(node.x)], out[id(node.y1)],
                     out[id(node.y2)], out[id(node.y3)])
        return node

    return _rewrite(t, make)


# --- text form ---------------------------------------------------------------

def format_term(t: Term) -> str:
    text: dict[int, str] = {}
    for node in postorder(t):
        if isinstance(node, Var):
            text[id(node)] = f"x{node.index}"
        elif isinstance(node, Const):
            text[id(node)] = f"g{node.element}"
        elif isinstance(node, Identity):
            text[id(node)] = "1"
        elif isinstance(node, Mul):
            right = text[id(node.right)]
            if isinstance(node.right, Mul):
                right = f"({right})"
            text[id(node)] = f"{text[id(node.left)]}*{right}"
        elif isinstance(node, Inv):
            child = text[id(node.child)]
            if isinstance(node.child, Mul):
                child = f"({child})"
            text[id(node)] = f"{child}^-1"
        elif isinstance(node, Comm):
            text[id(node)] = f"[{text[id(node.left)]},{text[id(node.right)]}]"
        else:
            text[id(node)] = ("w(" + ",".join(
                text[id(c)] for c in children(node)) + ")")
    return text[id(t)]


_TOKEN_NAMES = {
    "*": "'*'", "^-1": "'^-1'", "[": "'['", "]": "']'", ",": "','",
    "(": "'('", ")": "')'", "w": "'w('", "var": "variable",
    "const": "constant", "1": "'1'", "end": "end of input",
}


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, int, int]] = []  # (kind, value, position)
        pos = 0
        n = len(text)
        while pos < n:
            ch = text[pos]
            if ch.isspace():
                pos += 1
                continue
            if ch in "*[],()":
                self.items.append((ch, 0, pos))
                pos += 1
            elif ch == "^":
                if text[pos:pos + 3] != "^-1":
                    raise ParseError("malformed inversion", pos, ("'^-1'",))
                self.items.append(("^-1", 0, pos))
                pos += 3
            elif ch == "1":
                self.items.append(("1", 0, pos))
                pos += 1
            elif ch in "xg":
                start = pos + 1
                end = start
                while end < n and text[end].isdigit():
                    end += 1
                if end == start:
                    raise ParseError(f"'{ch}' needs a numeric index", pos,
                                     ("variable", "constant"))
                kind = "var" if ch == "x" else "const"
                self.items.append((kind, int(text[start:end]), pos))
                pos = end
            elif ch == "w":
                self.items.append(("w", 0, pos))
                pos += 1
            else:
                raise ParseError(f"unexpected character {ch!r}", pos,
                                 ("term",))
        self.items.append(("end", 0, n))
        self.at = 0

    def peek(self) -> str:
        return self.items[self.at][0]

    def next(self, *expected: str) -> tuple[str, int, int]:
        kind, value, pos = self.items[self.at]
        if expected and kind not in expected:
            raise ParseError(f"unexpected token", pos,
                             tuple(_TOKEN_NAMES[e] for e in expected))
        self.at += 1
        return kind, value, pos


def parse_term(text: str) -> Term:
    toks = _Tokens(text)
    term = _parse_expr(toks)
    toks.next("end")
    return term


def _parse_expr(toks: _Tokens) -> Term:
    term = _parse_factor(toks)
    while toks.peek() == "*":
        toks.next("*")
        term = Mul(term, _parse_factor(toks))
    return term


def _parse_factor(toks: _Tokens) -> Term:
    term = _parse_atom(toks)
    while toks.peek() == "^-1":
        toks.next("^-1")
        term = Inv(term)
    return term


def _parse_atom(toks: _Tokens) -> Term:
    kind, value, pos = toks.next("var", "const", "1", "[", "w", "(")
    if kind == "var":
        return Var(value)
    if kind == "const":
        return Const(value)
    if kind == "1":
        return IDENTITY
    if kind == "[":
        left = _parse_expr(toks)
        toks.next(",")
        right = _parse_expr(toks)
        toks.next("]")
        return Comm(left, right)
    if kind == "w":
        toks.next("(")
        args = [_parse_expr(toks)]
        for _ in range(3):
            toks.next(",")
            args.append(_parse_expr(toks))
        toks.next(")")
        return W(*args)
    # kind == "("
    term = _parse_expr(toks)
    toks.next(")")
    return term
