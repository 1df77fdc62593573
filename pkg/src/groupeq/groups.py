"""Finite groups as dense multiplication tables with 0-based element indices.

Conventions used everywhere in this package:

* elements are indices ``0 .. order-1`` and the identity is pinned at index 0;
* ``mul_table[a, b]`` is the product ``a * b``;
* permutations are image tuples (``p[i]`` is the image of point ``i``) and
  compose left-to-right: ``(p * q)[i] = q[p[i]]``, i.e. apply ``p`` first.

Groups are immutable after construction and safe to share between workers.
"""

from __future__ import annotations

import math
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, NotAGroup, ParameterOutOfRange, UnknownFamily

DEFAULT_ORDER_CAP = 2000
EXHAUSTIVE_ASSOC_LIMIT = 256
RANDOM_ASSOC_SAMPLES = 1_000_000
_ASSOC_SEED = 20240601


class FiniteGroup:
    """A finite group given by its full multiplication table.

    Use :func:`build_from_table`, :func:`build_from_permutations` or
    :func:`builtin` to construct validated instances.
    """

    def __init__(self, mul_table: np.ndarray, inv_table: np.ndarray,
                 labels: tuple[str, ...] | None = None,
                 perm_images: tuple[tuple[int, ...], ...] | None = None,
                 name: str | None = None):
        self.order = int(mul_table.shape[0])
        self.mul_table = mul_table
        self.inv_table = inv_table
        self.labels = labels
        self.perm_images = perm_images
        self.name = name or f"table[{self.order}]"
        mul_table.setflags(write=False)
        inv_table.setflags(write=False)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"

    def elements(self) -> range:
        return range(self.order)

    def label(self, g: int) -> str:
        if self.labels is None:
            return str(g)
        return self.labels[g]

    @cached_property
    def rows(self) -> list[list[int]]:
        """Plain-list view of the table for tight scalar loops."""
        return self.mul_table.tolist()

    @cached_property
    def inv_list(self) -> list[int]:
        return self.inv_table.tolist()

    def mul(self, a: int, b: int) -> int:
        return self.rows[a][b]

    def inv(self, a: int) -> int:
        return self.inv_list[a]

    def conjugate(self, g: int, h: int) -> int:
        """h^-1 g h."""
        rows = self.rows
        return rows[rows[self.inv_list[h]][g]][h]

    def commutator(self, g: int, h: int) -> int:
        """g^-1 h^-1 g h."""
        rows = self.rows
        return rows[rows[rows[self.inv_list[g]][self.inv_list[h]]][g]][h]

    def power(self, g: int, k: int) -> int:
        """g^k by square-and-multiply; k may be zero or negative."""
        if k < 0:
            return self.power(self.inv(g), -k)
        rows = self.rows
        acc = 0
        base = g
        while k:
            if k & 1:
                acc = rows[acc][base]
            base = rows[base][base]
            k >>= 1
        return acc

    def element_order(self, g: int) -> int:
        rows = self.rows
        x = g
        k = 1
        while x != 0:
            x = rows[x][g]
            k += 1
        return k

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*(self.element_order(g) for g in self.elements()))

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul_table, self.mul_table.T))


def _check_associativity(table: np.ndarray) -> None:
    n = table.shape[0]
    if n <= EXHAUSTIVE_ASSOC_LIMIT:
        # chunk over the first axis to bound memory at ~32MB
        chunk = max(1, (4 << 20) // max(1, n * n))
        for start in range(0, n, chunk):
            rows = table[start:start + chunk]
            left = table[rows, :]       # left[a,b,c]  = t[t[a,b], c]
            right = rows[:, table]      # right[a,b,c] = t[a, t[b,c]]
            if not np.array_equal(left, right):
                a, b, c = np.argwhere(left != right)[0]
                raise NotAGroup("non-associative",
                                f"({int(a) + start}*{int(b)})*{int(c)} != "
                                f"{int(a) + start}*({int(b)}*{int(c)})")
    else:
        rng = np.random.default_rng(_ASSOC_SEED)
        a, b, c = rng.integers(0, n, size=(3, RANDOM_ASSOC_SAMPLES))
        left = table[table[a, b], c]
        right = table[a, table[b, c]]
        if not np.array_equal(left, right):
            i = int(np.argmax(left != right))
            raise NotAGroup("non-associative",
                            f"sampled triple ({a[i]},{b[i]},{c[i]})")


def build_from_table(table: Sequence[Sequence[int]] | np.ndarray, *,
                     labels: Sequence[str] | None = None,
                     name: str | None = None,
                     order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Validate a square multiplication table and return the group.

    The identity is relabeled to index 0 (by swapping indices) if it is found
    elsewhere.  Raises :class:`NotAGroup` naming the first violated axiom.
    """
    try:
        t = np.array(table, dtype=np.int64)
    except (ValueError, TypeError) as exc:
        raise NotAGroup("not-closed", f"malformed table: {exc}") from None
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise NotAGroup("not-closed", f"table shape {t.shape} is not square")
    n = t.shape[0]
    if n > order_cap:
        raise CapExceeded(f"order {n} exceeds construction cap {order_cap}")
    if t.min() < 0 or t.max() >= n:
        raise NotAGroup("not-closed",
                        f"entry {int(t.min()) if t.min() < 0 else int(t.max())} "
                        f"outside 0..{n - 1}")

    idx = np.arange(n)
    row_ok = np.all(t == idx[None, :], axis=1)
    col_ok = np.all(t == idx[:, None], axis=0)
    identities = np.nonzero(row_ok & col_ok)[0]
    if identities.size == 0:
        raise NotAGroup("no-identity")
    e = int(identities[0])
    if e != 0:
        swap = idx.copy()
        swap[0], swap[e] = e, 0
        t = swap[t[np.ix_(swap, swap)]]
        if labels is not None:
            labels = [labels[s] for s in swap]

    inv = np.argmax(t == 0, axis=1)
    if not (np.all(t[idx, inv] == 0) and np.all(t[inv, idx] == 0)):
        bad = int(np.nonzero(~((t[idx, inv] == 0) & (t[inv, idx] == 0)))[0][0])
        raise NotAGroup("missing-inverse", f"element {bad}")

    _check_associativity(t)

    t32 = t.astype(np.int32)
    return FiniteGroup(t32, inv.astype(np.int32),
                       labels=tuple(labels) if labels is not None else None,
                       name=name)


def compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """Left-to-right composition: apply p first, then q."""
    return tuple(q[i] for i in p)


def build_from_permutations(generators: Iterable[Sequence[int]], *,
                            name: str | None = None,
                            order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Closure of permutation generators under composition.

    Elements are numbered by breadth-first discovery from the identity,
    applying generators in input order; raises :class:`CapExceeded` if the
    closure grows past ``order_cap``.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    if gens:
        m = len(gens[0])
        for g in gens:
            if len(g) != m or sorted(g) != list(range(m)):
                raise ValueError(f"generator {g} is not a permutation of 0..{m - 1}")
    else:
        m = 1
    ident = tuple(range(m))

    elems: list[tuple[int, ...]] = [ident]
    index = {ident: 0}
    queue = 0
    while queue < len(elems):
        cur = elems[queue]
        queue += 1
        for g in gens:
            nxt = compose(cur, g)
            if nxt not in index:
                if len(elems) >= order_cap:
                    raise CapExceeded(
                        f"permutation closure exceeds cap {order_cap}")
                index[nxt] = len(elems)
                elems.append(nxt)

    n = len(elems)
    table = [[0] * n for _ in range(n)]
    for i, p in enumerate(elems):
        row = table[i]
        for j, q in enumerate(elems):
            row[j] = index[compose(p, q)]

    sep = "" if m <= 10 else ","
    labels = [sep.join(str(x) for x in p) for p in elems]
    group = build_from_table(table, labels=labels,
                             name=name or f"perm[{n} on {m}]",
                             order_cap=order_cap)
    group.perm_images = tuple(elems)
    return group


# --- builtin families -------------------------------------------------------

def _cyclic_table(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def _dihedral_table(order: int) -> tuple[list[list[int]], list[str]]:
    # element f*n + j  <->  r^j s^f  with  s r s = r^-1
    n = order // 2
    table = [[0] * order for _ in range(order)]
    for j1, f1, j2, f2 in product(range(n), (0, 1), range(n), (0, 1)):
        j = (j1 + (j2 if f1 == 0 else -j2)) % n
        f = f1 ^ f2
        table[f1 * n + j1][f2 * n + j2] = f * n + j
    labels = [("e" if j == 0 else f"r{j}") for j in range(n)]
    labels += [f"s{j}" for j in range(n)]
    return table, labels


_QUATERNION_UNITS = (
    ((0, 0), (1, 0), (2, 0), (3, 0)),
    ((1, 0), (0, 1), (3, 0), (2, 1)),
    ((2, 0), (3, 1), (0, 1), (1, 0)),
    ((3, 0), (2, 0), (1, 1), (0, 1)),
)


def _quaternion_table() -> tuple[list[list[int]], list[str]]:
    # element 2u + s  <->  (-1)^s * unit_u  with units 1, i, j, k
    def mul(x: int, y: int) -> int:
        u1, s1 = divmod(x, 2)
        u2, s2 = divmod(y, 2)
        u, flip = _QUATERNION_UNITS[u1][u2]
        return 2 * u + (s1 ^ s2 ^ flip)

    table = [[mul(x, y) for y in range(8)] for x in range(8)]
    labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return table, labels


def _sl23_table() -> tuple[list[list[int]], list[str]]:
    # 2x2 matrices over the 3-element field with determinant 1; the identity
    # first, then the rest in row-major lexicographic order of the entries
    mats = [(a, b, c, d)
            for a, b, c, d in product(range(3), repeat=4)
            if (a * d - b * c) % 3 == 1]
    ident = (1, 0, 0, 1)
    elems = [ident] + [m for m in mats if m != ident]
    index = {m: i for i, m in enumerate(elems)}

    def mul(x, y):
        a, b, c, d = x
        p, q, r, s = y
        return ((a * p + b * r) % 3, (a * q + b * s) % 3,
                (c * p + d * r) % 3, (c * q + d * s) % 3)

    table = [[index[mul(x, y)] for y in elems] for x in elems]
    labels = ["".join(map(str, m)) for m in elems]
    return table, labels


def direct_product(a: FiniteGroup, b: FiniteGroup, *,
                   name: str | None = None,
                   order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Direct product with index (x, y) -> x*|B| + y."""
    na, nb = a.order, b.order
    if na * nb > order_cap:
        raise CapExceeded(f"product order {na * nb} exceeds cap {order_cap}")
    ta = a.mul_table.astype(np.int64)
    tb = b.mul_table.astype(np.int64)
    big = (ta[:, None, :, None] * nb + tb[None, :, None, :])
    table = big.reshape(na * nb, na * nb)
    labels = None
    if a.labels is not None and b.labels is not None:
        labels = [f"{la}|{lb}" for la in a.labels for lb in b.labels]
    return build_from_table(table, labels=labels, name=name,
                            order_cap=order_cap)


def _split_args(text: str) -> list[str]:
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def builtin(spec: str, *, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Construct a named group family member, e.g. ``dihedral(6)``.

    Families: ``cyclic(n)``, ``dihedral(2n)`` (parameter is the group order),
    ``symmetric(n<=5)``, ``alternating(n<=5)``, ``quaternion``, ``sl23`` and
    ``product(spec,spec)``.
    """
    text = spec.replace(" ", "").lower()
    if "(" in text:
        if not text.endswith(")"):
            raise UnknownFamily(f"malformed family spec {spec!r}")
        family, argtext = text[:-1].split("(", 1)
        args = _split_args(argtext)
    else:
        family, args = text, []

    def int_arg() -> int:
        if len(args) != 1:
            raise ParameterOutOfRange(f"{family} takes one integer parameter")
        try:
            return int(args[0])
        except ValueError:
            raise ParameterOutOfRange(
                f"{family} parameter {args[0]!r} is not an integer") from None

    def no_args() -> None:
        if args:
            raise ParameterOutOfRange(f"{family} takes no parameter")

    if family == "cyclic":
        n = int_arg()
        if n < 1:
            raise ParameterOutOfRange(f"cyclic order must be >= 1, got {n}")
        if n > order_cap:
            raise CapExceeded(f"order {n} exceeds cap {order_cap}")
        labels = ["e"] + [f"g{k}" for k in range(1, n)]
        return build_from_table(_cyclic_table(n), labels=labels,
                                name=f"cyclic({n})", order_cap=order_cap)
    if family == "dihedral":
        m = int_arg()
        if m < 2 or m % 2:
            raise ParameterOutOfRange(
                f"dihedral order must be even and >= 2, got {m}")
        if m > order_cap:
            raise CapExceeded(f"order {m} exceeds cap {order_cap}")
        table, labels = _dihedral_table(m)
        return build_from_table(table, labels=labels,
                                name=f"dihedral({m})", order_cap=order_cap)
    if family == "symmetric":
        n = int_arg()
        if not 1 <= n <= 5:
            raise ParameterOutOfRange(f"symmetric degree must be 1..5, got {n}")
        gens = []
        if n >= 2:
            swap = [1, 0] + list(range(2, n))
            cycle = [(i + 1) % n for i in range(n)]
            gens = [swap, cycle]
        return build_from_permutations(gens, name=f"symmetric({n})",
                                       order_cap=order_cap)
    if family == "alternating":
        n = int_arg()
        if not 1 <= n <= 5:
            raise ParameterOutOfRange(
                f"alternating degree must be 1..5, got {n}")
        gens = []
        for i in range(2, n):
            img = list(range(n))
            img[0], img[1], img[i] = 1, i, 0
            gens.append(img)
        return build_from_permutations(gens, name=f"alternating({n})",
                                       order_cap=order_cap)
    if family == "quaternion":
        no_args()
        table, labels = _quaternion_table()
        return build_from_table(table, labels=labels, name="quaternion",
                                order_cap=order_cap)
    if family == "sl23":
        no_args()
        table, labels = _sl23_table()
        return build_from_table(table, labels=labels, name="sl23",
                                order_cap=order_cap)
    if family == "product":
        if len(args) != 2:
            raise ParameterOutOfRange("product takes exactly two factor specs")
        a = builtin(args[0], order_cap=order_cap)
        b = builtin(args[1], order_cap=order_cap)
        return direct_product(a, b, name=f"product({a.name},{b.name})",
                              order_cap=order_cap)
    raise UnknownFamily(f"unknown group family {family!r}")
