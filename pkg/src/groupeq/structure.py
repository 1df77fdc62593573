"""Subgroup lattice objects, series, quotients, and reduction targets.

All subgroup computations work inside the parent group's multiplication
table; a subgroup is materialized as a standalone group only where a genuine
quotient has to be formed.  Every selection (generators, witnesses, coset
representatives) breaks ties by smallest element index so that repeated runs
produce identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (CapExceeded, InternalCheckFailed, IsNilpotent, NotNormal,
                     NotSolvable)
from .groups import FiniteGroup, build_from_table

NORMAL_ENUM_CAP = 200


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of ``parent`` as a frozen member set of element indices."""

    parent: FiniteGroup
    members: frozenset[int]
    is_normal: bool

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def __contains__(self, g: int) -> bool:
        return g in self.members

    def __le__(self, other: "Subgroup") -> bool:
        return self.members <= other.members

    def __repr__(self) -> str:
        return (f"Subgroup(order={self.order} of {self.parent.name}, "
                f"normal={self.is_normal})")


def _check_is_subgroup(parent: FiniteGroup, members: frozenset[int]) -> None:
    rows = parent.rows
    inv = parent.inv_list
    if 0 not in members:
        raise ValueError("subgroup must contain the identity")
    for a in members:
        if inv[a] not in members:
            raise ValueError(f"subgroup not closed under inversion at {a}")
        row = rows[a]
        for b in members:
            if row[b] not in members:
                raise ValueError(f"subgroup not closed under product {a}*{b}")


def _compute_normal(parent: FiniteGroup, members: frozenset[int]) -> bool:
    rows = parent.rows
    inv = parent.inv_list
    for g in parent.elements():
        gi = inv[g]
        for s in members:
            if rows[rows[gi][s]][g] not in members:
                return False
    return True


def subgroup(parent: FiniteGroup, members: Iterable[int], *,
             verify: bool = True) -> Subgroup:
    """Wrap a member set as a Subgroup, checking closure under mul/inv."""
    mset = frozenset(int(m) for m in members)
    if verify:
        _check_is_subgroup(parent, mset)
    return Subgroup(parent, mset, _compute_normal(parent, mset))


def whole_group(parent: FiniteGroup) -> Subgroup:
    return Subgroup(parent, frozenset(parent.elements()), True)


def trivial_subgroup(parent: FiniteGroup) -> Subgroup:
    return Subgroup(parent, frozenset((0,)), True)


def _as_subgroup(x: FiniteGroup | Subgroup) -> Subgroup:
    if isinstance(x, Subgroup):
        return x
    return whole_group(x)


def closure(parent: FiniteGroup, seed: Iterable[int]) -> Subgroup:
    """Smallest subgroup of ``parent`` containing ``seed``."""
    rows = parent.rows
    inv = parent.inv_list
    members = {0}
    queue = []
    for s in set(seed):
        s = int(s)
        if s not in members:
            members.add(s)
            queue.append(s)
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        candidates = [inv[x]]
        for y in tuple(members):
            candidates.append(rows[x][y])
            candidates.append(rows[y][x])
        for c in candidates:
            if c not in members:
                members.add(c)
                queue.append(c)
    return Subgroup(parent, frozenset(members),
                    _compute_normal(parent, frozenset(members)))


def normal_closure(parent: FiniteGroup, a: int) -> Subgroup:
    """Smallest normal subgroup of ``parent`` containing ``a``."""
    rows = parent.rows
    inv = parent.inv_list
    conjugates = {rows[rows[inv[g]][a]][g] for g in parent.elements()}
    sub = closure(parent, conjugates)
    # generated by a conjugation-closed set, hence normal
    return Subgroup(parent, sub.members, True)


def commutator_subgroup(v: FiniteGroup | Subgroup,
                        w: FiniteGroup | Subgroup) -> Subgroup:
    """[V, W]: subgroup generated by all commutators [v, w]."""
    V = _as_subgroup(v)
    W = _as_subgroup(w)
    parent = V.parent
    if W.parent is not parent:
        raise ValueError("subgroups live in different parent groups")
    gens = {parent.commutator(a, b) for a in V.members for b in W.members}
    return closure(parent, gens)


def centralizer(parent: FiniteGroup, elems: Iterable[int]) -> Subgroup:
    """All elements commuting with everything in ``elems``."""
    rows = parent.rows
    targets = sorted(set(elems))
    members = frozenset(x for x in parent.elements()
                        if all(rows[x][v] == rows[v][x] for v in targets))
    return Subgroup(parent, members, _compute_normal(parent, members))


def center(parent: FiniteGroup) -> Subgroup:
    return centralizer(parent, parent.elements())


def derived_series(x: FiniteGroup | Subgroup) -> list[Subgroup]:
    """[S, S', S'', ...] until stabilization (first entry is S itself)."""
    cur = _as_subgroup(x)
    series = [cur]
    while True:
        nxt = commutator_subgroup(cur, cur)
        if nxt.members == cur.members:
            return series
        series.append(nxt)
        cur = nxt


def lower_central_series(x: FiniteGroup | Subgroup) -> list[Subgroup]:
    """[S, [S,S], [S,[S,S]], ...] until stabilization."""
    top = _as_subgroup(x)
    series = [top]
    cur = top
    while True:
        nxt = commutator_subgroup(top, cur)
        if nxt.members == cur.members:
            return series
        series.append(nxt)
        cur = nxt


def upper_central_series(parent: FiniteGroup) -> list[Subgroup]:
    """[Z1, Z2, ...] until stabilization, Z1 the center."""
    series = []
    cur = frozenset((0,))
    while True:
        nxt = frozenset(x for x in parent.elements()
                        if all(parent.commutator(x, g) in cur
                               for g in parent.elements()))
        if nxt == cur and series:
            return series
        series.append(Subgroup(parent, nxt, True))
        if len(nxt) == parent.order:
            return series
        cur = nxt


def is_solvable(x: FiniteGroup | Subgroup) -> bool:
    return derived_series(x)[-1].order == 1


def is_nilpotent(x: FiniteGroup | Subgroup) -> bool:
    return lower_central_series(x)[-1].order == 1


def _engel_members(x: FiniteGroup | Subgroup) -> frozenset[int]:
    """Left Engel elements of x: g such that iterating n -> [n, g] from any
    h in x reaches the identity.

    The map is iterated at most |x| times; since [e, g] = e the identity is
    absorbing, so h is Engel-good for g exactly when the final value is e.
    """
    S = _as_subgroup(x)
    parent = S.parent
    members = np.array(S.sorted_members, dtype=np.int64)
    t = parent.mul_table.astype(np.int64)
    inv = parent.inv_table.astype(np.int64)
    good = []
    for g in members:
        vals = members.copy()
        gi = inv[g]
        for _ in range(len(members)):
            vals = t[t[t[inv[vals], gi], vals], g]
            if not vals.any():
                break
        if not vals.any():
            good.append(int(g))
    return frozenset(good)


def fitting_subgroup(x: FiniteGroup | Subgroup) -> Subgroup:
    """Largest nilpotent normal subgroup, via the left-Engel characterization.

    The Engel set is re-verified to be a nilpotent subgroup (normal in the
    ambient x); a failure signals an implementation bug.
    """
    S = _as_subgroup(x)
    parent = S.parent
    members = _engel_members(S)
    try:
        _check_is_subgroup(parent, members)
    except ValueError as exc:
        raise InternalCheckFailed(f"Engel set is not a subgroup: {exc}") from None
    fit = Subgroup(parent, members, _compute_normal(parent, members))
    rows = parent.rows
    inv = parent.inv_list
    for g in S.members:
        gi = inv[g]
        if any(rows[rows[gi][s]][g] not in members for s in members):
            raise InternalCheckFailed("Engel set is not normal in its group")
    if not is_nilpotent(fit):
        raise InternalCheckFailed("Engel set is not nilpotent")
    return fit


def normal_subgroups(parent: FiniteGroup,
                     cap: int = NORMAL_ENUM_CAP) -> list[Subgroup]:
    """All normal subgroups, as normal closures of elements closed under joins.

    Exhaustive-oracle machinery; capped at order ``cap``.
    """
    if parent.order > cap:
        raise CapExceeded(
            f"normal-subgroup enumeration capped at order {cap}")
    found: dict[frozenset[int], Subgroup] = {}
    triv = trivial_subgroup(parent)
    found[triv.members] = triv
    for a in range(1, parent.order):
        sub = normal_closure(parent, a)
        found.setdefault(sub.members, sub)
    while True:
        new = []
        items = list(found.values())
        for i, A in enumerate(items):
            for B in items[i + 1:]:
                join = A.members | B.members
                if join in found:
                    continue
                sub = closure(parent, join)
                if sub.members not in found:
                    new.append(Subgroup(parent, sub.members, True))
        if not new:
            break
        for sub in new:
            found.setdefault(sub.members, sub)
    return sorted(found.values(), key=lambda s: (s.order, s.sorted_members))


def fitting_subgroup_via_normal_subgroups(parent: FiniteGroup) -> Subgroup:
    """Oracle twin of :func:`fitting_subgroup`: largest nilpotent normal
    subgroup found by exhaustive enumeration."""
    nilpotents = [s for s in normal_subgroups(parent) if is_nilpotent(s)]
    best = max(nilpotents, key=lambda s: s.order)
    for s in nilpotents:
        if not s <= best:
            raise InternalCheckFailed(
                "nilpotent normal subgroups have no unique maximum")
    return best


def minimal_normal_subgroups(parent: FiniteGroup) -> list[Subgroup]:
    """Inclusion-minimal nontrivial normal subgroups.

    Every minimal normal subgroup is the normal closure of each of its
    non-identity elements, so the inclusion-minimal distinct closures are
    exactly the minimal normal subgroups.
    """
    closures: dict[frozenset[int], Subgroup] = {}
    for a in range(1, parent.order):
        sub = normal_closure(parent, a)
        closures.setdefault(sub.members, sub)
    subs = list(closures.values())
    minimal = [s for s in subs
               if not any(o.members < s.members for o in subs)]
    return sorted(minimal, key=lambda s: (s.order, s.sorted_members))


@dataclass(frozen=True)
class QuotientMap:
    """Surjection of ``parent`` onto ``quotient`` with kernel ``kernel``.

    ``coset_rep[g]`` is the quotient index of g's coset; cosets are numbered
    by their smallest member, so the identity coset is index 0.  ``reps[c]``
    is that smallest member.
    """

    parent: FiniteGroup
    kernel: Subgroup
    coset_rep: tuple[int, ...]
    reps: tuple[int, ...]
    quotient: FiniteGroup

    def apply(self, g: int) -> int:
        return self.coset_rep[g]


def quotient(parent: FiniteGroup, kernel: Subgroup) -> QuotientMap:
    """Quotient by a normal subgroup; raises :class:`NotNormal` otherwise."""
    if kernel.parent is not parent:
        raise ValueError("kernel belongs to a different group")
    if not kernel.is_normal:
        raise NotNormal(f"subgroup of order {kernel.order} is not normal")
    rows = parent.rows
    kmembers = kernel.sorted_members
    n = parent.order
    coset_min = [min(rows[g][k] for k in kmembers) for g in range(n)]
    reps = sorted(set(coset_min))
    index_of = {m: i for i, m in enumerate(reps)}
    coset_rep = tuple(index_of[coset_min[g]] for g in range(n))
    q = len(reps)
    table = [[index_of[coset_min[rows[reps[i]][reps[j]]]] for j in range(q)]
             for i in range(q)]
    qgroup = build_from_table(table, name=f"{parent.name}/[{kernel.order}]")
    # the coset map must be a homomorphism onto the quotient table
    cr = np.array(coset_rep, dtype=np.int64)
    if not np.array_equal(cr[parent.mul_table.astype(np.int64)],
                          qgroup.mul_table.astype(np.int64)[cr[:, None], cr[None, :]]):
        raise InternalCheckFailed("coset map is not a homomorphism")
    return QuotientMap(parent, kernel, coset_rep, tuple(reps), qgroup)


def materialize(sub: Subgroup) -> tuple[FiniteGroup, tuple[int, ...]]:
    """Reindex a subgroup as a standalone group.

    Returns the group and the map new-index -> parent-index (members in
    ascending parent order, so the identity stays at 0).
    """
    elems = sub.sorted_members
    index_of = {g: i for i, g in enumerate(elems)}
    rows = sub.parent.rows
    table = [[index_of[rows[a][b]] for b in elems] for a in elems]
    labels = None
    if sub.parent.labels is not None:
        labels = [sub.parent.labels[g] for g in elems]
    group = build_from_table(table, labels=labels,
                             name=f"{sub.parent.name}|sub[{sub.order}]")
    return group, elems


# --- classification and reduction targets -----------------------------------

CASE_NILPOTENT = "nilpotent"
CASE_NON_SOLVABLE = "non-solvable"
CASE_ONE = "case1"   # exp(L / F(L)) > 2: commutator signature suffices
CASE_TWO = "case2"   # exp(L / F(L)) = 2: the w operation is needed


@dataclass(frozen=True)
class Classification:
    kind: str
    last_non_nilpotent: Subgroup | None = None
    fitting_order: int | None = None
    quotient_exponent: int | None = None


def last_non_nilpotent_derived(parent: FiniteGroup) -> Subgroup:
    """The derived-series member L with L non-nilpotent but L' nilpotent.

    The series starts at the group itself, so L may be the whole group.
    """
    series = derived_series(parent)
    if series[-1].order != 1:
        raise NotSolvable(f"{parent.name} is not solvable")
    for sub in reversed(series):
        if not is_nilpotent(sub):
            return sub
    raise IsNilpotent(f"{parent.name} is nilpotent")


def _analyze(parent: FiniteGroup):
    """Materialize L, compute F(L) and exp(L/F(L)) for a solvable
    non-nilpotent group."""
    L = last_non_nilpotent_derived(parent)
    lgroup, lmap = materialize(L)
    fit = fitting_subgroup(lgroup)
    qmap = quotient(lgroup, fit)
    return L, lgroup, lmap, fit, qmap.quotient.exponent


def classify(parent: FiniteGroup) -> Classification:
    """Case split on exp(L/F(L)) for solvable non-nilpotent groups."""
    if is_nilpotent(parent):
        return Classification(CASE_NILPOTENT)
    if not is_solvable(parent):
        return Classification(CASE_NON_SOLVABLE)
    L, _, _, fit, exp_lf = _analyze(parent)
    kind = CASE_ONE if exp_lf > 2 else CASE_TWO
    return Classification(kind, L, fit.order, exp_lf)


@dataclass(frozen=True)
class ReductionTarget:
    """A quotient group with a minimal normal subgroup moved by commutators.

    ``group`` (call it H) has minimal normal subgroup ``minimal_normal`` (N)
    with [H, N] = N and [H', N] = {e}.  ``driver`` is the image of the chosen
    element outside the Fitting subgroup whose commutator map was iterated;
    ``cycle_witness`` is the image of the element found on a commutator-map
    cycle avoiding the identity.  ``chain`` records the quotients taken from
    the materialized derived-series member down to ``group``.
    """

    group: FiniteGroup
    minimal_normal: Subgroup
    driver: int
    cycle_witness: int
    chain: tuple[QuotientMap, ...]
    index_over_2: bool
    base_exponent: int
    source_order: int
    fitting_order: int


def _pick_driver(lgroup: FiniteGroup, fit: Subgroup, exp_lf: int) -> int:
    """Smallest element outside F(L); if exp(L/F(L)) > 2, also require its
    square outside F(L)."""
    for g in lgroup.elements():
        if g in fit.members:
            continue
        if exp_lf > 2 and lgroup.mul(g, g) in fit.members:
            continue
        return g
    raise InternalCheckFailed("no generator found outside the Fitting subgroup")


def _find_cycle_witness(lgroup: FiniteGroup, g: int) -> int:
    """First element (by start index) on a cycle of x -> [x, g] avoiding e.

    Candidates are scanned in index order; the orbit of a candidate either
    reaches e (rejected) or re-enters itself, in which case the first
    repeated element lies on the cycle and is returned.
    """
    for h in lgroup.elements():
        x = h
        seen = set()
        while True:
            if x == 0:
                break
            if x in seen:
                return x
            seen.add(x)
            x = lgroup.commutator(x, g)
    raise InternalCheckFailed("no commutator-map cycle avoiding the identity")


def _extract_minimal_normal(hgroup: FiniteGroup, a_img: int) -> Subgroup:
    enclosing = normal_closure(hgroup, a_img)
    candidates = [m for m in minimal_normal_subgroups(hgroup)
                  if m.members <= enclosing.members]
    if not candidates:
        raise InternalCheckFailed(
            "no minimal normal subgroup inside the witness closure")
    return min(candidates, key=lambda s: s.sorted_members)


def _finish_target(hgroup: FiniteGroup, g_img: int, a_img: int,
                   chain: tuple[QuotientMap, ...], exp_lf: int,
                   source_order: int, fitting_order: int) -> ReductionTarget:
    N = _extract_minimal_normal(hgroup, a_img)
    H = whole_group(hgroup)
    if commutator_subgroup(H, N).members != N.members:
        raise InternalCheckFailed("[H, N] != N")
    derived = commutator_subgroup(H, H)
    if commutator_subgroup(derived, N).order != 1:
        raise InternalCheckFailed("[H', N] != {e}")
    cent = centralizer(hgroup, N.members)
    index_over_2 = hgroup.order // cent.order > 2
    if index_over_2 != (exp_lf > 2):
        raise InternalCheckFailed(
            f"centralizer index {hgroup.order // cent.order} does not match "
            f"exp(L/F(L)) = {exp_lf}")
    return ReductionTarget(hgroup, N, g_img, a_img, chain, index_over_2,
                           exp_lf, source_order, fitting_order)


def equation_target(parent: FiniteGroup) -> ReductionTarget:
    """Reduction target for the equation-solvability pipeline.

    Quotients the materialized derived-series member L by the first member of
    the lower central series of L' that misses the cycle witness.
    """
    _, lgroup, _, fit, exp_lf = _analyze(parent)
    g = _pick_driver(lgroup, fit, exp_lf)
    a = _find_cycle_witness(lgroup, g)
    lprime = commutator_subgroup(lgroup, lgroup)
    K = next((s for s in lower_central_series(lprime) if a not in s.members),
             None)
    if K is None:
        raise InternalCheckFailed(
            "lower central series of L' never separates the cycle witness")
    qmap = quotient(lgroup, K)
    return _finish_target(qmap.quotient, qmap.apply(g), qmap.apply(a),
                          (qmap,), exp_lf, lgroup.order, fit.order)


def identity_target(parent: FiniteGroup) -> ReductionTarget:
    """Reduction target for the identity-checking pipeline.

    Repeatedly quotients by the centralizer of the derived subgroup until the
    cycle witness maps to a non-identity element centralizing it.
    """
    _, lgroup, _, fit, exp_lf = _analyze(parent)
    g = _pick_driver(lgroup, fit, exp_lf)
    a = _find_cycle_witness(lgroup, g)
    hgroup, g_img, a_img = lgroup, g, a
    chain: list[QuotientMap] = []
    for _ in range(lgroup.order):
        derived = commutator_subgroup(hgroup, hgroup)
        cent = centralizer(hgroup, derived.members)
        if a_img != 0 and a_img in cent.members:
            return _finish_target(hgroup, g_img, a_img, tuple(chain), exp_lf,
                                  lgroup.order, fit.order)
        if cent.order == hgroup.order:
            break
        qmap = quotient(hgroup, cent)
        chain.append(qmap)
        hgroup = qmap.quotient
        g_img = qmap.apply(g_img)
        a_img = qmap.apply(a_img)
        if a_img == 0:
            break
    raise InternalCheckFailed(
        "centralizer-quotient chain never stabilized the cycle witness")
