"""Compile graph-coloring and 3-SAT instances into equations over a group.

The compilers take a group H together with a minimal normal subgroup N
satisfying [H, N] = N and [H', N] = {e} (produced by
``structure.equation_target`` / ``structure.identity_target``).

Coloring (needs |H / C_H(N)| > 2 cosets, one per color): the left-nested
commutator chain over the edge differences y_u * y_v^-1 acts on N as a
bijection exactly when every edge gets endpoint values in distinct
centralizer cosets, and collapses to the identity otherwise.

SAT (needs |H / C_H(N)| = 2): the w-chain consumes one literal triple per
clause; a triple keeps the chain bijective on N exactly when it contains
a centralizer element, which the literal encoding arranges to mean "the
clause is satisfied".

In both cases the chain input is replaced by a polynomial whose range is
exactly N, so the compiled instance quantifies over the whole group yet the
equation side effectively ranges over N.  The equation variant asks the
chain to reach a fixed non-identity element of N; the identity variant
asserts the chain is constantly the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .dimacs import CnfInstance, ColoringInstance
from .errors import (IndexNotTwo, IndexTooSmall, InternalCheckFailed,
                     NotApplicable, PreconditionFailed, WitnessInvalid)
from .groups import FiniteGroup
from .solver import (EquationInstance, check_id, coloring_oracle, sat_oracle,
                     solve_eq)
from .structure import (QuotientMap, Subgroup, centralizer,
                        commutator_subgroup, quotient, whole_group)
from .terms import (IDENTITY, Comm, Const, Inv, Mul, Term, Var, W, substitute)

VARIANT_EQ = "eq"
VARIANT_ID = "id"


def commutator_chain(k: int, *, x_var: int = 0,
                     y_vars: Sequence[int] | None = None) -> Term:
    """Left-nested commutator chain [[..[x, y1]..], yk]; length linear in k."""
    if k < 1:
        raise ValueError("chain needs at least one level")
    ys = tuple(y_vars) if y_vars is not None else tuple(range(1, k + 1))
    if len(ys) != k:
        raise ValueError(f"need {k} y-variables, got {len(ys)}")
    term: Term = Var(x_var)
    for y in ys:
        term = Comm(term, Var(y))
    return term


def w_chain(n: int, *, x_var: int = 0,
            y_vars: Sequence[int] | None = None) -> Term:
    """Nested w chain consuming three fresh y-variables per level."""
    if n < 1:
        raise ValueError("chain needs at least one level")
    ys = tuple(y_vars) if y_vars is not None else tuple(range(1, 3 * n + 1))
    if len(ys) != 3 * n:
        raise ValueError(f"need {3 * n} y-variables, got {len(ys)}")
    term: Term = Var(x_var)
    for i in range(n):
        term = W(term, Var(ys[3 * i]), Var(ys[3 * i + 1]), Var(ys[3 * i + 2]))
    return term


@dataclass(frozen=True)
class RangePolynomial:
    """Product of commutators [n_i, z_i] whose range is exactly the target
    subgroup; the z_i are fresh variables."""

    term: Term
    z_vars: tuple[int, ...]
    constants: tuple[int, ...]


def _check_target(group: FiniteGroup, target: Subgroup) -> Subgroup:
    if target.parent is not group:
        raise PreconditionFailed("target subgroup belongs to another group")
    if not target.is_normal:
        raise PreconditionFailed("target subgroup is not normal")
    H = whole_group(group)
    if commutator_subgroup(H, target).members != target.members:
        raise PreconditionFailed("[H, N] != N")
    derived = commutator_subgroup(H, H)
    if commutator_subgroup(derived, target).order != 1:
        raise PreconditionFailed("[H', N] != {e}")
    return centralizer(group, target.members)


def range_polynomial(group: FiniteGroup, target: Subgroup, *,
                     first_var: int = 0) -> RangePolynomial:
    """Greedy product of commutator factors covering the target subgroup.

    Maintains the achievable set S (initially {e}); while S != N it appends a
    factor [n, z_i] for the smallest n in N maximizing |S * {[n, z] : z}|.
    Progress is guaranteed by [H, N] = N; the computed range is re-checked to
    equal N.
    """
    if not target.is_normal:
        raise PreconditionFailed("target subgroup is not normal")
    H = whole_group(group)
    if commutator_subgroup(H, target).members != target.members:
        raise PreconditionFailed("[H, N] != N")
    rows = group.rows
    nontrivial_comm = any(
        rows[a][b] != rows[b][a] for a in target.members for b in target.members)
    if nontrivial_comm:
        raise PreconditionFailed("target subgroup is not abelian")

    reach = {n: frozenset(group.commutator(n, z) for z in group.elements())
             for n in target.sorted_members}
    achieved = frozenset((0,))
    factors: list[int] = []
    while achieved != target.members:
        best_n = None
        best_size = -1
        for n in target.sorted_members:
            if n == 0:
                continue
            size = len({rows[s][r] for s in achieved for r in reach[n]})
            if size > best_size:
                best_n, best_size = n, size
        if best_n is None or best_size <= len(achieved):
            raise InternalCheckFailed("range polynomial made no progress")
        factors.append(best_n)
        achieved = frozenset(rows[s][r] for s in achieved for r in reach[best_n])
    if not factors:
        # trivial target: single factor [e, z] keeps the shape and range {e}
        factors.append(0)
        achieved = frozenset((0,))
    z_vars = tuple(range(first_var, first_var + len(factors)))
    term: Term | None = None
    for n, z in zip(factors, z_vars):
        factor = Comm(Const(n), Var(z))
        term = factor if term is None else Mul(term, factor)
    if achieved != target.members:
        raise InternalCheckFailed("range polynomial range differs from target")
    return RangePolynomial(term, z_vars, tuple(factors))


@dataclass(frozen=True)
class ReductionOutput:
    """Compiled instance plus everything needed to translate witnesses back."""

    kind: str                     # "coloring" | "sat"
    variant: str                  # "eq" | "id"
    equation: EquationInstance    # chain with x replaced by the range polynomial
    restricted: EquationInstance  # same chain, x a variable restricted to N
    source: ColoringInstance | CnfInstance
    instance_vars: tuple[int, ...]   # equation variable per vertex / CNF variable
    z_vars: tuple[int, ...]
    target_subgroup: Subgroup
    centralizer: Subgroup
    cosets: QuotientMap
    rhs_kind: str                 # "nonidentity-n" | "identity-e"
    colors: int | None = None
    flip_const: int | None = None


def _rhs_for(variant: str, target: Subgroup) -> tuple[Term, str]:
    if variant == VARIANT_EQ:
        n = min(m for m in target.members if m != 0)
        return Const(n), "nonidentity-n"
    if variant == VARIANT_ID:
        return IDENTITY, "identity-e"
    raise ValueError(f"unknown variant {variant!r}")


def reduce_coloring(group: FiniteGroup, target: Subgroup,
                    graph: ColoringInstance,
                    variant: str = VARIANT_EQ) -> ReductionOutput:
    """Compile a graph into an equation/identity instance over ``group``.

    Vertex v gets variable x(1+v); edges are processed in sorted order.  An
    empty edge set degenerates to a single commutator against a fixed
    non-centralizing constant, which is solvable (every graph with no edges
    is colorable) and never the identity on N.
    """
    cent = _check_target(group, target)
    cosets = quotient(group, cent)
    colors = cosets.quotient.order
    if colors <= 2:
        raise IndexTooSmall(
            f"|H/C_H(N)| = {colors}; the coloring gadget needs > 2")

    vertex_vars = tuple(1 + v for v in range(graph.vertex_count))
    core: Term = Var(0)
    if graph.edges:
        for u, v in graph.edges:
            core = Comm(core, Mul(Var(1 + u), Inv(Var(1 + v))))
    else:
        b0 = min(g for g in group.elements() if g not in cent.members)
        core = Comm(core, Const(b0))

    rhs, rhs_kind = _rhs_for(variant, target)
    rp = range_polynomial(group, target,
                          first_var=1 + graph.vertex_count)
    lhs = substitute(core, 0, rp.term)
    equation = EquationInstance(group, lhs, rhs)
    restricted = EquationInstance(group, core, rhs,
                                  {0: target.sorted_members})
    return ReductionOutput("coloring", variant, equation, restricted, graph,
                           vertex_vars, rp.z_vars, target, cent, cosets,
                           rhs_kind, colors=colors)


def reduce_sat(group: FiniteGroup, target: Subgroup, cnf: CnfInstance,
               variant: str = VARIANT_EQ) -> ReductionOutput:
    """Compile a 3-CNF into an equation/identity instance over ``group``.

    CNF variable j (1-based) gets equation variable x(j); a positive literal
    becomes that variable, a negated one is premultiplied by a fixed
    non-centralizing constant b.  A witness value in C_H(N) decodes as TRUE.
    An empty formula degenerates to one w level with an always-centralizing
    triple, which is solvable.
    """
    cent = _check_target(group, target)
    index = group.order // cent.order
    if index != 2:
        raise IndexNotTwo(f"|H/C_H(N)| = {index}; the SAT gadget needs 2")
    b = min(g for g in group.elements() if g not in cent.members)
    return _build_sat_output(group, target, cent, b, cnf, variant)


def _canonical_clauses(cnf: CnfInstance) -> list[tuple[int, int, int]]:
    keyed = [tuple(sorted(clause, key=lambda l: (abs(l), l < 0)))
             for clause in cnf.clauses]
    return sorted(keyed)


def _build_sat_output(group: FiniteGroup, target: Subgroup, cent: Subgroup,
                      b: int, cnf: CnfInstance,
                      variant: str) -> ReductionOutput:
    cosets = quotient(group, cent)
    cnf_vars = tuple(1 + j for j in range(cnf.variable_count))

    def literal_term(lit: int) -> Term:
        var = Var(abs(lit))
        return var if lit > 0 else Mul(Const(b), var)

    core: Term = Var(0)
    clauses = _canonical_clauses(cnf)
    if clauses:
        for clause in clauses:
            core = W(core, *(literal_term(l) for l in clause))
    else:
        core = W(core, IDENTITY, IDENTITY, IDENTITY)

    rhs, rhs_kind = _rhs_for(variant, target)
    rp = range_polynomial(group, target, first_var=1 + cnf.variable_count)
    lhs = substitute(core, 0, rp.term)
    equation = EquationInstance(group, lhs, rhs)
    restricted = EquationInstance(group, core, rhs,
                                  {0: target.sorted_members})
    return ReductionOutput("sat", variant, equation, restricted, cnf,
                           cnf_vars, rp.z_vars, target, cent, cosets,
                           rhs_kind, flip_const=b)


def translate_witness(out: ReductionOutput,
                      witness: Mapping[int, int]):
    """Map an equation witness back to a coloring / truth assignment.

    Variables absent from the witness (possible for vertices not touching any
    edge) default to the identity.  The decoded object is re-checked against
    the source instance; a failure means the compiler is broken.
    """
    if out.variant != VARIANT_EQ:
        raise NotApplicable("identity-variant outputs have no witness")
    if out.kind == "coloring":
        coloring = tuple(out.cosets.apply(witness.get(var, 0))
                         for var in out.instance_vars)
        for u, v in out.source.edges:
            if coloring[u] == coloring[v]:
                raise WitnessInvalid(
                    f"edge ({u},{v}) is monochromatic in the decoded coloring")
        return coloring
    assignment = tuple(witness.get(var, 0) in out.centralizer.members
                       for var in out.instance_vars)
    for clause in out.source.clauses:
        if not any(assignment[abs(l) - 1] == (l > 0) for l in clause):
            raise WitnessInvalid(f"clause {clause} unsatisfied after decoding")
    return assignment


@dataclass(frozen=True)
class VerificationReport:
    kind: str
    variant: str
    solver_ok: bool          # equation solvable / identity holds
    oracle_ok: bool          # colorable / satisfiable
    agreement: bool          # decisions agree and any witness decodes cleanly
    restricted_ok: bool
    restricted_agrees: bool
    translated: tuple | None
    assignments_examined: int


def verify_reduction(out: ReductionOutput,
                     original: ColoringInstance | CnfInstance, *,
                     workers: int = 1, cap: int | None = None,
                     colors: int | None = None) -> VerificationReport:
    """Decide the compiled instance, run the matching oracle, and compare.

    Also decides the domain-restricted twin (x quantified directly over N, no
    range-polynomial substitution) and checks that it agrees.
    """
    kwargs = {"workers": workers}
    if cap is not None:
        kwargs["cap"] = cap

    if out.variant == VARIANT_EQ:
        main = solve_eq(out.equation, **kwargs)
        restricted = solve_eq(out.restricted, **kwargs)
        solver_ok, restricted_ok = main.solvable, restricted.solvable
        witness = main.witness
    else:
        main = check_id(out.equation, **kwargs)
        restricted = check_id(out.restricted, **kwargs)
        solver_ok, restricted_ok = main.holds, restricted.holds
        witness = None

    if out.kind == "coloring":
        oracle_ok = coloring_oracle(original,
                                    colors or out.colors).colorable
    else:
        oracle_ok = sat_oracle(original).satisfiable

    if out.variant == VARIANT_EQ:
        agreement = solver_ok == oracle_ok
    else:
        agreement = solver_ok == (not oracle_ok)

    translated = None
    if witness is not None:
        try:
            translated = translate_witness(out, witness)
        except WitnessInvalid:
            agreement = False

    return VerificationReport(out.kind, out.variant, solver_ok, oracle_ok,
                              agreement, restricted_ok,
                              restricted_ok == solver_ok, translated,
                              main.assignments_examined)
