"""Shared corpora and generators for the test suite."""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations, combinations_with_replacement

import numpy as np

from groupeq import builtin
from groupeq.dimacs import CnfInstance, ColoringInstance
from groupeq.terms import (IDENTITY, Comm, Const, Inv, Mul, Term, Var, W)

# base families plus a handful of direct products, everything of order <= 48
BUILTIN_CORPUS_48 = (
    [f"cyclic({n})" for n in range(1, 49)]
    + [f"dihedral({m})" for m in range(2, 49, 2)]
    + [f"symmetric({n})" for n in range(1, 5)]
    + [f"alternating({n})" for n in range(1, 5)]
    + ["quaternion", "sl23"]
    + [
        "product(cyclic(2),dihedral(6))",
        "product(cyclic(3),symmetric(3))",
        "product(cyclic(2),alternating(4))",
        "product(cyclic(4),alternating(4))",
        "product(cyclic(2),quaternion)",
        "product(dihedral(6),dihedral(6))",
        "product(cyclic(5),dihedral(8))",
    ]
)


@lru_cache(maxsize=None)
def group(spec: str):
    return builtin(spec)


def corpus(max_order: int) -> list[str]:
    return [s for s in BUILTIN_CORPUS_48 if group(s).order <= max_order]


def solvable_non_nilpotent(max_order: int) -> list[str]:
    from groupeq import structure as st
    out = []
    for spec in corpus(max_order):
        g = group(spec)
        if st.is_solvable(g) and not st.is_nilpotent(g):
            out.append(spec)
    return out


# the 11 isomorphism-class representatives of graphs on 4 vertices
GRAPHS_4V = {
    "empty4": (),
    "K2+2K1": ((0, 1),),
    "P3+K1": ((0, 1), (1, 2)),
    "2K2": ((0, 1), (2, 3)),
    "K3+K1": ((0, 1), (0, 2), (1, 2)),
    "P4": ((0, 1), (1, 2), (2, 3)),
    "K1,3": ((0, 1), (0, 2), (0, 3)),
    "C4": ((0, 1), (1, 2), (2, 3), (0, 3)),
    "paw": ((0, 1), (0, 2), (1, 2), (0, 3)),
    "diamond": ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3)),
    "K4": ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)),
}


def four_vertex_graphs() -> list[tuple[str, ColoringInstance]]:
    return [(name, ColoringInstance(4, edges))
            for name, edges in GRAPHS_4V.items()]


def small_graphs() -> list[tuple[str, ColoringInstance]]:
    """Every labeled graph on 1, 2 and 3 vertices."""
    out = []
    for n in (1, 2, 3):
        possible = list(combinations(range(n), 2))
        for k in range(len(possible) + 1):
            for edges in combinations(possible, k):
                out.append((f"n{n}-{edges}", ColoringInstance(n, edges)))
    return out


def all_3var_clauses() -> list[tuple[int, int, int]]:
    """Clauses over variables 1..3 as sorted literal multisets."""
    literals = [1, -1, 2, -2, 3, -3]
    seen = set()
    for combo in combinations_with_replacement(literals, 3):
        seen.add(tuple(sorted(combo, key=lambda l: (abs(l), l < 0))))
    return sorted(seen)


def all_3var_cnfs(max_clauses: int = 3) -> list[CnfInstance]:
    """Formulas of up to ``max_clauses`` distinct clauses over 3 variables
    (clause literal order quotiented away), including the empty formula."""
    clauses = all_3var_clauses()
    out = [CnfInstance(3, ())]
    for k in range(1, max_clauses + 1):
        for formula in combinations(clauses, k):
            out.append(CnfInstance(3, formula))
    return out


def random_term(rng: random.Random, group_order: int, n_vars: int = 4,
                depth: int = 6, allow_w: bool = True,
                allow_inv: bool = True) -> Term:
    if depth <= 0 or rng.random() < 0.3:
        kind = rng.randrange(3)
        if kind == 0:
            return Var(rng.randrange(n_vars))
        if kind == 1:
            return Const(rng.randrange(group_order))
        return IDENTITY
    choices = ["mul", "comm"]
    if allow_inv:
        choices.append("inv")
    if allow_w:
        choices.append("w")
    kind = rng.choice(choices)
    sub = lambda: random_term(rng, group_order, n_vars, depth - 1,
                              allow_w, allow_inv)
    if kind == "mul":
        return Mul(sub(), sub())
    if kind == "inv":
        return Inv(sub())
    if kind == "comm":
        return Comm(sub(), sub())
    return W(sub(), sub(), sub(), sub())


def eval_columns(term: Term, g, columns: dict[int, np.ndarray]) -> np.ndarray:
    """Vectorized evaluation over assignment columns (one array per var)."""
    from groupeq.solver import _compile_term, _run_program
    order = sorted(columns)
    slots = {v: i for i, v in enumerate(order)}
    prog = _compile_term(term, slots)
    out = _run_program(prog, g.mul_table.astype(np.int64),
                       g.inv_table.astype(np.int64),
                       [columns[v] for v in order])
    if np.ndim(out) == 0 and columns:
        out = np.broadcast_to(out, next(iter(columns.values())).shape)
    return np.asarray(out)


def eval_exhaustive(term: Term, g, variables: tuple[int, ...]) -> np.ndarray:
    """Values of the term over all |G|^k assignments, lexicographic order."""
    n = g.order
    k = len(variables)
    idx = np.arange(n ** k, dtype=np.int64)
    columns = {}
    for pos in range(k - 1, -1, -1):
        columns[variables[pos]] = idx % n
        idx = idx // n
    if not columns:
        columns = {}
    return eval_columns(term, g, columns) if k else None
