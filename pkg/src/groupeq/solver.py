"""Exhaustive deciders for equation solvability and identity checking.

Assignments are enumerated in lexicographic order: variables sorted by
index, each domain sorted by element index.  The scan is vectorized: blocks
of linear assignment indices are decoded into per-variable columns and both
sides are evaluated with table lookups on whole columns.  Single-threaded
runs therefore return the lexicographically first witness/counterexample.

Parallel runs statically partition the linear index range into contiguous
chunks handed to forked worker processes that share one monotone stop flag;
the solvable/holds bit is identical to the serial run, but which valid
witness is returned is not deterministic.

Also home to the brute-force graph-coloring and 3-SAT oracles used to verify
the gadget compilers.
"""

from __future__ import annotations

import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .dimacs import CnfInstance, ColoringInstance
from .errors import InternalCheckFailed, SearchSpaceTooLarge
from .groups import FiniteGroup
from .terms import (Comm, Const, Identity, Inv, Mul, Term, Var, W, evaluate,
                    postorder, variables)

DEFAULT_CAP = 10 ** 8
DEFAULT_BLOCK = 1 << 16


@dataclass(frozen=True)
class EquationInstance:
    """Two terms over a group, with optional per-variable domain restrictions.

    Every variable of lhs/rhs ranges over the whole group unless ``domains``
    restricts it; restricted domains must be non-empty subsets.
    """

    group: FiniteGroup
    lhs: Term
    rhs: Term
    domains: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        norm = {}
        for var, dom in self.domains.items():
            members = tuple(sorted(set(int(x) for x in dom)))
            if not members:
                raise ValueError(f"empty domain for variable x{var}")
            if members[0] < 0 or members[-1] >= self.group.order:
                raise ValueError(f"domain of x{var} outside the group")
            norm[int(var)] = members
        object.__setattr__(self, "domains", norm)

    @property
    def variable_order(self) -> tuple[int, ...]:
        return tuple(sorted(set(variables(self.lhs)) | set(variables(self.rhs))))

    def domain_of(self, var: int) -> tuple[int, ...]:
        return self.domains.get(var, tuple(range(self.group.order)))

    def search_space(self) -> int:
        size = 1
        for var in self.variable_order:
            size *= len(self.domain_of(var))
        return size


@dataclass(frozen=True)
class SolveResult:
    solvable: bool
    witness: dict[int, int] | None
    assignments_examined: int


@dataclass(frozen=True)
class IdentityResult:
    holds: bool
    counterexample: dict[int, int] | None
    assignments_examined: int = 0


# --- term compilation to flat register programs ------------------------------

@dataclass(frozen=True)
class _Program:
    """Flat lookup program; ops reference register slots, DAG nodes shared."""

    ops: tuple[tuple, ...]
    n_regs: int
    result: int


def _compile_term(term: Term, var_slot: Mapping[int, int]) -> _Program:
    ops: list[tuple] = []
    reg_of: dict[int, int] = {}

    def emit(op: tuple) -> int:
        ops.append(op)
        return len(ops) - 1

    def comm(a: int, b: int) -> int:
        ia = emit(("inv", a))
        ib = emit(("inv", b))
        left = emit(("mul", ia, ib))
        right = emit(("mul", a, b))
        return emit(("mul", left, right))

    for node in postorder(term):
        if isinstance(node, Var):
            reg = emit(("var", var_slot[node.index]))
        elif isinstance(node, Const):
            reg = emit(("const", node.element))
        elif isinstance(node, Identity):
            reg = emit(("const", 0))
        elif isinstance(node, Mul):
            reg = emit(("mul", reg_of[id(node.left)], reg_of[id(node.right)]))
        elif isinstance(node, Inv):
            reg = emit(("inv", reg_of[id(node.child)]))
        elif isinstance(node, Comm):
            reg = comm(reg_of[id(node.left)], reg_of[id(node.right)])
        else:  # W: x^8 * [[[x,y1],y2],y3]
            x = reg_of[id(node.x)]
            sq = emit(("mul", x, x))
            sq = emit(("mul", sq, sq))
            x8 = emit(("mul", sq, sq))
            c = x
            for y in (node.y1, node.y2, node.y3):
                c = comm(c, reg_of[id(y)])
            reg = emit(("mul", x8, c))
        reg_of[id(node)] = reg
    return _Program(tuple(ops), len(ops), reg_of[id(term)])


def _run_program(prog: _Program, mul: np.ndarray, inv: np.ndarray,
                 columns: Sequence[np.ndarray]):
    regs: list = [None] * prog.n_regs
    for i, op in enumerate(prog.ops):
        kind = op[0]
        if kind == "var":
            regs[i] = columns[op[1]]
        elif kind == "const":
            regs[i] = op[1]
        elif kind == "mul":
            regs[i] = mul[regs[op[1]], regs[op[2]]]
        else:
            regs[i] = inv[regs[op[1]]]
    return regs[prog.result]


def _decode_block(start: int, stop: int,
                  domains: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Per-variable columns for linear indices [start, stop); the first
    variable is the most significant digit."""
    idx = np.arange(start, stop, dtype=np.int64)
    columns: list[np.ndarray] = [None] * len(domains)  # type: ignore
    for slot in range(len(domains) - 1, -1, -1):
        dom = domains[slot]
        columns[slot] = dom[idx % len(dom)]
        idx //= len(dom)
    return columns


@dataclass(frozen=True)
class _ScanJob:
    mul: np.ndarray
    inv: np.ndarray
    lhs: _Program
    rhs: _Program
    domains: tuple[np.ndarray, ...]
    want_equal: bool
    block: int


def _scan_range(job: _ScanJob, start: int, stop: int,
                stop_event=None) -> tuple[int | None, int]:
    """Scan [start, stop); returns (hit linear index or None, rows examined)."""
    examined = 0
    pos = start
    while pos < stop:
        if stop_event is not None and stop_event.is_set():
            return None, examined
        end = min(pos + job.block, stop)
        if job.domains:
            columns = _decode_block(pos, end, job.domains)
            rows = end - pos
        else:
            columns = []
            rows = 1
        lhs = _run_program(job.lhs, job.mul, job.inv, columns)
        rhs = _run_program(job.rhs, job.mul, job.inv, columns)
        mask = (lhs == rhs) if job.want_equal else (lhs != rhs)
        mask = np.broadcast_to(mask, (rows,))
        hits = np.nonzero(mask)[0]
        if hits.size:
            offset = int(hits[0])
            return pos + offset, examined + offset + 1
        examined += rows
        pos = end
    return None, examined


_WORKER_EVENT = None


def _init_worker(event):
    global _WORKER_EVENT
    _WORKER_EVENT = event


def _worker_scan(job: _ScanJob, start: int, stop: int):
    hit, examined = _scan_range(job, start, stop, stop_event=_WORKER_EVENT)
    if hit is not None and _WORKER_EVENT is not None:
        _WORKER_EVENT.set()
    return hit, examined


def _decode_assignment(linear: int, order: tuple[int, ...],
                       domains: Sequence[np.ndarray]) -> dict[int, int]:
    out: dict[int, int] = {}
    for slot in range(len(order) - 1, -1, -1):
        dom = domains[slot]
        out[order[slot]] = int(dom[linear % len(dom)])
        linear //= len(dom)
    return dict(sorted(out.items()))


def _search(inst: EquationInstance, want_equal: bool, workers: int,
            cap: int, block: int) -> tuple[dict[int, int] | None, int]:
    total = inst.search_space()
    if total > cap:
        raise SearchSpaceTooLarge(total, cap)
    order = inst.variable_order
    domains = tuple(np.array(inst.domain_of(v), dtype=np.int64) for v in order)
    slot = {v: i for i, v in enumerate(order)}
    job = _ScanJob(inst.group.mul_table.astype(np.int64),
                   inst.group.inv_table.astype(np.int64),
                   _compile_term(inst.lhs, slot), _compile_term(inst.rhs, slot),
                   domains, want_equal, block)

    hit: int | None = None
    examined = 0
    if workers <= 1 or total <= 4 * block:
        hit, examined = _scan_range(job, 0, total)
    else:
        chunk_count = min(workers * 4, max(1, total // block))
        bounds = [total * i // chunk_count for i in range(chunk_count + 1)]
        try:
            ctx = multiprocessing.get_context("fork")
        except ValueError:
            hit, examined = _scan_range(job, 0, total)
        else:
            event = ctx.Event()
            hits: list[int] = []
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx,
                                     initializer=_init_worker,
                                     initargs=(event,)) as pool:
                futures = [pool.submit(_worker_scan, job, bounds[i],
                                       bounds[i + 1])
                           for i in range(chunk_count)]
                for fut in futures:
                    h, ex = fut.result()
                    examined += ex
                    if h is not None:
                        hits.append(h)
            hit = min(hits) if hits else None

    if hit is None:
        return None, examined
    return _decode_assignment(hit, order, domains), examined


def solve_eq(inst: EquationInstance, *, workers: int = 1,
             cap: int = DEFAULT_CAP, block: int = DEFAULT_BLOCK) -> SolveResult:
    """Decide whether lhs = rhs has a solution over the given domains."""
    witness, examined = _search(inst, True, workers, cap, block)
    if witness is not None:
        if evaluate(inst.lhs, inst.group, witness) != \
                evaluate(inst.rhs, inst.group, witness):
            raise InternalCheckFailed("witness failed re-evaluation")
        return SolveResult(True, witness, examined)
    return SolveResult(False, None, examined)


def check_id(inst: EquationInstance, *, workers: int = 1,
             cap: int = DEFAULT_CAP, block: int = DEFAULT_BLOCK) -> IdentityResult:
    """Decide whether lhs = rhs holds for every assignment."""
    counterexample, examined = _search(inst, False, workers, cap, block)
    if counterexample is not None:
        if evaluate(inst.lhs, inst.group, counterexample) == \
                evaluate(inst.rhs, inst.group, counterexample):
            raise InternalCheckFailed("counterexample failed re-evaluation")
        return IdentityResult(False, counterexample, examined)
    return IdentityResult(True, None, examined)


def default_workers() -> int:
    """Worker count from the GROUPEQ_WORKERS environment variable, default 1."""
    raw = os.environ.get("GROUPEQ_WORKERS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# --- combinatorial oracles ----------------------------------------------------

@dataclass(frozen=True)
class ColoringResult:
    colorable: bool
    coloring: tuple[int, ...] | None


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    assignment: tuple[bool, ...] | None


def coloring_oracle(graph: ColoringInstance, k: int, *,
                    cap: int = DEFAULT_CAP) -> ColoringResult:
    """Brute force over all k^|V| colorings, first proper coloring wins."""
    if k < 1:
        raise ValueError("need at least one color")
    n = graph.vertex_count
    if k ** n > cap:
        raise SearchSpaceTooLarge(k ** n, cap)
    for coloring in product(range(k), repeat=n):
        if all(coloring[u] != coloring[v] for u, v in graph.edges):
            return ColoringResult(True, coloring)
    return ColoringResult(False, None)


def sat_oracle(cnf: CnfInstance, *, max_variables: int = 25) -> SatResult:
    """Exhaustive truth-table search; limited to 25 variables."""
    n = cnf.variable_count
    if n > max_variables:
        raise SearchSpaceTooLarge(2 ** n, 2 ** max_variables)
    for bits in range(1 << n):
        assignment = tuple(bool(bits >> i & 1) for i in range(n))
        if all(any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause)
               for clause in cnf.clauses):
            return SatResult(True, assignment)
    return SatResult(False, None)
