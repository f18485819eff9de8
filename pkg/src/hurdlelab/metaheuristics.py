"""(1+1) EA and (1+1) MA run loops.

Accounting: one evaluation for the initial point, then per generation one
evaluation of the mutant (EA: the offspring; MA: the local-search input) plus,
for the MA, the neighbour evaluations spent by that generation's local search.
Hence ``evaluations_total == 1 + generations + ls_evaluations`` for both.
A run ends when the current point reaches the problem's optimum value or the
counter reaches the budget, whichever comes first.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .core import Bitstring, RandomStream, mutate_into
from .landscape import EvalCounter, UnitationProblem, metered
from .localsearch import LSKind, LSVariant, restart_ls, run_ls
from .records import ALGORITHMS, RunRecord

TRACE_CAP = 1 << 20


@njit(nogil=True, cache=True)
def ea_kernel(bits, z, table, opt, pm, budget, state, counter, trace):
    child = np.empty_like(bits)
    fx = metered(table, z, counter)
    gens = 0
    tlen = 0
    if trace.size > 0:
        trace[0] = fx
        tlen = 1
    while fx != opt and counter[0] < budget:
        zc = mutate_into(bits, child, z, pm, state)
        fy = metered(table, zc, counter)
        gens += 1
        if fy >= fx:
            bits[:] = child
            z = zc
            fx = fy
            if tlen < trace.size:
                trace[tlen] = fx
                tlen += 1
    return z, fx, gens, tlen


@njit(nogil=True, cache=True)
def ma_kernel(kind, bits, z, table, opt, pm, delta, budget, state, counter, trace):
    n = bits.size
    child = np.empty_like(bits)
    work = np.arange(n)
    fx = metered(table, z, counter)
    gens = 0
    ls_calls = 0
    improving = 0
    tlen = 0
    if trace.size > 0:
        trace[0] = fx
        tlen = 1
    while fx != opt and counter[0] < budget:
        zc = mutate_into(bits, child, z, pm, state)
        fy = metered(table, zc, counter)
        gens += 1
        if counter[0] < budget:
            zc, fy, _, _ = run_ls(kind, child, zc, fy, delta, table, state, counter, budget, work)
            ls_calls += 1
            if fy > fx:
                improving += 1
        if fy >= fx:
            bits[:] = child
            z = zc
            fx = fy
            if tlen < trace.size:
                trace[tlen] = fx
                tlen += 1
    return z, fx, gens, ls_calls, improving, tlen


def _start(problem, rng, initial):
    if initial is None:
        return Bitstring.random(problem.n, rng).array.copy()
    if initial.n != problem.n:
        raise ValueError("initial point has the wrong length")
    return initial.array.copy()


def _trace_buf(trace, budget):
    return np.empty(min(budget, TRACE_CAP) if trace else 0, dtype=np.int64)


def one_plus_one_ea(problem: UnitationProblem, p_m: float, budget: int, rng: RandomStream,
                    initial: Bitstring | None = None, trace: bool = False) -> RunRecord:
    if not 0.0 <= p_m <= 1.0:
        raise ValueError("mutation probability must lie in [0, 1]")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    bits = _start(problem, rng, initial)
    counter = EvalCounter()
    buf = _trace_buf(trace, budget)
    z0 = int(bits.size - np.count_nonzero(bits))
    _, fx, gens, tlen = ea_kernel(bits, z0, problem._table, problem.optimum_value, p_m,
                                  budget, rng.state, counter.cell, buf)
    return RunRecord(
        algorithm="ea",
        problem=problem.descriptor(),
        n=problem.n,
        w=getattr(problem, "w", None),
        pm=float(p_m),
        delta=None,
        seed=rng.seed,
        evaluations_total=counter.count,
        generations=int(gens),
        best_scaled_fitness=int(fx),
        success=bool(fx == problem.optimum_value),
        trace=buf[:tlen].tolist() if trace else None,
    )


def one_plus_one_ma(problem: UnitationProblem, variant: LSVariant, p_m: float, budget: int,
                    rng: RandomStream, initial: Bitstring | None = None,
                    trace: bool = False) -> RunRecord:
    """Mutation followed by local search each generation; the refined offspring
    replaces the current point unless it is strictly worse. The mutant itself is
    evaluated only as the local search's input."""
    if not 0.0 <= p_m <= 1.0:
        raise ValueError("mutation probability must lie in [0, 1]")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    bits = _start(problem, rng, initial)
    counter = EvalCounter()
    buf = _trace_buf(trace, budget)
    z0 = int(bits.size - np.count_nonzero(bits))
    _, fx, gens, ls_calls, improving, tlen = ma_kernel(
        int(variant.kind), bits, z0, problem._table, problem.optimum_value, p_m,
        variant.delta, budget, rng.state, counter.cell, buf)
    return RunRecord(
        algorithm=f"ma-{variant.label}",
        problem=problem.descriptor(),
        n=problem.n,
        w=getattr(problem, "w", None),
        pm=float(p_m),
        delta=variant.delta,
        seed=rng.seed,
        evaluations_total=counter.count,
        generations=int(gens),
        ls_calls=int(ls_calls),
        ls_evaluations=counter.count - 1 - int(gens),
        improving_ls_calls=int(improving),
        best_scaled_fitness=int(fx),
        success=bool(fx == problem.optimum_value),
        trace=buf[:tlen].tolist() if trace else None,
    )


class RunSpec:
    """One algorithm configuration on one problem; call it with a stream to run it."""

    def __init__(self, algorithm: str, problem: UnitationProblem, pm: float | None,
                 delta: int | None, budget: int):
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
        self.algorithm = algorithm
        self.problem = problem
        self.pm = pm
        self.delta = delta
        self.budget = budget

    def variant(self) -> LSVariant:
        return LSVariant(LSKind[self.algorithm.split("-")[1].upper()], self.delta)

    def __call__(self, rng: RandomStream) -> RunRecord:
        if self.algorithm == "ea":
            return one_plus_one_ea(self.problem, self.pm, self.budget, rng)
        if self.algorithm.startswith("ma-"):
            return one_plus_one_ma(self.problem, self.variant(), self.pm, self.budget, rng)
        return restart_ls(self.problem, self.variant(), self.budget, rng)

    def __repr__(self):
        return (f"RunSpec({self.algorithm}, {self.problem.descriptor()}, pm={self.pm}, "
                f"delta={self.delta}, budget={self.budget})")
