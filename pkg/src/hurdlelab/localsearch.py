"""First- and best-improvement local search and the restarting wrapper.

The kernels work on a mutable uint8 array together with its zero-count and
current scaled fitness, and read fitness only through ``metered``. All of them
stop as soon as the shared counter reaches ``budget`` and report ``aborted``.

Depth counts outer passes for FILS and iterations (neighbourhood scans) for
BILS.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from numba import njit

from .core import Bitstring, RandomStream, next_below, random_bits_inplace, shuffle_inplace
from .landscape import EvalCounter, ScaledFitness, UnitationProblem, evaluate, metered
from .records import RunRecord

NO_BUDGET = (1 << 62)


class LSKind(IntEnum):
    FILS = 0
    BILS = 1


@dataclass(frozen=True)
class LSVariant:
    kind: LSKind
    delta: int

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("local search depth must be at least 1")

    @property
    def label(self) -> str:
        return self.kind.name.lower()


@dataclass(frozen=True)
class LSOutcome:
    result: Bitstring
    result_fitness: ScaledFitness
    passes_or_moves: int
    ls_evaluations: int
    improved: bool


@njit(nogil=True, cache=True)
def fils_kernel(bits, z, fx, delta, table, state, counter, budget, perm, keep_first):
    """Returns (z, fx, passes, aborted).

    ``perm`` is a 0-based workspace permutation, reshuffled before every pass
    unless ``keep_first`` is set, in which case the first pass scans it as given.
    """
    n = bits.size
    passes = 0
    for p in range(delta):
        if not (keep_first and p == 0):
            shuffle_inplace(perm, state)
        passes += 1
        better = False
        for k in range(n):
            if counter[0] >= budget:
                return z, fx, passes, True
            i = perm[k]
            zn = z + 1 if bits[i] == 1 else z - 1
            fy = metered(table, zn, counter)
            if fy > fx:
                bits[i] ^= 1
                z = zn
                fx = fy
                better = True
        if not better:
            break
    return z, fx, passes, False


@njit(nogil=True, cache=True)
def bils_kernel(bits, z, fx, delta, table, state, counter, budget, ties):
    """Returns (z, fx, moves, aborted). ``ties`` is an n-slot index workspace."""
    n = bits.size
    moves = 0
    for _ in range(delta):
        best = fx
        m = 0
        for i in range(n):
            if counter[0] >= budget:
                return z, fx, moves, True
            zn = z + 1 if bits[i] == 1 else z - 1
            fy = metered(table, zn, counter)
            if fy > best:
                best = fy
                ties[0] = i
                m = 1
            elif fy == best and fy > fx:
                ties[m] = i
                m += 1
        if m == 0:
            break
        j = ties[0] if m == 1 else ties[next_below(state, m)]
        z = z + 1 if bits[j] == 1 else z - 1
        bits[j] ^= 1
        fx = best
        moves += 1
    return z, fx, moves, False


@njit(nogil=True, cache=True)
def run_ls(kind, bits, z, fx, delta, table, state, counter, budget, work):
    if kind == 0:
        return fils_kernel(bits, z, fx, delta, table, state, counter, budget, work, False)
    return bils_kernel(bits, z, fx, delta, table, state, counter, budget, work)


@njit(nogil=True, cache=True)
def restart_kernel(kind, n, table, opt, delta, budget, state, counter):
    bits = np.empty(n, dtype=np.uint8)
    work = np.arange(n)
    restarts = 0
    ls_calls = 0
    improving = 0
    best = table.min()
    success = False
    while counter[0] < budget:
        z = random_bits_inplace(bits, state)
        fx = metered(table, z, counter)
        restarts += 1
        best = max(best, fx)
        if fx == opt:
            success = True
            break
        if counter[0] >= budget:
            break
        z2, f2, _, _ = run_ls(kind, bits, z, fx, delta, table, state, counter, budget, work)
        ls_calls += 1
        if f2 > fx:
            improving += 1
        best = max(best, f2)
        if f2 == opt:
            success = True
            break
    return restarts, ls_calls, improving, best, success


@njit(nogil=True, cache=True)
def descent_success_kernel(kind, n, table, opt, delta, restarts, state):
    bits = np.empty(n, dtype=np.uint8)
    work = np.arange(n)
    counter = np.zeros(1, dtype=np.int64)
    hits = 0
    for _ in range(restarts):
        z = random_bits_inplace(bits, state)
        fx = metered(table, z, counter)
        if fx != opt:
            z, fx, _, _ = run_ls(kind, bits, z, fx, delta, table, state, counter, 1 << 62, work)
        if fx == opt:
            hits += 1
    return hits, counter[0]


def _local_search(kind, x, delta, problem, rng, counter, fx, perm=None):
    if x.n != problem.n:
        raise ValueError("bitstring length does not match the problem")
    if delta < 1:
        raise ValueError("local search depth must be at least 1")
    if fx is None:
        fx = evaluate(problem, x, counter)
    bits = x.array.copy()
    z0 = int(bits.size - np.count_nonzero(bits))
    before = counter.count
    if kind == LSKind.FILS:
        keep = perm is not None
        work = np.arange(x.n) if perm is None else np.asarray(perm, dtype=np.int64) - 1
        z, f, steps, _ = fils_kernel(bits, z0, fx.value, delta, problem._table, rng.state,
                                     counter.cell, NO_BUDGET, work, keep)
    else:
        z, f, steps, _ = bils_kernel(bits, z0, fx.value, delta, problem._table, rng.state,
                                     counter.cell, NO_BUDGET, np.zeros(x.n, dtype=np.int64))
    result_fitness = ScaledFitness(int(f), problem.scale)
    return LSOutcome(Bitstring(bits), result_fitness, int(steps), counter.count - before,
                     result_fitness > fx)


def fils(x: Bitstring, delta: int, problem: UnitationProblem, rng: RandomStream,
         counter: EvalCounter, fx: ScaledFitness | None = None, perm=None) -> LSOutcome:
    """First-improvement local search.

    Each pass scans a fresh random permutation and takes every strictly
    improving flip on the spot, carrying on through the rest of the same
    permutation. Stops after ``delta`` passes or a pass with no improvement.

    If ``fx`` is omitted the input is evaluated once on ``counter``; that
    evaluation is not part of ``ls_evaluations``. ``perm`` (1-based) fixes the
    first pass's scan order.
    """
    return _local_search(LSKind.FILS, x, delta, problem, rng, counter, fx, perm)


def bils(x: Bitstring, delta: int, problem: UnitationProblem, rng: RandomStream,
         counter: EvalCounter, fx: ScaledFitness | None = None) -> LSOutcome:
    """Best-improvement local search; ties among the best strict improvements are
    broken uniformly over flip positions. Input evaluation handled as in :func:`fils`."""
    return _local_search(LSKind.BILS, x, delta, problem, rng, counter, fx)


def restart_ls(problem: UnitationProblem, variant: LSVariant, budget: int,
               rng: RandomStream) -> RunRecord:
    """Local search from fresh uniform points until the optimum or the budget.

    ``restarts`` counts random starting points drawn (at least 1) and
    ``generations`` mirrors it.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    counter = EvalCounter()
    restarts, ls_calls, improving, best, success = restart_kernel(
        int(variant.kind), problem.n, problem._table, problem.optimum_value,
        variant.delta, budget, rng.state, counter.cell)
    return RunRecord(
        algorithm=f"ls-{variant.label}",
        problem=problem.descriptor(),
        n=problem.n,
        w=getattr(problem, "w", None),
        pm=None,
        delta=variant.delta,
        seed=rng.seed,
        evaluations_total=counter.count,
        generations=int(restarts),
        ls_calls=int(ls_calls),
        ls_evaluations=counter.count - int(restarts),
        improving_ls_calls=int(improving),
        restarts=int(restarts),
        best_scaled_fitness=int(best),
        success=bool(success),
    )


def count_descent_successes(problem: UnitationProblem, variant: LSVariant, restarts: int,
                            rng: RandomStream) -> tuple[int, int]:
    """Run ``restarts`` independent random-start descents; return (successes, evaluations)."""
    hits, evals = descent_success_kernel(int(variant.kind), problem.n, problem._table,
                                         problem.optimum_value, variant.delta, restarts,
                                         rng.state)
    return int(hits), int(evals)
