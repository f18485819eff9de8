"""Exact expected runtime of the (1+1) EA on unitation functions.

Standard bit mutation moves a point with ``i`` zeros to one with ``j`` zeros
with a probability that depends only on ``(i, j)``, and the EA's acceptance
depends only on the two fitness levels. The EA therefore projects exactly onto
an (n+1)-state chain on zero-counts, absorbing at the optimum level(s).

The memetic variants are not covered exactly; :func:`monte_carlo` samples them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MASK64, RandomStream, derive_seed
from .landscape import UnitationProblem
from .records import RunRecord
from .stats import bootstrap_ci


@dataclass(frozen=True)
class LevelKernel:
    n: int
    p: float
    P: np.ndarray


@dataclass(frozen=True)
class AcceptedChain:
    n: int
    T: np.ndarray
    absorbing: tuple


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def mutation_level_kernel(n: int, p: float) -> LevelKernel:
    """``P[i, j]``: probability that mutation takes ``i`` zeros to ``j`` zeros.

    Sums over ``a`` zeros and ``b = j - i + a`` ones flipped, in log space with
    compensated summation.
    """
    if n < 1 or not 0.0 < p < 1.0:
        raise ValueError("need n >= 1 and 0 < p < 1")
    lp, lq = math.log(p), math.log1p(-p)
    P = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        lc_zero = [_log_comb(i, a) for a in range(i + 1)]
        lc_one = [_log_comb(n - i, b) for b in range(n - i + 1)]
        for j in range(n + 1):
            terms = []
            for a in range(max(0, i - j), min(i, n - j) + 1):
                b = j - i + a
                if 0 <= b <= n - i:
                    k = a + b
                    terms.append(math.exp(lc_zero[a] + lc_one[b] + k * lp + (n - k) * lq))
            P[i, j] = math.fsum(terms)
    return LevelKernel(n, p, P)


def ea_accepted_chain(problem: UnitationProblem, kernel: LevelKernel) -> AcceptedChain:
    """Fold rejected moves (strictly worse level) into the self-loop."""
    if problem.n != kernel.n:
        raise ValueError("problem and kernel dimensions differ")
    F = problem.level_values()
    n = kernel.n
    T = np.zeros((n + 1, n + 1))
    absorbing = tuple(int(i) for i in np.flatnonzero(F == problem.optimum_value))
    for i in range(n + 1):
        if F[i] == problem.optimum_value:
            T[i, i] = 1.0
            continue
        rejected = [kernel.P[i, i]]
        for j in range(n + 1):
            if j == i:
                continue
            if F[j] >= F[i]:
                T[i, j] = kernel.P[i, j]
            else:
                rejected.append(kernel.P[i, j])
        T[i, i] = math.fsum(rejected)
    return AcceptedChain(n, T, absorbing)


def _transient(chain: AcceptedChain) -> np.ndarray:
    mask = np.ones(chain.n + 1, dtype=bool)
    mask[list(chain.absorbing)] = False
    return np.flatnonzero(mask)


def hitting_times(chain: AcceptedChain) -> np.ndarray:
    """Expected generations to absorption from every level (0 on absorbing levels).

    Solves ``(I - Q) t = 1`` with LAPACK's partially pivoted LU. The diagonal
    of ``I - Q`` is the summed outflow of each level rather than ``1 - T[i, i]``,
    which would cancel catastrophically when escapes are rare.
    """
    tr = _transient(chain)
    t = np.zeros(chain.n + 1)
    if tr.size == 0:
        return t
    Q = chain.T[np.ix_(tr, tr)]
    A = -Q
    off = chain.T.copy()
    np.fill_diagonal(off, 0.0)
    A[np.diag_indices(tr.size)] = [math.fsum(row) for row in off[tr]]
    try:
        sol = np.linalg.solve(A, np.ones(tr.size))
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(
            "singular hitting-time system: some level cannot reach the optimum "
            "(mutation probability must lie strictly inside (0, 1))") from exc
    if not np.all(np.isfinite(sol)):
        raise ArithmeticError("hitting-time system produced non-finite values")
    t[tr] = sol
    return t


def expected_hitting_time(chain: AcceptedChain, init) -> float:
    init = np.asarray(init, dtype=np.float64)
    if init.shape != (chain.n + 1,) or abs(init.sum() - 1.0) > 1e-12 or (init < 0).any():
        raise ValueError("init must be a probability vector over the n+1 levels")
    return float(math.fsum(init * hitting_times(chain)))


def uniform_init(n: int) -> np.ndarray:
    """Zero-count distribution of a uniform random bitstring, Binomial(n, 1/2)."""
    return np.array([math.exp(_log_comb(n, k) - n * math.log(2)) for k in range(n + 1)])


def point_init(n: int, level: int) -> np.ndarray:
    v = np.zeros(n + 1)
    v[level] = 1.0
    return v


def hitting_time_cdf(chain: AcceptedChain, init, t_max: int) -> np.ndarray:
    """``cdf[t] = P(absorbed within t generations)`` for ``t = 0..t_max``."""
    dist = np.asarray(init, dtype=np.float64).copy()
    absorbing = list(chain.absorbing)
    out = np.empty(t_max + 1)
    out[0] = dist[absorbing].sum()
    for t in range(1, t_max + 1):
        dist = dist @ chain.T
        out[t] = dist[absorbing].sum()
    return out


def ea_expected_runtime(problem: UnitationProblem, p: float, init=None) -> dict:
    """Expected generations and evaluations (one extra for the initial point)."""
    chain = ea_accepted_chain(problem, mutation_level_kernel(problem.n, p))
    init = uniform_init(problem.n) if init is None else init
    gens = expected_hitting_time(chain, init)
    return {"expected_generations": gens, "expected_evaluations": 1.0 + gens}


def monte_carlo(runner, reps: int, base_seed: int, resamples: int = 2000,
                level: float = 0.95) -> dict:
    """Summarise ``reps`` runs of ``runner(rng) -> RunRecord``.

    Run ``r`` uses ``RandomStream.for_run(base_seed, r)``; the bootstrap uses
    the stream for run index ``2**64 - 1``. Output depends only on
    ``(runner, reps, base_seed)``.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    records: list[RunRecord] = [runner(RandomStream.for_run(base_seed, r)) for r in range(reps)]
    return summarize(records, base_seed, resamples, level)


def summarize(records, base_seed: int = 0, resamples: int = 2000, level: float = 0.95) -> dict:
    out = {"reps": len(records), "successes": sum(r.success for r in records)}
    for key, attr in (("evaluations", "evaluations_total"), ("generations", "generations")):
        x = np.array([getattr(r, attr) for r in records], dtype=np.float64)
        out[f"mean_{key}"] = float(x.mean())
        out[f"sd_{key}"] = float(x.std(ddof=1)) if x.size > 1 else 0.0
        if x.size > 1:
            rng = RandomStream(derive_seed(base_seed, MASK64))
            out[f"ci_{key}"] = list(bootstrap_ci(x, level, resamples, rng))
        else:
            out[f"ci_{key}"] = [out[f"mean_{key}"]] * 2
    return out
