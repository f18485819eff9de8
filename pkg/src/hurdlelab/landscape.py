"""Unitation problems: Hurdle, OneMax and tabulated functions.

Every problem here depends on a bitstring only through its zero-count ``z``,
so each one is stored as an integer table ``F[z]`` of *scaled* fitness values.
For Hurdle the scale is ``w`` (``f = F / w`` exactly); for the others it is 1.

Search code reads fitness only through :func:`metered` (jitted) or
:func:`evaluate` (Python), both of which bump an evaluation counter. The table
itself is private; :meth:`UnitationProblem.level_values` hands out a copy for
analysis code such as the Markov-chain oracle.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from numba import njit

from .core import Bitstring, count_zeros


@dataclass(frozen=True, order=True)
class ScaledFitness:
    """Exact fitness ``value / scale``. Ordering assumes equal scales."""

    value: int
    scale: int = 1

    def __post_init__(self):
        if self.scale < 1:
            raise ValueError("scale must be positive")

    def as_fraction(self) -> Fraction:
        return Fraction(self.value, self.scale)

    def __str__(self):
        f = self.as_fraction()
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


class EvalCounter:
    """Per-run evaluation counter backed by a one-cell array the kernels share."""

    __slots__ = ("cell",)

    def __init__(self, start: int = 0):
        self.cell = np.array([start], dtype=np.int64)

    @property
    def count(self) -> int:
        return int(self.cell[0])

    def __repr__(self):
        return f"EvalCounter({self.count})"


@njit(inline="always")
def metered(table, z, counter):
    counter[0] += 1
    return table[z]


def hurdle_scaled_fitness(z: int, w: int) -> int:
    """``-(w * ceil(z / w) + z mod w)``, i.e. Hurdle fitness times ``w``."""
    if z < 0 or w < 2:
        raise ValueError("need z >= 0 and w >= 2")
    return -(w * (-(-z // w)) + z % w)


class UnitationProblem:
    name = "unitation"

    def __init__(self, n: int, table, scale: int = 1):
        table = np.asarray(table, dtype=np.int64)
        if n < 1 or table.shape != (n + 1,):
            raise ValueError(f"expected {n + 1} table entries, got {table.shape}")
        table = table.copy()
        table.flags.writeable = False
        self.n = n
        self.scale = scale
        self._table = table
        self.optimum_value = int(table.max())

    def level_values(self) -> np.ndarray:
        """Copy of the scaled fitness by zero-count. Analysis only, never metered."""
        return self._table.copy()

    def descriptor(self) -> str:
        return self.name

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor()})"


class HurdleProblem(UnitationProblem):
    name = "hurdle"

    def __init__(self, n: int, w: int):
        if not 2 <= w <= n:
            raise ValueError(f"hurdle width must satisfy 2 <= w <= n (got n={n}, w={w})")
        self.w = w
        super().__init__(n, [hurdle_scaled_fitness(z, w) for z in range(n + 1)], scale=w)

    def descriptor(self) -> str:
        return f"hurdle(n={self.n},w={self.w})"


class OneMax(UnitationProblem):
    name = "onemax"

    def __init__(self, n: int):
        super().__init__(n, [n - z for z in range(n + 1)])

    def descriptor(self) -> str:
        return f"onemax(n={self.n})"


class UnitationTable(UnitationProblem):
    name = "table"

    def __init__(self, values):
        values = [int(v) for v in values]
        super().__init__(len(values) - 1, values)

    @property
    def digest(self) -> str:
        return hashlib.sha256(" ".join(map(str, self._table.tolist())).encode()).hexdigest()[:12]

    def descriptor(self) -> str:
        return f"table(n={self.n},sha={self.digest})"

    @classmethod
    def from_file(cls, path: str | Path) -> "UnitationTable":
        """Line 1: n. Line 2: n+1 integers, scaled fitness by zero-count."""
        lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
        if len(lines) < 2:
            raise ValueError(f"{path}: expected two lines (n, then n+1 values)")
        n = int(lines[0])
        values = [int(tok) for tok in " ".join(lines[1:]).split()]
        if len(values) != n + 1:
            raise ValueError(f"{path}: n={n} but {len(values)} values given")
        return cls(values)


def evaluate(problem: UnitationProblem, x: Bitstring, counter: EvalCounter) -> ScaledFitness:
    if x.n != problem.n:
        raise ValueError(f"bitstring length {x.n} does not match n={problem.n}")
    value = metered(problem._table, count_zeros(x), counter.cell)
    return ScaledFitness(int(value), problem.scale)


def is_local_optimum(problem: HurdleProblem, z: int) -> bool:
    if not 0 <= z <= problem.n:
        raise ValueError("zero-count out of range")
    return z % problem.w == 0


def nearest_improving_level(problem: HurdleProblem, z: int) -> int:
    """Zero-count of the nearest strictly fitter points seen from the local optimum at ``z``."""
    if z <= 0 or z > problem.n or z % problem.w:
        raise ValueError(f"z={z} is not a positive multiple of w={problem.w}")
    return z - problem.w
