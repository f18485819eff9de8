"""Bitstrings, the seeded random stream, and the two variation operators.

Positions are 1-based at every public entry point (``flip(x, 1)`` touches the
first bit); arrays underneath are 0-based, so position ``i`` lives at index
``i - 1``. Nothing else in the package converts between the two.

Random numbers come from xoshiro256** seeded by splitmix64. Per-run seeds are
derived with :func:`derive_seed`, whose constants are part of the public
contract (see README).
"""
from __future__ import annotations

from typing import Iterable

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX_M1 = 0xBF58476D1CE4E5B9
MIX_M2 = 0x94D049BB133111EB

_U = np.uint64
_INV53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit integers."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_M1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, run_index: int) -> int:
    """Seed of run ``run_index`` under ``base_seed``.

    ``mix64(base ^ mix64(run_index + GOLDEN))``. Every step is a bijection, so
    distinct run indices under one base seed never collide.
    """
    return mix64((base_seed & MASK64) ^ mix64(run_index + GOLDEN))


def _seed_state(seed: int) -> np.ndarray:
    # four consecutive splitmix64 outputs; never all zero since mix64 is bijective
    words = [mix64(seed + (i + 1) * GOLDEN) for i in range(4)]
    return np.array(words, dtype=np.uint64)


# --- jitted generator primitives (state is a uint64[4] array, updated in place)

@njit(inline="always")
def _rotl(x, k):
    return (x << _U(k)) | (x >> _U(64 - k))


@njit(nogil=True, cache=True)
def next_u64(state):
    s0 = state[0]
    s1 = state[1]
    s2 = state[2]
    s3 = state[3]
    result = _rotl(s1 * _U(5), 7) * _U(9)
    t = s1 << _U(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return result


@njit(nogil=True, cache=True)
def next_float(state):
    """Uniform double in [0, 1) with 53 random bits."""
    return np.float64(next_u64(state) >> _U(11)) * _INV53


@njit(nogil=True, cache=True)
def next_below(state, bound):
    """Unbiased integer in [0, bound) by rejection."""
    b = _U(bound)
    limit = (_U(0) - b) % b
    while True:
        r = next_u64(state)
        if r >= limit:
            return np.int64(r % b)


@njit(nogil=True, cache=True)
def shuffle_inplace(arr, state):
    for i in range(arr.size - 1, 0, -1):
        j = next_below(state, i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


@njit(nogil=True, cache=True)
def random_bits_inplace(bits, state):
    zeros = 0
    for i in range(bits.size):
        b = np.uint8(next_u64(state) >> _U(63))
        bits[i] = b
        if b == 0:
            zeros += 1
    return zeros


@njit(nogil=True, cache=True)
def mutate_into(src, dst, zeros, p, state):
    """Standard bit mutation of ``src`` written to ``dst``; returns dst's zero-count."""
    for i in range(src.size):
        b = src[i]
        if next_float(state) < p:
            dst[i] = 1 - b
            zeros += 1 if b == 1 else -1
        else:
            dst[i] = b
    return zeros


class RandomStream:
    """Seeded xoshiro256** stream. Single owner; not thread-safe."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.state = _seed_state(self.seed)

    @classmethod
    def for_run(cls, base_seed: int, run_index: int) -> "RandomStream":
        return cls(derive_seed(base_seed, run_index))

    def next_u64(self) -> int:
        return int(next_u64(self.state))

    def random(self) -> float:
        return float(next_float(self.state))

    def below(self, bound: int) -> int:
        if bound < 1:
            raise ValueError("bound must be positive")
        return int(next_below(self.state, bound))

    def __repr__(self):
        return f"RandomStream(seed={self.seed})"


class Bitstring:
    """Immutable fixed-length binary string.

    Accepts a ``"0101"``-style string or any iterable of 0/1 values.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: str | Iterable[int] | np.ndarray):
        if isinstance(bits, str):
            if bits.strip("01"):
                raise ValueError(f"not a bitstring: {bits!r}")
            arr = np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
        else:
            arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
            if arr.ndim != 1 or not np.isin(arr, (0, 1)).all():
                raise ValueError("bits must be a 1-d sequence of 0/1 values")
            arr = arr.astype(np.uint8)
        if arr.size == 0:
            raise ValueError("bitstring must be non-empty")
        arr = arr.copy()
        arr.flags.writeable = False
        self._bits = arr

    @classmethod
    def ones(cls, n: int) -> "Bitstring":
        return cls(np.ones(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, n: int) -> "Bitstring":
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def random(cls, n: int, rng: RandomStream) -> "Bitstring":
        arr = np.empty(n, dtype=np.uint8)
        random_bits_inplace(arr, rng.state)
        return cls(arr)

    @classmethod
    def with_zeros(cls, n: int, z: int) -> "Bitstring":
        """Zeros first, then ones: ``with_zeros(4, 1) == 0111``."""
        if not 0 <= z <= n:
            raise ValueError("zero-count out of range")
        return cls([0] * z + [1] * (n - z))

    @property
    def n(self) -> int:
        return int(self._bits.size)

    @property
    def array(self) -> np.ndarray:
        """Read-only 0-based view."""
        return self._bits

    def bit(self, i: int) -> int:
        _check_position(i, self.n)
        return int(self._bits[i - 1])

    def complement(self) -> "Bitstring":
        return Bitstring(1 - self._bits)

    def __len__(self):
        return self.n

    def __iter__(self):
        return (int(b) for b in self._bits)

    def __eq__(self, other):
        if not isinstance(other, Bitstring):
            return NotImplemented
        return self._bits.size == other._bits.size and bool((self._bits == other._bits).all())

    def __hash__(self):
        return hash(self._bits.tobytes())

    def __str__(self):
        return (self._bits + ord("0")).tobytes().decode()

    def __repr__(self):
        return f"Bitstring('{self}')"


def _check_position(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexError(f"position {i} outside 1..{n}")


def flip(x: Bitstring, i: int) -> Bitstring:
    """Copy of ``x`` with the bit at 1-based position ``i`` inverted."""
    _check_position(i, x.n)
    arr = x.array.copy()
    arr[i - 1] ^= 1
    return Bitstring(arr)


def standard_bit_mutation(x: Bitstring, p: float, rng: RandomStream) -> Bitstring:
    if not 0.0 <= p <= 1.0:
        raise ValueError("mutation probability must lie in [0, 1]")
    out = np.empty(x.n, dtype=np.uint8)
    mutate_into(x.array, out, 0, p, rng.state)
    return Bitstring(out)


def random_permutation(n: int, rng: RandomStream) -> np.ndarray:
    """Uniform permutation of 1..n (Fisher-Yates)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    perm = np.arange(1, n + 1, dtype=np.int64)
    shuffle_inplace(perm, rng.state)
    return perm


def count_zeros(x: Bitstring) -> int:
    return int(x.n - np.count_nonzero(x.array))
