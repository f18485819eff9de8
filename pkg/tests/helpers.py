"""Independent reference code for the test-suite.

Pure-Python versions of the generator and of both local searches, written
straight from their pseudocode and sharing nothing with the package's
kernels, plus jitted loops for the exhaustive audits.
"""
import itertools
import math
from fractions import Fraction

import numpy as np
from numba import njit

from hurdlelab.core import next_u64, shuffle_inplace
from hurdlelab.localsearch import bils_kernel, fils_kernel

M64 = (1 << 64) - 1


# --- reference generator --------------------------------------------------------

def splitmix64_stream(seed):
    state = seed
    while True:
        state = (state + 0x9E3779B97F4A7C15) & M64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
        yield z ^ (z >> 31)


def xoshiro256ss_reference(seed, count):
    sm = splitmix64_stream(seed)
    s = [next(sm) for _ in range(4)]

    def rotl(x, k):
        return ((x << k) | (x >> (64 - k))) & M64

    out = []
    for _ in range(count):
        out.append((rotl((s[1] * 5) & M64, 7) * 9) & M64)
        t = (s[1] << 17) & M64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
    return out


# --- reference local searches on explicit bit lists ------------------------------

def ref_fils_pass(bits, f, perm):
    """One outer pass of first-improvement search with a fixed 1-based order.

    Returns (bits, trace of accepted fitness values, evaluations)."""
    x = list(bits)
    fx = f(x)
    trace = [fx]
    evals = 0
    for i in perm:
        y = list(x)
        y[i - 1] ^= 1
        fy = f(y)
        evals += 1
        if fy > fx:
            x, fx = y, fy
            trace.append(fx)
    return x, trace, evals


def ref_bils_step_candidates(bits, f):
    """Positions (1-based) of the best strictly improving flips, as the best-improvement scan collects them."""
    fx = f(bits)
    best, inds = fx, []
    for i in range(len(bits)):
        y = list(bits)
        y[i] ^= 1
        fy = f(y)
        if fy > best:
            best, inds = fy, [i + 1]
        elif fy == best and fy > fx:
            inds.append(i + 1)
    return best, inds


def table_fitness(table):
    return lambda bits: table[len(bits) - sum(bits)]


def hurdle_value(z, w):
    # independent re-derivation of -(ceil(z/w) + rem(z,w)/w), exact
    return -Fraction(math.ceil(Fraction(z, w))) - Fraction(z % w, w)


# --- exact mutation kernel by brute force over flip masks -------------------------

def brute_level_kernel(n, p):
    """Exact rational P[i][j] by enumerating every flip mask of a fixed point per level."""
    p = Fraction(p)
    P = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        x = [0] * i + [1] * (n - i)
        for mask in itertools.product((0, 1), repeat=n):
            k = sum(mask)
            y = [b ^ m for b, m in zip(x, mask)]
            P[i][y.count(0)] += p**k * (1 - p) ** (n - k)
    return P


# --- jitted audits ---------------------------------------------------------------

@njit(cache=True)
def _bits_of(mask, n, out):
    z = 0
    for i in range(n):
        b = (mask >> i) & 1
        out[i] = b
        if b == 0:
            z += 1
    return z


@njit(cache=True)
def fils_audit(n, table, w, perms, sampled, state):
    """For every start point and every scan order: cost of an n-deep FILS call and
    whether one pass alone ends at a multiple of w.

    ``perms`` holds 0-based first-pass orders; if ``sampled`` > 0 it is ignored
    and that many fresh orders are drawn per start point instead.
    Returns (max improving cost, min cost, max cost, pass violations, calls)."""
    bits = np.empty(n, dtype=np.uint8)
    start = np.empty(n, dtype=np.uint8)
    work = np.empty(n, dtype=np.int64)
    counter = np.zeros(1, dtype=np.int64)
    max_improving = 0
    min_cost = 1 << 62
    max_cost = 0
    bad_pass = 0
    calls = 0
    count = perms.shape[0] if sampled == 0 else sampled
    for mask in range(1 << n):
        z0 = _bits_of(mask, n, start)
        f0 = table[z0]
        for k in range(count):
            if sampled == 0:
                perm = perms[k]
            else:
                for i in range(n):
                    work[i] = i
                shuffle_inplace(work, state)
                perm = work.copy()
            # single pass
            bits[:] = start
            work[:] = perm
            z1, _, _, _ = fils_kernel(bits, z0, f0, 1, table, state, counter, 1 << 62, work, True)
            if z1 % w != 0:
                bad_pass += 1
            # full-depth call with the same first pass
            bits[:] = start
            work[:] = perm
            before = counter[0]
            _, f2, _, _ = fils_kernel(bits, z0, f0, n, table, state, counter, 1 << 62, work, True)
            cost = counter[0] - before
            calls += 1
            min_cost = min(min_cost, cost)
            max_cost = max(max_cost, cost)
            if f2 > f0:
                max_improving = max(max_improving, cost)
    return max_improving, min_cost, max_cost, bad_pass, calls


@njit(cache=True)
def bils_audit(n, table, w, state):
    """Every start point once with depth n. Returns
    (max improving cost, min cost, max moves, cost-not-multiple-of-n count)."""
    bits = np.empty(n, dtype=np.uint8)
    ties = np.zeros(n, dtype=np.int64)
    counter = np.zeros(1, dtype=np.int64)
    max_improving = 0
    min_cost = 1 << 62
    max_moves = 0
    ragged = 0
    for mask in range(1 << n):
        z0 = _bits_of(mask, n, bits)
        f0 = table[z0]
        before = counter[0]
        _, f1, moves, _ = bils_kernel(bits, z0, f0, n, table, state, counter, 1 << 62, ties)
        cost = counter[0] - before
        min_cost = min(min_cost, cost)
        max_moves = max(max_moves, moves)
        if cost % n != 0:
            ragged += 1
        if f1 > f0:
            max_improving = max(max_improving, cost)
    return max_improving, min_cost, max_moves, ragged


def all_perms(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def popcounts(n):
    idx = np.arange(1 << n, dtype=np.int64)
    pc = np.zeros_like(idx)
    for b in range(n):
        pc += (idx >> b) & 1
    return pc


def u64_stream(state, count):
    return [int(next_u64(state)) for _ in range(count)]
