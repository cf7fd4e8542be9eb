"""Simultaneous rational approximation of a vector of irrationals.

The sweep keeps, for every irrational X_k, the fractional part of Z * X_k as a
128-bit fixed-point number split into two uint64 words and advances Z by adding
frac(X_k) * 2**128 with carry.  Modular integer addition is exact, so after Z
steps the only error is Z times the rounding of the initial constant, i.e. below
Z * 2**-129; the distance to the nearest integer is read from the high word.
Every hit is re-verified at 50 significant digits before it is reported.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import mpmath
import numba
import numpy as np
from numba import njit, prange

from .trigfield import FieldElement, generator

_MASK64 = (1 << 64) - 1
_SCALE = 1 << 128
_DPS = 50


@dataclass
class Approximation:
    Z: Optional[int]
    q: list
    max_error: Optional[float]
    eps: Optional[float] = None
    N: Optional[int] = None
    errors: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.Z is not None

    def to_row(self) -> list:
        return [self.eps, self.N, self.Z, *self.q, self.max_error]


def _to_mpf(x):
    if isinstance(x, FieldElement):
        return x.to_mpf(_DPS + 10)
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, str):
        return mpmath.mpf(x)
    return mpmath.mpf(x)


def case_irrationals(indices: Sequence[int]) -> list[FieldElement]:
    return [generator(i) for i in indices]


def _fixed_point(X) -> list[int]:
    """frac(X_k) scaled to 2**128, rounded to the nearest integer."""
    out = []
    with mpmath.workdps(_DPS + 10):
        for x in X:
            v = _to_mpf(x)
            f = v - mpmath.floor(v)
            out.append(int(mpmath.nint(f * _SCALE)) % _SCALE)
    return out


def exact_errors(X, Z: int) -> tuple[list[int], list]:
    """Nearest integers q_k and signed errors Z X_k - q_k at 50 digits."""
    qs, errs = [], []
    with mpmath.workdps(_DPS + 10):
        for x in X:
            v = _to_mpf(x) * Z
            q = int(mpmath.nint(v))
            qs.append(q)
            errs.append(v - q)
    return qs, errs


@njit(cache=True, nogil=True)
def _sweep(f_hi, f_lo, a_hi, a_lo, count, thr):
    """Offset in [0, count) of the first Z whose fractional parts all lie within thr of 0 mod 2**64."""
    n = f_hi.shape[0]
    ah = a_hi.copy()
    al = a_lo.copy()
    zero = np.uint64(0)
    one = np.uint64(1)
    upper = zero - thr
    for step in range(count):
        ok = True
        for k in range(n):
            h = ah[k]
            if h >= thr and h <= upper:
                ok = False
                break
        if ok:
            return step
        for k in range(n):
            lo = al[k] + f_lo[k]
            c = one if lo < al[k] else zero
            al[k] = lo
            ah[k] = ah[k] + f_hi[k] + c
    return -1


@njit(cache=True, parallel=True)
def _sweep_partitions(f_hi, f_lo, s_hi, s_lo, count, thr, out):
    for p in prange(s_hi.shape[0]):
        out[p] = _sweep(f_hi, f_lo, s_hi[p], s_lo[p], count, thr)


def _start_words(F: list[int], z: int):
    hi = np.empty(len(F), dtype=np.uint64)
    lo = np.empty(len(F), dtype=np.uint64)
    for k, f in enumerate(F):
        a = (f * z) % _SCALE
        hi[k] = a >> 64
        lo[k] = a & _MASK64
    return hi, lo


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get("STADION_THREADS")
        threads = int(env) if env else 1
    return max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS))


class Sweeper:
    """Exhaustive search for the smallest Z with max_k ||Z X_k|| < eps."""

    def __init__(self, X, threads: Optional[int] = None, block: int = 1 << 22):
        self.X = list(X)
        F = _fixed_point(self.X)
        self.F = F
        self.f_hi = np.array([f >> 64 for f in F], dtype=np.uint64)
        self.f_lo = np.array([f & _MASK64 for f in F], dtype=np.uint64)
        self.threads = resolve_threads(threads)
        self.block = int(block)

    def _threshold(self, eps: float) -> np.uint64:
        # slightly generous; exact verification follows every hit
        t = int(Fraction(eps) * (1 << 64)) + 2
        return np.uint64(min(t, 1 << 63))

    def _verify(self, Z: int, eps: float):
        qs, errs = exact_errors(self.X, Z)
        worst = max(abs(e) for e in errs)
        return (worst < mpmath.mpf(eps)), qs, errs, worst

    def first(self, eps: float, z_start: int, z_end: int) -> Optional[Approximation]:
        """Smallest Z in [z_start, z_end] meeting eps, or None."""
        thr = self._threshold(eps)
        z = max(1, int(z_start))
        z_end = int(z_end)
        while z <= z_end:
            if self.threads > 1:
                numba.set_num_threads(self.threads)
                P = self.threads
                span = min(self.block, -(-(z_end - z + 1) // P))
                s_hi = np.empty((P, len(self.F)), dtype=np.uint64)
                s_lo = np.empty((P, len(self.F)), dtype=np.uint64)
                for p in range(P):
                    s_hi[p], s_lo[p] = _start_words(self.F, z + p * span)
                out = np.full(P, -1, dtype=np.int64)
                _sweep_partitions(self.f_hi, self.f_lo, s_hi, s_lo, span, thr, out)
                hits = [z + p * span + int(o) for p, o in enumerate(out) if o >= 0]
                hit = min(hits) if hits else None
                advance = P * span
            else:
                span = min(self.block, z_end - z + 1)
                hi, lo = _start_words(self.F, z)
                o = _sweep(self.f_hi, self.f_lo, hi, lo, span, thr)
                hit = z + int(o) if o >= 0 else None
                advance = span
            if hit is not None and hit <= z_end:
                ok, qs, errs, worst = self._verify(hit, eps)
                if ok:
                    return Approximation(hit, qs, float(worst), eps, None, [float(e) for e in errs])
                z = hit + 1  # false alarm at the threshold edge
                continue
            z += advance
        return None


def min_Z_for_accuracy(X, eps: float, Z_cap: int, threads: Optional[int] = None,
                       z_start: int = 1) -> Approximation:
    """Smallest Z <= Z_cap with max_k ||Z X_k|| < eps; Z is None when the cap is exhausted."""
    if not 0 < eps:
        raise ValueError("eps must be positive")
    if eps > 0.5:
        eps = 0.5 + 1e-15  # every distance to the nearest integer is at most 1/2
    res = Sweeper(X, threads).first(eps, z_start, int(Z_cap))
    if res is None:
        return Approximation(None, [], None, eps)
    return res


def dirichlet_bound(N: int, n: int) -> float:
    return float(mpmath.power(mpmath.mpf(N), -mpmath.mpf(1) / n))


def dirichlet_search(X, N: int, threads: Optional[int] = None) -> Approximation:
    """Smallest Z in [1, N] with every |Z X_k - q_k| < N**(-1/n)."""
    X = list(X)
    if not X or N < 1:
        raise ValueError("need at least one irrational and N >= 1")
    res = min_Z_for_accuracy(X, dirichlet_bound(N, len(X)), N, threads)
    res.N = int(N)
    return res


def step_function(X, eps_grid: Sequence[float], Z_cap: int, threads: Optional[int] = None) -> list[tuple[float, Optional[int]]]:
    """Minimal Z for each accuracy in a descending grid; each search resumes at the previous Z."""
    eps_grid = list(eps_grid)
    if any(b > a for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("eps_grid must be descending")
    sw = Sweeper(X, threads)
    out = []
    z = 1
    for eps in eps_grid:
        res = sw.first(eps, z, Z_cap)
        if res is None:
            out.append((eps, None))
            z = Z_cap + 1
        else:
            out.append((eps, res.Z))
            z = res.Z
    return out


def descriptive_N(eps: float, n: int) -> float:
    """N = eps**(-n), the bound for which the Dirichlet guarantee equals eps."""
    return eps ** (-n)


# ---------------------------------------------------------------- independent oracle

def longdouble_scan(X, eps: float, z_end: int, chunk: int = 1 << 22, margin: float = 1e-9) -> Optional[int]:
    """Vectorised extended-precision scan, independent of the fixed-point kernel.

    Hits within ``margin`` of the threshold are settled at 50 digits.
    """
    fr = []
    with mpmath.workdps(40):
        for x in X:
            v = _to_mpf(x)
            fr.append(np.longdouble(mpmath.nstr(v - mpmath.floor(v), 30)))
    for z0 in range(1, z_end + 1, chunk):
        z = np.arange(z0, min(z0 + chunk, z_end + 1), dtype=np.longdouble)
        ok = np.ones(len(z), dtype=bool)
        for f in fr:
            p = z * f
            d = np.abs(p - np.rint(p))
            ok &= d < eps + margin
        for idx in np.flatnonzero(ok):
            Z = int(z[idx])
            _, errs = exact_errors(X, Z)
            if max(abs(e) for e in errs) < eps:
                return Z
    return None


# ---------------------------------------------------------------- lattice backend

def lll_candidates(X, scales: Iterable[int] = (10 ** 6, 10 ** 8, 10 ** 10, 10 ** 12, 10 ** 14)) -> list[Approximation]:
    """Good (not necessarily minimal) multipliers from reduced simultaneous-approximation lattices.

    For scale s the basis rows are (1, s x_1, ..., s x_n) and s e_k with x_k rounded to
    integers at 60 digits; short vectors (Z, s(Z x_k - q_k)) give candidates.
    """
    from sympy import Matrix

    X = list(X)
    n = len(X)
    out = {}
    with mpmath.workdps(60):
        vals = [_to_mpf(x) for x in X]
        for s in scales:
            rows = [[1] + [int(mpmath.nint(v * s)) for v in vals]]
            for k in range(n):
                rows.append([0] * (k + 1) + [s] + [0] * (n - k - 1))
            red = Matrix(rows).lll()
            for i in range(red.rows):
                Z = abs(int(red[i, 0]))
                if Z == 0 or Z in out:
                    continue
                qs, errs = exact_errors(X, Z)
                out[Z] = Approximation(Z, qs, float(max(abs(e) for e in errs)), None, None, [float(e) for e in errs])
    return sorted(out.values(), key=lambda a: a.Z)
