"""Exact integer and prime computations backing the desk-scale oracles.

Everything here is either an exact integer result or a `DirectedReal` whose
interval is certified by an explicit error budget.  The sieves are segmented
so memory stays O(segment_size + sqrt(hi)) regardless of the scan range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import mp

from .directed import DOWN, NEAREST, UP, DirectedReal, Direction, working_precision
from .report import VerificationReport

DEFAULT_SEGMENT = 1 << 23          # integers per sieve block
MAX_SIEVE = 2_200_000_000          # hard cap for table-backed scans

# Relative error budget per float64 term.  Divisions are correctly rounded
# (2^-53); libm log is faithful but not correctly rounded, so logs get a
# conservative 2^-50.
_REL_DIV = 2.0 ** -53
_REL_LOG = 2.0 ** -50


class SieveLimitError(ValueError):
    """Requested range exceeds the configured sieve limit."""


def _check_limit(x) -> None:
    if x > MAX_SIEVE:
        raise SieveLimitError(f"{x} exceeds sieve limit {MAX_SIEVE}")


def _dense_sieve(n: int) -> np.ndarray:
    """Primes <= n by a plain dense sieve (used for base primes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


class PrimeTable:
    """Segmented odd-only sieve enumerating the primes in [lo, hi].

    Iterating yields Python ints in increasing order; ``segments()`` yields
    numpy int64 arrays, which is what the scans consume.
    """

    def __init__(self, lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT):
        if lo < 2:
            lo = 2
        if segment_size < 1024:
            raise ValueError("segment_size too small")
        _check_limit(hi)
        self.lo = lo
        self.hi = hi
        self.segment_size = segment_size
        self._base = _dense_sieve(math.isqrt(hi)) if hi >= 4 else _dense_sieve(2)

    def segments(self):
        if self.hi < self.lo:
            return
        if self.lo <= 2 <= self.hi:
            yield np.array([2], dtype=np.int64)
        odd_base = self._base[self._base > 2]
        start = max(3, self.lo | 1)
        step = max(self.segment_size, 2048)
        block = start
        while block <= self.hi:
            block_end = min(block + step - 1, self.hi)
            if block_end % 2 == 0:
                block_end -= 1
            n_odd = (block_end - block) // 2 + 1
            mask = np.ones(n_odd, dtype=bool)
            for p in odd_base:
                p = int(p)
                if p * p > block_end:
                    break
                first = max(p * p, ((block + p - 1) // p) * p)
                if first % 2 == 0:
                    first += p
                if first <= block_end:
                    mask[(first - block) // 2:: p] = False
            primes = block + 2 * np.nonzero(mask)[0].astype(np.int64)
            if primes.size:
                yield primes
            block = block_end + 2

    def __iter__(self):
        for seg in self.segments():
            yield from seg.tolist()

    def count(self) -> int:
        return sum(int(seg.size) for seg in self.segments())


def primes_up_to(x: int) -> np.ndarray:
    """All primes <= x, ascending, as an int64 array."""
    x = int(x)
    if x < 2:
        return np.zeros(0, dtype=np.int64)
    if x <= 1 << 24:
        return _dense_sieve(x)
    parts = list(PrimeTable(2, x).segments())
    return np.concatenate(parts)


class CertifiedSum:
    """Float64 accumulator with an explicit one-sided error budget.

    Terms are exact-summed with math.fsum; each batch contributes
    rel_err * sum(|terms|) to the budget, covering the rounding of the term
    values themselves.  fsum's own result rounding is covered by a few ulps
    per batch, folded into the budget at interval() time.
    """

    def __init__(self):
        self._partials: list[float] = []
        self._abs_total = 0.0
        self._budget = 0.0

    def add_array(self, terms: np.ndarray, rel_err: float) -> None:
        s = math.fsum(terms)
        a = math.fsum(np.abs(terms))
        self._partials.append(s)
        self._abs_total += a
        self._budget += rel_err * a

    def add_exact(self, value: float) -> None:
        self._partials.append(value)

    def total(self) -> float:
        return math.fsum(self._partials)

    def interval(self) -> tuple[float, float]:
        t = math.fsum(self._partials)
        # final fsum + per-batch fsum roundings: 2 ulp of the magnitude scale
        # per batch is a generous cover.
        slack = (len(self._partials) + 1) * 2.0 * _REL_DIV * max(abs(t), self._abs_total)
        err = self._budget + slack
        return t - err, t + err

    def directed(self, direction: Direction = NEAREST, digits: int = 30) -> DirectedReal:
        lo, hi = self.interval()
        with working_precision(digits):
            return DirectedReal.from_endpoints(mp.mpf(lo), mp.mpf(hi), direction)


def theta(x, direction: Direction = UP) -> DirectedReal:
    """Chebyshev theta: sum of log p over primes p <= x.

    Certified to ~14 significant digits by the float64 error budget, which is
    far tighter than any margin the theta <= x checks ever see.
    """
    if x < 0:
        raise ValueError("theta needs x >= 0")
    _check_limit(x)
    hi = int(math.floor(x))
    acc = CertifiedSum()
    for seg in PrimeTable(2, hi).segments():
        acc.add_array(np.log(seg.astype(np.float64)), _REL_LOG)
    return acc.directed(direction)


_MERTENS_FIXED_BITS = 126


def mertens_sum(x, direction: Direction = DOWN) -> DirectedReal:
    """Sum of 1/p over primes p < x, exactly.

    Accumulates floor(2^126 / p) in arbitrary-precision integers; the result
    interval has width count / 2^126 (~1e-30 at the sieve limit), so the
    directed value is trustworthy to well over 30 digits.
    """
    if x < 3:
        raise ValueError("mertens_sum needs x >= 3")
    _check_limit(x)
    hi = math.ceil(x) - 1          # strict p < x
    one = 1 << _MERTENS_FIXED_BITS
    total = 0
    count = 0
    for seg in PrimeTable(2, hi).segments():
        plist = seg.tolist()
        total += sum(one // p for p in plist)
        count += len(plist)
    with working_precision(45):
        scale = mp.mpf(2) ** -_MERTENS_FIXED_BITS
        lo = mp.mpf(total) * scale
        hi_v = mp.mpf(total + count) * scale
        return DirectedReal.from_endpoints(lo, hi_v, direction)


@dataclass
class ArithmeticSnapshot:
    """Exact multiplicative data for one integer."""

    n: int
    omega: int          # distinct prime divisors
    big_omega: int      # prime divisors with multiplicity
    mu_squared: int     # 1 iff squarefree
    phi: int            # Euler totient


def factorize(n: int) -> list[tuple[int, int]]:
    """(prime, exponent) pairs by trial division; fine for n up to ~10^14."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    if n >= 1 << 63:
        raise ValueError("factorization beyond 64-bit is out of scope")
    out = []
    for p in (2, 3):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
    d = 5
    while d * d <= n:
        for q in (d, d + 2):        # 6k +/- 1 wheel
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            if e:
                out.append((q, e))
        d += 6
    if n > 1:
        out.append((n, 1))
    return out


def arithmetic_snapshot(n: int) -> ArithmeticSnapshot:
    if n < 1:
        raise ValueError("arithmetic_snapshot needs n >= 1")
    fac = factorize(n)
    omega = len(fac)
    big = sum(e for _, e in fac)
    mu2 = 1 if all(e == 1 for _, e in fac) else 0
    phi = 1
    for p, e in fac:
        phi *= (p - 1) * p ** (e - 1)
    return ArithmeticSnapshot(n=n, omega=omega, big_omega=big,
                              mu_squared=mu2, phi=phi)


def squarefree_sums(x: int, segment_size: int = DEFAULT_SEGMENT
                    ) -> tuple[int, DirectedReal]:
    """Exact count of squarefree n <= x and the certified sum of mu^2(n)/phi(n).

    One segmented pass: squarefree flags from p^2 marks, phi for the
    squarefree survivors from a single division per prime (a squarefree
    n <= x has at most one prime factor above sqrt(x), so the leftover
    cofactor after dividing out the base primes is 1 or that prime).
    """
    x = int(x)
    if x < 1:
        raise ValueError("squarefree_sums needs x >= 1")
    _check_limit(x)
    base = _dense_sieve(math.isqrt(x))
    count = 0
    acc = CertifiedSum()
    lo = 1
    while lo <= x:
        hi = min(lo + segment_size - 1, x)
        n_vals = hi - lo + 1
        sf = np.ones(n_vals, dtype=bool)
        rem = np.arange(lo, hi + 1, dtype=np.int64)
        phi = np.ones(n_vals, dtype=np.int64)
        for p in base:
            p = int(p)
            p2 = p * p
            if p2 <= hi:
                first = ((lo + p2 - 1) // p2) * p2
                if first <= hi:
                    sf[first - lo:: p2] = False
            first = ((lo + p - 1) // p) * p
            if first <= hi:
                sl = slice(first - lo, None, p)
                phi[sl] *= p - 1
                rem[sl] //= p
        big = rem > 1
        phi[big] *= rem[big] - 1
        count += int(np.count_nonzero(sf))
        acc.add_array(1.0 / phi[sf].astype(np.float64), _REL_DIV)
        lo = hi + 1
    return count, acc.directed(UP)


def squarefree_count_oracle(x: int) -> int:
    """Independent exact count of squarefree n <= x via the Moebius identity
    sum_{d <= sqrt(x)} mu(d) * floor(x / d^2)."""
    x = int(x)
    r = math.isqrt(x)
    mu = np.ones(r + 1, dtype=np.int64)
    prime = np.ones(r + 1, dtype=bool)
    prime[:2] = False
    for p in range(2, r + 1):
        if prime[p]:
            prime[2 * p:: p] = False
            mu[p:: p] *= -1
            p2 = p * p
            if p2 <= r:
                mu[p2:: p2] = 0
    return sum(int(mu[d]) * (x // (d * d)) for d in range(1, r + 1))


def _as_fraction(ratio) -> Fraction:
    if isinstance(ratio, Fraction):
        return ratio
    if isinstance(ratio, str):
        return Fraction(ratio)
    if isinstance(ratio, float):
        # exact decimal reading keeps 0.996 meaning 996/1000
        return Fraction(repr(ratio))
    return Fraction(ratio)


def prime_gap_scan(lo: int, hi: int, ratio) -> VerificationReport:
    """Report consecutive primes p < q with q in (lo, hi] and q > p / ratio.

    The target statement quantifies over real x: an interval [ratio*x, x]
    misses all primes for some x exactly when a consecutive pair satisfies
    q > p / ratio (take x just below q).  Scanning pairs is therefore a
    finite, exact certificate; an empty violation list certifies the
    statement on (lo, hi].
    """
    rat = _as_fraction(ratio)
    if not (0 < rat < 1):
        raise ValueError("ratio must lie in (0, 1)")
    if lo < 2:
        raise ValueError("need lo >= 2")
    _check_limit(hi)
    report = VerificationReport(check_id="prime-gap", range=(lo, hi))
    if hi <= lo:
        return report
    num, den = rat.numerator, rat.denominator
    # start below lo so the predecessor of the first q > lo is seen;
    # gaps below the sieve limit are far smaller than this margin
    start = max(2, lo - 2000)
    prev = None
    for seg in PrimeTable(start, hi).segments():
        if prev is not None:
            seg = np.concatenate(([prev], seg))
        if seg.size < 2:
            prev = int(seg[-1]) if seg.size else prev
            continue
        ps = seg[:-1]
        qs = seg[1:]
        sel = qs > lo
        if np.any(sel):
            p_sel = ps[sel]
            q_sel = qs[sel]
            # violation iff q * ratio > p, checked in exact integers
            bad = q_sel * num > p_sel * den
            margins = p_sel.astype(np.float64) * (den / num) - q_sel
            report.points_checked += int(q_sel.size)
            m = float(margins.min())
            if m < report.worst_margin:
                report.worst_margin = m
            for i in np.nonzero(bad)[0]:
                p_i, q_i = int(p_sel[i]), int(q_sel[i])
                report.violations.append(((p_i, q_i), q_i, Fraction(p_i) / rat))
        prev = int(seg[-1])
    return report
