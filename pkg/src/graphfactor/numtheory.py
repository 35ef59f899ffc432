"""Integer and rational substrate: q-adic valuations, binomials, exact square
roots, continued fractions of quadratic surds, and a/b string handling.

Everything in here is exact.  The divisibility verdicts downstream (PC, SPC,
HPC) die on any rounding, and the discriminants there reach hundreds of
digits, so no float ever enters or leaves these functions.
"""

from __future__ import annotations

import math
from fractions import Fraction

MASK64 = (1 << 64) - 1


def valuation(q: int, m: int) -> int:
    """Largest k with q**k dividing m.  q must be a prime >= 2, m nonzero."""
    if q < 2:
        raise ValueError(f"q must be a prime >= 2, got {q}")
    if m == 0:
        raise ValueError("valuation of 0 is infinite")
    m = abs(m)
    k = 0
    while m % q == 0:
        m //= q
        k += 1
    return k


def binom(n: int, k: int) -> int:
    """Exact binomial coefficient; n may be huge and may be < k (then 0)."""
    if k < 0:
        raise ValueError("binom needs k >= 0")
    if n < k:
        return 0
    return math.comb(n, k)


def falling(n: int, k: int) -> int:
    """Number of injections of k items into n slots: n(n-1)...(n-k+1), 0 if n < k."""
    if k < 0:
        raise ValueError("falling needs k >= 0")
    if n < k:
        return 0
    return math.perm(n, k)


def isqrt_exact(m: int) -> tuple[int, bool]:
    """(floor sqrt, is-perfect-square) with the certificate s*s <= m < (s+1)**2."""
    if m < 0:
        raise ValueError("isqrt of a negative number")
    s = math.isqrt(m)
    return s, s * s == m


def cf_sqrt_period(d: int) -> tuple[int, list[int]]:
    """Continued fraction of sqrt(d) for nonsquare d >= 2: (a0, periodic part).

    Classical algorithm on the surd (m + sqrt(d))/den; the period closes at
    the first partial quotient equal to 2*a0.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    a0, square = isqrt_exact(d)
    if square:
        raise ValueError(f"{d} is a perfect square")
    period = []
    m, den, a = 0, 1, a0
    while True:
        m = den * a - m
        den = (d - m * m) // den
        a = (a0 + m) // den
        period.append(a)
        if a == 2 * a0:
            return a0, period


def parse_rational(text: str) -> Fraction:
    """Parse "a/b" (or a bare integer) into a Fraction.  Decimals are rejected:
    every verdict downstream is arithmetic in the exact numerator/denominator."""
    s = text.strip()
    if "." in s or "e" in s.lower():
        raise ValueError(f"rational must be given as a/b, not a decimal: {text!r}")
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            return Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational {text!r}") from exc
    try:
        return Fraction(int(s))
    except ValueError as exc:
        raise ValueError(f"bad rational {text!r}") from exc


def format_rational(x: Fraction) -> str:
    """Canonical "num/den" form (denominator always printed, even when 1)."""
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def splitmix64(state: int) -> tuple[int, int]:
    """One step of the splitmix64 generator: (new_state, output).

    This is the reference stream for every stochastic component.  The Cython
    kernels implement the identical recurrence, which is what makes the pure
    and compiled backends bit-for-bit interchangeable and the block-sharded
    sampling independent of the worker count.
    """
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z = z ^ (z >> 31)
    return state, z


def block_seed(seed: int, block_index: int) -> int:
    """Starting splitmix64 state for a sampling block; pure function of
    (seed, block index) so any worker may own any block."""
    s = (seed ^ (block_index * 0x9E3779B97F4A7C15)) & MASK64
    s, out = splitmix64(s)
    _, out = splitmix64(out)
    return out
