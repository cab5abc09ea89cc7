"""Random admissible inputs for the randomized test suites and ``selftest``.

Coefficients are drawn at the smallest p-adic valuation the norm hypothesis
allows (occasionally one or two steps above), so the bounds being tested are
approached as closely as rational coefficients permit.
"""

from __future__ import annotations

import math
import random
from math import gcd
from typing import Optional

from gmpy2 import mpq

from .exactnum import LogValue
from .gauss import norm_bounded_by
from .ode import OdeProblem
from .series import SeriesFamily, TruncSeries


def random_unit(rng: random.Random, p: int, size: int = 6) -> mpq:
    """A random nonzero rational that is a p-adic unit."""
    while True:
        num = rng.randint(1, size) * rng.choice((1, -1))
        den = rng.randint(1, size)
        if num % p and den % p:
            return mpq(num, den)


def minimal_valuation(m: int, bound: LogValue, logr: LogValue) -> int:
    """Smallest ``e`` with ``log(p^-e r^m) <= bound`` (one-term Gauss norm)."""
    p = bound.p
    guess = m * float(logr) - float(bound)
    e = math.floor(guess / math.log(p)) - 1
    while True:
        term = LogValue(-e + m * logr.logp, m * logr.log2, p)
        if term <= bound:
            return e
        e += 1


def random_bounded_poly(rng: random.Random, p: int, order: int, exps, bound: LogValue,
                        logr: LogValue, extra_val: float = 0.25, size: int = 6) -> TruncSeries:
    terms = {}
    for m in exps:
        e = minimal_valuation(m, bound, logr)
        while rng.random() < extra_val:
            e += 1
        terms[m] = random_unit(rng, p, size) * mpq(p) ** e
    f = TruncSeries.from_terms(terms, order)
    assert norm_bounded_by(f, bound, logr, p)
    return f


def random_coprime_pair(rng: random.Random, p: int):
    while True:
        s, t = rng.randint(1, p - 1), rng.randint(1, p - 1)
        if gcd(s, t) == 1:
            return s, t


def random_logr(rng: random.Random, p: int) -> LogValue:
    """A radius ``r <= 1`` in the group generated by ``p`` and ``2``."""
    choice = rng.random()
    if choice < 0.5:
        return LogValue.zero(p)
    if choice < 0.75:
        return LogValue.of_p(-mpq(rng.randint(1, 4), rng.randint(1, 4)), p)
    return LogValue(-mpq(rng.randint(0, 2), rng.randint(1, 3)), -mpq(rng.randint(1, 3), rng.randint(1, 3)), p)


def random_problem(rng: random.Random, p: int, order: int, logr: Optional[LogValue] = None,
                   max_degree: int = 6, linear_b: bool = True) -> OdeProblem:
    """A random problem satisfying every hypothesis on its truncations."""
    if logr is None:
        logr = random_logr(rng, p)
    s, t = random_coprime_pair(rng, p)
    r_over_p = logr - LogValue.of_p(1, p)
    inv_p = LogValue.of_p(-1, p)

    def some_exps(lo, hi, k):
        pool = list(range(lo, hi + 1))
        return sorted(rng.sample(pool, min(k, len(pool))))

    a = random_bounded_poly(rng, p, order, some_exps(2, max_degree, rng.randint(1, 3)), r_over_p, logr)
    b_lo = 1 if linear_b and rng.random() < 0.3 else 2
    b = random_bounded_poly(rng, p, order, some_exps(b_lo, max_degree, rng.randint(0, 2)), r_over_p, logr)
    fam = {}
    for m in some_exps(2, 4, rng.randint(0, 2)):
        fam[m] = random_bounded_poly(rng, p, order, some_exps(0, 3, rng.randint(1, 2)), inv_p, logr)
    return OdeProblem(a, b, SeriesFamily(fam, order=order), s, t, p, logr)


def random_polynomial(rng: random.Random, order: int, degree: int, p: int,
                      density: float = 0.5, size: int = 9) -> TruncSeries:
    """Random rational polynomial with coefficients of mixed p-adic valuation."""
    terms = {}
    for m in range(degree + 1):
        if rng.random() < density:
            x = mpq(rng.randint(-size, size), rng.randint(1, size))
            if x:
                terms[m] = x * mpq(p) ** rng.randint(-2, 2)
    return TruncSeries.from_terms(terms, order)
