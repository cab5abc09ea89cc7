"""Certified size bounds for formal graphs and the summability budget over primes.

The size of a formal curve is not computable from a truncation.  What is
exposed here are the quantities that control graph curves:

* ``lambda_exponent``: the exponent ``lambda / log p`` with
  ``lambda = inf_m -log|c_{m+1}| / m``, giving ``size >= min(1, exp(lambda))``
  and equality when ``phi'(0)`` is a unit;
* ``proper_transform``: ``psi = phi / X``, whose graph is the proper transform
  of the graph of ``phi`` under the blow-up of the origin;
* ``aanalyticity_budget``: interval enclosures of the per-prime contributions
  ``C t (log p)^2 / (p - 1)^2`` and of the tail beyond the last prime summed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple

from gmpy2 import mpq

from .errors import HypothesisViolated, InvalidArgument
from .exactnum import (
    INFINITY,
    Interval,
    Q,
    _round_out,
    format_rational,
    log_interval,
    require_odd_prime,
    vp,
)
from .series import TruncSeries, compose_trunc


@dataclass(frozen=True)
class SizeEstimate:
    """Exponents are in units of ``log p``; ``math.inf`` marks an empty infimum."""

    p: int
    order: int
    lambda_p: object  # mpq or math.inf
    lower_bound_logp: mpq
    exact: bool
    rho_lower_logp: object  # mpq or math.inf

    def to_json(self) -> dict:
        def fmt(x):
            return "+inf" if x == INFINITY else format_rational(x)

        return {
            "p": self.p,
            "order": self.order,
            "lambdaP": fmt(self.lambda_p),
            "lowerBoundLogP": fmt(self.lower_bound_logp),
            "exact": self.exact,
            "rhoLowerLogP": fmt(self.rho_lower_logp),
        }


def lambda_exponent(phi: TruncSeries, p: int) -> SizeEstimate:
    """Size exponents of the graph of ``phi`` from its truncation.

    ``lambda_p`` is an infimum over the stored coefficients only, hence an
    upper bound for the true exponent; the reported lower bound is certified
    in the falsification sense.
    """
    p = require_odd_prime(p)
    if phi[0]:
        raise InvalidArgument("phi(0) must vanish")
    n = phi.order
    c1 = phi[1] if n >= 1 else mpq(0)
    v1 = vp(c1, p)
    if v1 < 0:
        raise HypothesisViolated("phi'(0) must be p-integral", 1)
    lam = INFINITY
    rho = INFINITY
    for m in range(1, n + 1):
        c = phi[m]
        if not c:
            continue
        ratio = mpq(vp(c, p), m)
        rho = min(rho, ratio)
        if m >= 2:
            lam = min(lam, mpq(vp(c, p), m - 1))
    lower = mpq(0) if lam == INFINITY else min(mpq(0), lam)
    return SizeEstimate(p, n, lam, lower, v1 == 0, rho)


def proper_transform(phi: TruncSeries, p: int | None = None) -> TruncSeries:
    """``psi = phi / X`` for ``phi`` vanishing to order 2 (``psi'(0) = c_2``)."""
    if phi.order < 2:
        raise InvalidArgument("need truncation order >= 2")
    if phi[0] or phi[1]:
        raise InvalidArgument("phi must vanish to order 2")
    if p is not None and vp(phi[2], p) < 0:
        raise InvalidArgument(f"c_2 = {phi[2]} is not {p}-integral")
    return phi.shift_down(1)


def straightening_check(f1: TruncSeries, f2: TruncSeries, phi: TruncSeries) -> bool:
    """Check ``f2 * f1 == phi(f1)`` up to the common truncation order."""
    if f1[0]:
        raise InvalidArgument("f1(0) must vanish")
    n = min(f1.order, f2.order, phi.order)
    lhs = f2.truncate(n) * f1.truncate(n)
    rhs = compose_trunc(phi.truncate(n), f1.truncate(n))
    return lhs == rhs


# -- budget over primes ---------------------------------------------------------


def primes_up_to(n: int) -> List[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i in range(n + 1) if sieve[i]]


def budget_term(p: int, coef: mpq, bits: int) -> Interval:
    """Enclosure of ``coef * (log p)^2 / (p - 1)^2`` on a ``2^-bits`` grid."""
    lo, hi = log_interval(p, bits)
    d = (p - 1) ** 2
    return _round_out(coef * lo * lo / d, coef * hi * hi / d, bits)


def tail_term(P: int, coef: mpq, bits: int) -> Interval:
    """Enclosure of ``coef * ((log P)^2 + 2 log P + 2) / P``."""
    lo, hi = log_interval(P, bits)
    return _round_out(coef * (lo * lo + 2 * lo + 2) / P, coef * (hi * hi + 2 * hi + 2) / P, bits)


def sum_terms(primes: Iterable[int], coef: mpq, bits: int) -> Interval:
    lo = hi = mpq(0)
    for q in primes:
        a, b = budget_term(q, coef, bits)
        lo += a
        hi += b
    return lo, hi


class BudgetResult(NamedTuple):
    partial: Interval
    tail: Interval
    pmax: int

    def to_json(self) -> dict:
        return {
            "partial": [format_rational(self.partial[0]), format_rational(self.partial[1])],
            "tail": [format_rational(self.tail[0]), format_rational(self.tail[1])],
            "pMax": self.pmax,
        }


def budget_primes(s: int, t: int, pmax: int, excluded: Iterable[int] = ()) -> List[int]:
    excluded = set(excluded)
    floor = max(s, t)
    return [q for q in primes_up_to(pmax) if q > 2 and q > floor and q not in excluded]


def aanalyticity_budget(s: int, t: int, C=14, pmax: int = 1000, excluded: Iterable[int] = (),
                        width=mpq(1, 10 ** 6)) -> BudgetResult:
    """Enclose ``sum_{p <= pmax} C t (log p)^2 / (p-1)^2`` and a tail bound.

    The sum runs over odd primes ``p > max(s, t)`` outside ``excluded``.  The
    tail ``C t ((log P)^2 + 2 log P + 2) / P`` is ``C t`` times the integral of
    ``(log x)^2 / x^2`` over ``[P, inf)``.  It bounds the sum over primes
    beyond ``P = pmax`` once ``P >= 5``: for a prime ``q > P`` the summand is at
    most the integral over ``(q - 1, q + 1)`` (the integrand decreases there and
    ``(q + 1)^2 <= 2 (q - 1)^2``), and those intervals are disjoint.
    """
    if pmax < 3:
        raise InvalidArgument("pmax must be at least 3")
    coef = Q(C) * t
    width = Q(width)
    primes = budget_primes(s, t, pmax, excluded)
    bits = 40 + int(coef).bit_length() + len(primes).bit_length()
    while True:
        partial = sum_terms(primes, coef, bits)
        tail = tail_term(pmax, coef, bits)
        if partial[1] - partial[0] <= width and tail[1] - tail[0] <= width:
            return BudgetResult(partial, tail, pmax)
        bits *= 2
