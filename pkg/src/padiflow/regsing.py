"""Building blocks at a regular singular point.

* ``b_map``: the logarithmic primitive ``B = sum b_m/m X^m`` (so ``x B' = b``),
* ``resolvent``: the inverse of the Euler operator ``x y' + alpha y``,
* the certified radii at which their Gauss norms are controlled,
* formal exponentials and the gauge transform removing the linear term ``b*y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import NamedTuple, Optional

from gmpy2 import mpq

from .errors import HypothesisViolated, InvalidArgument, PreconditionViolated
from .exactnum import LogValue, require_odd_prime
from .gauss import first_violation
from .series import SeriesFamily, TruncSeries, convolve

_ZERO = mpq(0)


@dataclass(frozen=True)
class RadiusPair:
    r1: LogValue
    r2: Optional[LogValue]
    regime1: str
    regime2: Optional[str]

    def to_json(self) -> dict:
        return {
            "r1": self.r1.to_json(),
            "r2": None if self.r2 is None else self.r2.to_json(),
            "regime1": self.regime1,
            "regime2": self.regime2,
        }


def _require_vanishing(f: TruncSeries, order: int, name: str):
    for m in range(min(order, f.order + 1)):
        if f[m]:
            raise InvalidArgument(f"{name} must vanish to order {order}; coefficient {m} is {f[m]}")


def check_exponent(s: int, t: int, p: int | None = None):
    if s < 1 or t < 1:
        raise InvalidArgument(f"need s, t >= 1, got s={s}, t={t}")
    if gcd(s, t) != 1:
        raise InvalidArgument(f"s={s} and t={t} are not coprime")
    if p is not None and (s > p - 1 or t > p - 1):
        raise InvalidArgument(f"need s, t <= p - 1 = {p - 1}, got s={s}, t={t}")


def b_map(b: TruncSeries, k: int = 1) -> TruncSeries:
    """``B = sum_m b_m/m X^m`` for ``b`` vanishing to order ``2**k``.

    ``k = 0`` only asks for ``b(0) = 0``.
    """
    if k < 0:
        raise InvalidArgument("k must be >= 0")
    _require_vanishing(b, 1 << k, "b")
    c = [_ZERO] + [bm / m if bm else _ZERO for m, bm in enumerate(b.coeffs) if m > 0]
    return TruncSeries._raw(c, b.order)


def b_map_radius(k: int, p: int, logr: LogValue) -> RadiusPair:
    """Radii where ``||B|| <= p^(-2/(p-1))`` whenever ``||b||_r <= r/p``."""
    p = require_odd_prime(p)
    if k < 1:
        raise InvalidArgument("k must be a positive integer")
    if logr.sign() > 0:
        raise InvalidArgument("the radius must satisfy r <= 1")
    r1 = logr - LogValue.of_p(mpq(2, p * (p - 1)), p)
    r2 = logr - LogValue.of_2(mpq(k + 1, 1 << k), p)
    return RadiusPair(r1, r2, "p-adic", "archimedean-2")


def b_map_bound(p: int) -> LogValue:
    """``log p^(-2/(p-1))``, the bound on ``||B||``."""
    return LogValue.of_p(mpq(-2, p - 1), p)


def resolvent(a: TruncSeries, s: int, t: int, k: int = 1, p: int | None = None) -> TruncSeries:
    """Unique ``A`` vanishing to order ``2**k`` with ``x A' + (s/t) A = a``."""
    check_exponent(s, t, p)
    if k < 1:
        raise InvalidArgument("k must be a positive integer")
    _require_vanishing(a, 1 << k, "a")
    # a_m / (m + s/t) = t a_m / (t m + s)
    c = [t * am / (t * m + s) if am else _ZERO for m, am in enumerate(a.coeffs)]
    return TruncSeries._raw(c, a.order)


def resolvent_radius(k: int, p: int, s: int, t: int, logr: LogValue,
                     require_clause2: bool = True) -> RadiusPair:
    """Radii where ``||A||_R <= R`` whenever ``||a||_r <= r/p``.

    The second radius needs ``2**k >= s/t + 2``; if that fails it is an error
    unless ``require_clause2`` is false, in which case ``r2`` is ``None``.
    """
    p = require_odd_prime(p)
    check_exponent(s, t, p)
    if k < 1:
        raise InvalidArgument("k must be a positive integer")
    r1 = logr - LogValue.of_p(mpq(t, (p - 1) ** 2), p)
    if t * (1 << k) >= s + 2 * t:
        r2 = logr - LogValue.of_2(mpq(k * t, 1 << (k - 1)), p)
        return RadiusPair(r1, r2, "p-adic", "archimedean-2")
    if require_clause2:
        raise PreconditionViolated(f"2^{k} < alpha + 2 = {s}/{t} + 2")
    return RadiusPair(r1, None, "p-adic", None)


_EXP_BLOCK = 16


def exp_trunc(B: TruncSeries) -> TruncSeries:
    """Formal ``exp(B)`` for ``B(0) = 0``.

    Solves ``m E_m = sum_k k B_k E_{m-k}`` with ``E_0 = 1``.  The recurrence is
    evaluated divide-and-conquer: once ``E[lo:mid]`` is known its contribution
    to ``E[mid:hi]`` is a single convolution.
    """
    if B[0]:
        raise InvalidArgument("exp_trunc requires B(0) = 0")
    n = B.order
    kb = [k * bk for k, bk in enumerate(B.coeffs)]
    E = [_ZERO] * (n + 1)
    acc = [_ZERO] * (n + 1)

    def solve(lo, hi):
        if hi - lo <= _EXP_BLOCK:
            for m in range(lo, hi):
                if m == 0:
                    E[0] = mpq(1)
                    continue
                s = acc[m]
                for j in range(lo, m):
                    if E[j] and kb[m - j]:
                        s += kb[m - j] * E[j]
                E[m] = s / m
            return
        mid = (lo + hi) // 2
        solve(lo, mid)
        span = hi - lo - 1
        part = convolve(E[lo:mid], kb[: span + 1], span)
        for m in range(mid, hi):
            acc[m] += part[m - lo]
        solve(mid, hi)

    solve(0, n + 1)
    return TruncSeries._raw(E, n)


def exp_trunc_naive(B: TruncSeries) -> TruncSeries:
    """Reference ``sum_j B^j / j!``; quadratic in the number of powers."""
    if B[0]:
        raise InvalidArgument("exp_trunc requires B(0) = 0")
    n = B.order
    total = TruncSeries.one(n)
    term = TruncSeries.one(n)
    for j in range(1, n + 1):
        term = term * B * mpq(1, j)
        if term.is_zero():
            break
        total = total + term
    return total


class GaugeResult(NamedTuple):
    a0: TruncSeries
    c0: SeriesFamily
    B: TruncSeries
    logr1: LogValue


def check_main_hypotheses(a: TruncSeries, b: TruncSeries, c: SeriesFamily, p: int,
                          logr: LogValue) -> None:
    """Raise :class:`HypothesisViolated` unless the truncations satisfy

    ``a(0) = a'(0) = 0``, ``b(0) = 0``, ``||a||_r, ||b||_r <= r/p`` and
    ``||c_m||_r <= 1/p`` with ``0 < r <= 1``.
    """
    p = require_odd_prime(p)
    if logr.p != p:
        raise InvalidArgument(f"radius tagged with p={logr.p}, problem uses p={p}")
    if logr.sign() > 0:
        raise HypothesisViolated("r <= 1")
    for m in (0, 1):
        if m <= a.order and a[m]:
            raise HypothesisViolated("a(0) = a'(0) = 0", m)
    if b[0]:
        raise HypothesisViolated("b(0) = 0", 0)
    r_over_p = logr - LogValue.of_p(1, p)
    bad = first_violation(a, r_over_p, logr, p)
    if bad is not None:
        raise HypothesisViolated("||a||_r <= r/p", bad)
    bad = first_violation(b, r_over_p, logr, p)
    if bad is not None:
        raise HypothesisViolated("||b||_r <= r/p", bad)
    inv_p = LogValue.of_p(-1, p)
    for m, cm in c.items():
        if m < 2:
            raise HypothesisViolated("c_m only for m >= 2", m)
        bad = first_violation(cm, inv_p, logr, p)
        if bad is not None:
            raise HypothesisViolated(f"||c_{m}||_r <= 1/p", bad)


def gauge_radius(p: int, logr: LogValue) -> LogValue:
    """Radius at which ``||exp(+-B)|| = 1`` after removing ``b``."""
    return logr - LogValue.of_p(mpq(3, p * (p - 1)), p)


def gauge_strip(a: TruncSeries, b: TruncSeries, c: SeriesFamily, p: int,
                logr: LogValue) -> GaugeResult:
    """Remove the linear term: ``z = y exp(-B)`` turns the equation into

    ``x z' + alpha z = a0 + sum_m c0_m z^m`` with ``a0 = a exp(-B)`` and
    ``c0_m = c_m exp((m-1) B)``.
    """
    check_main_hypotheses(a, b, c, p, logr)
    B = b_map(b, 0)
    n = min(a.order, b.order, c.order)
    B = B.truncate(n)
    logr1 = gauge_radius(p, logr)
    if B.is_zero():
        return GaugeResult(a.truncate(n), SeriesFamily(c.terms, order=n) if len(c) else
                           SeriesFamily({}, order=n), B, logr1)
    E = exp_trunc(B)
    a0 = a.truncate(n) * exp_trunc(-B)
    c0 = {}
    power = TruncSeries.one(n)
    last = 1
    for m, cm in c.items():
        power = power * (E ** (m - last))
        last = m
        c0[m] = cm.truncate(n) * power
    return GaugeResult(a0, SeriesFamily(c0, order=n), B, logr1)
