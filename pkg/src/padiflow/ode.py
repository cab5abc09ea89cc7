"""Solvers for ``x y' + alpha y = a + b y + sum_{m>=2} c_m y^m`` with ``y(0) = y'(0) = 0``.

``solve_direct`` is the coefficient recursion and serves as the oracle.
``solve_newton`` removes ``b`` by a gauge transform and then runs the
quadratically convergent Newton scheme, recording the certified radii of each
step in a :class:`RadiusLedger`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Tuple

from gmpy2 import mpq

from .errors import InvalidArgument
from .exactnum import (
    Interval,
    LogValue,
    Q,
    format_rational,
    logsq_enclosure,
    logvalue_le_logsq,
    log_enclosure,
    require_odd_prime,
)
from .gauss import norm_bounded_by
from .regsing import (
    b_map,
    check_exponent,
    check_main_hypotheses,
    exp_trunc,
    gauge_strip,
    resolvent,
)
from .series import SeriesFamily, TruncSeries, family_partial, substitute_family

DECREMENT_CONSTANT = 14

_ZERO = mpq(0)


@dataclass(frozen=True)
class OdeProblem:
    a: TruncSeries
    b: TruncSeries
    c: SeriesFamily
    s: int
    t: int
    p: int
    logr: LogValue

    def __post_init__(self):
        require_odd_prime(self.p)
        check_exponent(self.s, self.t, self.p)

    @property
    def alpha(self) -> mpq:
        return mpq(self.s, self.t)

    @property
    def order(self) -> int:
        return min(self.a.order, self.b.order, self.c.order)

    def validate(self) -> None:
        """Raise ``HypothesisViolated`` if a norm or vanishing hypothesis fails."""
        check_main_hypotheses(self.a, self.b, self.c, self.p, self.logr)

    def residual(self, y: TruncSeries) -> TruncSeries:
        """``x y' + alpha y - a - b y - sum c_m y^m``, truncated."""
        n = min(self.order, y.order)
        y = y.truncate(n)
        lhs = y.euler() + y * self.alpha
        rhs = self.a.truncate(n) + self.b.truncate(n) * y + substitute_family(self.c, y)
        return lhs - rhs

    def to_json(self) -> dict:
        return {
            "kind": "ode",
            "a": self.a.to_json(),
            "b": self.b.to_json(),
            "c": self.c.to_json(),
            "s": self.s,
            "t": self.t,
            "p": self.p,
            "logr": self.logr.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict, order: int | None = None) -> "OdeProblem":
        """Bare term lists are polynomials and are read at ``order``; series
        documents carry their own truncation order, cut down to ``order``."""
        def series(doc):
            if isinstance(doc, list):
                if order is None:
                    raise InvalidArgument("polynomial input needs an order")
                return TruncSeries.from_json(doc, order)
            s = TruncSeries.from_json(doc)
            return s.truncate(order) if order is not None and s.order > order else s

        a, b = series(obj.get("a", [])), series(obj.get("b", []))
        fam = [(int(t["m"]), series(t["series"])) for t in obj.get("c", [])]
        n = min([a.order, b.order] + [s.order for _, s in fam])
        a, b = a.truncate(n), b.truncate(n)
        c = SeriesFamily([(m, s.truncate(n)) for m, s in fam], order=n)
        p = int(obj["p"] if "p" in obj else obj["prime"])
        logr = LogValue.from_json(obj["logr"]) if "logr" in obj else LogValue.zero(p)
        return cls(a, b, c, int(obj["s"]), int(obj["t"]), p, logr)


def solve_direct(prob: OdeProblem, N: int | None = None) -> TruncSeries:
    """The unique solution by ``(m + alpha) y_m = [X^m](a + b y + sum c_j y^j)``."""
    n = prob.order if N is None else min(N, prob.order)
    s, t = prob.s, prob.t
    a, b = prob.a.coeffs, prob.b.coeffs
    fam = [(j, cj.coeffs) for j, cj in prob.c.items() if not cj.is_zero()]
    jmax = max((j for j, _ in fam), default=1)
    y = [_ZERO] * (n + 1)
    # pw[j][k] = [X^k] y^j, filled for k <= m - 2 before step m needs it
    pw = {1: y}
    for j in range(2, jmax + 1):
        pw[j] = [_ZERO] * (n + 1)
    bnz = [(i, bi) for i, bi in enumerate(b[: n + 1]) if bi]
    for m in range(2, n + 1):
        for j in range(2, jmax + 1):
            if 2 * j > m:
                break
            prev = pw[j - 1]
            acc = _ZERO
            for i in range(2, m - 2 * (j - 1) + 1):
                yi = y[i]
                if yi:
                    q = prev[m - i]
                    if q:
                        acc += yi * q
            pw[j][m] = acc
        rhs = a[m]
        for i, bi in bnz:
            if i > m - 2:
                break
            yk = y[m - i]
            if yk:
                rhs += bi * yk
        for j, cj in fam:
            if 2 * j > m:
                continue
            pj = pw[j]
            for i in range(0, m - 2 * j + 1):
                ci = cj[i]
                if ci:
                    q = pj[m - i]
                    if q:
                        rhs += ci * q
        if rhs:
            y[m] = t * rhs / (t * m + s)
    return TruncSeries._raw(y, n)


def find_k1(p: int) -> int:
    """Smallest ``k >= 1`` with ``(k + 1) / 2^k <= 1 / p^2``."""
    p = require_odd_prime(p)
    k = 1
    while (k + 1) * p * p > (1 << k):
        k += 1
    assert (1 << k) >= p * p + 1, (p, k)
    return k


def tail_decrement_coef(k1: int) -> mpq:
    """``sum_{k >= k1} (k + 1) / 2^(k - 1)`` in closed form, ``(k1 + 2) / 2^(k1 - 2)``."""
    return mpq(k1 + 2, 1) / mpq(2) ** (k1 - 2)


class LedgerEntry(NamedTuple):
    k: int
    logr: LogValue
    regime: str  # "preK1" or "postK1"
    decrement: LogValue  # log r_{k-1} - log r_k (from the gauge radius for k = 0)


@dataclass
class RadiusLedger:
    """Certified radii ``r_0 > r_1 > ...`` of the Newton iteration.

    ``certified_r`` is the limit of the full (infinite) sequence, summed in
    closed form, so it lies below every entry whatever the number of steps run.
    """

    p: int
    t: int
    logr: LogValue
    gauge_r: LogValue
    k1: int
    entries: List[LedgerEntry] = field(default_factory=list)
    certified_r: LogValue | None = None

    @property
    def closed_form_coef(self) -> mpq:
        """``R = r exp(-closed_form_coef * (log p)^2)``."""
        return mpq(DECREMENT_CONSTANT * self.t, (self.p - 1) ** 2)

    @property
    def p_squared_coef(self) -> mpq:
        """Same constant over ``p^2``; a larger radius, reported but not certified."""
        return mpq(DECREMENT_CONSTANT * self.t, self.p ** 2)

    def total_decrement(self) -> LogValue:
        return self.logr - self.certified_r

    def decrement_within_bound(self) -> bool:
        """``log r - log R_cert <= 14 t (log p)^2 / (p - 1)^2``, decided on enclosures."""
        return logvalue_le_logsq(self.total_decrement(), self.closed_form_coef)

    def certified_ge_closed_form(self) -> bool:
        return self.decrement_within_bound()

    def closed_form_r_enclosure(self, width=mpq(1, 10 ** 12), coef=None) -> Interval:
        coef = self.closed_form_coef if coef is None else Q(coef)
        width = Q(width)
        lo, hi = log_enclosure(self.logr, width / 2) if not self.logr.is_zero() else (_ZERO, _ZERO)
        slo, shi = logsq_enclosure(self.p, width / (2 * coef))
        return lo - coef * shi, hi - coef * slo

    def is_strictly_decreasing(self) -> bool:
        rs = [self.gauge_r] + [e.logr for e in self.entries]
        return all(x > y for x, y in zip(rs, rs[1:]))

    def to_json(self) -> dict:
        lo, hi = self.closed_form_r_enclosure()
        plo, phi = self.closed_form_r_enclosure(coef=self.p_squared_coef)
        return {
            "p": self.p,
            "t": self.t,
            "k1": self.k1,
            "logr": self.logr.to_json(),
            "gaugeR": self.gauge_r.to_json(),
            "entries": [
                {"k": e.k, "logr": e.logr.to_json(), "regime": e.regime} for e in self.entries
            ],
            "certifiedR": self.certified_r.to_json(),
            "closedFormR": [format_rational(lo), format_rational(hi)],
            "closedFormCoefLogP2": format_rational(self.closed_form_coef),
            "closedFormRPSquared": [format_rational(plo), format_rational(phi)],
        }


def build_ledger(p: int, t: int, logr: LogValue, steps: int) -> RadiusLedger:
    """Ledger for ``steps`` Newton corrections after ``z_0``."""
    k1 = find_k1(p)
    gauge_r = logr - LogValue.of_p(mpq(3, p * (p - 1)), p)
    first = LogValue.of_p(mpq(t, (p - 1) ** 2), p)
    pre = LogValue.of_p(mpq(2 * t, (p - 1) ** 2), p)
    led = RadiusLedger(p, t, logr, gauge_r, k1)
    r = gauge_r - first
    led.entries.append(LedgerEntry(0, r, "preK1", first))
    for k in range(1, steps + 1):
        if k < k1:
            dec = pre
            regime = "preK1"
        else:
            dec = LogValue.of_2(mpq((k + 1) * t, 1 << (k - 1)), p)
            regime = "postK1"
        r = r - dec
        led.entries.append(LedgerEntry(k, r, regime, dec))
    r0 = led.entries[0].logr
    led.certified_r = (
        r0 - pre * (k1 - 1) - LogValue.of_2(t * tail_decrement_coef(k1), p)
    )
    return led


class NewtonResult(NamedTuple):
    y: TruncSeries
    ledger: RadiusLedger
    corrections: Tuple[TruncSeries, ...]  # z_0, z_1, ... in gauge coordinates
    gauge: TruncSeries  # B with y = z exp(B)


def solve_newton(prob: OdeProblem, N: int | None = None) -> NewtonResult:
    prob.validate()
    n = prob.order if N is None else min(N, prob.order)
    s, t, p = prob.s, prob.t, prob.p
    a0, c0, B, _ = gauge_strip(prob.a.truncate(n), prob.b.truncate(n),
                               SeriesFamily(prob.c.terms, order=n), p, prob.logr)
    dc = family_partial(c0)
    zero = TruncSeries.zero(n)

    z = resolvent(a0, s, t, 1)
    corrections = [z]
    y_prev = z  # y_{k-1}
    c_prev2, dc_prev2 = zero, zero  # c(x, y_{k-2}), dc(x, y_{k-2})
    k = 1
    while (1 << (k + 1)) <= n:
        c_prev = substitute_family(c0, y_prev)
        dc_prev = substitute_family(dc, y_prev)
        a_k = c_prev - c_prev2 - corrections[-1] * dc_prev2
        b_k = dc_prev
        B_k = b_map(b_k, 1)
        w_k = resolvent(a_k * exp_trunc(-B_k), s, t, k + 1)
        z_k = w_k * exp_trunc(B_k)
        corrections.append(z_k)
        y_prev = y_prev + z_k
        c_prev2, dc_prev2 = c_prev, dc_prev
        k += 1
    y = y_prev * exp_trunc(B) if not B.is_zero() else y_prev
    ledger = build_ledger(p, t, prob.logr, len(corrections) - 1)
    return NewtonResult(y, ledger, tuple(corrections), B)


def check_self_bounded(y: TruncSeries, logR: LogValue, p: int) -> bool:
    """Falsification test of ``||y||_R <= R`` on the truncation."""
    return norm_bounded_by(y, logR, logR, p)
