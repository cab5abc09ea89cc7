"""Exact rationals, p-adic valuations and certified comparison of log-values.

Coefficients everywhere in padiflow are :class:`gmpy2.mpq` values, exposed
here under the name ``Rational``.  Radii and norms live in the multiplicative
group generated by an odd prime ``p`` and ``2``, so their logarithms are
exact rational combinations ``u*log(p) + v*log(2)`` (:class:`LogValue`).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple

import gmpy2
from gmpy2 import mpq, mpz

from .errors import InvalidArgument

Rational = mpq
INFINITY = math.inf  # valuation of zero

Interval = Tuple[mpq, mpq]

_DEFAULT_START_BITS = 32
_MAX_BITS = 1 << 16


def Q(x) -> mpq:
    """Coerce ints, strings ("-3/7", "2"), Fractions and mpq to ``Rational``."""
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        raise InvalidArgument(f"floats are not exact rationals: {x!r}")
    return mpq(x)


def parse_rational(s: str) -> mpq:
    text = s.strip().replace("−", "-")
    try:
        if "/" in text:
            num, den = text.split("/")
            den_i = int(den)
            if den_i <= 0:
                raise ValueError
            return mpq(int(num), den_i)
        return mpq(int(text))
    except ValueError:
        raise InvalidArgument(f"not a rational literal: {s!r}") from None


def format_rational(x) -> str:
    """Canonical ``num/den`` string; integers drop the denominator."""
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    return p >= 2 and bool(gmpy2.is_prime(p, 50))


def require_prime(p: int) -> int:
    if not isinstance(p, (int, type(mpz(0)))) or not is_prime(int(p)):
        raise InvalidArgument(f"{p!r} is not a prime")
    return int(p)


def require_odd_prime(p: int) -> int:
    p = require_prime(p)
    if p == 2:
        raise InvalidArgument("p = 2 is not supported; use an odd prime")
    return p


def vp(x, p: int):
    """p-adic valuation of a rational; ``INFINITY`` for zero."""
    p = require_prime(p)
    x = mpq(x)
    if x == 0:
        return INFINITY
    _, e_num = gmpy2.remove(x.numerator, p)
    _, e_den = gmpy2.remove(x.denominator, p)
    return int(e_num) - int(e_den)


# -- enclosures of logarithms -------------------------------------------------


def _atanh_enclosure(z: mpq, bits: int) -> Interval:
    # atanh(z) = sum z^(2k+1)/(2k+1); tail after K terms <= z^(2K+1)/((2K+1)(1-z^2))
    if z == 0:
        return mpq(0), mpq(0)
    z2 = z * z
    eps = mpq(1, 1 << (bits + 2))
    total = mpq(0)
    term = z
    k = 0
    while True:
        total += term / (2 * k + 1)
        term *= z2
        k += 1
        tail = term / ((2 * k + 1) * (1 - z2))
        if tail < eps:
            return total, total + tail


def _round_out(lo: mpq, hi: mpq, bits: int) -> Interval:
    scale = mpz(1) << bits
    return (
        mpq(gmpy2.f_div(lo.numerator * scale, lo.denominator), scale),
        mpq(gmpy2.c_div(hi.numerator * scale, hi.denominator), scale),
    )


@lru_cache(maxsize=1 << 15)
def log_interval(n: int, bits: int) -> Interval:
    """Dyadic interval of width <= 2**(2 - bits) containing ``log(n)``, n >= 1."""
    if n < 1:
        raise InvalidArgument("log_interval needs a positive integer")
    if n == 1:
        return mpq(0), mpq(0)
    if n == 2:
        lo, hi = _atanh_enclosure(mpq(1, 3), bits + 1)
        return _round_out(2 * lo, 2 * hi, bits)
    e = int(n).bit_length() - 1
    l2lo, l2hi = log_interval(2, bits + e.bit_length() + 1)
    m = mpq(n, 1 << e)  # in [1, 2)
    alo, ahi = _atanh_enclosure((m - 1) / (m + 1), bits + 1)
    return _round_out(e * l2lo + 2 * alo, e * l2hi + 2 * ahi, bits)


def _scaled(c: mpq, iv: Interval) -> Interval:
    lo, hi = iv
    return (c * lo, c * hi) if c >= 0 else (c * hi, c * lo)


def _start_bits() -> int:
    raw = os.environ.get("PADIFLOW_PRECISION")
    if not raw:
        return _DEFAULT_START_BITS
    w = parse_rational(raw)
    if w <= 0:
        raise InvalidArgument("PADIFLOW_PRECISION must be a positive rational")
    bits = 1
    while mpq(1, 1 << bits) > w:
        bits += 1
    return bits


# -- log-values -----------------------------------------------------------------


@dataclass(frozen=True)
class LogValue:
    """The real number ``logp*log(p) + log2*log(2)`` for an odd prime ``p``."""

    logp: mpq
    log2: mpq
    p: int

    def __post_init__(self):
        object.__setattr__(self, "logp", Q(self.logp))
        object.__setattr__(self, "log2", Q(self.log2))
        object.__setattr__(self, "p", require_odd_prime(self.p))

    @classmethod
    def zero(cls, p: int) -> "LogValue":
        return cls(0, 0, p)

    @classmethod
    def of_p(cls, u, p: int) -> "LogValue":
        """``u * log(p)``."""
        return cls(u, 0, p)

    @classmethod
    def of_2(cls, v, p: int) -> "LogValue":
        """``v * log(2)``, tagged with prime ``p``."""
        return cls(0, v, p)

    def _check(self, other: "LogValue"):
        if not isinstance(other, LogValue):
            return NotImplemented
        if other.p != self.p:
            raise InvalidArgument(f"cannot combine log-values for p={self.p} and p={other.p}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return LogValue(self.logp + other.logp, self.log2 + other.log2, self.p)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return LogValue(self.logp - other.logp, self.log2 - other.log2, self.p)

    def __neg__(self):
        return LogValue(-self.logp, -self.log2, self.p)

    def __mul__(self, c):
        c = Q(c)
        return LogValue(c * self.logp, c * self.log2, self.p)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.logp == 0 and self.log2 == 0

    def enclosure_at(self, bits: int) -> Interval:
        lp = log_interval(self.p, bits)
        l2 = log_interval(2, bits)
        a = _scaled(self.logp, lp)
        b = _scaled(self.log2, l2)
        return a[0] + b[0], a[1] + b[1]

    def enclosure(self, width) -> Interval:
        return log_enclosure(self, width)

    def sign(self) -> int:
        """Sign of the represented real, decided exactly."""
        u, v = self.logp, self.log2
        if u == 0 and v == 0:
            return 0
        su = (u > 0) - (u < 0)
        sv = (v > 0) - (v < 0)
        if sv == 0 or su == sv:
            return su if su else sv
        if su == 0:
            return sv
        # u*log p + v*log 2 = 0 would mean p^u = 2^-v with (u, v) != 0, which
        # unique factorisation rules out for odd p.  Hence the enclosures
        # shrink away from 0 and this loop terminates.
        bits = _start_bits()
        while bits <= _MAX_BITS:
            lo, hi = self.enclosure_at(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
        raise ArithmeticError("log-value comparison did not separate")  # pragma: no cover

    def __lt__(self, other):
        return logval_compare(self, other) < 0

    def __le__(self, other):
        return logval_compare(self, other) <= 0

    def __gt__(self, other):
        return logval_compare(self, other) > 0

    def __ge__(self, other):
        return logval_compare(self, other) >= 0

    def __float__(self):
        return float(self.logp) * math.log(self.p) + float(self.log2) * math.log(2)

    def __repr__(self):
        return (
            f"LogValue({format_rational(self.logp)}*log{self.p} + "
            f"{format_rational(self.log2)}*log2)"
        )

    def to_json(self) -> dict:
        return {"logp": format_rational(self.logp), "log2": format_rational(self.log2), "p": self.p}

    @classmethod
    def from_json(cls, obj: dict) -> "LogValue":
        return cls(Q(obj["logp"]), Q(obj["log2"]), int(obj["p"]))


def logval_compare(a: LogValue, b: LogValue) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``.

    Equality holds exactly when the coefficient pairs coincide; otherwise the
    order is read off interval enclosures refined by doubling the precision.
    """
    if not isinstance(a, LogValue) or not isinstance(b, LogValue):
        raise InvalidArgument("logval_compare expects two LogValue instances")
    if a.p != b.p:
        raise InvalidArgument(f"mismatched primes {a.p} and {b.p}")
    return (a - b).sign()


def log_enclosure(v: LogValue, width) -> Interval:
    """Rational interval of length <= ``width`` containing the value of ``v``."""
    width = Q(width)
    if width <= 0:
        raise InvalidArgument("width must be positive")
    if v.is_zero():
        return mpq(0), mpq(0)
    bits = _start_bits()
    while True:
        lo, hi = v.enclosure_at(bits)
        if hi - lo <= width:
            return lo, hi
        bits *= 2


def logsq_enclosure(p: int, width) -> Interval:
    """Interval of length <= ``width`` containing ``log(p)**2``."""
    width = Q(width)
    bits = _start_bits()
    while True:
        lo, hi = log_interval(p, bits)
        if hi * hi - lo * lo <= width:
            return lo * lo, hi * hi
        bits *= 2


def logvalue_le_logsq(v: LogValue, coef) -> bool:
    """Decide ``v <= coef * log(p)**2`` by refining enclosures until they separate.

    Equality cannot be certified this way, so a tie that never separates
    raises ``ArithmeticError`` at the precision cap.
    """
    coef = Q(coef)
    bits = _start_bits()
    while bits <= _MAX_BITS:
        lo, hi = v.enclosure_at(bits)
        llo, lhi = log_interval(v.p, bits)
        slo, shi = _scaled(coef, (llo * llo, lhi * lhi))
        if hi <= slo:
            return True
        if lo > shi:
            return False
        bits *= 2
    raise ArithmeticError("comparison against log(p)^2 did not separate")
