"""Gauss norms ``||f||_r = max_m |a_m| r^m`` of truncations, in the log domain.

For a truncation (a polynomial) the value is exact; for a series it is a lower
bound for the norm of every series extending the truncation.  Bound checks
are therefore falsification tests: a ``False`` refutes a claimed bound.
"""

from __future__ import annotations

from typing import Union

from .errors import InvalidArgument
from .exactnum import LogValue, logval_compare, require_odd_prime, vp
from .series import TruncSeries


class _MinusInfinity:
    """log of the norm of the zero series."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "MINUS_INF"

    def to_json(self):
        return "-inf"


MINUS_INF = _MinusInfinity()
NormBound = Union[LogValue, _MinusInfinity]


def _term_log(a, m: int, logr: LogValue, p: int) -> LogValue:
    # log(|a| r^m) = -vp(a) log p + m log r
    return LogValue(-vp(a, p) + m * logr.logp, m * logr.log2, p)


def gauss_norm_log(f: TruncSeries, logr: LogValue, p: int) -> NormBound:
    p = require_odd_prime(p)
    if logr.p != p:
        raise InvalidArgument(f"radius tagged with p={logr.p}, norm requested for p={p}")
    best = MINUS_INF
    for m, a in f.nonzero():
        t = _term_log(a, m, logr, p)
        if best is MINUS_INF or logval_compare(t, best) > 0:
            best = t
    return best


def norm_bounded_by(f: TruncSeries, bound: LogValue, logr: LogValue, p: int) -> bool:
    """True iff ``log ||f||_r <= bound`` on the truncation."""
    p = require_odd_prime(p)
    for m, a in f.nonzero():
        if logval_compare(_term_log(a, m, logr, p), bound) > 0:
            return False
    return True


def first_violation(f: TruncSeries, bound: LogValue, logr: LogValue, p: int):
    """Index of the first coefficient whose term exceeds ``bound``, else ``None``."""
    for m, a in f.nonzero():
        if logval_compare(_term_log(a, m, logr, p), bound) > 0:
            return m
    return None


def norm_le(x: NormBound, y: NormBound) -> bool:
    if x is MINUS_INF:
        return True
    if y is MINUS_INF:
        return False
    return logval_compare(x, y) <= 0
