"""Truncated power series over the rationals.

A :class:`TruncSeries` stores the coefficients of ``X^0 .. X^N`` exactly and
carries ``N`` (its truncation order) as data.  Binary operations on series of
different orders truncate to the smaller order.  :class:`SeriesFamily`
represents ``c(X1, X2) = sum_m c_m(X1) X2^m`` with univariate coefficients.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

import gmpy2
from gmpy2 import mpq, mpz

from .errors import InvalidArgument
from .exactnum import Q, format_rational

_ZERO = mpq(0)


class TruncSeries:
    """``sum_{m<=N} a_m X^m`` known exactly up to and including ``X^N``."""

    __slots__ = ("_c", "_order")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        c = [Q(x) for x in coeffs]
        if order is None:
            order = len(c) - 1
        if order < 0:
            raise InvalidArgument("truncation order must be >= 0")
        if len(c) > order + 1:
            c = c[: order + 1]
        else:
            c.extend([_ZERO] * (order + 1 - len(c)))
        self._c = tuple(c)
        self._order = order

    @classmethod
    def _raw(cls, coeffs: List[mpq], order: int) -> "TruncSeries":
        # trusted constructor: coeffs already mpq and of length order+1
        s = cls.__new__(cls)
        s._c = tuple(coeffs)
        s._order = order
        return s

    @classmethod
    def zero(cls, order: int) -> "TruncSeries":
        return cls._raw([_ZERO] * (order + 1), order)

    @classmethod
    def one(cls, order: int) -> "TruncSeries":
        return cls.monomial(0, 1, order)

    @classmethod
    def monomial(cls, m: int, coeff, order: int) -> "TruncSeries":
        c = [_ZERO] * (order + 1)
        if m <= order:
            c[m] = Q(coeff)
        return cls._raw(c, order)

    @classmethod
    def from_terms(cls, terms: Mapping[int, object] | Iterable[Tuple[int, object]], order: int):
        """Build from ``{exponent: coeff}`` or ``(exponent, coeff)`` pairs; terms past ``order`` drop."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        c = [_ZERO] * (order + 1)
        for m, a in items:
            if m < 0:
                raise InvalidArgument("negative exponent")
            if m <= order:
                c[m] += Q(a)
        return cls._raw(c, order)

    # -- basic access -------------------------------------------------------

    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> Tuple[mpq, ...]:
        return self._c

    def __getitem__(self, m: int) -> mpq:
        if m < 0 or m > self._order:
            raise IndexError(f"coefficient {m} outside truncation order {self._order}")
        return self._c[m]

    def __len__(self):
        return self._order + 1

    def __iter__(self) -> Iterator[mpq]:
        return iter(self._c)

    def nonzero(self) -> List[Tuple[int, mpq]]:
        return [(m, a) for m, a in enumerate(self._c) if a]

    def is_zero(self) -> bool:
        return not any(self._c)

    def valuation(self):
        """Index of the first nonzero coefficient, ``math.inf`` for zero."""
        for m, a in enumerate(self._c):
            if a:
                return m
        return math.inf

    def degree(self) -> int:
        """Largest index with a nonzero coefficient (-1 for zero)."""
        for m in range(self._order, -1, -1):
            if self._c[m]:
                return m
        return -1

    def truncate(self, order: int) -> "TruncSeries":
        if order > self._order:
            raise InvalidArgument(
                f"cannot raise truncation order {self._order} to {order}; use extend_polynomial"
            )
        return TruncSeries._raw(list(self._c[: order + 1]), order)

    def extend_polynomial(self, order: int) -> "TruncSeries":
        """Reinterpret the truncation as an exact polynomial known to a new order."""
        if order <= self._order:
            return self.truncate(order)
        return TruncSeries._raw(list(self._c) + [_ZERO] * (order - self._order), order)

    # -- ring operations ------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self._order == other._order and self._c == other._c

    def __hash__(self):
        return hash((self._order, self._c))

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.monomial(0, other, self._order)
        n = min(self._order, other._order)
        a, b = self._c, other._c
        return TruncSeries._raw([a[i] + b[i] for i in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw([-a for a in self._c], self._order)

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.monomial(0, other, self._order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return mul_trunc(self, other)
        c = Q(other)
        return TruncSeries._raw([c * a for a in self._c], self._order)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise InvalidArgument("negative powers are not supported")
        result = TruncSeries.one(self._order)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- calculus -------------------------------------------------------------

    def derivative(self) -> "TruncSeries":
        """Formal derivative; the result is known to order ``N - 1``."""
        n = self._order
        if n == 0:
            return TruncSeries.zero(0)
        return TruncSeries._raw([m * self._c[m] for m in range(1, n + 1)], n - 1)

    def euler(self) -> "TruncSeries":
        """``X * f'(X)``, same truncation order."""
        return TruncSeries._raw([m * a for m, a in enumerate(self._c)], self._order)

    def shift_down(self, k: int) -> "TruncSeries":
        """``f / X^k``; the first ``k`` coefficients must vanish."""
        if any(self._c[: k]):
            raise InvalidArgument(f"series does not vanish to order {k}")
        return TruncSeries._raw(list(self._c[k:]), self._order - k)

    def shift_up(self, k: int) -> "TruncSeries":
        """``X^k * f``, known to order ``N + k``."""
        return TruncSeries._raw([_ZERO] * k + list(self._c), self._order + k)

    def evaluate_at_zero(self) -> mpq:
        return self._c[0]

    # -- display / io -----------------------------------------------------------

    def __repr__(self):
        terms = " + ".join(f"{format_rational(a)}*X^{m}" for m, a in self.nonzero()) or "0"
        return f"TruncSeries({terms}; O(X^{self._order + 1}))"

    def to_json(self) -> dict:
        return {
            "terms": [[m, format_rational(a)] for m, a in self.nonzero()],
            "order": self._order,
        }

    @classmethod
    def from_json(cls, obj, order: int | None = None) -> "TruncSeries":
        """Accepts ``{"terms": [[m, "num/den"], ...], "order": N}`` or a bare term list.

        ``order`` is the fallback truncation order when the document has none.
        """
        if isinstance(obj, list):
            terms, n = obj, order
        else:
            terms, n = obj.get("terms", []), obj.get("order", order)
        if n is None:
            raise InvalidArgument("series has no truncation order")
        return cls.from_terms([(int(m), a) for m, a in terms], int(n))


def _common_denominator(c: Sequence[mpq]):
    den = mpz(1)
    for x in c:
        d = x.denominator
        if d != 1 and den % d:
            den = gmpy2.lcm(den, d)
    return den, [x.numerator * (den // x.denominator) for x in c]


def _pack(vals: Sequence, nbytes: int) -> mpz:
    pos = bytearray()
    neg = bytearray()
    zero = bytes(nbytes)
    for v in vals:
        if v >= 0:
            pos += int(v).to_bytes(nbytes, "little")
            neg += zero
        else:
            pos += zero
            neg += int(-v).to_bytes(nbytes, "little")
    return mpz(int.from_bytes(pos, "little")) - mpz(int.from_bytes(neg, "little"))


def _unpack(h: mpz, count: int, nbytes: int) -> List[int]:
    # balanced base-2^B digits of h; each true digit has |d| < 2^(B-1)
    bits = 8 * nbytes
    low = gmpy2.f_mod_2exp(h, count * bits)
    raw = int(low).to_bytes(count * nbytes, "little")
    half = 1 << (bits - 1)
    full = 1 << bits
    out = []
    carry = 0
    for i in range(count):
        v = int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") + carry
        if v >= half:
            out.append(v - full)
            carry = 1
        else:
            out.append(v)
            carry = 0
    return out


def _mul_kronecker(f: Sequence[mpq], g: Sequence[mpq], n: int) -> List[mpq]:
    df, fi = _common_denominator(f)
    dg, gi = _common_denominator(g)
    bound = max(abs(x) for x in fi).bit_length() + max(abs(x) for x in gi).bit_length()
    bits = bound + (n + 1).bit_length() + 2
    nbytes = (bits + 7) // 8
    h = _pack(fi, nbytes) * _pack(gi, nbytes)
    den = df * dg
    return [mpq(v, den) if v else _ZERO for v in _unpack(h, n + 1, nbytes)]


def _mul_schoolbook(fc: Sequence[mpq], gc: Sequence[mpq], n: int) -> List[mpq]:
    gnz = [(j, gc[j]) for j in range(n + 1) if gc[j]]
    out = [_ZERO] * (n + 1)
    if not gnz:
        return out
    for i in range(n + 1):
        fi = fc[i]
        if not fi:
            continue
        lim = n - i
        for j, gj in gnz:
            if j > lim:
                break
            out[i + j] += fi * gj
    return out


_KRONECKER_MIN_WORK = 400


def convolve(fc: Sequence[mpq], gc: Sequence[mpq], n: int) -> List[mpq]:
    """Coefficients ``0..n`` of the product of two coefficient sequences."""
    fc, gc = list(fc[: n + 1]), list(gc[: n + 1])
    fc += [_ZERO] * (n + 1 - len(fc))
    gc += [_ZERO] * (n + 1 - len(gc))
    vf = next((i for i, x in enumerate(fc) if x), None)
    vg = next((i for i, x in enumerate(gc) if x), None)
    if vf is None or vg is None or vf + vg > n:
        return [_ZERO] * (n + 1)
    nf = sum(1 for x in fc if x)
    ng = sum(1 for x in gc if x)
    if nf * ng < _KRONECKER_MIN_WORK:
        return _mul_schoolbook(fc, gc, n)
    # strip the zero prefixes so the packed integers stay short
    m = n - vf - vg
    return [_ZERO] * (vf + vg) + _mul_kronecker(fc[vf:vf + m + 1], gc[vg:vg + m + 1], m)


def mul_trunc(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """Cauchy product truncated at ``min(f.order, g.order)``."""
    n = min(f.order, g.order)
    return TruncSeries._raw(convolve(f.coeffs, g.coeffs, n), n)


def compose_trunc(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """``f(g(X))`` truncated at the smaller order, by Horner's rule; needs ``g(0) = 0``."""
    if g.coeffs[0]:
        raise InvalidArgument("compose_trunc requires g(0) = 0")
    n = min(f.order, g.order)
    g = g.truncate(n)
    fc = f.coeffs
    # since g(0) = 0, only f_0 .. f_N can reach X^N
    result = TruncSeries.monomial(0, fc[n], n)
    for k in range(n - 1, -1, -1):
        result = result * g
        if fc[k]:
            result = result + fc[k]
    return result


class SeriesFamily:
    """``sum_m c_m(X1) * X2^m`` for finitely many distinct indices ``m``.

    Families built from hypotheses need ``m >= 2``; ``min_index=1`` admits the
    derivative families produced by :func:`family_partial`.
    """

    __slots__ = ("_terms", "_order")

    def __init__(self, terms: Mapping[int, TruncSeries] | Iterable[Tuple[int, TruncSeries]],
                 order: int | None = None, min_index: int = 2):
        items = list(terms.items() if isinstance(terms, Mapping) else terms)
        seen = set()
        orders = [s.order for _, s in items]
        if order is None:
            if not orders:
                raise InvalidArgument("empty family needs an explicit order")
            order = min(orders)
        clean: Dict[int, TruncSeries] = {}
        for m, s in items:
            m = int(m)
            if m < min_index:
                raise InvalidArgument(f"family index {m} < {min_index}")
            if m in seen:
                raise InvalidArgument(f"duplicate family index {m}")
            seen.add(m)
            if s.order < order:
                raise InvalidArgument(f"c_{m} is only known to order {s.order} < {order}")
            clean[m] = s.truncate(order)
        self._terms = dict(sorted(clean.items()))
        self._order = order

    @property
    def order(self) -> int:
        return self._order

    @property
    def terms(self) -> Dict[int, TruncSeries]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def indices(self) -> List[int]:
        return list(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, SeriesFamily):
            return NotImplemented
        nz = lambda fam: {m: s for m, s in fam._terms.items() if not s.is_zero()}
        return self._order == other._order and nz(self) == nz(other)

    def map(self, fn) -> "SeriesFamily":
        """Apply ``fn(m, c_m)`` to every coefficient series."""
        out = {m: fn(m, s) for m, s in self._terms.items()}
        order = min([s.order for s in out.values()], default=self._order)
        return SeriesFamily(out, order=order, min_index=min(out, default=1))

    def __repr__(self):
        inner = ", ".join(f"{m}: {s!r}" for m, s in self._terms.items())
        return f"SeriesFamily({{{inner}}}; order {self._order})"

    def to_json(self) -> list:
        return [{"m": m, "series": s.to_json()} for m, s in self._terms.items()]

    @classmethod
    def from_json(cls, obj: Sequence[dict], order: int | None = None, min_index: int = 2):
        terms = [(int(t["m"]), TruncSeries.from_json(t["series"], order)) for t in obj]
        if order is None and not terms:
            raise InvalidArgument("empty family needs an explicit order")
        if order is not None:
            terms = [(m, s.extend_polynomial(order) if s.order < order else s) for m, s in terms]
        return cls(terms, order=order, min_index=min_index)


def substitute_family(c: SeriesFamily, y: TruncSeries) -> TruncSeries:
    """``sum_m c_m(X) * y(X)^m``; ``y`` must vanish at 0, so few ``m`` contribute."""
    if y.coeffs[0]:
        raise InvalidArgument("substitute_family requires y(0) = 0")
    n = min(c.order, y.order)
    y = y.truncate(n)
    total = TruncSeries.zero(n)
    v = y.valuation()
    power = None
    last = 0
    for m, cm in c.items():
        if v * m > n:
            break
        if cm.is_zero():
            continue
        if power is None:
            power = y ** m
        else:
            power = power * (y ** (m - last))
        last = m
        total = total + cm.truncate(n) * power
    return total


def family_partial(c: SeriesFamily) -> SeriesFamily:
    """``d/dX2`` of the family: terms ``(m - 1, m * c_m)``."""
    return SeriesFamily(
        [(m - 1, s * m) for m, s in c.items()], order=c.order, min_index=1
    )
