"""Plane vector fields at a singular point: classification, separatrices, blow-up.

A field ``D = P d/dx1 + Q d/dx2`` with polynomial ``P, Q`` over the rationals.
In normal form ``D = (x1 + f1) d/dx1 + (lam x2 + f2) d/dx2`` with ``ord f_i >= 2``
and ``lam < 0`` rational there are two formal invariant graphs,
``x2 = phi2(x1)`` and ``x1 = phi1(x2)``, computed here coefficient by coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Mapping, Optional, Tuple

import gmpy2
from gmpy2 import mpq

from .errors import InvalidArgument, PreconditionViolated
from .exactnum import Q, format_rational, parse_rational
from .series import TruncSeries

Monomial = Tuple[int, int]


class Poly2:
    """Sparse bivariate polynomial ``sum c_ij x1^i x2^j`` over the rationals."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        t: Dict[Monomial, mpq] = {}
        for (i, j), c in items:
            i, j = int(i), int(j)
            if i < 0 or j < 0:
                raise InvalidArgument(f"negative exponent ({i}, {j})")
            c = Q(c)
            if c:
                t[(i, j)] = t.get((i, j), mpq(0)) + c
                if not t[(i, j)]:
                    del t[(i, j)]
        self._terms = t

    @classmethod
    def _raw(cls, terms: Dict[Monomial, mpq]) -> "Poly2":
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def x1(cls) -> "Poly2":
        return cls._raw({(1, 0): mpq(1)})

    @classmethod
    def x2(cls) -> "Poly2":
        return cls._raw({(0, 1): mpq(1)})

    @classmethod
    def const(cls, c) -> "Poly2":
        c = Q(c)
        return cls._raw({(0, 0): c} if c else {})

    @property
    def terms(self) -> Dict[Monomial, mpq]:
        return dict(self._terms)

    def __getitem__(self, mono: Monomial) -> mpq:
        return self._terms.get(mono, mpq(0))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((i + j for i, j in self._terms), default=-1)

    def low_degree(self) -> int:
        return min((i + j for i, j in self._terms), default=-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly2) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "Poly2(0)"
        parts = [f"{format_rational(c)}*x1^{i}*x2^{j}" for (i, j), c in sorted(self._terms.items())]
        return "Poly2(" + " + ".join(parts) + ")"

    def __add__(self, other: "Poly2") -> "Poly2":
        t = dict(self._terms)
        for k, c in other._terms.items():
            v = t.get(k, 0) + c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return Poly2._raw(t)

    def __neg__(self) -> "Poly2":
        return Poly2._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "Poly2") -> "Poly2":
        return self + (-other)

    def scale(self, c) -> "Poly2":
        c = Q(c)
        if not c:
            return Poly2._raw({})
        return Poly2._raw({k: c * v for k, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly2):
            return self.scale(other)
        t: Dict[Monomial, mpq] = {}
        for (i, j), a in self._terms.items():
            for (k, l), b in other._terms.items():
                key = (i + k, j + l)
                v = t.get(key, 0) + a * b
                if v:
                    t[key] = v
                else:
                    t.pop(key, None)
        return Poly2._raw(t)

    __rmul__ = __mul__

    def diff(self, var: int) -> "Poly2":
        t = {}
        for (i, j), c in self._terms.items():
            e = i if var == 1 else j
            if e:
                t[(i - 1, j) if var == 1 else (i, j - 1)] = c * e
        return Poly2._raw(t)

    def homogeneous_part(self, d: int) -> "Poly2":
        return Poly2._raw({k: c for k, c in self._terms.items() if k[0] + k[1] == d})

    def divide_by_var(self, var: int) -> "Poly2":
        """Exact division by ``x1`` or ``x2``; a remainder is an error."""
        t = {}
        for (i, j), c in self._terms.items():
            e = i if var == 1 else j
            if not e:
                raise InvalidArgument(f"division by x{var} leaves a remainder")
            t[(i - 1, j) if var == 1 else (i, j - 1)] = c
        return Poly2._raw(t)

    def substitute_monomial(self, a: Monomial, b: Monomial) -> "Poly2":
        """``x1 -> y^a``, ``x2 -> y^b`` for monomials ``a, b`` in ``(y1, y2)``."""
        t = {}
        for (i, j), c in self._terms.items():
            key = (i * a[0] + j * b[0], i * a[1] + j * b[1])
            v = t.get(key, 0) + c
            if v:
                t[key] = v
            else:
                t.pop(key, None)
        return Poly2._raw(t)

    def substitute_linear(self, m11, m12, m21, m22) -> "Poly2":
        """``x1 -> m11 y1 + m12 y2``, ``x2 -> m21 y1 + m22 y2``."""
        l1 = Poly2({(1, 0): m11, (0, 1): m12})
        l2 = Poly2({(1, 0): m21, (0, 1): m22})
        d = max(self.degree(), 0)
        p1 = [Poly2.const(1)]
        p2 = [Poly2.const(1)]
        for _ in range(d):
            p1.append(p1[-1] * l1)
            p2.append(p2[-1] * l2)
        out = Poly2._raw({})
        for (i, j), c in self._terms.items():
            out = out + (p1[i] * p2[j]).scale(c)
        return out

    def eval_series(self, u: TruncSeries, v: TruncSeries) -> TruncSeries:
        """``P(u(T), v(T))`` truncated at ``min(order u, order v)``."""
        n = min(u.order, v.order)
        u, v = u.truncate(n), v.truncate(n)
        di = max((i for i, _ in self._terms), default=0)
        dj = max((j for _, j in self._terms), default=0)
        pu = [TruncSeries.one(n)]
        for _ in range(di):
            pu.append(pu[-1] * u)
        pv = [TruncSeries.one(n)]
        for _ in range(dj):
            pv.append(pv[-1] * v)
        out = TruncSeries.zero(n)
        for (i, j), c in sorted(self._terms.items()):
            out = out + pu[i] * pv[j] * c
        return out

    def to_json(self) -> list:
        return [[[i, j], format_rational(c)] for (i, j), c in sorted(self._terms.items())]

    @classmethod
    def from_json(cls, obj) -> "Poly2":
        terms = []
        for entry in obj:
            (i, j), c = entry
            terms.append(((i, j), parse_rational(c) if isinstance(c, str) else c))
        return cls(terms)


@dataclass(frozen=True)
class VectorField:
    P: Poly2
    Q: Poly2

    def __post_init__(self):
        if self.P.is_zero() and self.Q.is_zero():
            raise InvalidArgument("vector field is zero")

    @property
    def max_degree(self) -> int:
        return max(self.P.degree(), self.Q.degree())

    def apply(self, g: Poly2) -> Poly2:
        """``D(g) = P dg/dx1 + Q dg/dx2``."""
        return self.P * g.diff(1) + self.Q * g.diff(2)

    def linear_part(self) -> Tuple[mpq, mpq, mpq, mpq]:
        """``(P_10, P_01, Q_10, Q_01)``: rows of the Jacobian at the origin."""
        return self.P[(1, 0)], self.P[(0, 1)], self.Q[(1, 0)], self.Q[(0, 1)]

    def scale(self, c) -> "VectorField":
        return VectorField(self.P.scale(c), self.Q.scale(c))

    def to_json(self) -> dict:
        return {"P": self.P.to_json(), "Q": self.Q.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "VectorField":
        return cls(Poly2.from_json(obj.get("P", [])), Poly2.from_json(obj.get("Q", [])))


def flagship_field() -> VectorField:
    """``x1 d/dx1 + (-x2 + x1^2) d/dx2``."""
    return VectorField(Poly2({(1, 0): 1}), Poly2({(0, 1): -1, (2, 0): 1}))


class SingularityKind(str, Enum):
    NONDEGENERATE_REDUCED = "nondegenerateReduced"
    DEGENERATE_REDUCED = "degenerateReduced"
    NON_REDUCED = "nonReduced"
    IRRATIONAL_RATIO = "irrationalRatio"


@dataclass(frozen=True)
class SingularityClass:
    kind: SingularityKind
    eigenvalues: Optional[Tuple[mpq, mpq]]
    alpha: Optional[mpq] = None  # second eigenvalue over the first
    s: Optional[int] = None
    t: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "eigenvalues": None if self.eigenvalues is None else [format_rational(e) for e in self.eigenvalues],
            "alpha": None if self.alpha is None else format_rational(self.alpha),
            "s": self.s,
            "t": self.t,
        }


def _rational_sqrt(x: mpq) -> Optional[mpq]:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    if gmpy2.is_square(n) and gmpy2.is_square(d):
        return mpq(gmpy2.isqrt(n), gmpy2.isqrt(d))
    return None


def eigenvalues(V: VectorField) -> Optional[Tuple[mpq, mpq]]:
    """Rational eigenvalues of the linear part, or ``None`` if irrational.

    For a triangular linear part the order is the diagonal ``(P_10, Q_01)``;
    otherwise the larger eigenvalue comes first.
    """
    a, b, c, d = V.linear_part()
    if b == 0 or c == 0:
        return a, d
    tr, det = a + d, a * d - b * c
    root = _rational_sqrt(tr * tr - 4 * det)
    if root is None:
        return None
    return (tr + root) / 2, (tr - root) / 2


def classify_singularity(V: VectorField) -> SingularityClass:
    if V.P[(0, 0)] or V.Q[(0, 0)]:
        raise InvalidArgument("the field does not vanish at the origin")
    ev = eigenvalues(V)
    if ev is None:
        return SingularityClass(SingularityKind.IRRATIONAL_RATIO, None)
    e1, e2 = ev
    if not e1 and not e2:
        return SingularityClass(SingularityKind.NON_REDUCED, ev)
    if not e1 or not e2:
        return SingularityClass(SingularityKind.DEGENERATE_REDUCED, ev)
    ratio = e2 / e1
    if ratio > 0:
        return SingularityClass(SingularityKind.NON_REDUCED, ev)
    return SingularityClass(SingularityKind.NONDEGENERATE_REDUCED, ev, ratio,
                            int((-ratio).numerator), int((-ratio).denominator))


def diagonalize(V: VectorField) -> Tuple[VectorField, Tuple[mpq, mpq, mpq, mpq]]:
    """Rational change of basis ``x = M u`` making the linear part diagonal.

    Returns the transformed field and ``M = (m11, m12, m21, m22)``.  Requires
    distinct rational eigenvalues.
    """
    a, b, c, d = V.linear_part()
    if b == 0 and c == 0:
        one, zero = mpq(1), mpq(0)
        return V, (one, zero, zero, one)
    ev = eigenvalues(V)
    if ev is None or ev[0] == ev[1]:
        raise PreconditionViolated("linear part is not diagonalizable over the rationals")

    def eigvec(e):
        # (a - e) v1 + b v2 = 0 and c v1 + (d - e) v2 = 0
        if b or a - e:
            return (b, e - a) if b else (mpq(0), mpq(1))
        return (e - d, c) if c else (mpq(1), mpq(0))

    (m11, m21), (m12, m22) = eigvec(ev[0]), eigvec(ev[1])
    det = m11 * m22 - m12 * m21
    i11, i12, i21, i22 = m22 / det, -m12 / det, -m21 / det, m11 / det
    Ps = V.P.substitute_linear(m11, m12, m21, m22)
    Qs = V.Q.substitute_linear(m11, m12, m21, m22)
    return VectorField(Ps.scale(i11) + Qs.scale(i12), Ps.scale(i21) + Qs.scale(i22)), (m11, m12, m21, m22)


def _normal_form(V: VectorField) -> Tuple[VectorField, mpq]:
    """Scale ``V`` so that the ``x1`` eigenvalue is 1; return it with ``lam``."""
    a, b, c, d = V.linear_part()
    if V.P[(0, 0)] or V.Q[(0, 0)] or b or c or not a:
        raise PreconditionViolated("field is not in diagonal normal form")
    cls = classify_singularity(V)
    if cls.kind is not SingularityKind.NONDEGENERATE_REDUCED:
        raise PreconditionViolated(f"singularity is {cls.kind.value}, need nondegenerateReduced")
    return V.scale(1 / a), d / a


def _check_which(which: int):
    if which not in (1, 2):
        raise InvalidArgument("which must be 1 or 2")


def invariance_defect(V: VectorField, phi: TruncSeries, which: int, N: int | None = None) -> TruncSeries:
    """Invariance equation of a graph curve evaluated at ``phi``.

    ``which = 2``: curve ``(T, phi(T))``, defect ``Q - phi' P``.
    ``which = 1``: curve ``(phi(T), T)``, defect ``P - phi' Q``.
    Both sides are evaluated on the curve and truncated at ``N``.
    """
    _check_which(which)
    n = phi.order if N is None else min(N, phi.order)
    phi = phi.truncate(n)
    T = TruncSeries.monomial(1, 1, n)
    u, v = (T, phi) if which == 2 else (phi, T)
    along, across = (V.P, V.Q) if which == 2 else (V.Q, V.P)
    # along(curve) vanishes at T = 0, so phi' * along is exact to order n
    carry = along.eval_series(u, v)
    if carry[0]:
        raise InvalidArgument("the curve must pass through a zero of the field")
    if n == 0:
        return across.eval_series(u, v)
    prod = (phi.derivative() * carry.shift_down(1)).shift_up(1)
    return across.eval_series(u, v) - prod


def separatrix_series(V: VectorField, which: int, N: int) -> TruncSeries:
    """Formal invariant graph vanishing to order 2 of a field in normal form.

    Writing ``phi = sum a_m T^m``, the ``T^m`` coefficient of the defect is
    ``d_m a_m + R_m`` with ``R_m`` independent of ``a_m`` and
    ``d_m = lam - m`` (``which = 2``) or ``1 - m lam`` (``which = 1``); both are
    nonzero since ``lam < 0``.
    """
    _check_which(which)
    if N < 0:
        raise InvalidArgument("order must be >= 0")
    W, lam = _normal_form(V)
    coeffs = [mpq(0)] * (N + 1)
    for m in range(2, N + 1):
        trial = TruncSeries._raw(coeffs[: m + 1], m)
        r = invariance_defect(W, trial, which, m)[m]
        d = lam - m if which == 2 else 1 - m * lam
        coeffs[m] = -r / d
    return TruncSeries._raw(coeffs, N)


def defect_order(defect: TruncSeries) -> Optional[int]:
    """Index of the first nonzero coefficient, ``None`` if zero to its order."""
    v = defect.valuation()
    return None if v == float("inf") else int(v)


def blowup_chart(V: VectorField, chart: int) -> VectorField:
    """The field in a chart of the blow-up of the origin.

    Chart 1: ``x1 = y1 y2, x2 = y2`` giving ``D(y1) = (P - y1 Q) / y2``, ``D(y2) = Q``.
    Chart 2: ``x1 = u1, x2 = u1 u2`` giving ``D(u1) = P``, ``D(u2) = (Q - u2 P) / u1``.
    """
    if V.P[(0, 0)] or V.Q[(0, 0)]:
        raise InvalidArgument("the field does not vanish at the origin")
    if chart == 1:
        Ps = V.P.substitute_monomial((1, 1), (0, 1))
        Qs = V.Q.substitute_monomial((1, 1), (0, 1))
        return VectorField((Ps - Poly2.x1() * Qs).divide_by_var(2), Qs)
    if chart == 2:
        Ps = V.P.substitute_monomial((1, 0), (1, 1))
        Qs = V.Q.substitute_monomial((1, 0), (1, 1))
        return VectorField(Ps, (Qs - Poly2.x2() * Ps).divide_by_var(1))
    raise InvalidArgument("chart must be 1 or 2")
