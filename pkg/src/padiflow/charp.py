"""Reduction of a vector field modulo p and the p-closure test.

A derivation ``D`` of ``F_p[x1, x2]`` is p-closed when ``D^p`` is proportional
to ``D``.  Derivations are determined by their values on the coordinates, so
the test compares ``(D^p(x1), D^p(x2))`` with ``(P, Q)`` through the 2x2
determinant ``D^p(x1) Q - D^p(x2) P``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

from .errors import BadReduction, InsufficientBudget
from .exactnum import require_odd_prime
from .foliation import Monomial, VectorField

ModPoly = Dict[Monomial, int]


def _degree(f: ModPoly) -> int:
    return max((i + j for i, j in f), default=-1)


def _add_into(acc: ModPoly, f: ModPoly, p: int, scale: int = 1) -> None:
    for k, c in f.items():
        v = (acc.get(k, 0) + scale * c) % p
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


def _mul(f: ModPoly, g: ModPoly, p: int, budget: int) -> ModPoly:
    out: ModPoly = {}
    for (i, j), a in f.items():
        for (k, l), b in g.items():
            if i + j + k + l > budget:
                continue
            key = (i + k, j + l)
            v = (out.get(key, 0) + a * b) % p
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def _diff(f: ModPoly, var: int, p: int) -> ModPoly:
    out: ModPoly = {}
    for (i, j), c in f.items():
        e = i if var == 1 else j
        v = (c * e) % p
        if v:
            out[(i - 1, j) if var == 1 else (i, j - 1)] = v
    return out


@dataclass(frozen=True)
class ModPField:
    P: Tuple[Tuple[Monomial, int], ...]
    Q: Tuple[Tuple[Monomial, int], ...]
    p: int
    degree_budget: int

    @property
    def max_degree(self) -> int:
        return max(_degree(dict(self.P)), _degree(dict(self.Q)))

    @property
    def required_budget(self) -> int:
        return self.p * (max(self.max_degree, 1) - 1) + 1

    def apply(self, g: ModPoly) -> ModPoly:
        P, Q = dict(self.P), dict(self.Q)
        out = _mul(P, _diff(g, 1, self.p), self.p, self.degree_budget)
        _add_into(out, _mul(Q, _diff(g, 2, self.p), self.p, self.degree_budget), self.p)
        return out

    def to_json(self) -> dict:
        return {
            "P": [[list(k), c] for k, c in self.P],
            "Q": [[list(k), c] for k, c in self.Q],
            "p": self.p,
            "degreeBudget": self.degree_budget,
        }


def _freeze(f: ModPoly):
    return tuple(sorted(f.items()))


def reduce_mod_p(V: VectorField, p: int, degree_budget: int | None = None) -> ModPField:
    """Coefficient-wise reduction; a denominator divisible by ``p`` is bad reduction."""
    p = require_odd_prime(p)

    def red(poly):
        out: ModPoly = {}
        for k, c in poly.terms.items():
            num, den = int(c.numerator), int(c.denominator)
            if den % p == 0:
                raise BadReduction(p, f"denominator {den} of the coefficient of x1^{k[0]} x2^{k[1]}")
            v = num * pow(den, -1, p) % p
            if v:
                out[k] = v
        return out

    P, Q = red(V.P), red(V.Q)
    d = max(_degree(P), _degree(Q), 1)
    required = p * (d - 1) + 1
    budget = required if degree_budget is None else int(degree_budget)
    return ModPField(_freeze(P), _freeze(Q), p, budget)


def pth_power_on_coords(F: ModPField) -> Tuple[ModPoly, ModPoly, int]:
    """``(D^p(x1), D^p(x2), horizon)``.

    Each application of ``D`` raises the degree by at most ``maxDegree - 1``,
    so ``D^p(x_i)`` has degree at most ``p (maxDegree - 1) + 1``.  Terms above
    the budget are dropped during the iteration; the results are exact below
    the returned horizon, which is the budget itself once it is sufficient.
    """
    required = F.required_budget
    if F.degree_budget < required:
        raise InsufficientBudget(required, F.degree_budget)
    out = []
    for mono in ((1, 0), (0, 1)):
        g: ModPoly = {mono: 1}
        for _ in range(F.p):
            g = F.apply(g)
            if not g:
                break
        out.append(g)
    return out[0], out[1], F.degree_budget


def closure_determinant(F: ModPField) -> ModPoly:
    """``D^p(x1) D(x2) - D^p(x2) D(x1)`` modulo ``p``."""
    d1, d2, _ = pth_power_on_coords(F)
    P, Q = dict(F.P), dict(F.Q)
    cap = 2 * F.degree_budget
    det = _mul(d1, Q, F.p, cap)
    _add_into(det, _mul(d2, P, F.p, cap), F.p, -1)
    return det


def p_closed_test(F: ModPField) -> bool:
    return not closure_determinant(F)


def scan_primes(V: VectorField, primes: List[int]) -> List[Tuple[int, str]]:
    """Per prime one of ``closed``, ``not-closed``, ``bad-reduction``, sorted by prime."""
    out = []
    for q in sorted(set(primes)):
        try:
            F = reduce_mod_p(V, q)
        except BadReduction:
            out.append((q, "bad-reduction"))
            continue
        out.append((q, "closed" if p_closed_test(F) else "not-closed"))
    return out


def mod_poly_to_json(f: ModPoly) -> list:
    return [[list(k), c] for k, c in sorted(f.items())]

