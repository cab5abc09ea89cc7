"""Small randomized invariant suites run by ``padiflow selftest``."""

from __future__ import annotations

import random
from typing import Callable, List, NamedTuple

from gmpy2 import mpq

from .charp import p_closed_test, reduce_mod_p
from .foliation import Poly2, VectorField, flagship_field, invariance_defect, separatrix_series
from .gauss import gauss_norm_log
from .ode import check_self_bounded, find_k1, solve_direct, solve_newton
from .regsing import exp_trunc, exp_trunc_naive
from .sampling import random_logr, random_polynomial, random_problem
from .series import TruncSeries, _mul_kronecker, _mul_schoolbook


class CheckResult(NamedTuple):
    name: str
    passed: bool
    count: int

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "count": self.count}


def check_newton_vs_direct(rng: random.Random, count: int) -> bool:
    for _ in range(count):
        p = rng.choice((3, 5, 7, 11, 13))
        prob = random_problem(rng, p, 32)
        res = solve_newton(prob)
        if res.y != solve_direct(prob):
            return False
        if not check_self_bounded(res.y, res.ledger.certified_r, p):
            return False
        if not res.ledger.decrement_within_bound():
            return False
    return True


def check_gauss_multiplicative(rng: random.Random, count: int) -> bool:
    for _ in range(count):
        p = rng.choice((3, 5, 7))
        logr = random_logr(rng, p)
        f = random_polynomial(rng, 16, 8, p)
        g = random_polynomial(rng, 16, 8, p)
        lhs = gauss_norm_log(f * g, logr, p)
        nf, ng = gauss_norm_log(f, logr, p), gauss_norm_log(g, logr, p)
        if f.is_zero() or g.is_zero():
            if not (f * g).is_zero():
                return False
        elif lhs != nf + ng:
            return False
    return True


def check_products(rng: random.Random, count: int) -> bool:
    for _ in range(count):
        n = rng.randint(1, 60)
        f = [mpq(rng.randint(-50, 50), rng.randint(1, 50)) for _ in range(n + 1)]
        g = [mpq(rng.randint(-50, 50), rng.randint(1, 50)) for _ in range(n + 1)]
        if _mul_kronecker(f, g, n) != _mul_schoolbook(f, g, n):
            return False
        B = TruncSeries([0] + f[1:], n)
        if exp_trunc(B) != exp_trunc_naive(B):
            return False
    return True


def check_flagship(rng: random.Random, count: int) -> bool:
    V = flagship_field()
    for n in range(2, 2 + count):
        phi = separatrix_series(V, 2, n)
        if phi != TruncSeries.from_terms({2: mpq(1, 3)}, n):
            return False
        if not invariance_defect(V, phi, 2, n).is_zero():
            return False
    closed = [p_closed_test(reduce_mod_p(V, p)) for p in (3, 5, 7, 11, 13)]
    return closed == [False, True, True, True, True]


def check_fermat(rng: random.Random, count: int) -> bool:
    for p in (3, 5, 7):
        for a in range(1, p):
            V = VectorField(Poly2({(1, 0): 1}), Poly2({(0, 1): a}))
            if not p_closed_test(reduce_mod_p(V, p)):
                return False
    return True


def check_k1(rng: random.Random, count: int) -> bool:
    return [find_k1(p) for p in (3, 5, 11)] == [6, 8, 11]


SUITES: List[tuple[str, Callable[[random.Random, int], bool], int]] = [
    ("newton-equals-direct", check_newton_vs_direct, 10),
    ("gauss-multiplicative", check_gauss_multiplicative, 200),
    ("fast-products", check_products, 30),
    ("flagship-separatrix", check_flagship, 8),
    ("fermat-closure", check_fermat, 1),
    ("k1-values", check_k1, 1),
]


def run_selftest(seed: int = 0, scale: int = 1) -> List[CheckResult]:
    out = []
    for name, fn, count in SUITES:
        n = count * scale
        out.append(CheckResult(name, fn(random.Random(f"{seed}:{name}"), n), n))
    return out
