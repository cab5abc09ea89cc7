import random

import pytest
from gmpy2 import mpq

from padiflow.errors import InvalidArgument, PreconditionViolated
from padiflow.foliation import (
    Poly2,
    SingularityKind,
    VectorField,
    blowup_chart,
    classify_singularity,
    defect_order,
    diagonalize,
    eigenvalues,
    flagship_field,
    invariance_defect,
    separatrix_series,
)
from padiflow.series import TruncSeries
from padiflow.size import proper_transform


def field(P, Q):
    return VectorField(Poly2(P), Poly2(Q))


def ts(terms, n):
    return TruncSeries.from_terms(terms, n)


def random_normal_field(rng, lam, degree=3, no_x2_sq=False):
    def f():
        out = {(1, 0): 0}
        for d in range(2, degree + 1):
            for i in range(d + 1):
                if rng.random() < 0.5:
                    out[(i, d - i)] = mpq(rng.randint(-5, 5), rng.randint(1, 5))
        return out

    f1, f2 = f(), f()
    if no_x2_sq:
        f1.pop((0, 2), None)
    f1[(1, 0)] = 1
    f2[(0, 1)] = lam
    return field(f1, f2)


# -- polynomials ------------------------------------------------------------------


def test_poly_arithmetic():
    x, y = Poly2.x1(), Poly2.x2()
    p = (x + y) * (x - y)
    assert p == Poly2({(2, 0): 1, (0, 2): -1})
    assert p.diff(1) == Poly2({(1, 0): 2}) and p.diff(2) == Poly2({(0, 1): -2})
    assert p.degree() == 2 and Poly2().degree() == -1
    assert Poly2.from_json(p.to_json()) == p
    with pytest.raises(InvalidArgument):
        (x + Poly2.const(1)).divide_by_var(1)


def test_poly_eval_series():
    n = 6
    p = Poly2({(2, 0): 1, (1, 1): 3})
    u, v = ts({1: 1}, n), ts({2: 2}, n)
    assert p.eval_series(u, v) == ts({2: 1, 3: 6}, n)


# -- classification ---------------------------------------------------------------


def test_classification_examples():
    c = classify_singularity(field({(1, 0): 1}, {(0, 1): -1}))
    assert c.kind is SingularityKind.NONDEGENERATE_REDUCED and c.alpha == -1 and (c.s, c.t) == (1, 1)
    assert classify_singularity(field({(1, 0): 1}, {(0, 1): 2})).kind is SingularityKind.NON_REDUCED
    assert classify_singularity(field({(1, 0): 1}, {})).kind is SingularityKind.DEGENERATE_REDUCED
    c = classify_singularity(field({(1, 0): 3}, {(0, 1): -2}))
    assert c.alpha == mpq(-2, 3) and (c.s, c.t) == (2, 3)


def test_classification_irrational_and_errors():
    # linear part [[0, 1], [2, 0]] has eigenvalues +-sqrt(2)
    assert classify_singularity(field({(0, 1): 1}, {(1, 0): 2})).kind is SingularityKind.IRRATIONAL_RATIO
    # rotation: complex eigenvalues
    assert classify_singularity(field({(0, 1): -1}, {(1, 0): 1})).kind is SingularityKind.IRRATIONAL_RATIO
    with pytest.raises(InvalidArgument):
        classify_singularity(field({(0, 0): 1}, {(0, 1): 1}))
    with pytest.raises(InvalidArgument):
        field({}, {})


def test_eigenvalues_non_triangular():
    # [[1, 2], [2, 1]] has eigenvalues 3 and -1
    V = field({(1, 0): 1, (0, 1): 2}, {(1, 0): 2, (0, 1): 1})
    assert eigenvalues(V) == (3, -1)
    c = classify_singularity(V)
    assert c.kind is SingularityKind.NONDEGENERATE_REDUCED and c.alpha == mpq(-1, 3)


def test_diagonalize():
    V = field({(1, 0): 1, (0, 1): 2, (2, 0): 1}, {(1, 0): 2, (0, 1): 1, (1, 1): -1})
    W, M = diagonalize(V)
    a, b, c, d = W.linear_part()
    assert b == 0 and c == 0 and {a, d} == {3, -1}
    # conjugation check on a test function: D(g o M^-1) computed two ways
    m11, m12, m21, m22 = M
    x1 = Poly2({(1, 0): m11, (0, 1): m12})
    x2 = Poly2({(1, 0): m21, (0, 1): m22})
    lhs_P = W.P * x1.diff(1) + W.Q * x1.diff(2)
    assert lhs_P == V.P.substitute_linear(*M)
    lhs_Q = W.P * x2.diff(1) + W.Q * x2.diff(2)
    assert lhs_Q == V.Q.substitute_linear(*M)
    with pytest.raises(PreconditionViolated):
        diagonalize(field({(1, 0): 1, (0, 1): 1}, {(0, 1): 1}))


# -- separatrices -------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 8, 40])
def test_flagship_separatrix(n):
    V = flagship_field()
    phi = separatrix_series(V, 2, n)
    assert phi == ts({2: mpq(1, 3)}, n)
    assert invariance_defect(V, phi, 2, n).is_zero()


def test_separatrix_examples():
    n = 10
    lin = field({(1, 0): 1}, {(0, 1): -1})
    assert separatrix_series(lin, 1, n).is_zero() and separatrix_series(lin, 2, n).is_zero()
    assert invariance_defect(lin, TruncSeries.zero(n), 2, n).is_zero()
    V = field({(1, 0): 1, (0, 2): 1}, {(0, 1): -1})
    assert separatrix_series(V, 1, n) == ts({2: mpq(-1, 3)}, n)


def test_defect_of_perturbation():
    n = 10
    V = flagship_field()
    phi = ts({2: mpq(1, 3)}, n) + ts({3: 1}, n)
    assert defect_order(invariance_defect(V, phi, 2, n)) == 3
    assert defect_order(invariance_defect(V, ts({2: mpq(1, 3)}, n), 2, n)) is None


def test_separatrix_random_fields_residual_and_uniqueness():
    rng = random.Random(9)
    for _ in range(15):
        lam = -mpq(rng.randint(1, 5), rng.randint(1, 5))
        V = random_normal_field(rng, lam)
        n = 12
        for which in (1, 2):
            phi = separatrix_series(V, which, n)
            assert invariance_defect(V, phi, which, n).is_zero()
            m = rng.randint(2, n)
            bumped = phi + ts({m: 1}, n)
            assert defect_order(invariance_defect(V, bumped, which, n)) == m


def test_separatrix_scale_invariant():
    V = flagship_field()
    assert separatrix_series(V.scale(mpq(-7, 2)), 2, 9) == separatrix_series(V, 2, 9)


def test_separatrix_preconditions():
    with pytest.raises(PreconditionViolated):
        separatrix_series(field({(1, 0): 1}, {(0, 1): 2}), 2, 5)
    with pytest.raises(PreconditionViolated):
        separatrix_series(field({(1, 0): 1, (0, 1): 1}, {(0, 1): -1}), 2, 5)
    with pytest.raises(InvalidArgument):
        separatrix_series(flagship_field(), 3, 5)


# -- blow-up -------------------------------------------------------------------------


def test_blowup_examples():
    lam = mpq(-2, 5)
    V = field({(1, 0): 1}, {(0, 1): lam})
    assert blowup_chart(V, 1) == field({(1, 0): 1 - lam}, {(0, 1): lam})
    assert blowup_chart(flagship_field(), 1) == field({(1, 0): 2, (3, 1): -1}, {(0, 1): -1, (2, 2): 1})
    B = blowup_chart(field({(1, 0): 1}, {(0, 1): 1}), 1)
    assert B.P.is_zero() and B.Q == Poly2({(0, 1): 1})
    with pytest.raises(InvalidArgument):
        blowup_chart(V, 3)


def test_blowup_chart2_symmetric():
    # exchanging x1 and x2 conjugates chart 2 into chart 1
    flip = lambda p: Poly2({(j, i): c for (i, j), c in p.terms.items()})
    V = field({(1, 0): 1, (0, 2): 3}, {(0, 1): -2, (2, 0): 1})
    swapped = VectorField(flip(V.Q), flip(V.P))
    c1 = blowup_chart(swapped, 1)
    c2 = blowup_chart(V, 2)
    assert c2.P == flip(c1.Q) and c2.Q == flip(c1.P)


def test_blowup_class_stays_reduced():
    rng = random.Random(4)
    for _ in range(10):
        s, t = rng.randint(1, 6), rng.randint(1, 6)
        lam = -mpq(s, t)
        V = random_normal_field(rng, lam)
        c = classify_singularity(blowup_chart(V, 1))
        assert c.kind is SingularityKind.NONDEGENERATE_REDUCED
        assert c.eigenvalues == (1 - lam, lam) and c.alpha == lam / (1 - lam)


def test_blowdown_consistency():
    # without an x2^2 term in f1 the chart-1 linear part stays diagonal and the
    # chart-1 separatrix y1 = psi(y2) pushes down to x1 = y2 psi(y2)
    rng = random.Random(21)
    for _ in range(10):
        lam = -mpq(rng.randint(1, 4), rng.randint(1, 4))
        V = random_normal_field(rng, lam, no_x2_sq=True)
        n = 12
        phi1 = separatrix_series(V, 1, n)
        psi = separatrix_series(blowup_chart(V, 1), 1, n - 1)
        assert psi == proper_transform(phi1)
