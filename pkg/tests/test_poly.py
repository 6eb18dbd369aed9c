import math

import numpy as np
import pytest

from polyrep.poly import Polynomial, DimensionMismatch, PolynomialError, TermBudgetError
from polyrep.geometry import facet_form


def x(i, dim=2):
    return Polynomial.variable(dim, i)


def test_eval_constant():
    p = Polynomial.constant(2, 1.0)
    assert p.eval([3.0, -7.0]) == 1.0


def test_eval_direct():
    p = x(0) + x(1) * x(1)
    assert p.eval([2.0, 3.0]) == 11.0


def test_eval_facet_product_square(square):
    p = Polynomial.constant(2, 1.0)
    for j in range(square.n_facets):
        p = p.mul(facet_form(square, j))
    # all four facet forms equal 0.5/sqrt(2) at the center of the unit square
    expected = (0.5 / math.sqrt(2.0)) ** 4
    assert p.eval([0.5, 0.5]) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.015625, rel=1e-12)


def test_eval_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        (x(0) + x(1)).eval([1.0])


def test_add_cancellation():
    p = x(0) + (-1.0) * x(0)
    assert p.is_zero()
    assert p.degree() == -1


def test_mul():
    p = (x(0) + 1.0).mul(x(0) - 1.0)
    assert p == x(0) * x(0) - 1.0


def test_power_square_of_sum():
    p = (x(0) + x(1)).power(2)
    assert p == x(0) * x(0) + 2.0 * x(0) * x(1) + x(1) * x(1)


def test_power_zero_is_one():
    p = (x(0) + x(1)).power(0)
    assert p == Polynomial.constant(2, 1.0)


def test_degree_and_homogeneity():
    p = x(0) * x(0) * x(1) + x(1) * x(1) * x(1)
    assert p.degree() == 3
    assert p.is_homogeneous()
    q = x(0) * x(0) + 1.0
    assert not q.is_homogeneous()
    assert q.is_even_degree()
    z = Polynomial.zero(2)
    assert z.degree() == -1
    assert not z.is_even_degree()


def test_ring_axioms_random():
    rng = np.random.default_rng(0)
    for _ in range(25):
        polys = []
        for _ in range(3):
            terms = {tuple(rng.integers(0, 4, 2)): float(rng.normal())
                     for _ in range(5)}
            polys.append(Polynomial(2, terms))
        a, b, c = polys
        lhs = (a + b) + c
        rhs = a + (b + c)
        for exp in set(lhs.terms) | set(rhs.terms):
            assert lhs.terms.get(exp, 0.0) == pytest.approx(
                rhs.terms.get(exp, 0.0), rel=1e-12, abs=1e-14)
        lhs = a.mul(b + c)
        rhs = a.mul(b) + a.mul(c)
        for exp in set(lhs.terms) | set(rhs.terms):
            assert lhs.terms.get(exp, 0.0) == pytest.approx(
                rhs.terms.get(exp, 0.0), rel=1e-12, abs=1e-12)


def test_homogenize_example():
    # x0 + x1^2 continued to degree 2 through the plane x2 = 1
    p = Polynomial(3, {(1, 0, 0): 1.0, (0, 2, 0): 1.0})
    q = p.homogenize([0.0, 0.0, 1.0], 2)
    assert q == Polynomial(3, {(1, 0, 1): 1.0, (0, 2, 0): 1.0})
    pt = np.array([0.2, 0.3, 1.0])
    assert q.eval(pt) == pytest.approx(p.eval(pt), rel=1e-14)


def test_homogenize_constant():
    p = Polynomial.constant(3, 1.0)
    q = p.homogenize([0.0, 0.0, 1.0], 0)
    assert q == p


def test_homogenize_identity_property():
    rng = np.random.default_rng(1)
    u = np.array([0.3, -0.2, 1.1])
    for _ in range(20):
        terms = {tuple(rng.integers(0, 3, 3)): float(rng.normal())
                 for _ in range(6)}
        p = Polynomial(3, terms)
        n = p.degree() + rng.integers(0, 3)
        q = p.homogenize(u, int(n))
        assert q.is_homogeneous()
        assert q.degree() in (-1, int(n))
        # homogeneity identity q(t x) = t^n q(x)
        z = rng.normal(size=3)
        t = float(rng.uniform(0.3, 2.0))
        assert q.eval(t * z) == pytest.approx(t ** int(n) * q.eval(z),
                                              rel=1e-9, abs=1e-12)
        # agreement on the hyperplane
        z = rng.normal(size=3)
        z = z / (z @ u)
        assert q.eval(z) == pytest.approx(p.eval(z), rel=1e-9, abs=1e-10)


def test_homogenize_agreement_on_plane_many_points():
    rng = np.random.default_rng(7)
    u = np.array([0.0, 0.0, 1.0])
    terms = {tuple(rng.integers(0, 3, 3)): float(rng.normal()) for _ in range(8)}
    p = Polynomial(3, terms)
    q = p.homogenize(u, p.degree() + 1)
    for _ in range(100):
        z = rng.normal(size=3)
        z[2] = 1.0
        pv = p.eval(z)
        assert abs(q.eval(z) - pv) <= 1e-10 * (1.0 + abs(pv))


def test_homogenize_degree_too_low():
    p = x(0) * x(0)
    with pytest.raises(PolynomialError):
        p.homogenize([1.0, 0.0], 1)


def test_gradient_hessian_exact():
    p = Polynomial(2, {(2, 0): 1.0, (0, 2): 1.0})
    assert np.allclose(p.gradient_at([1.0, 2.0]), [2.0, 4.0])
    assert np.allclose(p.hessian_at([1.0, 2.0]), 2.0 * np.eye(2))
    q = Polynomial(2, {(4, 0): -1.0, (0, 4): -1.0})
    H = q.hessian_at([1.0, 1.0])
    assert np.allclose(H, np.diag([-12.0, -12.0]))
    assert np.linalg.eigvalsh(H).max() < 0


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    h = 1e-5
    for _ in range(5):
        terms = {tuple(rng.integers(0, 5, 3)): float(rng.normal())
                 for _ in range(10)}
        p = Polynomial(3, terms)
        for _ in range(10):
            z = rng.uniform(-1, 1, 3)
            g = p.gradient_at(z)
            for i in range(3):
                e = np.zeros(3)
                e[i] = h
                fd = (p.eval(z + e) - p.eval(z - e)) / (2 * h)
                assert fd == pytest.approx(g[i], rel=1e-6, abs=1e-6)


def test_hessian_matches_finite_differences():
    rng = np.random.default_rng(4)
    h = 1e-4
    terms = {tuple(rng.integers(0, 4, 2)): float(rng.normal()) for _ in range(8)}
    p = Polynomial(2, terms)
    for _ in range(50):
        z = rng.uniform(-1, 1, 2)
        H = p.hessian_at(z)
        assert np.allclose(H, H.T)
        for i in range(2):
            for j in range(2):
                e1 = np.zeros(2); e1[i] = h
                e2 = np.zeros(2); e2[j] = h
                fd = (p.eval(z + e1 + e2) - p.eval(z + e1 - e2)
                      - p.eval(z - e1 + e2) + p.eval(z - e1 - e2)) / (4 * h * h)
                assert fd == pytest.approx(H[i, j], rel=1e-5, abs=1e-4)


def test_eval_batch_matches_scalar():
    rng = np.random.default_rng(5)
    terms = {tuple(rng.integers(0, 6, 3)): float(rng.normal()) for _ in range(20)}
    p = Polynomial(3, terms)
    X = rng.uniform(-2, 2, size=(40, 3))
    batch = p.eval_batch(X)
    for i in range(40):
        assert batch[i] == pytest.approx(p.eval(X[i]), rel=1e-12, abs=1e-12)


def test_compose_affine():
    p = Polynomial(2, {(2, 0): 1.0, (0, 1): 3.0})
    M = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, -1.0]])
    c = np.array([0.5, 0.0])
    q = p.compose_affine(M, c)
    rng = np.random.default_rng(6)
    for _ in range(10):
        t = rng.normal(size=3)
        assert q.eval(t) == pytest.approx(p.eval(M @ t + c), rel=1e-12, abs=1e-12)


def test_term_budget():
    p = (x(0) + x(1) + 1.0)
    with pytest.raises(TermBudgetError):
        p.power(30, max_terms=50)


def test_serialization_roundtrip_sorted():
    p = Polynomial(2, {(0, 1): 2.5, (1, 0): -1.0, (2, 2): 0.125})
    payload = p.to_payload()
    exps = [tuple(t["exp"]) for t in payload["terms"]]
    assert exps == sorted(exps)
    q = Polynomial.from_payload(payload)
    assert q == p


def test_zero_terms_pruned():
    p = Polynomial(2, {(1, 0): 0.0, (0, 1): 1.0})
    assert len(p) == 1
