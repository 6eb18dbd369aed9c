import numpy as np
import pytest

from polyrep.poly import Polynomial
from polyrep.forms import (
    AffineForm, PowForm, LinComb, ProductForm, ShiftForm, ComposeAffineForm,
    PolyForm, form_from_payload,
)


def sample_tree():
    inner = LinComb(2, [(0.5, PowForm(AffineForm([1.0, -0.5], 0.25), 4)),
                        (0.5, PowForm(AffineForm([-0.3, 1.0], 0.5), 4))])
    return LinComb(2, [(-0.8, PowForm(inner, 4))], 1.0)


def expand(form):
    # brute-force expansion through Polynomial arithmetic, for cross-checks
    if isinstance(form, AffineForm):
        return Polynomial.affine(form.a, form.c)
    if isinstance(form, PowForm):
        return expand(form.base).power(form.n)
    if isinstance(form, LinComb):
        out = Polynomial.constant(form.dim, form.const)
        for w, f in form.parts:
            out = out + expand(f).scale(w)
        return out
    if isinstance(form, ProductForm):
        out = expand(form.factors[0])
        for f in form.factors[1:]:
            out = out.mul(expand(f))
        return out
    raise TypeError(type(form))


def test_composite_matches_expansion():
    form = sample_tree()
    poly = expand(form)
    rng = np.random.default_rng(0)
    X = rng.uniform(-2, 2, size=(50, 2))
    ref = poly.eval_batch(X)
    got = form.values(X)
    assert np.allclose(got, ref, rtol=1e-9, atol=1e-9)


def test_value_grad_hess_matches_polynomial():
    form = sample_tree()
    poly = expand(form)
    rng = np.random.default_rng(1)
    for _ in range(20):
        z = rng.uniform(-1.5, 1.5, 2)
        v, g, H = form.value_grad_hess(z)
        pv, pg, pH = poly.value_grad_hess(z)
        assert v == pytest.approx(pv, rel=1e-10, abs=1e-11)
        assert np.allclose(g, pg, rtol=1e-9, atol=1e-10)
        assert np.allclose(H, pH, rtol=1e-8, atol=1e-8)


def test_grad_hess_finite_differences():
    form = sample_tree()
    rng = np.random.default_rng(2)
    h = 1e-5
    for _ in range(10):
        z = rng.uniform(-1, 1, 2)
        v, g, H = form.value_grad_hess(z)
        for i in range(2):
            e = np.zeros(2); e[i] = h
            fd = (form.value(z + e) - form.value(z - e)) / (2 * h)
            assert fd == pytest.approx(g[i], rel=1e-5, abs=1e-6)


def test_homogeneous_degree_bookkeeping():
    lin = AffineForm([1.0, 2.0, -1.0], 0.0)
    assert lin.homogeneous_degree() == 1
    assert AffineForm([1.0, 0.0, 0.0], 0.5).homogeneous_degree() is None
    pw = PowForm(lin, 6)
    assert pw.homogeneous_degree() == 6
    assert pw.is_even_degree()
    mix = LinComb(3, [(1.0, pw), (2.0, PowForm(AffineForm([0, 1.0, 0], 0.0), 6))])
    assert mix.homogeneous_degree() == 6
    bad = LinComb(3, [(1.0, pw)], 1.0)
    assert bad.homogeneous_degree() is None
    prod = ProductForm([pw, pw])
    assert prod.homogeneous_degree() == 12
    shifted = ShiftForm(pw, [1.0, 0.0, 0.0])
    assert shifted.homogeneous_degree() is None
    assert ShiftForm(pw, [0.0, 0.0, 0.0]).homogeneous_degree() == 6


def test_shift_and_compose():
    form = sample_tree()
    shift = np.array([0.3, -0.7])
    sh = ShiftForm(form, shift)
    rng = np.random.default_rng(3)
    X = rng.uniform(-1, 1, size=(10, 2))
    assert np.allclose(sh.values(X), form.values(X - shift))
    M = np.array([[1.0, 0.0, 2.0], [0.0, -1.0, 1.0]])
    c = np.array([0.1, 0.2])
    co = ComposeAffineForm(form, M, c)
    Z = rng.uniform(-1, 1, size=(10, 3))
    assert np.allclose(co.values(Z), form.values(Z @ M.T + c))
    v, g, H = co.value_grad_hess(Z[0])
    h = 1e-5
    for i in range(3):
        e = np.zeros(3); e[i] = h
        fd = (co.value(Z[0] + e) - co.value(Z[0] - e)) / (2 * h)
        assert fd == pytest.approx(g[i], rel=1e-5, abs=1e-7)


def test_payload_roundtrip():
    form = ShiftForm(sample_tree(), [0.1, 0.2])
    clone = form_from_payload(form.to_payload())
    rng = np.random.default_rng(4)
    X = rng.uniform(-1, 1, size=(20, 2))
    assert np.array_equal(clone.values(X), form.values(X))
    p = PolyForm(Polynomial(2, {(2, 1): 1.5, (0, 0): -2.0}))
    clone = form_from_payload(p.to_payload())
    assert clone.poly == p.poly


def test_envelope_bounds_value():
    form = sample_tree()
    rng = np.random.default_rng(5)
    X = rng.uniform(-3, 3, size=(50, 2))
    vals, envs = form.value_env(X)
    assert np.all(envs >= np.abs(vals) * (1 - 1e-12))
    # envelope reflects the first-order cancellation scale: for an affine
    # atom it is |a|.|x| + |c|, far above the value near the zero line
    a = AffineForm([1.0, -1.0], 0.0)
    v, e = a.value_env(np.array([[1.0, 1.0 - 1e-12]]))
    assert abs(v[0]) < 1e-11
    assert e[0] > 1.9


def test_longdouble_evaluation_extends_range():
    # degree-16 power at a far point overflows float64 but not longdouble
    f = PowForm(PowForm(AffineForm([1.0, 0.0], 0.0), 16), 16)
    X = np.array([[40.0, 0.0]])
    assert not np.isfinite(f.values(X))[0]
    vl = f.values(X, dtype=np.longdouble)
    assert np.isfinite(vl)[0]
