import numpy as np
import pytest

from polyrep.forms import PolyForm
from polyrep.geometry import vertex_figure, facet_form
from polyrep.builder import (
    build_interpolant, build_interpolant_auto, build_homogeneous_interpolant,
    build_vertex_cone_poly, build_cone_blend, opposite_facet_product,
    facet_product, build_polygon, build_polytope3, build_unbounded,
    normalize_forms, cantor_triples, BuildSettings, BuildError,
    SearchBudgetError,
)
from polyrep import certify as cert
from polyrep.builder import solve_interpolation_weights, _clamped_facet_values
from conftest import vertex_index


# -- interpolant ---------------------------------------------------------------


def test_interpolation_residual_octahedron(octahedron):
    form, params = build_interpolant(octahedron, 1, 2)
    assert params.residual <= 1e-8
    for v in octahedron.vertices:
        assert abs(form.value(v)) <= 1e-8


def test_interpolation_matrix_unit_diagonal(octahedron, cube, square):
    for P in (octahedron, cube, square):
        Q = _clamped_facet_values(P)
        e = 6
        for w in range(P.n_vertices):
            fv = sorted(P.vertex_facets[w])
            diag = ((1.0 / len(fv)) * ((1.0 - Q[w, fv]) ** e).sum()) ** e
            assert diag == 1.0


def test_square_weights_symmetric(square):
    y, cond = solve_interpolation_weights(square, 4)
    assert np.ptp(y) <= 1e-10
    assert cond < 10


def test_interpolant_expansion_matches_composite(square):
    expanded, params = build_interpolant(square, 1, 1, expand=True)
    composite, _ = build_interpolant(square, 1, 1, expand=False)
    assert params.expanded
    assert isinstance(expanded, PolyForm)
    rng = np.random.default_rng(0)
    X = rng.uniform(-0.5, 1.5, size=(100, 2))
    assert np.allclose(expanded.values(X), composite.values(X),
                       rtol=1e-9, atol=1e-10)


def test_conditions_report(octahedron):
    form, params, report = build_interpolant_auto(octahedron, 1, seed=0,
                                                  n_hess=300, n_dirs=120)
    assert report.concave
    assert report.vertex_residual <= 1e-8
    assert np.isfinite(report.hausdorff)
    assert report.hausdorff > 0


def test_hausdorff_decreases_with_sharpness(octahedron):
    _, _, r1 = build_interpolant_auto(octahedron, 1, seed=0, n_hess=100,
                                      n_dirs=120, expand=False)
    _, _, r2 = build_interpolant_auto(octahedron, 6, seed=0, n_hess=100,
                                      n_dirs=120, expand=False)
    assert r2.hausdorff < r1.hausdorff * 0.99


# -- homogeneous continuation ---------------------------------------------------


def test_homogeneous_interpolant_structure(octahedron):
    vi = vertex_index(octahedron, [0, 0, 1])
    hp = vertex_figure(octahedron, vi)
    tilde, params = build_homogeneous_interpolant(hp, 1, 1)
    e = params.exponent
    assert tilde.homogeneous_degree() == e * e
    assert tilde.is_even_degree()
    # agreement with the section interpolant on the plane
    chart_g, _ = build_interpolant(hp.poly, 1, 1, expand=False)
    rng = np.random.default_rng(1)
    lam = rng.dirichlet(np.ones(hp.poly.n_vertices), size=100)
    T = lam @ hp.poly.vertices
    amb = hp.to_ambient(T)
    assert np.allclose(tilde.values(amb), chart_g.values(T),
                       rtol=1e-9, atol=1e-9)


def test_homogeneous_interpolant_slice_negative(octahedron):
    # on the hyperplane through the origin the continuation is negative
    vi = vertex_index(octahedron, [0, 0, 1])
    hp = vertex_figure(octahedron, vi)
    tilde, _ = build_homogeneous_interpolant(hp, 1, 1)
    rng = np.random.default_rng(2)
    T = rng.normal(size=(100, 2))
    T /= np.linalg.norm(T, axis=1)[:, None]
    Z = T @ hp.basis.T
    assert float(tilde.values(Z).max()) < 0.0


# -- vertex cone polynomials -----------------------------------------------------


@pytest.fixture(scope="module")
def oct_bundles(octahedron):
    return [build_vertex_cone_poly(octahedron, vi, 1, seed=0)
            for vi in range(octahedron.n_vertices)]


def test_cone_poly_even_and_homogeneous(octahedron, oct_bundles):
    for bun in oct_bundles:
        hd = bun.homogeneous.homogeneous_degree()
        assert hd is not None and hd % 2 == 0
        assert bun.poly.is_even_degree()


def test_cone_poly_central_symmetry(octahedron, oct_bundles):
    rng = np.random.default_rng(3)
    X = rng.normal(size=(60, 3))
    for bun in oct_bundles:
        a = bun.poly.values(X)
        b = bun.poly.values(2 * bun.vertex - X)
        assert np.all(np.abs(a - b) <= 1e-9 * np.maximum(np.abs(a), 1e-30))


def test_cone_poly_nonnegative_on_polytope(octahedron, oct_bundles):
    rng = np.random.default_rng(4)
    X = rng.uniform(-1, 1, size=(5000, 3))
    X = X[np.abs(X).sum(axis=1) <= 1.0]
    for bun in oct_bundles:
        assert float(bun.poly.values(X).min()) >= -1e-12


def test_cone_poly_sandwich(octahedron, oct_bundles):
    # nonnegative on rays of the doubled supporting cone, negative outside
    # the doubled outer cone at the certifier-found width
    rng = np.random.default_rng(5)
    P = octahedron
    for bun in oct_bundles[:2]:
        hp = vertex_figure(P, bun.vertex_index)
        lam = rng.dirichlet(np.ones(hp.poly.n_vertices), size=300)
        Y = hp.to_ambient(lam @ hp.poly.vertices)
        scal = rng.uniform(0.05, 2.0, size=300)[:, None]
        v = bun.vertex
        plus = bun.poly.values(v + scal * Y)
        minus = bun.poly.values(v - scal * Y)
        assert float(plus.min()) >= -1e-12
        assert float(minus.min()) >= -1e-12
        rho = cert.find_cone_rho(P, bun.vertex_index, bun.poly, seed=6)
        assert rho is not None


# -- products and the blend -------------------------------------------------------


def test_opposite_facet_product_octahedron(octahedron):
    P = octahedron
    vi = vertex_index(P, [0, 0, 1])
    f = opposite_facet_product(P, vi)
    assert f.degree() == 4
    for w in range(P.n_vertices):
        val = f.eval(P.vertices[w])
        if w == vi:
            assert val > 0
    # the antipodal vertex lies on all four facets missing the vertex
    assert f.eval([0, 0, -1.0]) == pytest.approx(0.0, abs=1e-14)


def test_opposite_facet_product_positive_at_own_vertex(octahedron, cube):
    for P in (octahedron, cube):
        for vi in range(P.n_vertices):
            f = opposite_facet_product(P, vi)
            assert f.eval(P.vertices[vi]) > 0


def test_facet_product_center_value(cube):
    p2 = facet_product(cube)
    expected = (1.0 / (2 * np.sqrt(3))) ** 6
    assert p2.eval([0.0, 0.0, 0.0]) == pytest.approx(expected, rel=1e-12)
    assert p2.eval([0.0, 0.0, 0.0]) > 0


def test_blend_nonnegative_inside_zero_on_edges(octahedron, oct_bundles):
    P = octahedron
    p1 = build_cone_blend(P, oct_bundles, 2)
    rng = np.random.default_rng(7)
    X = rng.uniform(-1, 1, size=(4000, 3))
    X = X[np.abs(X).sum(axis=1) <= 1.0]
    assert float(p1.values(X).min()) >= -1e-12
    s = cert.anchor_scale(P, p1)
    for v in P.vertices:
        assert abs(p1.value(v)) / s <= 1e-8
    mids = P.edge_midpoints()
    assert float(np.abs(p1.values(mids)).max()) / s <= 1e-8


# -- polygon representation --------------------------------------------------------


def test_build_polygon_square(square):
    rep, report = build_polygon(square, BuildSettings(
        seed=0, budgets={"interior": 20000, "shell": 20000,
                         "far": 300, "facet": 200}))
    assert report.verdict == "pass"
    assert rep.mode == "polygon"
    assert len(rep.polys) == 2


def test_build_polygon_triangle(triangle):
    rep, report = build_polygon(triangle, BuildSettings(
        seed=0, budgets={"interior": 20000, "shell": 20000,
                         "far": 300, "facet": 200}))
    assert report.verdict == "pass"


def test_polygon_negative_on_edge_lines(square):
    # the concave bound is negative on every edge line beyond the edge
    rep, report = build_polygon(square, BuildSettings(
        seed=0, budgets={"interior": 5000, "shell": 5000,
                         "far": 200, "facet": 100}))
    p0 = rep.polys[0]
    rng = np.random.default_rng(8)
    P = square
    for fv in P.facet_vertices:
        a, b = P.vertices[fv[0]], P.vertices[fv[-1]]
        d = b - a
        for _ in range(100):
            t = rng.uniform(1.05, 4.0) * (1 if rng.uniform() < 0.5 else -1)
            x = a + t * d if t > 0 else b + t * d
            assert p0.value(x) < 0.0


def test_build_polytope3_small_budget_exhausts(octahedron):
    with pytest.raises(SearchBudgetError):
        build_polytope3(octahedron, BuildSettings(
            seed=0, max_triples=1,
            budgets={"interior": 2000, "shell": 2000, "far": 100, "facet": 50},
            screen_samples=2000))


def test_cantor_triples_order():
    seq = list(cantor_triples(10))
    assert seq[0] == (1, 1, 1)
    assert seq[1:4] == [(1, 1, 2), (1, 2, 1), (2, 1, 1)]
    sums = [sum(t) for t in seq]
    assert sums == sorted(sums)
    assert len(set(seq)) == len(seq)


def test_normalize_forms_unit_anchor_scale(square):
    p1 = PolyForm(facet_product(square))
    normed, scales = normalize_forms(square, [p1])
    s = cert.anchor_scale(square, normed[0])
    assert s == pytest.approx(1.0, rel=1e-12)


# -- unbounded ----------------------------------------------------------------------


def test_build_unbounded_rejects_bounded(cube):
    hs = [(h.a, h.b) for h in cube.halfspaces]
    with pytest.raises(BuildError):
        build_unbounded(3, hs)


def test_build_unbounded_quadrant_membership():
    rep, report = build_unbounded(
        2, [([-1, 0], 0), ([0, -1], 0)],
        BuildSettings(seed=1, budgets={"interior": 20000, "shell": 20000,
                                       "far": 200, "facet": 100}))
    assert report.verdict == "pass"
    for f in rep.lifted_polys:
        hd = f.homogeneous_degree()
        assert hd is not None and hd % 2 == 0
    X = np.array([[3.0, 4.0], [0.5, 0.001], [-0.05, 2.0], [2.0, -0.05]])
    mins = rep.membership_values(X).min(axis=0)
    assert mins[0] > 0 and mins[1] > 0
    assert mins[2] < 0 and mins[3] < 0
