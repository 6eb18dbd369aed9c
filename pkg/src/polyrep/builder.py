"""Construction of the polynomial representations.

The concave vertex interpolant drives everything: a polytope P gets

    g = 1 - sum_v y_v * ((1/n_v) * sum_{F at v} (1 - q_F)^e)^e,   e = 2(l+l0),

with the weights y solved so g vanishes on every vertex.  Facets of a
hyperplane-embedded polytope give the analogous homogeneous continuation of
degree e^2, which after translation yields the vertex cone polynomials of
the 3-polytope case.  Polygons take (g, product of edge forms); 3-polytopes
take (g_m, blend of vertex cone polynomials, facet product) with the
parameters found by certified search; unbounded inputs reduce to a bounded
cross-section of the homogenization cone and come back as homogeneous
even-degree polynomials.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .poly import Polynomial, TermBudgetError, DEFAULT_TERM_BUDGET
from .forms import (
    Form, PolyForm, AffineForm, PowForm, LinComb, ProductForm, ShiftForm,
    ComposeAffineForm, as_form,
)
from .geometry import (
    Polytope, HyperplanePolytope, GeometryError, DegenerateInputError,
    UnboundedInputError, from_halfspaces, facet_form, facet_form_values,
    vertex_figure, decompose, homogenization_cone, cross_section,
)
from . import certify as cert


class BuildError(RuntimeError):
    pass


class IllConditionedSystemError(BuildError):
    """Interpolation system too ill-conditioned; raise l0 and retry."""


class SearchBudgetError(BuildError):
    """Search budget exhausted; carries the best attempt found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


COND_LIMIT = 1e12


# ---------------------------------------------------------------------------
# vertex interpolant


@dataclass
class InterpolantParams:
    l: int
    l0: int
    exponent: int                  # 2 * (l + l0)
    weights: np.ndarray            # one per vertex
    cond: float
    residual: float
    expanded: bool

    def to_payload(self):
        return {"l": self.l, "l0": self.l0, "exponent": self.exponent,
                "weights": [float(w) for w in self.weights],
                "cond": self.cond, "residual": self.residual,
                "expanded": self.expanded}


def _clamped_facet_values(P: Polytope) -> np.ndarray:
    """Facet form values at the vertices, exactly zero on incident pairs."""
    Q = facet_form_values(P, P.vertices)
    for w in range(P.n_vertices):
        for j in P.vertex_facets[w]:
            Q[w, j] = 0.0
    return Q


def solve_interpolation_weights(P: Polytope, exponent: int) -> tuple[np.ndarray, float]:
    """Weights y with g(w) = 0 at every vertex w.

    The system matrix has a unit diagonal because incident facet forms
    vanish exactly at their vertices.
    """
    Q = _clamped_facet_values(P)
    nv = P.n_vertices
    M = np.zeros((nv, nv))
    for v in range(nv):
        fv = sorted(P.vertex_facets[v])
        M[:, v] = ((1.0 / len(fv)) * ((1.0 - Q[:, fv]) ** exponent).sum(axis=1)) ** exponent
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditionedSystemError(
            f"interpolation system condition {cond:.3g} exceeds {COND_LIMIT:.0e}")
    y = np.linalg.solve(M, np.ones(nv))
    return y, cond


def _one_minus_facet_form(P: Polytope, j: int) -> AffineForm:
    # 1 - q_F as an affine atom
    return AffineForm(P.A[j] / P.diameter, 1.0 - P.facet_support[j] / P.diameter)


def _interpolant_composite(P: Polytope, weights, exponent: int) -> LinComb:
    parts = []
    for v in range(P.n_vertices):
        fv = sorted(P.vertex_facets[v])
        inner = LinComb(P.dim, [(1.0 / len(fv),
                                 PowForm(_one_minus_facet_form(P, j), exponent))
                                for j in fv])
        parts.append((-float(weights[v]), PowForm(inner, exponent)))
    return LinComb(P.dim, parts, 1.0)


def _try_expand(form: Form, build, P: Polytope, budget: int) -> Polynomial | None:
    """Expand through ``build()`` and keep the result only when it matches
    the composite form on probe points to near machine precision."""
    try:
        poly = build()
    except TermBudgetError:
        return None
    probes = P.anchor_points()
    ref = form.values(probes)
    got = poly.eval_batch(probes)
    err = np.abs(got - ref)
    if np.any(err > 1e-10 * (1.0 + np.abs(ref))):
        return None
    return poly


def _expand_interpolant(P: Polytope, weights, exponent: int,
                        budget: int) -> Polynomial:
    out = Polynomial.constant(P.dim, 1.0)
    for v in range(P.n_vertices):
        fv = sorted(P.vertex_facets[v])
        inner = Polynomial.zero(P.dim)
        for j in fv:
            one_minus = Polynomial.constant(P.dim, 1.0) - facet_form(P, j)
            inner = inner + one_minus.power(exponent, max_terms=budget).scale(1.0 / len(fv))
        out = out - inner.power(exponent, max_terms=budget).scale(float(weights[v]))
    return out


def build_interpolant(P: Polytope, l: int, l0: int, *,
                      term_budget: int = DEFAULT_TERM_BUDGET,
                      expand: bool = True,
                      expand_limit: int = 250) -> tuple[Form, InterpolantParams]:
    """The concave interpolant at sharpness (l, l0), vanishing on vert(P).

    Returns an expanded polynomial when it fits the term budget and
    reproduces the composite recipe to near machine precision; otherwise
    the composite evaluation form is carried.
    """
    if l < 1 or l0 < 1:
        raise BuildError("l and l0 must be positive integers")
    e = 2 * (l + l0)
    weights, cond = solve_interpolation_weights(P, e)
    form: Form = _interpolant_composite(P, weights, e)
    expanded = False
    if expand and cert_dense_count(e * e, P.dim) <= min(term_budget, expand_limit):
        poly = _try_expand(form, lambda: _expand_interpolant(P, weights, e, term_budget),
                           P, term_budget)
        if poly is not None:
            form = PolyForm(poly)
            expanded = True
    residual = float(max(abs(form.value(v)) for v in P.vertices))
    params = InterpolantParams(l, l0, e, weights, cond, residual, expanded)
    return form, params


def cert_dense_count(degree: int, dim: int) -> int:
    from .poly import dense_term_count
    return dense_term_count(degree, dim)


def build_interpolant_auto(P: Polytope, l: int, *, l0_start: int = 1,
                           l0_cap: int = 64, seed: int = 0,
                           n_hess: int = 1000, n_dirs: int = 400,
                           term_budget: int = DEFAULT_TERM_BUDGET,
                           expand: bool = True, expand_limit: int = 250):
    """Escalate l0 (doubling) until the interpolation residual and the
    strict-concavity sweep pass.  Returns (form, params, condition report)."""
    l0 = l0_start
    last_exc = None
    while l0 <= l0_cap:
        try:
            form, params = build_interpolant(P, l, l0, term_budget=term_budget,
                                             expand=expand,
                                             expand_limit=expand_limit)
        except IllConditionedSystemError as exc:
            last_exc = exc
            l0 *= 2
            continue
        report = cert.check_interpolant_conditions(
            P, form, n_dirs=n_dirs, n_hess=n_hess, seed=seed)
        if params.residual <= 1e-8 and report.concave:
            return form, params, report
        l0 *= 2
    raise BuildError(
        f"no l0 <= {l0_cap} satisfies the interpolant conditions at l={l}"
        + (f" (last: {last_exc})" if last_exc else ""))


# ---------------------------------------------------------------------------
# homogeneous continuation on a hyperplane polytope


def build_homogeneous_interpolant(hp: HyperplanePolytope, l: int, l0: int, *,
                                  term_budget: int = DEFAULT_TERM_BUDGET,
                                  expand: bool = True,
                                  expand_limit: int = 250) -> tuple[Form, InterpolantParams]:
    """Homogeneous continuation of the interpolant of a polytope living on
    {<x,u> = 1}, written directly in ambient coordinates; degree (2(l+l0))^2.
    """
    e = 2 * (l + l0)
    n_deg = e * e
    P = hp.poly
    weights, cond = solve_interpolation_weights(P, e)
    u = hp.u
    dim = hp.ambient_dim
    parts: list[tuple[float, Form]] = [(1.0, PowForm(AffineForm(u, 0.0), n_deg))]
    for v in range(P.n_vertices):
        fv = sorted(P.vertex_facets[v])
        inners = []
        for j in fv:
            # <x,u> - continuation of q_F: linear, vanishing at the origin
            a = u * (1.0 - hp.facet_support[j] / hp.diameter) \
                + hp.facet_normals[j] / hp.diameter
            inners.append((1.0 / len(fv), PowForm(AffineForm(a, 0.0), e)))
        parts.append((-float(weights[v]), PowForm(LinComb(dim, inners), e)))
    form: Form = LinComb(dim, parts)
    expanded = False
    if expand and cert_dense_count(n_deg, dim) <= min(term_budget, expand_limit):
        def _build():
            out = Polynomial.affine(u, 0.0).power(n_deg, max_terms=term_budget)
            for v in range(P.n_vertices):
                fv = sorted(P.vertex_facets[v])
                inner = Polynomial.zero(dim)
                for j in fv:
                    a = u * (1.0 - hp.facet_support[j] / hp.diameter) \
                        + hp.facet_normals[j] / hp.diameter
                    inner = inner + Polynomial.affine(a, 0.0).power(
                        e, max_terms=term_budget).scale(1.0 / len(fv))
                out = out - inner.power(e, max_terms=term_budget).scale(float(weights[v]))
            return out

        probes_ok = _try_expand_hp(form, _build, hp, term_budget)
        if probes_ok is not None:
            form = PolyForm(probes_ok)
            expanded = True
    residual = float(max(abs(form.value(v)) for v in hp.vertices_ambient))
    params = InterpolantParams(l, l0, e, weights, cond, residual, expanded)
    return form, params


def _try_expand_hp(form: Form, build, hp: HyperplanePolytope, budget: int):
    try:
        poly = build()
    except TermBudgetError:
        return None
    probes = np.vstack([hp.vertices_ambient,
                        hp.to_ambient(hp.poly.anchor_points())])
    ref = form.values(probes)
    got = poly.eval_batch(probes)
    if np.any(np.abs(got - ref) > 1e-10 * (1.0 + np.abs(ref))):
        return None
    return poly


# ---------------------------------------------------------------------------
# vertex cone polynomials (3-polytopes)


@dataclass
class VertexConeBundle:
    vertex_index: int
    vertex: np.ndarray
    homogeneous: Form              # in direction space around the vertex
    poly: Form                     # shifted to the vertex and rescaled
    scale: float                   # positive normalization constant
    params: InterpolantParams


def build_vertex_cone_poly(P: Polytope, vi: int, l: int, *,
                           l0_start: int = 1, l0_cap: int = 64,
                           seed: int = 0, n_hess: int = 400,
                           term_budget: int = DEFAULT_TERM_BUDGET,
                           expand: bool = True,
                           expand_limit: int = 250) -> VertexConeBundle:
    """Even polynomial whose nonnegativity set hugs the double supporting
    cone at vertex vi: the homogeneous continuation of the vertex-figure
    interpolant, translated to the vertex.

    The result is rescaled by a positive constant so its magnitude is 1 on
    the polytope's anchor set; scaling changes nothing structural.
    """
    hp = vertex_figure(P, vi)
    # escalate l0 on the chart figure until its interpolant conditions hold
    _, chart_params, _ = build_interpolant_auto(
        hp.poly, l, l0_start=l0_start, l0_cap=l0_cap, seed=seed,
        n_hess=n_hess, n_dirs=200, term_budget=term_budget, expand=False)
    tilde, params = build_homogeneous_interpolant(
        hp, l, chart_params.l0, term_budget=term_budget, expand=expand,
        expand_limit=expand_limit)
    v = P.vertices[vi]
    if isinstance(tilde, PolyForm):
        shifted: Form = PolyForm(tilde.poly.compose_affine(
            np.eye(P.dim), -v, max_terms=term_budget))
    else:
        shifted = ShiftForm(tilde, v)
    scale = cert.anchor_scale(P, shifted)
    b = _scale_form(shifted, 1.0 / scale)
    return VertexConeBundle(vi, v, tilde, b, scale, params)


def _scale_form(form: Form, c: float) -> Form:
    if isinstance(form, PolyForm):
        return PolyForm(form.poly.scale(c))
    return LinComb(form.dim, [(float(c), form)])


# ---------------------------------------------------------------------------
# facet products and the cone blend


def opposite_facet_product(P: Polytope, vi: int) -> Polynomial:
    """Product of the facet forms over facets that do not contain vertex vi."""
    out = Polynomial.constant(P.dim, 1.0)
    for j in range(P.n_facets):
        if j not in P.vertex_facets[vi]:
            out = out.mul(facet_form(P, j))
    return out


def facet_product(P: Polytope) -> Polynomial:
    """Product of all facet forms; negative exactly in the facet-visible
    regions with an odd visible count."""
    out = Polynomial.constant(P.dim, 1.0)
    for j in range(P.n_facets):
        out = out.mul(facet_form(P, j))
    return out


def build_cone_blend(P: Polytope, bundles: list[VertexConeBundle], k: int, *,
                     term_budget: int = DEFAULT_TERM_BUDGET,
                     expand: bool = True, expand_limit: int = 250) -> Form:
    """sum_v f_v^(2k) * b_v with f_v the opposite-facet product."""
    if k < 1:
        raise BuildError("k must be a positive integer")
    parts = []
    for bun in bundles:
        f_v = opposite_facet_product(P, bun.vertex_index)
        parts.append((1.0, ProductForm([PowForm(PolyForm(f_v), 2 * k),
                                        bun.poly])))
    form: Form = LinComb(P.dim, parts)
    max_deg = max((opposite_facet_product(P, b.vertex_index).degree() * 2 * k
                   + b.poly.degree()) for b in bundles)
    if (expand and all(isinstance(b.poly, PolyForm) for b in bundles)
            and cert_dense_count(max_deg, P.dim) <= min(term_budget, expand_limit)):
        def _build():
            out = Polynomial.zero(P.dim)
            for bun in bundles:
                f_v = opposite_facet_product(P, bun.vertex_index)
                out = out + f_v.power(2 * k, max_terms=term_budget).mul(
                    bun.poly.poly, max_terms=term_budget)
            return out
        poly = _try_expand(form, _build, P, term_budget)
        if poly is not None:
            return PolyForm(poly)
    return form


# ---------------------------------------------------------------------------
# representations


@dataclass
class Representation:
    dim: int
    mode: str                          # polygon | polytope3 | unbounded
    polys: list[Form]                  # membership forms on R^dim
    params: dict
    provenance: dict = field(default_factory=dict)
    lifted_polys: list[Form] | None = None   # homogeneous bundle (unbounded)
    chart_basis: np.ndarray | None = None    # lineality chart (unbounded)
    plane_normal: np.ndarray | None = None   # section normal (unbounded)

    def membership_values(self, X, dtype=np.float64) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.stack([p.values(X, dtype=dtype) for p in self.polys])

    def to_payload(self) -> dict:
        out = {
            "dim": self.dim,
            "mode": self.mode,
            "params": dict(sorted(self.params.items())),
            "polys": [p.to_payload() for p in self.polys],
            "provenance": dict(sorted(self.provenance.items())),
        }
        if self.lifted_polys is not None:
            out["lifted_polys"] = [p.to_payload() for p in self.lifted_polys]
            out["chart_basis"] = [[float(v) for v in row]
                                  for row in self.chart_basis]
            out["plane_normal"] = [float(v) for v in self.plane_normal]
        return out

    @classmethod
    def from_payload(cls, payload: dict) -> "Representation":
        from .forms import form_from_payload
        lifted = None
        basis = None
        normal = None
        if "lifted_polys" in payload:
            lifted = [form_from_payload(p) for p in payload["lifted_polys"]]
            basis = np.array(payload["chart_basis"], dtype=float)
            normal = np.array(payload["plane_normal"], dtype=float)
        return cls(int(payload["dim"]), payload["mode"],
                   [form_from_payload(p) for p in payload["polys"]],
                   payload.get("params", {}), payload.get("provenance", {}),
                   lifted, basis, normal)


def normalize_forms(P: Polytope, forms: list[Form]) -> tuple[list[Form], list[float]]:
    scales = [cert.anchor_scale(P, f) for f in forms]
    return [_scale_form(f, 1.0 / s) for f, s in zip(forms, scales)], scales


@dataclass
class BuildSettings:
    seed: int = 0
    budgets: dict = field(default_factory=cert.default_budgets)
    term_budget: int = DEFAULT_TERM_BUDGET
    max_triples: int = 200
    max_polygon_rounds: int = 12
    l0_start: int = 1
    l0_cap: int = 64
    n_hess: int = 1000
    n_dirs: int = 1000
    screen_samples: int = 20000
    expand: bool = True
    expand_limit: int = 250


def _screen_budgets(settings: BuildSettings) -> dict:
    n = settings.screen_samples
    return {"interior": n, "shell": n, "far": 200, "facet": 100}


# -- polygons ---------------------------------------------------------------


def build_polygon(P: Polytope, settings: BuildSettings | None = None
                  ) -> tuple[Representation, cert.CertReport]:
    """Two-polynomial representation of a polygon: the concave interpolant
    and the product of the edge forms."""
    settings = settings or BuildSettings()
    if P.dim != 2:
        raise BuildError("polygon builder needs a 2-polytope")
    edge_prod = PolyForm(facet_product(P))
    best = None
    for l in range(1, settings.max_polygon_rounds + 1):
        try:
            g, params, report = build_interpolant_auto(
                P, l, l0_start=settings.l0_start, l0_cap=settings.l0_cap,
                seed=settings.seed, n_hess=settings.n_hess,
                n_dirs=settings.n_dirs, term_budget=settings.term_budget,
                expand=settings.expand, expand_limit=settings.expand_limit)
        except BuildError:
            continue
        polys, scales = normalize_forms(P, [g, edge_prod])
        rep = Representation(
            P.dim, "polygon", polys,
            {"l": params.l, "l0": params.l0, "m": None, "k": None,
             "scales": scales, "expanded": params.expanded},
            {"decision_substitute": "sampling",
             "hausdorff_estimate": report.hausdorff})
        rpt = cert.certify_representation(P, polys, seed=settings.seed,
                                          budgets=settings.budgets)
        rep.provenance["certifier"] = rpt.report_id
        if rpt.verdict == "pass":
            return rep, rpt
        fails = sum(0 if c.passed else 1 for c in rpt.per_check.values())
        if best is None or fails < best[0]:
            best = (fails, rep, rpt)
    raise SearchBudgetError(
        f"no polygon interpolant certified within {settings.max_polygon_rounds} rounds",
        best=best)


# -- 3-polytopes --------------------------------------------------------------


def cantor_triples(limit: int):
    """(l, m, k) enumeration of N^3: by total, then lexicographic."""
    count = 0
    s = 3
    while count < limit:
        for l in range(1, s - 1):
            for m in range(1, s - l):
                yield l, m, s - l - m
                count += 1
                if count >= limit:
                    return
        s += 1


def build_polytope3(P: Polytope, settings: BuildSettings | None = None
                    ) -> tuple[Representation, cert.CertReport]:
    """Three-polynomial representation of a 3-polytope by certified search
    over the (l, m, k) parameter triples."""
    settings = settings or BuildSettings()
    if P.dim != 3:
        raise BuildError("3-polytope builder needs a 3-polytope")
    p2 = PolyForm(facet_product(P))
    g_cache: dict[int, tuple] = {}
    b_cache: dict[int, list[VertexConeBundle]] = {}
    best = None
    tried = 0
    for l, m, k in cantor_triples(settings.max_triples):
        tried += 1
        try:
            if m not in g_cache:
                try:
                    g_cache[m] = build_interpolant_auto(
                        P, m, l0_start=settings.l0_start,
                        l0_cap=settings.l0_cap,
                        seed=settings.seed, n_hess=settings.n_hess,
                        n_dirs=min(settings.n_dirs, 400),
                        term_budget=settings.term_budget,
                        expand=settings.expand,
                        expand_limit=settings.expand_limit)
                except BuildError:
                    g_cache[m] = None
            if l not in b_cache:
                try:
                    b_cache[l] = [
                        build_vertex_cone_poly(
                            P, vi, l, l0_start=settings.l0_start,
                            l0_cap=settings.l0_cap, seed=settings.seed,
                            term_budget=settings.term_budget,
                            expand=settings.expand,
                            expand_limit=settings.expand_limit)
                        for vi in range(P.n_vertices)]
                except BuildError:
                    b_cache[l] = None
        except TermBudgetError:
            continue
        if g_cache[m] is None or b_cache[l] is None:
            continue
        g, g_params, g_report = g_cache[m]
        bundles = b_cache[l]
        p1 = build_cone_blend(P, bundles, k, term_budget=settings.term_budget,
                              expand=settings.expand,
                              expand_limit=settings.expand_limit)
        polys, scales = normalize_forms(P, [g, p1, p2])
        screen = cert.certify_representation(
            P, polys, seed=settings.seed + 7919 * tried,
            budgets=_screen_budgets(settings))
        rep = None
        if screen.verdict == "pass":
            rpt = cert.certify_representation(P, polys, seed=settings.seed,
                                              budgets=settings.budgets)
            rep = Representation(
                P.dim, "polytope3", polys,
                {"l": l, "l0": max(b.params.l0 for b in bundles),
                 "m": m, "m_l0": g_params.l0, "k": k, "scales": scales,
                 "expanded": all(isinstance(f, PolyForm) for f in polys)},
                {"decision_substitute": "sampling",
                 "hausdorff_estimate": g_report.hausdorff,
                 "triples_tried": tried,
                 "certifier": rpt.report_id})
            if rpt.verdict == "pass":
                return rep, rpt
        fails = sum(0 if c.passed else 1 for c in screen.per_check.values())
        if best is None or fails < best[0]:
            best = (fails, (l, m, k), rep, screen)
    raise SearchBudgetError(
        f"no (l, m, k) certified within {settings.max_triples} triples",
        best=best)


# -- unbounded ----------------------------------------------------------------


def build_unbounded(dim: int, halfspaces, settings: BuildSettings | None = None
                    ) -> tuple[Representation, cert.CertReport]:
    """Representation of an unbounded polyhedron by homogeneous even-degree
    polynomials on a lifted chart.

    Pipeline: split off the lineality space, embed the line-free part at
    height 1, slice its homogenization cone to a bounded section, represent
    the section with the homogeneity-compatible interpolant, fix parities
    with an affine factor, homogenize, and compose with the projection back
    to the original coordinates.
    """
    settings = settings or BuildSettings()
    dec = decompose(dim, halfspaces)
    if dec.bounded and dec.chart_dim == dim:
        raise BuildError("input is bounded; use the bounded builders")
    cone = homogenization_cone(dec.chart_halfspaces, dec.chart_dim)
    hp = cross_section(cone)
    d_q = dec.chart_dim
    lift_dim = d_q + 1
    u = hp.u
    if d_q == 3:
        return _build_unbounded_3d(dim, halfspaces, dec, hp, settings)

    best_err = None
    for l in range(1, settings.max_polygon_rounds + 1):
        try:
            _, chart_params, chart_report = build_interpolant_auto(
                hp.poly, l, l0_start=settings.l0_start, l0_cap=settings.l0_cap,
                seed=settings.seed, n_hess=settings.n_hess,
                n_dirs=min(settings.n_dirs, 600),
                term_budget=settings.term_budget, expand=False)
            tilde, params = build_homogeneous_interpolant(
                hp, l, chart_params.l0, term_budget=settings.term_budget,
                expand=settings.expand, expand_limit=settings.expand_limit)
        except BuildError as exc:
            best_err = exc
            continue
        # interpolant restricted to the section plane, as an ambient form
        aich = cert.certify_interpolant(
            hp, _section_restriction(tilde, hp), tilde,
            seed=settings.seed, n_dirs=min(settings.n_dirs, 600),
            n_hess=settings.n_hess)
        if aich.verdict != "pass":
            best_err = BuildError(f"section interpolant checks failed at l={l}")
            continue

        section_polys: list[Form] = [tilde]
        if d_q == 2:
            section_polys.append(PolyForm(_section_facet_product(hp)))

        # affine factor on the section plane: positive on the interpolant's
        # nonnegativity set, vanishing on a hyperplane of the section
        radius = 1.25 * (chart_report.hausdorff + hp.poly.diameter)
        e_dir = hp.basis[:, 0]
        center = hp.to_ambient(hp.poly.centroid)[0]
        f_aff = Polynomial.affine(-e_dir, radius + float(e_dir @ center))

        lifted: list[Form] = []
        for j, pj in enumerate(section_polys):
            if j == 0:
                lifted.append(pj)      # already homogeneous of even degree
                continue
            poly = pj.poly if isinstance(pj, PolyForm) else None
            if poly is None:
                raise BuildError("section polynomial must be expanded")
            if poly.degree() % 2 == 1:
                poly = poly.mul(f_aff, max_terms=settings.term_budget)
            lifted.append(PolyForm(poly.homogenize(
                u, poly.degree(), max_terms=settings.term_budget)))

        for f in lifted:
            hd = f.homogeneous_degree()
            if hd is None or hd % 2 != 0:
                raise BuildError("lifted polynomial lost homogeneity or parity")

        # compose with the embedding x -> (W^T x, 1)
        W = dec.chart_basis
        M = np.zeros((lift_dim, dim))
        M[:d_q, :] = W.T
        c = np.zeros(lift_dim)
        c[-1] = 1.0
        restricted = [_compose_form(f, M, c, settings.term_budget)
                      for f in lifted]

        rpt = certify_unbounded(dim, halfspaces, restricted,
                                seed=settings.seed, budgets=settings.budgets)
        if rpt.verdict == "pass":
            rep = Representation(
                dim, "unbounded", restricted,
                {"l": params.l, "l0": params.l0, "m": None, "k": None,
                 "chart_dim": d_q,
                 "lifted_degrees": [f.degree() for f in lifted]},
                {"decision_substitute": "sampling",
                 "certifier": rpt.report_id,
                 "hausdorff_estimate": chart_report.hausdorff},
                lifted_polys=lifted, chart_basis=W, plane_normal=u)
            return rep, rpt
        best_err = BuildError(f"box certification failed at l={l}")
    raise SearchBudgetError(
        f"unbounded pipeline found no certified representation "
        f"within {settings.max_polygon_rounds} rounds", best=best_err)


def _build_unbounded_3d(dim: int, halfspaces, dec, hp: HyperplanePolytope,
                        settings: BuildSettings):
    """Line-free unbounded input whose chart is 3-dimensional.

    The bounded 3-polytope search runs in the chart of the section; the
    accepted parameters are then rebuilt ambiently (in R^4) so the pieces
    can be homogenized: the interpolant through its explicit continuation,
    the blend from expanded chart cone polynomials composed back through
    the chart map.
    """
    chart_budgets = dict(settings.budgets)
    inner = BuildSettings(
        seed=settings.seed, budgets=chart_budgets,
        term_budget=settings.term_budget, max_triples=settings.max_triples,
        l0_start=settings.l0_start, l0_cap=settings.l0_cap,
        n_hess=settings.n_hess, n_dirs=settings.n_dirs,
        screen_samples=settings.screen_samples, expand=settings.expand,
        expand_limit=settings.expand_limit)
    section_rep, _ = build_polytope3(hp.poly, inner)
    l = section_rep.params["l"]
    m = section_rep.params["m"]
    m_l0 = section_rep.params["m_l0"]
    k = section_rep.params["k"]

    tilde_g, g_params = build_homogeneous_interpolant(
        hp, m, m_l0, term_budget=settings.term_budget,
        expand=settings.expand, expand_limit=settings.expand_limit)
    aich = cert.certify_interpolant(
        hp, _section_restriction(tilde_g, hp), tilde_g,
        seed=settings.seed, n_dirs=min(settings.n_dirs, 600),
        n_hess=settings.n_hess)
    if aich.verdict != "pass":
        raise SearchBudgetError(
            "section interpolant continuation checks failed", best=aich)

    # ambient chart map t = B^T (x - origin)
    Mc = hp.basis.T
    cc = -hp.basis.T @ hp.origin
    u = hp.u
    p1_amb = Polynomial.zero(hp.ambient_dim)
    for vi in range(hp.poly.n_vertices):
        bun = build_vertex_cone_poly(
            hp.poly, vi, l, l0_start=settings.l0_start,
            l0_cap=settings.l0_cap, seed=settings.seed,
            term_budget=settings.term_budget, expand=True,
            expand_limit=max(settings.expand_limit, 50_000))
        if not isinstance(bun.poly, PolyForm):
            raise SearchBudgetError(
                "chart cone polynomial too large to expand for the lifted route")
        b_amb = bun.poly.poly.compose_affine(Mc, cc,
                                             max_terms=settings.term_budget)
        f_amb = Polynomial.constant(hp.ambient_dim, 1.0)
        for j in range(hp.poly.n_facets):
            if j not in hp.poly.vertex_facets[vi]:
                f_amb = f_amb.mul(hp.facet_form_ambient(j),
                                  max_terms=settings.term_budget)
        p1_amb = p1_amb + f_amb.power(2 * k, max_terms=settings.term_budget
                                      ).mul(b_amb, max_terms=settings.term_budget)
    p2_amb = _section_facet_product(hp)

    radius = 1.25 * (section_rep.provenance["hausdorff_estimate"]
                     + hp.poly.diameter)
    e_dir = hp.basis[:, 0]
    center = hp.to_ambient(hp.poly.centroid)[0]
    f_aff = Polynomial.affine(-e_dir, radius + float(e_dir @ center))

    lifted: list[Form] = [tilde_g]
    for poly in (p1_amb, p2_amb):
        if poly.degree() % 2 == 1:
            poly = poly.mul(f_aff, max_terms=settings.term_budget)
        lifted.append(PolyForm(poly.homogenize(
            u, poly.degree(), max_terms=settings.term_budget)))
    for f in lifted:
        hd = f.homogeneous_degree()
        if hd is None or hd % 2 != 0:
            raise BuildError("lifted polynomial lost homogeneity or parity")

    W = dec.chart_basis
    M = np.zeros((4, dim))
    M[:3, :] = W.T
    c = np.zeros(4)
    c[-1] = 1.0
    restricted = [_compose_form(f, M, c, settings.term_budget) for f in lifted]
    rpt = certify_unbounded(dim, halfspaces, restricted, seed=settings.seed,
                            budgets=settings.budgets)
    if rpt.verdict != "pass":
        raise SearchBudgetError("box certification of the lifted "
                                "3-chart representation failed", best=rpt)
    rep = Representation(
        dim, "unbounded", restricted,
        {"l": l, "l0": g_params.l0, "m": m, "k": k, "chart_dim": 3,
         "lifted_degrees": [f.degree() for f in lifted]},
        {"decision_substitute": "sampling",
         "certifier": rpt.report_id,
         "hausdorff_estimate": section_rep.provenance["hausdorff_estimate"]},
        lifted_polys=lifted, chart_basis=W, plane_normal=u)
    return rep, rpt


def _section_restriction(tilde: Form, hp: HyperplanePolytope) -> Form:
    """The continuation itself evaluated on the section plane, as a chart form."""
    M = hp.basis
    return ComposeAffineForm(tilde, M, hp.origin.copy())


def _section_facet_product(hp: HyperplanePolytope) -> Polynomial:
    out = Polynomial.constant(hp.ambient_dim, 1.0)
    for j in range(hp.poly.n_facets):
        out = out.mul(hp.facet_form_ambient(j))
    return out


def _compose_form(f: Form, M, c, budget: int) -> Form:
    if isinstance(f, PolyForm):
        return PolyForm(f.poly.compose_affine(M, c, max_terms=budget))
    return ComposeAffineForm(f, M, c)


def certify_unbounded(dim: int, halfspaces, forms: list[Form], *,
                      seed: int = 0, box_half_width: float = 10.0,
                      budgets: dict | None = None) -> cert.CertReport:
    """Box-sampling certificate for an unbounded polyhedron representation.

    Inside points must satisfy every polynomial up to tolerance; outside
    points beyond a guard band must violate at least one, where the guard
    measures the maximum halfspace violation (a lower bound on the true
    distance, so the excluded zone only ever shrinks claims).
    """
    from .geometry import Halfspace
    budgets = dict(cert.default_budgets(), **(budgets or {}))
    hs = [h if isinstance(h, Halfspace) else Halfspace(*h) for h in halfspaces]
    A = np.array([h.a for h in hs])
    b = np.array([h.b for h in hs])
    rng = np.random.default_rng(seed)
    n = budgets["interior"] + budgets["shell"]
    X = rng.uniform(-box_half_width, box_half_width, size=(n, dim))
    viol = (X @ A.T - b).max(axis=1)
    guard = cert.GUARD_BAND * 2 * box_half_width
    inside = viol <= 0.0
    outside = viol > guard

    # probe-grid scale: corners and center of the box
    grid = np.array(np.meshgrid(*([[-box_half_width, 0.0, box_half_width]] * dim)
                                )).reshape(dim, -1).T
    scales = []
    for f in forms:
        s = float(np.abs(f.values(grid)).max())
        scales.append(s if s > 0 else 1.0)

    checks = {}
    Vi = np.stack([f.values(X[inside]) / s for f, s in zip(forms, scales)])
    mins = Vi.min(axis=0)
    worst = float(mins.min()) if mins.size else 0.0
    wit = X[inside][int(mins.argmin())].tolist() if mins.size else None
    checks["interior_containment"] = cert.CheckResult(
        worst >= -cert.TOL_CONTAIN, worst,
        wit if worst < -cert.TOL_CONTAIN else None, int(inside.sum()))

    Xo = X[outside]
    Vo = np.stack([f.values(Xo) / s for f, s in zip(forms, scales)])
    envs = np.stack([f.magnitude_envelope(Xo) / s for f, s in zip(forms, scales)])
    mins_o = Vo.min(axis=0)
    ok = mins_o < -cert.TOL_STRICT
    certain = (Vo < -cert.TOL_STRICT * np.maximum(envs, 1e-300)).any(axis=0)
    ok |= certain
    worst_o = float(mins_o.max()) if mins_o.size else -1.0
    wit_o = Xo[int(np.argmax(mins_o))].tolist() if (~ok).any() else None
    checks["outside_rejection"] = cert.CheckResult(
        bool(ok.all()), worst_o, wit_o, int(outside.sum()))

    return cert.CertReport.from_checks(
        checks, budgets,
        {"contain": cert.TOL_CONTAIN, "strict": cert.TOL_STRICT,
         "guard_band": guard},
        seed, meta={"box_half_width": box_half_width,
                    "decision_substitute": "sampling"})
