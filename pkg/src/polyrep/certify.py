"""Seeded sampling certifier.

The exact set-equality decision the construction calls for is replaced by
a deterministic sampling certificate: no counterexample at the configured
budget.  Every reported failure carries a witness point that reproduces
the violating sign on re-evaluation.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .forms import Form, as_form
from .geometry import (
    Polytope, HyperplanePolytope, vertex_figure, vertex_normal,
    in_outer_cone_batch, has_region_tag_batch, GeometryError,
)

# tolerances are applied to values scaled so that each polynomial has unit
# magnitude on the polytope's anchor set
TOL_CONTAIN = 1e-9
TOL_STRICT = 1e-12
GUARD_BAND = 1e-6          # times diameter
FAR_RADII = (2.0, 10.0, 100.0)


class SamplingDegeneracyError(GeometryError):
    """Rejection sampling acceptance rate collapsed."""


@dataclass
class SampleSpec:
    """Sampling request: region is one of 'interior', 'boundary_shell',
    'far_field', 'face', 'ray_grid'."""

    region: str
    count: int
    seed: int
    width: float | None = None      # boundary_shell
    radius: float | None = None     # far_field
    face: frozenset | None = None   # face

    def __post_init__(self):
        if self.count <= 0:
            raise ValueError("count must be positive")
        if self.region == "boundary_shell" and not (self.width and self.width > 0):
            raise ValueError("boundary_shell needs width > 0")
        if self.region == "far_field" and not (self.radius and self.radius > 0):
            raise ValueError("far_field needs radius > 0")


@dataclass
class CheckResult:
    passed: bool
    worst_value: float
    witness: list | None = None
    n: int = 0
    note: str = ""

    def to_payload(self):
        return {"passed": self.passed, "worst_value": self.worst_value,
                "witness": self.witness, "n": self.n, "note": self.note}


@dataclass
class CertReport:
    verdict: str                       # pass | fail | inconclusive
    per_check: dict[str, CheckResult]
    budgets: dict
    tolerances: dict
    seed: int
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_checks(cls, checks, budgets, tolerances, seed, meta=None):
        binding = {k: c for k, c in checks.items() if c.note != "diagnostic"}
        if all(c.passed for c in binding.values()):
            verdict = "pass"
        elif any((not c.passed) and c.note != "guard-band-only"
                 for c in binding.values()):
            verdict = "fail"
        else:
            verdict = "inconclusive"
        return cls(verdict, checks, budgets, tolerances, seed, meta or {})

    def to_payload(self) -> dict:
        return {
            "verdict": self.verdict,
            "seed": self.seed,
            "budgets": dict(sorted(self.budgets.items())),
            "tolerances": dict(sorted(self.tolerances.items())),
            "per_check": {k: v.to_payload() for k, v in sorted(self.per_check.items())},
            "meta": dict(sorted(self.meta.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_payload(), sort_keys=True, indent=1)

    @property
    def report_id(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    @classmethod
    def from_payload(cls, payload: dict) -> "CertReport":
        checks = {k: CheckResult(v["passed"], v["worst_value"], v["witness"],
                                 v["n"], v.get("note", ""))
                  for k, v in payload["per_check"].items()}
        return cls(payload["verdict"], checks, payload["budgets"],
                   payload["tolerances"], payload["seed"],
                   payload.get("meta", {}))


# ---------------------------------------------------------------------------
# samplers


def _rejection(rng, lo, hi, accept, count, what):
    """Uniform draws in a box filtered by ``accept``; deterministic."""
    dim = len(lo)
    out = []
    have = 0
    drawn = 0
    batch = max(4 * count, 1024)
    while have < count:
        X = rng.uniform(lo, hi, size=(batch, dim))
        keep = accept(X)
        pts = X[keep]
        out.append(pts)
        have += len(pts)
        drawn += batch
        if drawn > 400 * count and have < max(1, drawn * 1e-4):
            raise SamplingDegeneracyError(
                f"{what}: acceptance rate below 1e-4 after {drawn} draws")
    return np.vstack(out)[:count]


def sample_interior(P: Polytope, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lo, hi = P.bounding_box()
    return _rejection(rng, lo, hi, lambda X: P.contains_batch(X, 0.0),
                      count, "interior")


def sample_shell(P: Polytope, count: int, width: float, seed: int,
                 guard: float = 0.0) -> np.ndarray:
    """Points of (P + width*B) \\ P, at boundary distance > guard."""
    rng = np.random.default_rng(seed)
    lo, hi = P.bounding_box(width)

    def accept(X):
        d = P.distance_batch(X)
        return (d > guard) & (d <= width)

    return _rejection(rng, lo, hi, accept, count, "boundary_shell")


def sample_inflated(P: Polytope, count: int, delta: float, seed: int) -> np.ndarray:
    """Points of P + delta*B."""
    rng = np.random.default_rng(seed)
    lo, hi = P.bounding_box(delta)
    return _rejection(rng, lo, hi, lambda X: P.distance_batch(X) <= delta,
                      count, "inflated")


def sample_far_field(P: Polytope, count: int, radius: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    Z = rng.normal(size=(count, P.dim))
    Z /= np.linalg.norm(Z, axis=1)[:, None]
    return P.centroid + radius * Z


def sample_face(P: Polytope, face: frozenset, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    ids = sorted(face)
    W = P.vertices[ids]
    if len(ids) == 1:
        return np.repeat(W, count, axis=0)
    lam = rng.dirichlet(np.ones(len(ids)), size=count)
    return lam @ W


def unit_directions(dim: int, n: int) -> np.ndarray:
    """Deterministic direction grid: Fibonacci sphere / uniform circle."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])[:max(1, min(n, 2))]
    if dim == 2:
        ang = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    i = np.arange(n)
    golden = (1 + 5 ** 0.5) / 2
    z = 1 - (2 * i + 1) / n
    r = np.sqrt(np.maximum(0.0, 1 - z * z))
    th = 2 * np.pi * i / golden
    return np.stack([r * np.cos(th), r * np.sin(th), z], axis=1)


def sample(P: Polytope, spec: SampleSpec) -> np.ndarray:
    if spec.region == "interior":
        return sample_interior(P, spec.count, spec.seed)
    if spec.region == "boundary_shell":
        return sample_shell(P, spec.count, spec.width, spec.seed)
    if spec.region == "far_field":
        return sample_far_field(P, spec.count, spec.radius, spec.seed)
    if spec.region == "face":
        return sample_face(P, spec.face, spec.count, spec.seed)
    if spec.region == "ray_grid":
        return unit_directions(P.dim, spec.count)
    raise ValueError(f"unknown sample region {spec.region!r}")


# ---------------------------------------------------------------------------
# scaling


def anchor_scale(P: Polytope, form: Form) -> float:
    """Max |value| over the polytope's anchor set; 1.0 for the zero form."""
    vals = np.abs(form.values(P.anchor_points()))
    s = float(vals.max()) if len(vals) else 0.0
    return s if s > 0.0 else 1.0


def anchor_scales(P: Polytope, forms) -> np.ndarray:
    return np.array([anchor_scale(P, as_form(f)) for f in forms])


# ---------------------------------------------------------------------------
# representation certificate


def default_budgets() -> dict:
    return {"interior": 100_000, "shell": 100_000, "far": 1_000, "facet": 1_000}


def certify_representation(P: Polytope, forms, *, seed: int = 0,
                           budgets: dict | None = None,
                           shell_width: float | None = None) -> CertReport:
    """Sampling certificate that {all forms >= 0} equals P.

    Checks: (i) interior containment, (ii) shell rejection outside a guard
    band, (iii) far-field rejection, (iv) boundary consistency on facets.
    """
    forms = [as_form(f) for f in forms]
    budgets = dict(default_budgets(), **(budgets or {}))
    if shell_width is None:
        shell_width = 0.5 * P.diameter
    guard = GUARD_BAND * P.diameter
    scales = anchor_scales(P, forms)
    checks: dict[str, CheckResult] = {}

    Xi = sample_interior(P, budgets["interior"], seed)
    Vi = np.stack([f.values(Xi) / s for f, s in zip(forms, scales)])
    mins = Vi.min(axis=0)
    worst = float(mins.min())
    wit = Xi[int(mins.argmin())].tolist() if len(Xi) else None
    checks["interior_containment"] = CheckResult(
        worst >= -TOL_CONTAIN, worst, wit if worst < -TOL_CONTAIN else None,
        len(Xi))

    Xs = sample_shell(P, budgets["shell"], shell_width, seed + 1, guard=guard)
    Vs = np.stack([f.values(Xs) / s for f, s in zip(forms, scales)])
    mins_s = Vs.min(axis=0)
    rejected = mins_s < -TOL_STRICT
    n_env = 0
    if not rejected.all():
        # Near edges and vertices the blend polynomial lives many orders of
        # magnitude below its anchor scale, so the absolute threshold is
        # unreachable there even though the sign is numerically certain.  A
        # point also counts as rejected when some polynomial is negative by
        # more than TOL_STRICT times its local cancellation-free envelope.
        idx = np.nonzero(~rejected)[0]
        Xu = Xs[idx]
        certain = np.zeros(len(idx), dtype=bool)
        for f, s in zip(forms, scales):
            vals = f.values(Xu) / s
            env = f.magnitude_envelope(Xu) / s
            certain |= vals < -TOL_STRICT * np.maximum(env, 1e-300)
        rejected[idx[certain]] = True
        n_env = int(certain.sum())
    bad = ~rejected
    worst_s = float(mins_s.max())
    wit_s = Xs[int(mins_s.argmax())].tolist() if bad.any() else None
    checks["shell_rejection"] = CheckResult(
        not bad.any(), worst_s, wit_s, len(Xs),
        note=f"envelope-certified: {n_env}" if n_env else "")

    far_worst = -np.inf
    far_wit = None
    far_n = 0
    for r in FAR_RADII:
        Xf = sample_far_field(P, budgets["far"], r * P.diameter,
                              seed + 2 + int(r))
        Vf = np.stack([np.asarray(f.values(Xf, dtype=np.longdouble),
                                  dtype=np.longdouble) for f in forms])
        mf = Vf.min(axis=0)
        far_n += len(Xf)
        m = float(mf.max())
        if m > far_worst:
            far_worst = m
            if m >= 0:
                far_wit = Xf[int(np.argmax(mf))].tolist()
    checks["far_field_rejection"] = CheckResult(
        far_worst < 0.0, far_worst, far_wit, far_n)

    # boundary consistency: product polynomial vanishes on facets, the rest
    # stay nonnegative there
    worst_last = 0.0
    worst_rest = 0.0
    wit_b = None
    nb = 0
    for j in range(P.n_facets):
        Xf = sample_face(P, frozenset(P.facet_vertices[j]), budgets["facet"],
                         seed + 100 + j)
        nb += len(Xf)
        vlast = np.abs(forms[-1].values(Xf)) / scales[-1]
        m = float(vlast.max())
        if m > worst_last:
            worst_last = m
        for f, s in zip(forms[:-1], scales[:-1]):
            vals = f.values(Xf) / s
            mn = float(vals.min())
            if mn < worst_rest:
                worst_rest = mn
                if mn < -TOL_CONTAIN:
                    wit_b = Xf[int(vals.argmin())].tolist()
    ok_b = worst_last <= TOL_CONTAIN and worst_rest >= -TOL_CONTAIN
    checks["boundary_consistency"] = CheckResult(
        ok_b, worst_last if worst_last > -worst_rest else worst_rest,
        wit_b, nb)

    tolerances = {"contain": TOL_CONTAIN, "strict": TOL_STRICT,
                  "guard_band": guard}
    return CertReport.from_checks(checks, budgets, tolerances, seed,
                                  meta={"decision_substitute": "sampling",
                                        "shell_width": shell_width})


# ---------------------------------------------------------------------------
# interpolant condition certificates


def ray_extent(P: Polytope, w: np.ndarray) -> float:
    """Distance from the centroid to the boundary along direction w."""
    denom = P.A @ w
    pos = denom > 1e-14
    if not pos.any():
        raise GeometryError("unbounded ray inside a polytope?")
    return float(((P.b - P.A @ P.centroid)[pos] / denom[pos]).min())


def superlevel_extent(P: Polytope, form: Form, w: np.ndarray,
                      tol: float) -> float:
    """Zero crossing of the form along centroid + t*w, by bisection."""
    return float(superlevel_extents(P, form, np.asarray(w, dtype=float
                                                        ).reshape(1, -1), tol)[0])


def superlevel_extents(P: Polytope, form: Form, dirs: np.ndarray,
                       tol: float) -> np.ndarray:
    """Zero crossings of the form along centroid rays, bisected in batch.

    The form is positive at the boundary of P along each ray (the
    superlevel set contains P), so the crossing lies beyond the ray extent.
    """
    form = as_form(form)
    c = P.centroid
    n = len(dirs)
    lo = np.array([ray_extent(P, w) for w in dirs])
    hi = lo.copy()
    active = np.ones(n, dtype=bool)
    for _ in range(400):
        vals = form.values(c + hi[active, None] * dirs[active])
        vals = np.where(np.isfinite(vals), vals, -np.inf)
        still = vals >= 0
        idx = np.nonzero(active)[0]
        lo[idx[still]] = hi[idx[still]]
        hi[idx[still]] *= 1.5
        active[idx[~still]] = False
        if not active.any():
            break
    out = np.full(n, np.inf)
    done = ~active
    if not done.any():
        return out
    lo_d, hi_d = lo[done], hi[done]
    D = dirs[done]
    while float((hi_d - lo_d).max()) > tol:
        mid = 0.5 * (lo_d + hi_d)
        vals = form.values(c + mid[:, None] * D)
        pos = np.isfinite(vals) & (vals >= 0)
        lo_d = np.where(pos, mid, lo_d)
        hi_d = np.where(pos, hi_d, mid)
    out[done] = 0.5 * (lo_d + hi_d)
    return out


@dataclass
class InterpolantConditionReport:
    hausdorff: float
    vertex_residual: float
    concave: bool
    max_hessian_eig: float
    max_relative_eig: float
    hessian_witness: list | None = None

    def to_payload(self):
        return {"hausdorff": self.hausdorff,
                "vertex_residual": self.vertex_residual,
                "concave": self.concave,
                "max_hessian_eig": self.max_hessian_eig,
                "max_relative_eig": self.max_relative_eig,
                "hessian_witness": self.hessian_witness}


def check_interpolant_conditions(P: Polytope, form: Form, *,
                                 n_dirs: int = 1000, n_hess: int = 1000,
                                 seed: int = 0) -> InterpolantConditionReport:
    """Hausdorff estimate by centroid ray casting, vertex residual, and a
    strict-concavity Hessian sweep over a box 1.5x the bounding box."""
    form = as_form(form)
    tol = 1e-8 * P.diameter
    dirs = unit_directions(P.dim, n_dirs)
    rp = np.array([ray_extent(P, w) for w in dirs])
    rg = superlevel_extents(P, form, dirs, tol)
    worst_gap = float((rg - rp).max())
    residual = float(np.abs(form.values(P.vertices)).max())
    rng = np.random.default_rng(seed)
    lo, hi = P.bounding_box()
    c = (lo + hi) / 2
    half = (hi - lo) / 2 * 1.5
    X = c + rng.uniform(-1.0, 1.0, size=(n_hess, P.dim)) * half
    max_eig = -np.inf
    max_rel = -np.inf
    witness = None
    for x in X:
        _, _, H = form.value_grad_hess(x)
        H = (H + H.T) / 2
        if not np.all(np.isfinite(H)):
            # evaluation overflowed: concavity cannot be certified here
            max_eig = np.inf
            max_rel = np.inf
            witness = x.tolist()
            break
        evs = np.linalg.eigvalsh(H)
        ev = float(evs.max())
        # the Hessian scale collapses by many orders of magnitude near the
        # degeneracy surfaces, so negative definiteness is judged relative
        # to the spectral scale at the sample point
        scale = float(np.abs(evs).max())
        rel = ev / scale if scale > 0.0 else np.inf
        max_eig = max(max_eig, ev)
        if rel > max_rel:
            max_rel = rel
            witness = x.tolist()
        if max_rel >= -1e-10:
            break
    return InterpolantConditionReport(
        hausdorff=float(worst_gap), vertex_residual=residual,
        concave=max_rel < -1e-10, max_hessian_eig=max_eig,
        max_relative_eig=max_rel, hessian_witness=witness)


def certify_interpolant(hp_or_p, form: Form, tilde: Form | None = None, *,
                        seed: int = 0, n_dirs: int = 1000,
                        n_hess: int = 1000, n_slice: int = 100) -> CertReport:
    """Conditions on the concave vertex interpolant, plus the homogeneous
    continuation checks when a continuation is supplied.

    Accepts either a Polytope (full-dimensional case, no continuation) or a
    HyperplanePolytope together with the continuation form.
    """
    if isinstance(hp_or_p, HyperplanePolytope):
        hp = hp_or_p
        P = hp.poly
        chart = True
    else:
        hp = None
        P = hp_or_p
        chart = False
    base = check_interpolant_conditions(P, form, n_dirs=n_dirs,
                                        n_hess=n_hess, seed=seed)
    checks = {
        "interpolation": CheckResult(base.vertex_residual <= 1e-8,
                                     base.vertex_residual, None,
                                     P.n_vertices),
        "strict_concavity": CheckResult(base.concave, base.max_hessian_eig,
                                        base.hessian_witness, n_hess),
        "approximation_finite": CheckResult(np.isfinite(base.hausdorff),
                                            base.hausdorff, None, n_dirs),
    }
    meta = {"hausdorff": base.hausdorff}
    if tilde is not None:
        if hp is None:
            raise GeometryError("continuation checks need a hyperplane polytope")
        tilde = as_form(tilde)
        rng = np.random.default_rng(seed + 17)
        d = hp.ambient_dim
        u = hp.u
        basis = hp.basis
        # slice {<x,u> = 0}: continuation must be negative away from o
        T = rng.normal(size=(n_slice, d - 1))
        T /= np.linalg.norm(T, axis=1)[:, None]
        Z = T @ basis.T
        worst = -np.inf
        wit = None
        for scale_exp in (-3.0, -1.0, 0.0, 1.0, 3.0):
            vals = np.asarray(tilde.values(Z * 10.0 ** scale_exp,
                                           dtype=np.longdouble))
            m = float(vals.max())
            if m > worst:
                worst = m
                if m >= 0:
                    wit = (Z[int(np.argmax(vals))] * 10.0 ** scale_exp).tolist()
        checks["slice_negativity"] = CheckResult(worst < 0.0, worst, wit,
                                                 5 * n_slice)
        # cone identity: on rays with <x,u> > 0 the continuation sign matches
        # the section value at the central projection
        Zr = rng.normal(size=(n_slice, d))
        Zr /= np.linalg.norm(Zr, axis=1)[:, None]
        keep = Zr @ u > 1e-6
        Zr = Zr[keep]
        sec = Zr / (Zr @ u)[:, None]
        g_sec = form.values(hp.to_chart(sec)) if form.dim == d - 1 else form.values(sec)
        t_ray = tilde.values(Zr)
        mism = np.nonzero(np.sign(g_sec) != np.sign(t_ray))[0]
        agree = True
        worst_m = 0.0
        wit_m = None
        for i in mism:
            # near-zero section values are legitimate sign flips
            if abs(g_sec[i]) > 1e-9:
                agree = False
                worst_m = float(g_sec[i])
                wit_m = Zr[i].tolist()
                break
        checks["cone_identity"] = CheckResult(agree, worst_m, wit_m, len(Zr))
        hom_deg = tilde.homogeneous_degree()
        checks["homogeneous"] = CheckResult(
            hom_deg is not None and hom_deg % 2 == 0,
            float(hom_deg if hom_deg is not None else -1), None, 1)
    budgets = {"dirs": n_dirs, "hess": n_hess, "slice": n_slice}
    tolerances = {"interpolation": 1e-8, "concavity_eig": -1e-10}
    return CertReport.from_checks(checks, budgets, tolerances, seed, meta)


# ---------------------------------------------------------------------------
# cone searches


def _sample_outer_cone_sections(P: Polytope, vi: int, rho: float, n: int,
                                seed: int) -> np.ndarray:
    """Direction-space points on the vertex-figure plane within distance rho
    of the figure (the section of the rho-outer cone)."""
    rng = np.random.default_rng(seed)
    hp = vertex_figure(P, vi)
    V = hp.poly.vertices
    lam = rng.dirichlet(np.ones(len(V)), size=n)
    T = lam @ V
    k = T.shape[1]
    U = rng.normal(size=(n, k))
    U /= np.maximum(np.linalg.norm(U, axis=1)[:, None], 1e-300)
    r = rho * rng.uniform(0.0, 1.0, size=n) ** (1.0 / k)
    r[n // 2:] = rho * 0.999           # stress the fringe with half the draws
    T = T + U * r[:, None]
    return hp.to_ambient(T)


def find_rho(P: Polytope, form: Form, *, grid=None, n_per_vertex: int = 400,
             seed: int = 0) -> float | None:
    """Smallest grid rho whose reflected outer cones avoid {form >= 0}.

    For each vertex v, samples of (v - S_rho(P,v)) at distances in
    [1e-6, 2] * diam from v must give a negative value.
    """
    form = as_form(form)
    if grid is None:
        grid = [2.0 ** (-j) * P.diameter for j in range(10, 0, -1)]
    else:
        grid = sorted(grid)
    for rho in grid:
        ok = True
        for vi in range(P.n_vertices):
            Y = _sample_outer_cone_sections(P, vi, rho, n_per_vertex,
                                            seed + 31 * vi)
            rng = np.random.default_rng(seed + 31 * vi + 1)
            s = np.exp(rng.uniform(np.log(1e-6), np.log(2.0), len(Y)))
            s *= P.diameter
            dirs = Y / np.linalg.norm(Y, axis=1)[:, None]
            X = P.vertices[vi] - dirs * s[:, None]
            if float(form.values(X).max()) >= 0.0:
                ok = False
                break
        if ok:
            return float(rho)
    return None


def find_cone_rho(P: Polytope, vi: int, b_form: Form, *, grid=None,
                  n: int = 1000, seed: int = 0) -> float | None:
    """Smallest grid rho such that the vertex cone polynomial is negative on
    sampled directions outside v +- S_rho(P, v)."""
    b_form = as_form(b_form)
    if grid is None:
        grid = [2.0 ** (-j) * P.diameter for j in range(10, 0, -1)]
    else:
        grid = sorted(grid)
    rng = np.random.default_rng(seed)
    Z = np.vstack([unit_directions(P.dim, n // 2),
                   rng.normal(size=(n - n // 2, P.dim))])
    Z /= np.linalg.norm(Z, axis=1)[:, None]
    v = P.vertices[vi]
    radii = np.exp(rng.uniform(np.log(1e-3), np.log(2.0), len(Z)))
    radii *= P.diameter
    for rho in grid:
        X = v + Z * radii[:, None]
        inside = (in_outer_cone_batch(P, vi, rho, X)
                  | in_outer_cone_batch(P, vi, rho, 2 * v - X))
        Xo = X[~inside]
        if len(Xo) == 0:
            continue
        if float(b_form.values(Xo).max()) < 0.0:
            return float(rho)
    return None


# ---------------------------------------------------------------------------
# neighborhood cover


def check_u_cover(P: Polytope, eps: float, rho: float, n: int,
                  seed: int = 0) -> CertReport:
    """Every sampled point of P and of a small inflation of P must carry at
    least one neighborhood-region tag.

    The binding inflation radius is 1e-3 times the diameter; a second,
    larger radius is probed diagnostically, and the largest covered radius
    from a short grid is reported in the metadata.  How far the cover
    extends past the boundary depends on the cone width rho, so the large
    radius can legitimately fail for small rho.
    """
    checks: dict[str, CheckResult] = {}
    Xi = sample_interior(P, n, seed)
    tags = has_region_tag_batch(P, eps, rho, Xi)
    wit = Xi[~tags][0].tolist() if (~tags).any() else None
    checks["cover_polytope"] = CheckResult(bool(tags.all()), float(tags.mean()),
                                           wit, len(Xi))

    def inflated_check(delta, sub_seed):
        Xd = sample_inflated(P, n, delta, sub_seed)
        td = has_region_tag_batch(P, eps, rho, Xd)
        w = Xd[~td][0].tolist() if (~td).any() else None
        # boundary-biased stress: offsets straight out of the facets
        rng = np.random.default_rng(sub_seed + 13)
        base = [sample_face(P, frozenset(P.facet_vertices[j]),
                            max(10, n // (10 * P.n_facets)), sub_seed + 29 + j)
                for j in range(P.n_facets)]
        B = np.vstack(base)
        U = rng.normal(size=B.shape)
        U /= np.linalg.norm(U, axis=1)[:, None]
        Xb = B + U * (delta * rng.uniform(0.0, 1.0, (len(B), 1)))
        Xb = Xb[P.distance_batch(Xb) <= delta]
        tb = has_region_tag_batch(P, eps, rho, Xb)
        if w is None and (~tb).any():
            w = Xb[~tb][0].tolist()
        ok = bool(td.all()) and bool(tb.all())
        frac = min(float(td.mean()), float(tb.mean()))
        return ok, frac, w, len(Xd) + len(Xb)

    ok, frac, wit, cnt = inflated_check(1e-3 * P.diameter, seed + 7)
    checks["cover_inflated"] = CheckResult(ok, frac, wit, cnt)
    ok2, frac2, wit2, cnt2 = inflated_check(1e-2 * P.diameter, seed + 8)
    checks["cover_inflated_wide"] = CheckResult(ok2, frac2, wit2, cnt2,
                                                note="diagnostic")
    found = 0.0
    for mult in (1e-2, 3e-3, 1e-3):
        okg, _, _, _ = inflated_check(mult * P.diameter, seed + 9)
        if okg:
            found = mult * P.diameter
            break
    return CertReport.from_checks(
        checks, {"n": n}, {"eps": eps, "rho": rho}, seed,
        meta={"covered_delta": found})
