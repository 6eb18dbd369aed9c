"""Polytope and cone geometry in ambient dimension at most 3.

Polyhedra come in as halfspace systems <a,x> <= b.  Vertex enumeration is
brute force over d-subsets of the bounding hyperplanes, which is entirely
adequate at the scale this package targets and keeps the geometry free of
external solver dependencies.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .poly import Polynomial


class GeometryError(ValueError):
    pass


class DegenerateInputError(GeometryError):
    """Empty or lower-dimensional intersection."""


class UnboundedInputError(GeometryError):
    """The halfspace system describes an unbounded polyhedron."""


class HeuristicFailureError(GeometryError):
    """A deterministic search (e.g. for a bounded cross-section) ran out."""


class Halfspace:
    """The closed halfspace {x : <a,x> <= b}, stored with a unit normal."""

    __slots__ = ("a", "b")

    def __init__(self, a, b: float):
        a = np.asarray(a, dtype=float)
        n = float(np.linalg.norm(a))
        if n <= 0.0:
            raise GeometryError("halfspace normal must be nonzero")
        self.a = a / n
        self.b = float(b) / n

    def __repr__(self):
        return f"Halfspace(a={self.a}, b={self.b})"


# ---------------------------------------------------------------------------
# small metric helpers


def _orthonormal_complement(u: np.ndarray) -> np.ndarray:
    """Columns form an orthonormal basis of the hyperplane orthogonal to u."""
    u = u / np.linalg.norm(u)
    _, _, vt = np.linalg.svd(u.reshape(1, -1), full_matrices=True)
    return vt[1:].T


def _affine_rank(points: np.ndarray, tol_scale: float = 1.0) -> int:
    if len(points) <= 1:
        return 0
    centered = points - points.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    return int(np.sum(sv > 1e-7 * max(1.0, tol_scale)))


def segment_distance_batch(X: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Distances from rows of X to the segment [p, q]."""
    d = q - p
    L2 = float(d @ d)
    if L2 <= 0.0:
        return np.linalg.norm(X - p, axis=1)
    t = np.clip((X - p) @ d / L2, 0.0, 1.0)
    proj = p + t[:, None] * d
    return np.linalg.norm(X - proj, axis=1)


def _recession_candidates(A: np.ndarray, dim: int) -> list[np.ndarray]:
    cands: list[np.ndarray] = []
    if dim == 1:
        cands = [np.array([1.0]), np.array([-1.0])]
    elif dim == 2:
        for a in A:
            r = np.array([-a[1], a[0]])
            cands.append(r)
            cands.append(-r)
    else:
        for i, j in combinations(range(len(A)), 2):
            c = np.cross(A[i], A[j])
            n = np.linalg.norm(c)
            if n > 1e-12:
                cands.append(c / n)
                cands.append(-c / n)
    return cands


def _find_recession_direction(A: np.ndarray, dim: int) -> np.ndarray | None:
    """A unit u with Au <= 0, or None when the system is bounded."""
    if len(A) == 0:
        return np.zeros(dim)
    sv = np.linalg.svd(A, compute_uv=False)
    if len(A) < dim or sv[-1] < 1e-10:
        _, _, vt = np.linalg.svd(A, full_matrices=True)
        return vt[-1]
    for u in _recession_candidates(A, dim):
        if np.all(A @ u <= 1e-12):
            return u
    return None


def recession_rays(A: np.ndarray, dim: int) -> list[np.ndarray]:
    """Generators of the pointed cone {u : Au <= 0} (lineality must be trivial)."""
    rays = []
    for u in _recession_candidates(A, dim):
        if np.all(A @ u <= 1e-12):
            if not any(np.linalg.norm(u - r) < 1e-9 for r in rays):
                rays.append(u)
    return rays


# ---------------------------------------------------------------------------
# polytope


class Polytope:
    """Bounded full-dimensional polyhedron with enumerated face data.

    Built through :func:`from_halfspaces`; fields are never mutated after
    construction, so instances are safe to share across workers.
    """

    def __init__(self, dim, halfspaces, vertices, vertex_facets, edges,
                 edge_facets, facet_vertices):
        self.dim = dim
        self.halfspaces = halfspaces
        self.vertices = vertices                  # (nv, dim)
        self.vertex_facets = vertex_facets        # list of frozenset facet ids
        self.edges = edges                        # list of (i, j), dim == 3 only
        self.edge_facets = edge_facets            # list of frozenset facet ids
        self.facet_vertices = facet_vertices      # list of vertex-id lists
        self.A = np.array([h.a for h in halfspaces])
        self.b = np.array([h.b for h in halfspaces])
        diffs = vertices[:, None, :] - vertices[None, :, :]
        self.diameter = float(np.sqrt((diffs ** 2).sum(axis=2).max()))
        self.centroid = vertices.mean(axis=0)
        # support value of each facet recomputed from the vertex set
        self.facet_support = np.array(
            [max(self.vertices[list(vs)] @ h.a) for h, vs in
             zip(halfspaces, facet_vertices)])
        self._vertex_figures: dict[int, "HyperplanePolytope"] = {}
        self._vertex_normals: dict[int, np.ndarray] = {}

    # -- basic queries ------------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_facets(self):
        return len(self.halfspaces)

    def bounding_box(self, margin: float = 0.0):
        lo = self.vertices.min(axis=0) - margin
        hi = self.vertices.max(axis=0) + margin
        return lo, hi

    def contains_batch(self, X, tol: float | None = None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if tol is None:
            tol = 1e-9 * max(1.0, self.diameter)
        return np.all(X @ self.A.T - self.b <= tol, axis=1)

    def contains(self, x, tol: float | None = None) -> bool:
        return bool(self.contains_batch(np.asarray(x, dtype=float).reshape(1, -1),
                                        tol)[0])

    def inner_margin_batch(self, X) -> np.ndarray:
        """min_F (b_F - <a_F, x>): distance to the boundary for inside points."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return (self.b - X @ self.A.T).min(axis=1)

    def boundary_distance_batch(self, X) -> np.ndarray:
        """Distance to the boundary surface, valid inside and outside."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        best = np.full(X.shape[0], np.inf)
        for j in range(self.n_facets):
            best = np.minimum(best, self._facet_distance_batch(X, j))
        return best

    def distance_batch(self, X) -> np.ndarray:
        """Distance to the polytope (zero inside)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = self.boundary_distance_batch(X)
        out[self.contains_batch(X)] = 0.0
        return out

    def _facet_distance_batch(self, X, j: int) -> np.ndarray:
        vs = self.facet_vertices[j]
        W = self.vertices[vs]
        if self.dim == 1:
            return np.abs(X[:, 0] - W[0, 0])
        if self.dim == 2:
            return segment_distance_batch(X, W[0], W[-1])
        u = self.A[j]
        h = self.facet_support[j]
        s = X @ u - h
        proj = X - s[:, None] * u
        w0 = W[0]
        t1 = W[1] - w0
        t1 = t1 / np.linalg.norm(t1)
        t2 = np.cross(u, t1)
        P2 = np.stack([(proj - w0) @ t1, (proj - w0) @ t2], axis=1)
        V2 = np.stack([(W - w0) @ t1, (W - w0) @ t2], axis=1)
        inside = np.ones(len(P2), dtype=bool)
        sgn = 0.0
        for i in range(len(V2)):
            p, q = V2[i], V2[(i + 1) % len(V2)]
            e = q - p
            cr = e[0] * (P2[:, 1] - p[1]) - e[1] * (P2[:, 0] - p[0])
            if sgn == 0.0:
                ref = e[0] * (V2[:, 1].mean() - p[1]) - e[1] * (V2[:, 0].mean() - p[0])
                sgn = 1.0 if ref >= 0 else -1.0
            inside &= (sgn * cr >= -1e-12)
        d2 = np.full(len(P2), np.inf)
        for i in range(len(V2)):
            p, q = V2[i], V2[(i + 1) % len(V2)]
            d2 = np.minimum(d2, segment_distance_batch(P2, p, q))
        d2[inside] = 0.0
        return np.sqrt(s * s + d2 * d2)

    # -- anchor points used for scaling and probes ---------------------------

    def edge_midpoints(self) -> np.ndarray:
        if self.dim == 3:
            pairs = self.edges
        elif self.dim == 2:
            pairs = [tuple(vs) for vs in self.facet_vertices]
        else:
            return np.zeros((0, self.dim))
        return np.array([(self.vertices[i] + self.vertices[j]) / 2
                         for i, j in pairs])

    def facet_centroids(self) -> np.ndarray:
        return np.array([self.vertices[list(vs)].mean(axis=0)
                         for vs in self.facet_vertices])

    def anchor_points(self) -> np.ndarray:
        pts = [self.vertices, self.centroid.reshape(1, -1),
               (self.vertices + self.centroid) / 2.0]
        mids = self.edge_midpoints()
        if len(mids):
            pts.append(mids)
        pts.append(self.facet_centroids())
        return np.vstack(pts)

    def euler_characteristic(self) -> int:
        if self.dim == 3:
            return self.n_vertices - len(self.edges) + self.n_facets
        if self.dim == 2:
            return self.n_vertices - self.n_facets
        return self.n_vertices

    def __repr__(self):
        return (f"Polytope(dim={self.dim}, V={self.n_vertices}, "
                f"F={self.n_facets}, diam={self.diameter:.6g})")


def from_halfspaces(dim: int, halfspaces, *, _allow_dim1: bool = True) -> Polytope:
    """Build a Polytope from halfspaces <a,x> <= b.

    Raises UnboundedInputError for unbounded systems and
    DegenerateInputError when the intersection is empty or not
    full-dimensional.
    """
    if dim not in (1, 2, 3):
        raise GeometryError(f"ambient dimension must be 1, 2 or 3, got {dim}")
    hs = [h if isinstance(h, Halfspace) else Halfspace(*h) for h in halfspaces]
    if not hs:
        raise UnboundedInputError("no halfspaces given")
    A = np.array([h.a for h in hs])
    b = np.array([h.b for h in hs])
    if any(h.a.shape != (dim,) for h in hs):
        raise GeometryError("halfspace normal has wrong dimension")

    u = _find_recession_direction(A, dim)
    if u is not None:
        raise UnboundedInputError(
            f"system admits recession direction {np.round(u, 6)}")

    candidates = []
    for subset in combinations(range(len(hs)), dim):
        M = A[list(subset)]
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        x = np.linalg.solve(M, b[list(subset)])
        feas = 1e-9 * (1.0 + np.linalg.norm(x))
        if np.all(A @ x - b <= feas):
            candidates.append(x)
    if not candidates:
        raise DegenerateInputError("halfspace intersection has no vertices")

    candidates.sort(key=lambda v: tuple(v))
    vertices: list[np.ndarray] = []
    for x in candidates:
        merge = 1e-8 * (1.0 + np.linalg.norm(x))
        if not any(np.linalg.norm(x - v) <= merge for v in vertices):
            vertices.append(x)
    V = np.array(vertices)
    scale = float(np.abs(V).max())
    if _affine_rank(V, scale) < dim:
        raise DegenerateInputError(
            "intersection is empty or lower-dimensional")

    # facet = halfspace active on >= dim affinely independent vertices
    atol = 1e-9 * max(1.0, scale)
    keep: list[int] = []
    active_sets: list[frozenset[int]] = []
    for i in range(len(hs)):
        act = frozenset(np.nonzero(np.abs(V @ A[i] - b[i]) <= atol)[0])
        if len(act) < dim:
            continue
        if _affine_rank(V[list(act)], scale) != dim - 1:
            continue
        dup = False
        for k in keep:
            if np.linalg.norm(A[i] - A[k]) < 1e-9 and abs(b[i] - b[k]) < atol:
                dup = True
                break
        if dup:
            continue
        keep.append(i)
        active_sets.append(act)

    facets = [hs[i] for i in keep]
    vertex_facets = [frozenset(j for j, act in enumerate(active_sets) if i in act)
                     for i in range(len(V))]
    if any(len(vf) < dim for vf in vertex_facets):
        raise DegenerateInputError("vertex incident to fewer facets than dim")

    edges: list[tuple[int, int]] = []
    edge_facets: list[frozenset[int]] = []
    if dim == 3:
        for i, j in combinations(range(len(V)), 2):
            shared = vertex_facets[i] & vertex_facets[j]
            if len(shared) >= 2:
                edges.append((i, j))
                edge_facets.append(shared)

    facet_vertices: list[list[int]] = []
    for j, act in enumerate(active_sets):
        ids = sorted(act)
        if dim == 3:
            W = V[ids]
            c = W.mean(axis=0)
            t_basis = _orthonormal_complement(facets[j].a)
            ang = np.arctan2((W - c) @ t_basis[:, 1], (W - c) @ t_basis[:, 0])
            ids = [ids[k] for k in np.argsort(ang, kind="stable")]
        facet_vertices.append(ids)

    P = Polytope(dim, facets, V, vertex_facets, edges, edge_facets,
                 facet_vertices)
    if dim == 3 and P.euler_characteristic() != 2:
        raise GeometryError(
            f"face lattice inconsistent: V-E+F = {P.euler_characteristic()}")
    return P


# ---------------------------------------------------------------------------
# facet functionals, support data, face normals


def facet_form(P: Polytope, j: int) -> Polynomial:
    """Scaled affine facet functional: zero on facet j, in [0,1) on P."""
    if not 0 <= j < P.n_facets:
        raise GeometryError(f"facet index {j} out of range")
    u = P.A[j]
    h = P.facet_support[j]
    return Polynomial.affine(-u / P.diameter, h / P.diameter)


def facet_form_values(P: Polytope, X) -> np.ndarray:
    """All facet functional values at rows of X; shape (n, n_facets)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return (P.facet_support[None, :] - X @ P.A.T) / P.diameter


def support(P: Polytope, u) -> float:
    u = np.asarray(u, dtype=float)
    if not np.any(u):
        raise GeometryError("direction must be nonzero")
    return float((P.vertices @ u).max())


def exposed_face(P: Polytope, u) -> frozenset[int]:
    """Vertex indices of the face maximizing <x, u>."""
    u = np.asarray(u, dtype=float)
    if not np.any(u):
        raise GeometryError("direction must be nonzero")
    vals = P.vertices @ u
    h = vals.max()
    tol = 1e-9 * np.linalg.norm(u) * P.diameter
    return frozenset(np.nonzero(vals >= h - tol)[0])


def facets_containing(P: Polytope, G: frozenset[int]) -> frozenset[int]:
    out = None
    for v in G:
        out = P.vertex_facets[v] if out is None else out & P.vertex_facets[v]
    return out if out is not None else frozenset()


def face_normal(P: Polytope, G: frozenset[int]) -> np.ndarray:
    """Unit direction exposing the proper face with vertex set G."""
    if not G or len(G) == P.n_vertices:
        raise GeometryError("face must be proper and nonempty")
    incident = facets_containing(P, G)
    if not incident:
        raise GeometryError(f"vertex set {sorted(G)} is not a face")
    s = P.A[sorted(incident)].sum(axis=0)
    n = np.linalg.norm(s)
    if n <= 1e-12:
        raise GeometryError("facet normals of the face sum to zero")
    u = s / n
    if exposed_face(P, u) != G:
        raise GeometryError(f"direction does not expose the face {sorted(G)}")
    return u


def vertex_normal(P: Polytope, vi: int) -> np.ndarray:
    if vi not in P._vertex_normals:
        P._vertex_normals[vi] = face_normal(P, frozenset({vi}))
    return P._vertex_normals[vi]


# ---------------------------------------------------------------------------
# cones


@dataclass
class ConeRep:
    """H-representation of a polyhedral cone with a designated apex."""

    apex: np.ndarray
    halfspaces: list[Halfspace]
    label: str = "supporting"

    def __post_init__(self):
        self.apex = np.asarray(self.apex, dtype=float)
        if self.label == "supporting":
            for h in self.halfspaces:
                if abs(h.a @ self.apex - h.b) > 1e-9:
                    raise GeometryError("apex must lie on every cone facet")

    @property
    def dim(self):
        return self.apex.shape[0]

    def normals(self) -> np.ndarray:
        return np.array([h.a for h in self.halfspaces])


def supporting_cone(P: Polytope, vi: int) -> ConeRep:
    """S(P, v) in direction space: {z : <u_F, z> <= 0 for facets F at v}."""
    hs = [Halfspace(P.A[j], 0.0) for j in sorted(P.vertex_facets[vi])]
    return ConeRep(np.zeros(P.dim), hs, "supporting")


class HyperplanePolytope:
    """A polytope living on the hyperplane {x : <x,u> = 1} of R^ambient.

    Carries an orthonormal chart (origin + basis) plus the ambient facet
    data needed to write affine facet functionals directly in ambient
    coordinates.
    """

    def __init__(self, u: np.ndarray, poly: Polytope, origin: np.ndarray,
                 basis: np.ndarray):
        self.u = u
        self.poly = poly
        self.origin = origin
        self.basis = basis
        self.ambient_dim = u.shape[0]
        self.vertices_ambient = self.to_ambient(poly.vertices)
        # ambient unit facet normals, parallel to the hyperplane
        self.facet_normals = (basis @ poly.A.T).T
        self.facet_support = np.array(
            [float((self.vertices_ambient @ n).max()) for n in self.facet_normals])
        self.diameter = poly.diameter

    def to_chart(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return (X - self.origin) @ self.basis

    def to_ambient(self, T) -> np.ndarray:
        T = np.atleast_2d(np.asarray(T, dtype=float))
        return self.origin + T @ self.basis.T

    def facet_form_ambient(self, j: int) -> Polynomial:
        n = self.facet_normals[j]
        h = self.facet_support[j]
        return Polynomial.affine(-n / self.diameter, h / self.diameter)


def slice_cone(cone: ConeRep, u) -> HyperplanePolytope:
    """Cross-section of an apex-at-origin cone with {x : <x,u> = 1}."""
    u = np.asarray(u, dtype=float)
    nu = np.linalg.norm(u)
    if nu <= 0:
        raise GeometryError("slicing direction must be nonzero")
    origin = u / (nu * nu)
    basis = _orthonormal_complement(u)
    k = u.shape[0] - 1
    chart_hs = []
    for h in cone.halfspaces:
        a_c = basis.T @ h.a
        b_c = -float(h.a @ origin)
        if np.linalg.norm(a_c) <= 1e-12:
            if b_c >= -1e-12:
                continue   # satisfied on the whole hyperplane
            raise DegenerateInputError("hyperplane misses the cone")
        chart_hs.append(Halfspace(a_c, b_c))
    poly = from_halfspaces(k, chart_hs)
    return HyperplanePolytope(u, poly, origin, basis)


def vertex_figure(P: Polytope, vi: int) -> HyperplanePolytope:
    """Cross-section of the supporting cone at vertex vi, in direction space.

    Lives on {z : <z, u_v> = -1}, written as <z, -u_v> = 1.
    """
    if vi in P._vertex_figures:
        return P._vertex_figures[vi]
    uv = vertex_normal(P, vi)
    cone = supporting_cone(P, vi)
    hp = slice_cone(cone, -uv)
    P._vertex_figures[vi] = hp
    return hp


def in_outer_cone_batch(P: Polytope, vi: int, rho: float, X,
                        strict_interior: bool = False) -> np.ndarray:
    """Membership of x - v in the rho-outer approximation of S(P, v).

    With strict_interior=True, tests the open interior instead (the apex is
    then excluded).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    v = P.vertices[vi]
    uv = vertex_normal(P, vi)
    hp = vertex_figure(P, vi)
    Z = X - v
    t = Z @ uv
    nz = np.linalg.norm(Z, axis=1)
    apex = nz <= 1e-14 * max(1.0, P.diameter)
    out = np.zeros(X.shape[0], dtype=bool)
    below = t < 0
    if np.any(below):
        Y = Z[below] / (-t[below])[:, None]
        T = hp.to_chart(Y)
        dist = hp.poly.distance_batch(T)
        out[below] = dist < rho if strict_interior else dist <= rho
    if strict_interior:
        out[apex] = False
    else:
        out[apex] = True
    return out


def in_outer_cone(P: Polytope, vi: int, rho: float, x) -> bool:
    return bool(in_outer_cone_batch(P, vi, rho,
                                    np.asarray(x, dtype=float).reshape(1, -1))[0])


# ---------------------------------------------------------------------------
# visibility and neighborhood regions


def visible_facets_batch(P: Polytope, X) -> np.ndarray:
    """Boolean matrix (n, n_facets): facet functional <= 1e-12 * diam."""
    Q = facet_form_values(P, X)
    return Q <= 1e-12 * P.diameter


def visible_facets(P: Polytope, x) -> frozenset[int]:
    mask = visible_facets_batch(P, np.asarray(x, dtype=float).reshape(1, -1))[0]
    return frozenset(np.nonzero(mask)[0])


def region_membership(P: Polytope, eps: float, rho: float, x) -> set[tuple]:
    """Tags of every neighborhood region containing x (3-polytopes only).

    Tags: ("P",), ("F", facet), ("I", edge), ("v", vertex),
    ("v'", vertex).  Boundary ties resolve inclusively.
    """
    masks = region_masks(P, eps, rho, np.asarray(x, dtype=float).reshape(1, -1))
    return {tag for tag, m in masks.items() if m[0]}


def region_masks(P: Polytope, eps: float, rho: float, X) -> dict[tuple, np.ndarray]:
    if P.dim != 3:
        raise GeometryError("neighborhood regions are defined for 3-polytopes")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[0]
    mtol = 1e-12 * P.diameter
    masks: dict[tuple, np.ndarray] = {}
    masks[("P",)] = P.contains_batch(X, mtol)
    vis = visible_facets_batch(P, X)
    nvis = vis.sum(axis=1)
    for j in range(P.n_facets):
        masks[("F", j)] = vis[:, j] & (nvis == 1)

    in_outer = np.ones(n, dtype=bool)
    per_vertex_outer = []
    per_vertex_int_plus = []
    per_vertex_int_minus = []
    for vi in range(P.n_vertices):
        outer = in_outer_cone_batch(P, vi, rho, X)
        per_vertex_outer.append(outer)
        in_outer &= outer
        per_vertex_int_plus.append(
            in_outer_cone_batch(P, vi, rho, X, strict_interior=True))
        refl = 2.0 * P.vertices[vi] - X
        per_vertex_int_minus.append(
            in_outer_cone_batch(P, vi, rho, refl, strict_interior=True))

    for ei, (i, j) in enumerate(P.edges):
        near = segment_distance_batch(X, P.vertices[i], P.vertices[j]) <= eps
        fac = sorted(P.edge_facets[ei])
        vis_both = np.all(vis[:, fac], axis=1)
        masks[("I", ei)] = near & vis_both & in_outer

    for vi in range(P.n_vertices):
        near = np.linalg.norm(X - P.vertices[vi], axis=1) <= eps
        mv = near & ~per_vertex_int_plus[vi]
        masks[("v", vi)] = mv
        masks[("v'", vi)] = mv & ~per_vertex_int_minus[vi]
    return masks


def has_region_tag_batch(P: Polytope, eps: float, rho: float, X) -> np.ndarray:
    masks = region_masks(P, eps, rho, X)
    out = np.zeros(np.atleast_2d(X).shape[0], dtype=bool)
    for m in masks.values():
        out |= m
    return out


# ---------------------------------------------------------------------------
# lineality decomposition and homogenization


@dataclass
class LinealityDecomposition:
    """P = Q + L with L the lineality space and Q line-free in a chart of L-perp."""

    dim: int
    lineality_basis: np.ndarray          # (dim, n_lines), orthonormal
    chart_basis: np.ndarray              # (dim, chart_dim), orthonormal
    chart_halfspaces: list[Halfspace]
    chart_dim: int
    bounded: bool
    polytope: Polytope | None            # built when bounded
    recession_rays: list[np.ndarray] = field(default_factory=list)

    def project_chart(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return X @ self.chart_basis

    def chart_contains_batch(self, T, tol: float = 1e-9) -> np.ndarray:
        T = np.atleast_2d(np.asarray(T, dtype=float))
        A = np.array([h.a for h in self.chart_halfspaces])
        b = np.array([h.b for h in self.chart_halfspaces])
        return np.all(T @ A.T - b <= tol, axis=1)


def decompose(dim: int, halfspaces) -> LinealityDecomposition:
    """Split a polyhedron along its lineality space."""
    hs = [h if isinstance(h, Halfspace) else Halfspace(*h) for h in halfspaces]
    if not hs:
        raise DegenerateInputError("empty halfspace system")
    A = np.array([h.a for h in hs])
    b = np.array([h.b for h in hs])
    U, sv, Vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0] if len(sv) else 1.0)))
    W = Vt[:rank].T                      # chart of L-perp
    L = Vt[rank:].T                      # lineality space
    chart_hs = [Halfspace(W.T @ h.a, h.b) for h in hs]
    k = rank
    if k == 0:
        raise DegenerateInputError("system has no constraints after reduction")
    A_c = np.array([h.a for h in chart_hs])
    bounded = _find_recession_direction(A_c, k) is None
    poly = None
    rays: list[np.ndarray] = []
    if bounded:
        poly = from_halfspaces(k, chart_hs)
    else:
        # feasibility probe: line-free chart system must still have a vertex
        rays = recession_rays(A_c, k)
    return LinealityDecomposition(dim, L, W, chart_hs, k, bounded, poly, rays)


def homogenization_cone(chart_halfspaces, chart_dim: int) -> ConeRep:
    """hom(P) for P given in a chart, embedded at height 1 in R^(k+1).

    Each <a,y> <= b becomes <a, x_1..k> - b x_(k+1) <= 0, plus the closure
    facet x_(k+1) >= 0.
    """
    k = chart_dim
    hs = []
    for h in chart_halfspaces:
        a = np.concatenate([h.a, [-h.b]])
        hs.append(Halfspace(a, 0.0))
    tail = np.zeros(k + 1)
    tail[-1] = -1.0
    hs.append(Halfspace(tail, 0.0))
    return ConeRep(np.zeros(k + 1), hs, "hom")


def cross_section(cone: ConeRep, direction=None, max_tries: int = 50) -> HyperplanePolytope:
    """Bounded hyperplane section of a pointed cone.

    The default direction is the negated, normalized sum of the facet
    normals; if the section comes out unbounded (possible only through
    numerical degeneracy) a deterministic perturbation sequence is tried.
    """
    A = cone.normals()
    base = -A.sum(axis=0)
    n = np.linalg.norm(base)
    if n <= 1e-12:
        raise HeuristicFailureError("facet normals sum to zero; cone not pointed?")
    base = base / n
    if direction is not None:
        base = np.asarray(direction, dtype=float)
        base = base / np.linalg.norm(base)
    d = base.shape[0]
    for t in range(max_tries):
        if t == 0:
            u = base
        else:
            delta = np.zeros(d)
            axis = (t - 1) % d
            delta[axis] = 0.05 * ((t - 1) // d + 1) * (1 if t % 2 else -1)
            u = base + delta
            u = u / np.linalg.norm(u)
        try:
            return slice_cone(cone, u)
        except (UnboundedInputError, DegenerateInputError):
            continue
    raise HeuristicFailureError(
        f"no bounded cross-section found after {max_tries} directions")
