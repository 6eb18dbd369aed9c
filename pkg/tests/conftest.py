import itertools
import json

import numpy as np
import pytest

from polyrep import from_halfspaces


SQRT3 = np.sqrt(3.0)


def octahedron_halfspaces():
    return [((np.array(s) / SQRT3).tolist(), 1.0 / SQRT3)
            for s in itertools.product([1, -1], repeat=3)]


def cube_halfspaces():
    return [([1, 0, 0], 1), ([-1, 0, 0], 1), ([0, 1, 0], 1),
            ([0, -1, 0], 1), ([0, 0, 1], 1), ([0, 0, -1], 1)]


def tetrahedron_halfspaces():
    return [([-1, 0, 0], 0), ([0, -1, 0], 0), ([0, 0, -1], 0),
            ((np.array([1, 1, 1]) / SQRT3).tolist(), 1.0 / SQRT3)]


def square_halfspaces():
    return [([1, 0], 1), ([-1, 0], 0), ([0, 1], 1), ([0, -1], 0)]


def triangle_halfspaces():
    return [([-1, 0], 0), ([0, -1], 0),
            ((np.array([1, 1]) / np.sqrt(2)).tolist(), 1.0 / np.sqrt(2))]


def pentagon_halfspaces():
    angles = [2 * np.pi * i / 5 + np.pi / 2 for i in range(5)]
    verts = np.array([[np.cos(a), np.sin(a)] for a in angles])
    hs = []
    for i in range(5):
        p, q = verts[i], verts[(i + 1) % 5]
        n = np.array([q[1] - p[1], -(q[0] - p[0])])
        n = n / np.linalg.norm(n)
        if n @ (p + q) < 0:
            n = -n
        hs.append((n.tolist(), float(n @ p)))
    return hs


@pytest.fixture(scope="session")
def octahedron():
    return from_halfspaces(3, octahedron_halfspaces())


@pytest.fixture(scope="session")
def cube():
    return from_halfspaces(3, cube_halfspaces())


@pytest.fixture(scope="session")
def tetrahedron():
    return from_halfspaces(3, tetrahedron_halfspaces())


@pytest.fixture(scope="session")
def square():
    return from_halfspaces(2, square_halfspaces())


@pytest.fixture(scope="session")
def triangle():
    return from_halfspaces(2, triangle_halfspaces())


@pytest.fixture(scope="session")
def pentagon():
    return from_halfspaces(2, pentagon_halfspaces())


def write_polytope_json(path, dim, halfspaces):
    payload = {"dim": dim,
               "halfspaces": [{"a": list(np.asarray(a, dtype=float)),
                               "b": float(b)} for a, b in halfspaces]}
    path.write_text(json.dumps(payload))
    return path


def vertex_index(P, point, tol=1e-8):
    d = np.linalg.norm(P.vertices - np.asarray(point, dtype=float), axis=1)
    i = int(d.argmin())
    assert d[i] <= tol, f"no vertex near {point}"
    return i
