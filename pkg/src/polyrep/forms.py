"""Evaluation forms: composite polynomial recipes.

High-parameter constructions blow past any reasonable expanded-term budget
and also lose precision when expanded (huge alternating coefficients).  A
Form is a small expression tree over affine atoms that evaluates the same
polynomial directly: values in batch, exact gradients and Hessians by
forward differentiation, and integer degree/homogeneity bookkeeping.
"""
from __future__ import annotations

import numpy as np

from .poly import Polynomial, DimensionMismatch


class Form:
    """Abstract polynomial-valued expression in ``dim`` variables."""

    dim: int

    def value(self, x) -> float:
        return float(self.values(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def values(self, X, dtype=np.float64) -> np.ndarray:
        raise NotImplementedError

    def magnitude_envelope(self, X, dtype=np.float64) -> np.ndarray:
        """Local magnitude scale of the evaluation: |value| plus a
        first-order bound on accumulated cancellation, so that the true
        floating-point error is about machine epsilon times this number."""
        return self.value_env(X, dtype=dtype)[1]

    def value_env(self, X, dtype=np.float64):
        """(values, magnitude envelopes) in one traversal."""
        raise NotImplementedError

    def value_grad_hess(self, x):
        raise NotImplementedError

    def gradient_at(self, x) -> np.ndarray:
        return self.value_grad_hess(x)[1]

    def hessian_at(self, x) -> np.ndarray:
        return self.value_grad_hess(x)[2]

    def degree(self) -> int:
        raise NotImplementedError

    def homogeneous_degree(self) -> int | None:
        """Degree if structurally homogeneous, else None."""
        raise NotImplementedError

    def is_homogeneous(self) -> bool:
        return self.homogeneous_degree() is not None

    def is_even_degree(self) -> bool:
        d = self.degree()
        return d >= 0 and d % 2 == 0

    def to_payload(self) -> dict:
        raise NotImplementedError

    def scaled(self, c: float) -> "Form":
        return LinComb(self.dim, [(float(c), self)], 0.0)

    def _check_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"point shape {x.shape}, expected ({self.dim},)")
        return x


class PolyForm(Form):
    """A fully expanded polynomial used through the Form interface."""

    def __init__(self, poly: Polynomial):
        self.poly = poly
        self.dim = poly.dim

    def values(self, X, dtype=np.float64):
        return self.poly.eval_batch(X, dtype=dtype)

    def value_env(self, X, dtype=np.float64):
        return (self.poly.eval_batch(X, dtype=dtype),
                self.poly.magnitude_envelope(X, dtype=dtype))

    def value_grad_hess(self, x):
        x = self._check_x(x)
        return self.poly.value_grad_hess(x)

    def degree(self):
        return self.poly.degree()

    def homogeneous_degree(self):
        if self.poly.is_zero():
            return None
        return self.poly.degree() if self.poly.is_homogeneous() else None

    def to_payload(self):
        return {"kind": "terms", **self.poly.to_payload()}


class AffineForm(Form):
    """<a, x> + c."""

    def __init__(self, a, c: float = 0.0):
        self.a = np.asarray(a, dtype=float)
        self.c = float(c)
        self.dim = self.a.shape[0]

    def values(self, X, dtype=np.float64):
        X = np.asarray(X, dtype=dtype)
        return X @ self.a.astype(dtype) + dtype(self.c)

    def value_env(self, X, dtype=np.float64):
        X = np.asarray(X, dtype=dtype)
        vals = X @ self.a.astype(dtype) + dtype(self.c)
        envs = np.abs(X) @ np.abs(self.a).astype(dtype) + dtype(abs(self.c))
        return vals, envs

    def value_grad_hess(self, x):
        x = self._check_x(x)
        return float(self.a @ x + self.c), self.a.copy(), np.zeros((self.dim, self.dim))

    def degree(self):
        if np.any(self.a):
            return 1
        return 0 if self.c != 0.0 else -1

    def homogeneous_degree(self):
        if np.any(self.a):
            return 1 if self.c == 0.0 else None
        return None

    def to_payload(self):
        return {"kind": "affine", "a": [float(v) for v in self.a], "c": self.c}


class PowForm(Form):
    """base ** n for integer n >= 0."""

    def __init__(self, base: Form, n: int):
        if n < 0 or int(n) != n:
            raise ValueError(f"exponent must be a nonnegative integer, got {n}")
        self.base = base
        self.n = int(n)
        self.dim = base.dim

    def values(self, X, dtype=np.float64):
        if self.n == 0:
            return np.ones(np.asarray(X).shape[0], dtype=dtype)
        with np.errstate(over="ignore", invalid="ignore"):
            return self.base.values(X, dtype=dtype) ** self.n

    def value_env(self, X, dtype=np.float64):
        if self.n == 0:
            ones = np.ones(np.asarray(X).shape[0], dtype=dtype)
            return ones, ones.copy()
        v, e = self.base.value_env(X, dtype=dtype)
        with np.errstate(over="ignore", invalid="ignore"):
            av = np.abs(v)
            val = v ** self.n
            env = self.n * av ** (self.n - 1) * e + np.abs(val)
        return val, env

    def value_grad_hess(self, x):
        n = self.n
        d = self.dim
        if n == 0:
            return 1.0, np.zeros(d), np.zeros((d, d))
        v, g, H = self.base.value_grad_hess(x)
        if n == 1:
            return v, g, H
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.float64(v)
            vn1 = v ** (n - 1)
            vn2 = v ** (n - 2)
            val = float(vn1 * v)
            grad = n * vn1 * g
            hess = n * vn1 * H + n * (n - 1) * vn2 * np.outer(g, g)
        return val, grad, hess

    def degree(self):
        b = self.base.degree()
        if self.n == 0:
            return 0
        return -1 if b < 0 else b * self.n

    def homogeneous_degree(self):
        if self.n == 0:
            return 0
        b = self.base.homogeneous_degree()
        return None if b is None else b * self.n

    def to_payload(self):
        return {"kind": "pow", "n": self.n, "base": self.base.to_payload()}


class LinComb(Form):
    """const + sum of weight * form."""

    def __init__(self, dim: int, parts: list[tuple[float, Form]], const: float = 0.0):
        self.dim = dim
        self.parts = [(float(w), f) for w, f in parts]
        for _, f in self.parts:
            if f.dim != dim:
                raise DimensionMismatch("mixed dimensions in linear combination")
        self.const = float(const)

    def values(self, X, dtype=np.float64):
        X = np.asarray(X, dtype=dtype)
        out = np.full(X.shape[0], dtype(self.const), dtype=dtype)
        with np.errstate(over="ignore", invalid="ignore"):
            for w, f in self.parts:
                out += dtype(w) * f.values(X, dtype=dtype)
        return out

    def value_env(self, X, dtype=np.float64):
        X = np.asarray(X, dtype=dtype)
        vals = np.full(X.shape[0], dtype(self.const), dtype=dtype)
        envs = np.full(X.shape[0], dtype(abs(self.const)), dtype=dtype)
        for w, f in self.parts:
            v, e = f.value_env(X, dtype=dtype)
            vals += dtype(w) * v
            envs += dtype(abs(w)) * (e + np.abs(v))
        return vals, envs

    def value_grad_hess(self, x):
        d = self.dim
        val = self.const
        grad = np.zeros(d)
        hess = np.zeros((d, d))
        for w, f in self.parts:
            v, g, H = f.value_grad_hess(x)
            val += w * v
            grad += w * g
            hess += w * H
        return val, grad, hess

    def degree(self):
        # upper bound: exact cancellation of leading terms is not tracked
        degs = [f.degree() for w, f in self.parts if w != 0.0]
        degs.append(0 if self.const != 0.0 else -1)
        return max(degs)

    def homogeneous_degree(self):
        degs = {f.homogeneous_degree() for w, f in self.parts if w != 0.0}
        if self.const != 0.0:
            degs.add(0)
        if len(degs) == 1 and None not in degs:
            return degs.pop()
        return None

    def to_payload(self):
        return {"kind": "lincomb", "const": self.const,
                "parts": [[w, f.to_payload()] for w, f in self.parts]}


class ProductForm(Form):
    def __init__(self, factors: list[Form]):
        if not factors:
            raise ValueError("product needs at least one factor")
        self.factors = list(factors)
        self.dim = factors[0].dim
        for f in factors:
            if f.dim != self.dim:
                raise DimensionMismatch("mixed dimensions in product")

    def values(self, X, dtype=np.float64):
        out = self.factors[0].values(X, dtype=dtype).copy()
        with np.errstate(over="ignore", invalid="ignore"):
            for f in self.factors[1:]:
                out *= f.values(X, dtype=dtype)
        return out

    def value_env(self, X, dtype=np.float64):
        v, e = self.factors[0].value_env(X, dtype=dtype)
        v = v.copy()
        e = e.copy()
        with np.errstate(over="ignore", invalid="ignore"):
            for f in self.factors[1:]:
                v2, e2 = f.value_env(X, dtype=dtype)
                e = np.abs(v) * e2 + np.abs(v2) * e + np.abs(v * v2)
                v = v * v2
        return v, e

    def value_grad_hess(self, x):
        v, g, H = self.factors[0].value_grad_hess(x)
        with np.errstate(over="ignore", invalid="ignore"):
            for f in self.factors[1:]:
                v2, g2, H2 = f.value_grad_hess(x)
                H = v * H2 + v2 * H + np.outer(g, g2) + np.outer(g2, g)
                g = v * g2 + v2 * g
                v = float(np.float64(v) * np.float64(v2))
        return v, g, H

    def degree(self):
        degs = [f.degree() for f in self.factors]
        if any(d < 0 for d in degs):
            return -1
        return sum(degs)

    def homogeneous_degree(self):
        degs = [f.homogeneous_degree() for f in self.factors]
        if any(d is None for d in degs):
            return None
        return sum(degs)

    def to_payload(self):
        return {"kind": "product", "factors": [f.to_payload() for f in self.factors]}


class ShiftForm(Form):
    """base evaluated at x - shift."""

    def __init__(self, base: Form, shift):
        self.base = base
        self.shift = np.asarray(shift, dtype=float)
        self.dim = base.dim
        if self.shift.shape != (self.dim,):
            raise DimensionMismatch("shift has wrong dimension")

    def values(self, X, dtype=np.float64):
        X = np.asarray(X, dtype=dtype)
        return self.base.values(X - self.shift.astype(dtype), dtype=dtype)

    def value_env(self, X, dtype=np.float64):
        X = np.asarray(X, dtype=dtype)
        return self.base.value_env(X - self.shift.astype(dtype), dtype=dtype)

    def value_grad_hess(self, x):
        x = self._check_x(x)
        return self.base.value_grad_hess(x - self.shift)

    def degree(self):
        return self.base.degree()

    def homogeneous_degree(self):
        if not np.any(self.shift):
            return self.base.homogeneous_degree()
        return None

    def to_payload(self):
        return {"kind": "shift", "shift": [float(v) for v in self.shift],
                "base": self.base.to_payload()}


class ComposeAffineForm(Form):
    """base evaluated at M x + c, as a form on the x-space."""

    def __init__(self, base: Form, M, c):
        self.base = base
        self.M = np.asarray(M, dtype=float)
        self.c = np.asarray(c, dtype=float)
        if self.M.shape[0] != base.dim or self.c.shape != (base.dim,):
            raise DimensionMismatch("affine map shape mismatch")
        self.dim = self.M.shape[1]

    def values(self, X, dtype=np.float64):
        X = np.asarray(X, dtype=dtype)
        Y = X @ self.M.T.astype(dtype) + self.c.astype(dtype)
        return self.base.values(Y, dtype=dtype)

    def value_env(self, X, dtype=np.float64):
        X = np.asarray(X, dtype=dtype)
        Y = X @ self.M.T.astype(dtype) + self.c.astype(dtype)
        return self.base.value_env(Y, dtype=dtype)

    def value_grad_hess(self, x):
        x = self._check_x(x)
        v, g, H = self.base.value_grad_hess(self.M @ x + self.c)
        return v, self.M.T @ g, self.M.T @ H @ self.M

    def degree(self):
        return self.base.degree()

    def homogeneous_degree(self):
        if not np.any(self.c):
            return self.base.homogeneous_degree()
        return None

    def to_payload(self):
        return {"kind": "compose_affine",
                "M": [[float(v) for v in row] for row in self.M],
                "c": [float(v) for v in self.c],
                "base": self.base.to_payload()}


def form_from_payload(payload: dict) -> Form:
    kind = payload["kind"]
    if kind == "terms":
        return PolyForm(Polynomial.from_payload(payload))
    if kind == "affine":
        return AffineForm(payload["a"], payload["c"])
    if kind == "pow":
        return PowForm(form_from_payload(payload["base"]), payload["n"])
    if kind == "lincomb":
        parts = [(w, form_from_payload(p)) for w, p in payload["parts"]]
        dim = parts[0][1].dim if parts else 1
        return LinComb(dim, parts, payload["const"])
    if kind == "product":
        return ProductForm([form_from_payload(p) for p in payload["factors"]])
    if kind == "shift":
        return ShiftForm(form_from_payload(payload["base"]), payload["shift"])
    if kind == "compose_affine":
        return ComposeAffineForm(form_from_payload(payload["base"]),
                                 payload["M"], payload["c"])
    raise ValueError(f"unknown form kind {kind!r}")


def as_form(obj) -> Form:
    if isinstance(obj, Form):
        return obj
    if isinstance(obj, Polynomial):
        return PolyForm(obj)
    raise TypeError(f"cannot interpret {type(obj)} as a form")
