"""Sparse multivariate polynomials with float64 coefficients.

Terms are stored in a dict keyed by exponent tuples.  Iteration order for
evaluation and serialization is always lexicographic in the exponent vector,
so identical inputs produce bit-identical outputs.
"""
from __future__ import annotations

import math
from math import comb

import numpy as np

# Expanding a polynomial beyond this many stored terms raises TermBudgetError;
# callers fall back to evaluation-form recipes.
DEFAULT_TERM_BUDGET = 2_000_000


class PolynomialError(ValueError):
    pass


class DimensionMismatch(PolynomialError):
    pass


class TermBudgetError(PolynomialError):
    """Raised when an expansion would exceed the configured term budget."""


def dense_term_count(degree: int, dim: int) -> int:
    """Number of monomials of total degree <= degree in dim variables."""
    if degree < 0:
        return 0
    return comb(degree + dim, dim)


class Polynomial:
    """Immutable sparse polynomial in ``dim`` real variables."""

    __slots__ = ("dim", "terms", "_arrays", "_partials", "_abs_poly")

    def __init__(self, dim: int, terms: dict[tuple[int, ...], float] | None = None):
        if dim < 1:
            raise PolynomialError(f"dimension must be positive, got {dim}")
        self.dim = int(dim)
        clean: dict[tuple[int, ...], float] = {}
        if terms:
            for exp, coef in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != dim:
                    raise DimensionMismatch(
                        f"exponent {exp} has length {len(exp)}, expected {dim}")
                if any(e < 0 for e in exp):
                    raise PolynomialError(f"negative exponent in {exp}")
                c = float(coef)
                if c != 0.0:
                    clean[exp] = c
        self.terms = clean
        self._arrays = None
        self._partials = None
        self._abs_poly = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, c: float) -> "Polynomial":
        return cls(dim, {(0,) * dim: float(c)})

    @classmethod
    def variable(cls, dim: int, i: int) -> "Polynomial":
        if not 0 <= i < dim:
            raise PolynomialError(f"variable index {i} out of range for dim {dim}")
        exp = tuple(1 if j == i else 0 for j in range(dim))
        return cls(dim, {exp: 1.0})

    @classmethod
    def affine(cls, a, c: float = 0.0) -> "Polynomial":
        """The affine polynomial <a, x> + c."""
        a = np.asarray(a, dtype=float)
        dim = a.shape[0]
        terms: dict[tuple[int, ...], float] = {}
        if c != 0.0:
            terms[(0,) * dim] = float(c)
        for i, ai in enumerate(a):
            if ai != 0.0:
                terms[tuple(1 if j == i else 0 for j in range(dim))] = float(ai)
        return cls(dim, terms)

    # -- structure ---------------------------------------------------------

    def degree(self) -> int:
        """Maximum total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        degrees = {sum(e) for e in self.terms}
        return len(degrees) <= 1

    def is_even_degree(self) -> bool:
        d = self.degree()
        return d >= 0 and d % 2 == 0

    def __len__(self) -> int:
        return len(self.terms)

    def _term_arrays(self):
        if self._arrays is None:
            keys = sorted(self.terms)
            exps = np.array(keys, dtype=np.int64).reshape(len(keys), self.dim)
            coefs = np.array([self.terms[k] for k in keys], dtype=float)
            self._arrays = (exps, coefs)
        return self._arrays

    # -- evaluation --------------------------------------------------------

    def __call__(self, x) -> float:
        return self.eval(x)

    def eval(self, x) -> float:
        """Evaluate at a single point with compensated summation.

        Terms are visited in sorted exponent order and summed with
        math.fsum, so the result is deterministic and exactly rounded
        given the individual term values.
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(
                f"point has shape {x.shape}, expected ({self.dim},)")
        vals = []
        for exp in sorted(self.terms):
            t = self.terms[exp]
            for xi, ei in zip(x, exp):
                if ei:
                    t *= xi ** ei
            vals.append(t)
        return math.fsum(vals)

    def eval_batch(self, X, dtype=np.float64) -> np.ndarray:
        """Evaluate at the rows of X (shape (n, dim))."""
        X = np.asarray(X, dtype=dtype)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.dim:
            raise DimensionMismatch(
                f"points have dim {X.shape[1]}, expected {self.dim}")
        if not self.terms:
            return np.zeros(X.shape[0], dtype=dtype)
        exps, coefs = self._term_arrays()
        coefs = coefs.astype(dtype)
        n = X.shape[0]
        out = np.zeros(n, dtype=dtype)
        maxe = exps.max(axis=0)
        # chunk over points to bound the size of the power tables
        chunk = max(1, int(4_000_000 // max(1, len(coefs))))
        for s in range(0, n, chunk):
            Xc = X[s:s + chunk]
            pows = [np.power.outer(Xc[:, i], np.arange(maxe[i] + 1, dtype=np.int64)).astype(dtype)
                    for i in range(self.dim)]
            acc = np.broadcast_to(coefs, (Xc.shape[0], len(coefs))).copy()
            for i in range(self.dim):
                acc *= pows[i][:, exps[:, i]]
            out[s:s + chunk] = acc.sum(axis=1)
        return out

    def magnitude_envelope(self, X, dtype=np.float64) -> np.ndarray:
        """sum_a |c_a| |x|^a: the cancellation-free evaluation magnitude.

        A computed value smaller than machine epsilon times this envelope
        has an uncertain sign.
        """
        if self._abs_poly is None:
            self._abs_poly = Polynomial(
                self.dim, {e: abs(c) for e, c in self.terms.items()})
        X = np.abs(np.atleast_2d(np.asarray(X, dtype=dtype)))
        return self._abs_poly.eval_batch(X, dtype=dtype)

    # -- calculus ----------------------------------------------------------

    def partial(self, i: int) -> "Polynomial":
        if not 0 <= i < self.dim:
            raise PolynomialError(f"axis {i} out of range")
        if self._partials is None:
            self._partials = {}
        if i not in self._partials:
            terms: dict[tuple[int, ...], float] = {}
            for exp, c in self.terms.items():
                e = exp[i]
                if e:
                    new = list(exp)
                    new[i] = e - 1
                    key = tuple(new)
                    terms[key] = terms.get(key, 0.0) + c * e
            self._partials[i] = Polynomial(self.dim, terms)
        return self._partials[i]

    def gradient_at(self, x) -> np.ndarray:
        return self.value_grad_hess(x)[1]

    def hessian_at(self, x) -> np.ndarray:
        return self.value_grad_hess(x)[2]

    def value_grad_hess(self, x):
        """Value, gradient and Hessian at one point, vectorized over terms."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(
                f"point has shape {x.shape}, expected ({self.dim},)")
        d = self.dim
        if not self.terms:
            return 0.0, np.zeros(d), np.zeros((d, d))
        exps, coefs = self._term_arrays()
        maxe = exps.max(axis=0)
        pows = [np.power(x[i], np.arange(maxe[i] + 2, dtype=np.int64))
                for i in range(d)]

        def mono(shift):
            # product over axes of x_i^(e_i - shift_i), zero when any
            # shifted exponent is negative; shift entries are 0, 1 or 2
            out = coefs.copy()
            ok = np.ones(len(coefs), dtype=bool)
            for i in range(d):
                e = exps[:, i] - shift[i]
                ok &= e >= 0
                out *= pows[i][np.maximum(e, 0)]
            out[~ok] = 0.0
            return out, ok

        base, _ = mono((0,) * d)
        val = float(base.sum())
        grad = np.zeros(d)
        hess = np.zeros((d, d))
        for i in range(d):
            shift = [0] * d
            shift[i] = 1
            vals, ok = mono(shift)
            grad[i] = float((vals * exps[:, i]).sum())
            for j in range(i, d):
                shift2 = list(shift)
                shift2[j] += 1
                vals2, _ = mono(shift2)
                if i == j:
                    h = float((vals2 * exps[:, i] * (exps[:, i] - 1)).sum())
                else:
                    h = float((vals2 * exps[:, i] * exps[:, j]).sum())
                hess[i, j] = hess[j, i] = h
        return val, grad, hess

    # -- arithmetic --------------------------------------------------------

    def _check_dim(self, other: "Polynomial"):
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"operand dims {self.dim} and {other.dim} differ")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.dim, other)
        self._check_dim(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            terms[exp] = terms.get(exp, 0.0) + c
        return Polynomial(self.dim, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: float) -> "Polynomial":
        c = float(c)
        if c == 0.0:
            return Polynomial.zero(self.dim)
        return Polynomial(self.dim, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(other)
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other: "Polynomial", max_terms: int | None = DEFAULT_TERM_BUDGET) -> "Polynomial":
        """Product, exact in float64.

        Large products aggregate through an integer-keyed dense accumulator
        (mixed-radix exponent encoding + bincount), which is far faster than
        a dict loop while remaining deterministic.
        """
        self._check_dim(other)
        if not self.terms or not other.terms:
            return Polynomial.zero(self.dim)
        ta, tb = len(self.terms), len(other.terms)
        if ta * tb <= 20_000:
            terms: dict[tuple[int, ...], float] = {}
            for ea, ca in self.terms.items():
                for eb, cb in other.terms.items():
                    key = tuple(i + j for i, j in zip(ea, eb))
                    terms[key] = terms.get(key, 0.0) + ca * cb
            out = Polynomial(self.dim, terms)
        else:
            out = self._mul_bincount(other)
        if max_terms is not None and len(out.terms) > max_terms:
            raise TermBudgetError(
                f"product has {len(out.terms)} terms, budget {max_terms}")
        return out

    def _mul_bincount(self, other: "Polynomial") -> "Polynomial":
        ea, ca = self._term_arrays()
        eb, cb = other._term_arrays()
        radix = ea.max(axis=0) + eb.max(axis=0) + 1
        total = 1
        for r in radix:
            total *= int(r)
        if total > 120_000_000:
            raise TermBudgetError(
                f"dense accumulator of {total} cells exceeds internal cap")
        strides = np.ones(self.dim, dtype=np.int64)
        for i in range(self.dim - 2, -1, -1):
            strides[i] = strides[i + 1] * radix[i + 1]
        ka = ea @ strides
        kb = eb @ strides
        acc = np.zeros(total, dtype=float)
        chunk = max(1, int(8_000_000 // max(1, len(kb))))
        for s in range(0, len(ka), chunk):
            keys = (ka[s:s + chunk, None] + kb[None, :]).ravel()
            vals = (ca[s:s + chunk, None] * cb[None, :]).ravel()
            acc += np.bincount(keys, weights=vals, minlength=total)
        nz = np.nonzero(acc)[0]
        terms: dict[tuple[int, ...], float] = {}
        for key in nz:
            rem = int(key)
            exp = []
            for st in strides:
                exp.append(rem // int(st))
                rem %= int(st)
            terms[tuple(exp)] = float(acc[key])
        return Polynomial(self.dim, terms)

    def power(self, n: int, max_terms: int | None = DEFAULT_TERM_BUDGET) -> "Polynomial":
        if n < 0 or int(n) != n:
            raise PolynomialError(f"exponent must be a nonnegative integer, got {n}")
        n = int(n)
        result = Polynomial.constant(self.dim, 1.0)
        base = self
        while n:
            if n & 1:
                result = result.mul(base, max_terms=max_terms)
            n >>= 1
            if n:
                base = base.mul(base, max_terms=max_terms)
        return result

    def __pow__(self, n: int):
        return self.power(n)

    # -- homogenization and composition -------------------------------------

    def homogenize(self, u, n: int, max_terms: int | None = DEFAULT_TERM_BUDGET) -> "Polynomial":
        """Homogeneous continuation of the restriction to {<x,u> = 1}.

        Returns sum_a c_a x^a <x,u>^(n-|a|), which is homogeneous of degree n
        and agrees with self on the hyperplane.
        """
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            raise DimensionMismatch("u has wrong dimension")
        if not np.any(u):
            raise PolynomialError("u must be nonzero")
        deg = self.degree()
        if n < deg:
            raise PolynomialError(f"target degree {n} below degree {deg}")
        lin = Polynomial.affine(u, 0.0)
        # group terms by total degree so each <x,u>^k is formed once
        by_deg: dict[int, Polynomial] = {}
        for exp, c in self.terms.items():
            k = sum(exp)
            by_deg.setdefault(k, Polynomial.zero(self.dim))
            by_deg[k] = by_deg[k] + Polynomial(self.dim, {exp: c})
        out = Polynomial.zero(self.dim)
        for k, part in sorted(by_deg.items()):
            out = out + part.mul(lin.power(n - k, max_terms=max_terms),
                                 max_terms=max_terms)
            if max_terms is not None and len(out.terms) > max_terms:
                raise TermBudgetError("homogenization exceeds term budget")
        return out

    def compose_affine(self, M, c, max_terms: int | None = DEFAULT_TERM_BUDGET) -> "Polynomial":
        """The polynomial x -> self(M x + c); M maps the target space to ours."""
        M = np.asarray(M, dtype=float)
        c = np.asarray(c, dtype=float)
        if M.shape[0] != self.dim or c.shape != (self.dim,):
            raise DimensionMismatch("affine map shape mismatch")
        new_dim = M.shape[1]
        if not self.terms:
            return Polynomial.zero(new_dim)
        subs = [Polynomial.affine(M[i], c[i]) for i in range(self.dim)]
        maxes = [0] * self.dim
        for exp in self.terms:
            for i, e in enumerate(exp):
                maxes[i] = max(maxes[i], e)
        pows: list[list[Polynomial]] = []
        for i in range(self.dim):
            row = [Polynomial.constant(new_dim, 1.0)]
            for _ in range(maxes[i]):
                row.append(row[-1].mul(subs[i], max_terms=max_terms))
            pows.append(row)
        out = Polynomial.zero(new_dim)
        for exp in sorted(self.terms):
            term = Polynomial.constant(new_dim, self.terms[exp])
            for i, e in enumerate(exp):
                if e:
                    term = term.mul(pows[i][e], max_terms=max_terms)
            out = out + term
        if max_terms is not None and len(out.terms) > max_terms:
            raise TermBudgetError("composition exceeds term budget")
        return out

    # -- serialization -------------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"exp": list(exp), "coef": self.terms[exp]}
                      for exp in sorted(self.terms)],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Polynomial":
        dim = int(payload["dim"])
        terms = {tuple(t["exp"]): float(t["coef"]) for t in payload["terms"]}
        return cls(dim, terms)

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.dim == other.dim
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return f"Polynomial({self.dim}, 0)"
        parts = []
        for exp in sorted(self.terms)[:6]:
            mono = "*".join(f"x{i}^{e}" for i, e in enumerate(exp) if e) or "1"
            parts.append(f"{self.terms[exp]:.6g}*{mono}")
        tail = " + ..." if len(self.terms) > 6 else ""
        return f"Polynomial({self.dim}, {' + '.join(parts)}{tail})"
