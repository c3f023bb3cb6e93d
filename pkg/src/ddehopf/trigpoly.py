"""Vector-valued trigonometric polynomials on [0, 2*pi].

A :class:`TrigPoly` stores the truncated Fourier series

    u(tau) = a0 + sum_{k=1..K} (a_k cos(k*tau) + b_k sin(k*tau))

with coefficient vectors a_k, b_k in R^dim.  All operations manipulate
coefficients in closed form (product-to-sum identities, angle addition,
term-wise differentiation), so algebraic identities hold to rounding error;
nothing is sampled or transformed numerically.

Products are defined for scalar*scalar and scalar*vector only; the product
degree is exactly the sum of the factor degrees.  Degree growth is trimmed
explicitly via :meth:`TrigPoly.truncate`, never silently.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError

# Relative threshold below which trailing harmonics are considered zero.
TRIM_TOL = 1e-13


class TrigPoly:
    """Immutable truncated Fourier series with vector coefficients.

    Parameters
    ----------
    const : array_like, shape (dim,)
        Constant (harmonic 0) coefficient a0.
    cos : array_like, shape (K, dim), optional
        Cosine coefficients a_1..a_K.
    sin : array_like, shape (K, dim), optional
        Sine coefficients b_1..b_K.
    """

    __slots__ = ("const", "cos", "sin")

    def __init__(self, const, cos=None, sin=None):
        const = np.atleast_1d(np.asarray(const, dtype=float))
        if const.ndim != 1:
            raise DimensionMismatchError("const coefficient must be a vector")
        dim = const.shape[0]
        if cos is None:
            cos = np.zeros((0, dim))
        if sin is None:
            sin = np.zeros((0, dim))
        cos = np.asarray(cos, dtype=float).reshape(-1, dim)
        sin = np.asarray(sin, dtype=float).reshape(-1, dim)
        if cos.shape != sin.shape:
            raise DimensionMismatchError(
                f"cos/sin coefficient blocks differ: {cos.shape} vs {sin.shape}")
        self.const = const
        self.cos = cos
        self.sin = sin

    # -- basic structure ---------------------------------------------------

    @property
    def dim(self) -> int:
        return self.const.shape[0]

    @property
    def degree(self) -> int:
        return self.cos.shape[0]

    @classmethod
    def zero(cls, dim: int, degree: int = 0) -> "TrigPoly":
        return cls(np.zeros(dim), np.zeros((degree, dim)), np.zeros((degree, dim)))

    @classmethod
    def constant(cls, values) -> "TrigPoly":
        return cls(np.atleast_1d(np.asarray(values, dtype=float)))

    @classmethod
    def harmonic(cls, dim: int, k: int, cos_vec=None, sin_vec=None) -> "TrigPoly":
        """A single harmonic: cos_vec*cos(k*tau) + sin_vec*sin(k*tau)."""
        if k == 0:
            return cls.constant(np.zeros(dim) if cos_vec is None else cos_vec)
        u = cls.zero(dim, k)
        if cos_vec is not None:
            u.cos[k - 1] = np.asarray(cos_vec, dtype=float)
        if sin_vec is not None:
            u.sin[k - 1] = np.asarray(sin_vec, dtype=float)
        return u

    def copy(self) -> "TrigPoly":
        return TrigPoly(self.const.copy(), self.cos.copy(), self.sin.copy())

    def component(self, i: int) -> "TrigPoly":
        """Scalar (dim 1) polynomial holding component ``i``."""
        return TrigPoly(self.const[i:i + 1], self.cos[:, i:i + 1], self.sin[:, i:i + 1])

    def padded(self, degree: int) -> "TrigPoly":
        """Same polynomial stored with at least ``degree`` harmonics."""
        extra = degree - self.degree
        if extra <= 0:
            return self
        z = np.zeros((extra, self.dim))
        return TrigPoly(self.const, np.vstack([self.cos, z]), np.vstack([self.sin, z]))

    def max_abs(self) -> float:
        """Largest absolute coefficient over all harmonics and components."""
        m = float(np.max(np.abs(self.const))) if self.dim else 0.0
        if self.degree:
            m = max(m, float(np.max(np.abs(self.cos))), float(np.max(np.abs(self.sin))))
        return m

    def truncate(self, tol: float = TRIM_TOL) -> "TrigPoly":
        """Drop trailing harmonics smaller than ``tol`` relative to the largest
        coefficient."""
        scale = self.max_abs()
        if scale == 0.0:
            return TrigPoly(np.zeros(self.dim))
        cut = tol * scale
        keep = self.degree
        while keep > 0 and (np.max(np.abs(self.cos[keep - 1])) <= cut
                            and np.max(np.abs(self.sin[keep - 1])) <= cut):
            keep -= 1
        if keep == self.degree:
            return self
        return TrigPoly(self.const, self.cos[:keep], self.sin[:keep])

    def capped(self, degree: int) -> "TrigPoly":
        """Hard-truncate to ``degree`` harmonics (caller asserts the tail is dust)."""
        if self.degree <= degree:
            return self
        return TrigPoly(self.const, self.cos[:degree], self.sin[:degree])

    # -- evaluation and calculus -------------------------------------------

    def eval(self, tau):
        """Value at ``tau``; scalar tau gives shape (dim,), array tau (m, dim)."""
        tau_arr = np.asarray(tau, dtype=float)
        scalar = tau_arr.ndim == 0
        t = np.atleast_1d(tau_arr)
        out = np.tile(self.const, (t.shape[0], 1))
        if self.degree:
            k = np.arange(1, self.degree + 1)
            kt = np.outer(t, k)
            out = out + np.cos(kt) @ self.cos + np.sin(kt) @ self.sin
        return out[0] if scalar else out

    def __call__(self, tau):
        return self.eval(tau)

    def diff(self) -> "TrigPoly":
        """Term-wise derivative d/dtau."""
        if self.degree == 0:
            return TrigPoly.zero(self.dim)
        k = np.arange(1, self.degree + 1)[:, None]
        return TrigPoly(np.zeros(self.dim), k * self.sin, -k * self.cos)

    def shift(self, theta: float) -> "TrigPoly":
        """Exact delayed argument: returns u(tau - theta)."""
        if self.degree == 0:
            return self
        k = np.arange(1, self.degree + 1)
        c = np.cos(k * theta)[:, None]
        s = np.sin(k * theta)[:, None]
        return TrigPoly(self.const, c * self.cos - s * self.sin,
                        s * self.cos + c * self.sin)

    # -- arithmetic ----------------------------------------------------------

    def _check_dim(self, other: "TrigPoly"):
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        self._check_dim(other)
        deg = max(self.degree, other.degree)
        a, b = self.padded(deg), other.padded(deg)
        return TrigPoly(a.const + b.const, a.cos + b.cos, a.sin + b.sin)

    def __sub__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return TrigPoly(-self.const, -self.cos, -self.sin)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return mul(self, other)
        return TrigPoly(self.const * other, self.cos * other, self.sin * other)

    def __rmul__(self, other):
        return self.__mul__(other)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        """JSON-ready mapping {dim, degree, const, cos, sin}."""
        return {
            "dim": self.dim,
            "degree": self.degree,
            "const": self.const.tolist(),
            "cos": self.cos.tolist(),
            "sin": self.sin.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrigPoly":
        u = cls(data["const"], data["cos"], data["sin"])
        if u.dim != data["dim"] or u.degree != data["degree"]:
            raise DimensionMismatchError("inconsistent serialized TrigPoly")
        return u

    def __repr__(self):
        return f"TrigPoly(dim={self.dim}, degree={self.degree})"

    # -- complex spectrum (internal, used by mul) ----------------------------

    def _spectrum(self) -> np.ndarray:
        """Complex coefficients c_k, k = -K..K, shape (2K+1, dim)."""
        K, n = self.degree, self.dim
        c = np.zeros((2 * K + 1, n), dtype=complex)
        c[K] = self.const
        for k in range(1, K + 1):
            c[K + k] = 0.5 * (self.cos[k - 1] - 1j * self.sin[k - 1])
            c[K - k] = 0.5 * (self.cos[k - 1] + 1j * self.sin[k - 1])
        return c

    @classmethod
    def _from_spectrum(cls, c: np.ndarray) -> "TrigPoly":
        K = (c.shape[0] - 1) // 2
        n = c.shape[1]
        const = c[K].real.copy()
        cos = np.zeros((K, n))
        sin = np.zeros((K, n))
        for k in range(1, K + 1):
            cos[k - 1] = (c[K + k] + c[K - k]).real
            sin[k - 1] = (c[K - k] - c[K + k]).imag
        return cls(const, cos, sin)


def mul(u: TrigPoly, v: TrigPoly) -> TrigPoly:
    """Exact product via product-to-sum identities.

    One factor must be scalar (dim 1); a scalar*vector product scales the
    vector component-wise.  The result degree is deg(u) + deg(v).
    """
    if u.dim != 1 and v.dim != 1:
        raise DimensionMismatchError(
            "products are defined for scalar*scalar or scalar*vector only")
    if u.dim != 1:
        u, v = v, u
    su = u._spectrum()[:, 0]
    sv = v._spectrum()
    out = np.empty((su.shape[0] + sv.shape[0] - 1, v.dim), dtype=complex)
    for i in range(v.dim):
        out[:, i] = np.convolve(su, sv[:, i])
    return TrigPoly._from_spectrum(out)


def linear_combination(coeffs, terms) -> TrigPoly:
    """Coefficient-wise linear combination sum(c_i * u_i).

    All terms must share dim; the result degree is the max input degree.
    """
    terms = list(terms)
    coeffs = [float(c) for c in coeffs]
    if not terms or len(coeffs) != len(terms):
        raise DimensionMismatchError("coeffs and terms must be nonempty and matched")
    dim = terms[0].dim
    deg = 0
    for t in terms:
        if t.dim != dim:
            raise DimensionMismatchError("all terms must share dim")
        deg = max(deg, t.degree)
    out = TrigPoly.zero(dim, deg)
    for c, t in zip(coeffs, terms):
        t = t.padded(deg)
        out = TrigPoly(out.const + c * t.const, out.cos + c * t.cos,
                       out.sin + c * t.sin)
    return out


def inner(u: TrigPoly, v: TrigPoly) -> float:
    """Closed-form L2 pairing integral(0, 2*pi) <u(tau), v(tau)> dtau."""
    if u.dim != v.dim:
        raise DimensionMismatchError(f"dimension mismatch: {u.dim} vs {v.dim}")
    deg = max(u.degree, v.degree)
    a, b = u.padded(deg), v.padded(deg)
    total = 2.0 * np.pi * float(a.const @ b.const)
    if deg:
        total += np.pi * float(np.sum(a.cos * b.cos) + np.sum(a.sin * b.sin))
    return total


def matvec(mat, u: TrigPoly) -> TrigPoly:
    """Apply a constant matrix to a vector polynomial: (M u)(tau) = M u(tau)."""
    mat = np.asarray(mat, dtype=float)
    if mat.shape[1] != u.dim:
        raise DimensionMismatchError(
            f"matrix columns {mat.shape[1]} do not match dim {u.dim}")
    return TrigPoly(u.const @ mat.T, u.cos @ mat.T, u.sin @ mat.T)


def stack(components) -> TrigPoly:
    """Assemble a vector polynomial from scalar (dim 1) components."""
    comps = list(components)
    deg = max(c.degree for c in comps)
    comps = [c.padded(deg) for c in comps]
    for c in comps:
        if c.dim != 1:
            raise DimensionMismatchError("stack expects scalar components")
    return TrigPoly(
        np.concatenate([c.const for c in comps]),
        np.hstack([c.cos for c in comps]),
        np.hstack([c.sin for c in comps]),
    )
