"""Truncated power series in the expansion parameter with scalar or
trigonometric-polynomial coefficients.

An :class:`EpsSeries` is the ring element

    s(eps) = sum_{j=0..N} c_j eps^j        (truncated at order N, inclusive)

where every c_j is either a float (scalar series) or a :class:`TrigPoly`
(trig series, all coefficients sharing one dim).  Model right-hand sides
are written against ordinary arithmetic (+, -, *, /, exp) and evaluated
directly over this ring, which extracts order-by-order coefficients without
any symbolic algebra.

Mixing rules: numbers promote to constant series; a scalar series combines
with a trig series by embedding its coefficients as degree-0 polynomials
(addition requires the trig side to be scalar-valued, multiplication scales
component-wise).  All operations require equal truncation orders.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatchError
from .trigpoly import TRIM_TOL, TrigPoly

_NUMBER_TYPES = (int, float, np.integer, np.floating)


class EpsSeries:
    """Immutable truncated power series; see module docstring."""

    __slots__ = ("coeffs", "is_trig")

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        if not coeffs:
            raise DimensionMismatchError("a series needs at least the order-0 term")
        is_trig = any(isinstance(c, TrigPoly) for c in coeffs)
        if is_trig:
            dims = {c.dim for c in coeffs if isinstance(c, TrigPoly)}
            if len(dims) != 1:
                raise DimensionMismatchError("trig coefficients must share dim")
            dim = dims.pop()
            norm = []
            for c in coeffs:
                if isinstance(c, TrigPoly):
                    norm.append(c)
                elif dim == 1:
                    norm.append(TrigPoly.constant([float(c)]))
                else:
                    raise DimensionMismatchError(
                        "cannot mix scalars into a vector-valued series")
            coeffs = norm
        else:
            coeffs = [float(c) for c in coeffs]
        self.coeffs = coeffs
        self.is_trig = is_trig

    # -- structure -----------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def dim(self) -> int:
        return self.coeffs[0].dim if self.is_trig else 1

    @classmethod
    def constant(cls, value, order: int) -> "EpsSeries":
        if isinstance(value, TrigPoly):
            zero = TrigPoly.zero(value.dim)
            return cls([value] + [zero] * order)
        return cls([float(value)] + [0.0] * order)

    def coefficient(self, j: int):
        return self.coeffs[j]

    def component(self, i: int) -> "EpsSeries":
        """Component series of a vector-valued trig series."""
        if not self.is_trig:
            raise DimensionMismatchError("component() requires a trig series")
        return EpsSeries([c.component(i) for c in self.coeffs])

    def times_eps(self) -> "EpsSeries":
        """Multiply by eps: shift coefficients up, dropping the top one."""
        zero = TrigPoly.zero(self.dim) if self.is_trig else 0.0
        return EpsSeries([zero] + self.coeffs[:-1])

    def over_eps(self, tol: float = 1e-9) -> "EpsSeries":
        """Divide by eps: shift coefficients down.

        Requires a vanishing order-0 coefficient (to ``tol`` relative to the
        largest coefficient).  The freed top slot is filled with zero.
        """
        scale = max(self._magnitude(), 1.0)
        if self._coef_abs(self.coeffs[0]) > tol * scale:
            raise DimensionMismatchError(
                "cannot divide by eps: order-0 coefficient is not zero")
        zero = TrigPoly.zero(self.dim) if self.is_trig else 0.0
        return EpsSeries(self.coeffs[1:] + [zero])

    def _magnitude(self) -> float:
        if self.is_trig:
            return max(c.max_abs() for c in self.coeffs)
        return max(abs(c) for c in self.coeffs)

    @staticmethod
    def _coef_abs(c) -> float:
        return c.max_abs() if isinstance(c, TrigPoly) else abs(c)

    # -- evaluation ------------------------------------------------------------

    def eval(self, eps: float):
        """Horner evaluation; returns a float or a TrigPoly."""
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = c + acc * eps
        return acc

    def eval_at(self, tau, eps: float):
        """Value of a trig series at (tau, eps)."""
        val = self.eval(eps)
        return val.eval(tau) if isinstance(val, TrigPoly) else val

    # -- ring operations ---------------------------------------------------------

    def _promote_pair(self, other):
        """Coerce to equal-kind operand lists of equal order."""
        if isinstance(other, _NUMBER_TYPES):
            other = EpsSeries.constant(float(other), self.order)
        if not isinstance(other, EpsSeries):
            return None, None
        if other.order != self.order:
            raise DimensionMismatchError(
                f"order mismatch: {self.order} vs {other.order}")
        return self, other

    def __add__(self, other):
        a, b = self._promote_pair(other)
        if a is None:
            return NotImplemented
        if a.is_trig != b.is_trig:
            scalar, trig = (b, a) if a.is_trig else (a, b)
            if trig.dim != 1:
                raise DimensionMismatchError(
                    "cannot add a scalar series to a vector-valued series")
            embedded = [TrigPoly.constant([c]) for c in scalar.coeffs]
            return EpsSeries([x + y for x, y in zip(embedded, trig.coeffs)])
        if a.is_trig and a.dim != b.dim:
            raise DimensionMismatchError("dimension mismatch in series addition")
        return EpsSeries([x + y for x, y in zip(a.coeffs, b.coeffs)])

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return EpsSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        a, b = self._promote_pair(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        a, b = self._promote_pair(other)
        if a is None:
            return NotImplemented
        return _cauchy(a, b)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, _NUMBER_TYPES):
            return self * (1.0 / float(other))
        if not isinstance(other, EpsSeries):
            return NotImplemented
        return div(self, other)

    def __rtruediv__(self, other):
        if isinstance(other, _NUMBER_TYPES):
            return div(EpsSeries.constant(float(other), self.order), self)
        return NotImplemented

    def __repr__(self):
        kind = f"trig dim={self.dim}" if self.is_trig else "scalar"
        return f"EpsSeries(order={self.order}, {kind})"


# -- coefficient-level product with the trig mixing rules -----------------------


def _coef_mul(x, y):
    xt, yt = isinstance(x, TrigPoly), isinstance(y, TrigPoly)
    if xt and yt:
        from .trigpoly import mul as tp_mul
        return tp_mul(x, y)
    if xt:
        return x * y
    if yt:
        return y * x
    return x * y


def _coef_sub(x, y):
    xt, yt = isinstance(x, TrigPoly), isinstance(y, TrigPoly)
    if xt == yt:
        return x - y
    if xt:
        return x - TrigPoly.constant(np.full(x.dim, float(y)))
    return TrigPoly.constant(np.full(y.dim, float(x))) - y


def _cauchy(a: EpsSeries, b: EpsSeries) -> EpsSeries:
    n = a.order
    if a.is_trig and b.is_trig and a.dim != 1 and b.dim != 1:
        raise DimensionMismatchError(
            "series products need a scalar-valued factor")
    out = []
    for j in range(n + 1):
        acc = None
        for k in range(j + 1):
            term = _coef_mul(a.coeffs[k], b.coeffs[j - k])
            acc = term if acc is None else acc + term
        if isinstance(acc, TrigPoly):
            acc = acc.truncate(TRIM_TOL)
        out.append(acc)
    return EpsSeries(out)


def _leading_scalar(s: EpsSeries) -> float:
    """Order-0 coefficient as a plain number; error if it is not constant."""
    c0 = s.coeffs[0]
    if isinstance(c0, TrigPoly):
        if c0.dim != 1:
            raise DimensionMismatchError("leading coefficient must be scalar-valued")
        if c0.truncate(TRIM_TOL).degree != 0:
            raise DimensionMismatchError(
                "leading coefficient must be constant (degree 0)")
        return float(c0.const[0])
    return float(c0)


def div(s: EpsSeries, t: EpsSeries) -> EpsSeries:
    """Series quotient s/t by back-substitution, truncated at the common order.

    The divisor's order-0 coefficient must be a nonzero constant.
    """
    if s.order != t.order:
        raise DimensionMismatchError(f"order mismatch: {s.order} vs {t.order}")
    t0 = _leading_scalar(t)
    if t0 == 0.0:
        raise ZeroDivisionError("series division by a series with zero leading term")
    q = []
    for j in range(s.order + 1):
        acc = s.coeffs[j]
        for k in range(1, j + 1):
            acc = _coef_sub(acc, _coef_mul(t.coeffs[k], q[j - k]))
        acc = acc * (1.0 / t0)
        if isinstance(acc, TrigPoly):
            acc = acc.truncate(TRIM_TOL)
        q.append(acc)
    return EpsSeries(q)


# -- analytic functions of a series ------------------------------------------------


def _taylor_weights(fid: str, c0: float, n: int, exponent=None):
    """f^(m)(c0)/m! for m = 0..n for the supported analytic functions."""
    w = np.empty(n + 1)
    if fid == "exp":
        e = math.exp(c0)
        fact = 1.0
        for m in range(n + 1):
            w[m] = e / fact
            fact *= (m + 1)
    elif fid == "log":
        if c0 <= 0.0:
            raise ValueError("log of a series with non-positive leading term")
        w[0] = math.log(c0)
        for m in range(1, n + 1):
            w[m] = ((-1.0) ** (m - 1)) / (m * c0 ** m)
    elif fid == "pow":
        if exponent is None:
            raise ValueError("pow requires an exponent")
        p = float(exponent)
        if c0 == 0.0:
            raise ValueError("pow of a series with zero leading term")
        coef = c0 ** p
        w[0] = coef
        for m in range(1, n + 1):
            coef *= (p - (m - 1)) / (m * c0)
            w[m] = coef
    elif fid == "sin":
        cycle = (math.sin(c0), math.cos(c0), -math.sin(c0), -math.cos(c0))
        fact = 1.0
        for m in range(n + 1):
            w[m] = cycle[m % 4] / fact
            fact *= (m + 1)
    elif fid == "cos":
        cycle = (math.cos(c0), -math.sin(c0), -math.cos(c0), math.sin(c0))
        fact = 1.0
        for m in range(n + 1):
            w[m] = cycle[m % 4] / fact
            fact *= (m + 1)
    else:
        raise ValueError(f"unsupported analytic function {fid!r}")
    return w


def analytic(fid: str, s: EpsSeries, exponent=None) -> EpsSeries:
    """Compose an analytic function with a series.

    The order-0 coefficient must be constant; the Taylor recentering
    f(c0 + h) = sum f^(m)(c0)/m! h^m is then exact at the truncation order
    because h has no order-0 part.
    """
    n = s.order
    c0 = _leading_scalar(s)
    w = _taylor_weights(fid, c0, n, exponent)
    h = s - c0
    acc = EpsSeries.constant(float(w[n]), n)
    for m in range(n - 1, -1, -1):
        acc = acc * h + float(w[m])
    return acc


def exp(x):
    """Generic exponential: series-aware, falls back to numpy for numbers/arrays."""
    if isinstance(x, EpsSeries):
        return analytic("exp", x)
    return np.exp(x)


def log(x):
    if isinstance(x, EpsSeries):
        return analytic("log", x)
    return np.log(x)


def sin(x):
    if isinstance(x, EpsSeries):
        return analytic("sin", x)
    return np.sin(x)


def cos(x):
    if isinstance(x, EpsSeries):
        return analytic("cos", x)
    return np.cos(x)


def powf(x, p):
    if isinstance(x, EpsSeries):
        return analytic("pow", x, exponent=p)
    return np.power(x, p)


# -- delayed state -------------------------------------------------------------


def delayed_state(Z: EpsSeries, theta: EpsSeries, theta0: float) -> EpsSeries:
    """Series of Z(tau - theta(eps), eps) for a series-valued shift.

    With dtheta = theta - theta0 (no order-0 part) the result is

        sum_{m=0..N} (-dtheta)^m / m! * shift(d^m Z / dtau^m, theta0),

    exact at the truncation order because dtheta is nilpotent there and
    tau-derivatives of trigonometric polynomials are exact.
    """
    if not Z.is_trig:
        raise DimensionMismatchError("delayed_state expects a trig series")
    if theta.is_trig:
        raise DimensionMismatchError("the shift must be a scalar series")
    if theta.order != Z.order:
        raise DimensionMismatchError(
            f"order mismatch: {Z.order} vs {theta.order}")
    if abs(theta.coeffs[0] - theta0) > 1e-12:
        raise DimensionMismatchError(
            f"shift base point {theta0} does not match the series "
            f"leading coefficient {theta.coeffs[0]}")
    n = Z.order
    minus_dtheta = -(theta - theta0)
    deriv = Z
    power = EpsSeries.constant(1.0, n)
    fact = 1.0
    acc = None
    for m in range(n + 1):
        shifted = EpsSeries([c.shift(theta0) for c in deriv.coeffs])
        term = _cauchy(power, shifted) * (1.0 / fact)
        acc = term if acc is None else acc + term
        if m < n:
            deriv = EpsSeries([c.diff() for c in deriv.coeffs])
            power = _cauchy(power, minus_dtheta)
            fact *= (m + 1)
    return acc
