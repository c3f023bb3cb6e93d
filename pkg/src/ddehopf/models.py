"""Single-delay DDE systems: right-hand sides, equilibria, linearization.

A :class:`DdeModel` wraps a right-hand side g(lam, x, y) -> vector, where
y is the delayed state x(t - lam).  The rhs is written against ordinary
arithmetic (+, -, *, /, exp) so the very same function evaluates over
floats, numpy arrays and :class:`~ddehopf.epsseries.EpsSeries`; Jacobians
and higher expansion data are obtained by probing it with series arguments
rather than by symbolic differentiation.

Two systems ship with the package:

* ``ndde``   -- a two-car following model: distance deviation x1 (m) and
  relative velocity x2 (m/s), sigmoid acceleration response acting on the
  delayed state.  Its equilibrium is the origin for every delay.
* ``sir``    -- an SIR epidemic model with waning immunity: infected,
  susceptible and recovered populations; the recovered return to the
  susceptible pool after the immunity period lam (days), which makes the
  endemic equilibrium delay-dependent.
"""

from __future__ import annotations

import numpy as np

from . import epsseries as es
from .epsseries import EpsSeries
from .errors import DimensionMismatchError, ModelError, NewtonError

EQ_TOL = 1e-12
EQ_MAX_ITER = 50


class DdeModel:
    """Immutable description of one delayed system.

    Parameters
    ----------
    name : str
        Identifier used by the CLI ("ndde", "sir", ...).
    dim : int
        Number of state components.
    params : dict
        Named parameter values (units documented per model).
    rhs : callable
        g(lam, x, y) -> list of dim entries, generic arithmetic only.
    equilibrium_hint : array_like
        Newton starting point for the equilibrium solve.
    hopf_hint : (float, float)
        (omega, lam) starting point for the Hopf point solve.
    time_unit : str
        Unit label for delays and periods ("s", "day").
    state_labels : list of str
        Component names with units, used in CSV headers.
    """

    def __init__(self, name, dim, params, rhs, equilibrium_hint, hopf_hint,
                 time_unit="s", state_labels=None):
        self.name = name
        self.dim = dim
        self.params = dict(params)
        self.rhs = rhs
        self.equilibrium_hint = np.asarray(equilibrium_hint, dtype=float)
        self.hopf_hint = (float(hopf_hint[0]), float(hopf_hint[1]))
        self.time_unit = time_unit
        self.state_labels = list(state_labels) if state_labels else [
            f"x{i + 1}" for i in range(dim)]

    def rhs_vector(self, lam, x, y):
        """rhs on plain numbers/arrays; shape (dim,) or (dim, m) for array input."""
        out = self.rhs(lam, list(x), list(y))
        arrs = [np.asarray(v, dtype=float) for v in out]
        shape = np.broadcast_shapes(*[a.shape for a in arrs])
        return np.stack([np.broadcast_to(a, shape) for a in arrs], axis=0)

    def __repr__(self):
        return f"DdeModel({self.name!r}, dim={self.dim})"


# -- built-in right-hand sides ---------------------------------------------------


NDDE_DEFAULTS = {
    "a": 2.0576,     # maximum acceleration, m/s^2
    "b": 1.5677,     # maximum deceleration, m/s^2
    "v0": 22.2222,   # leader velocity, m/s
    "M": 44.4444,    # safe distance at v0, m
    "d": 0.1124,     # response intensity
    "K": 11.3890,    # sensitivity to relative velocity, s
}

SIR_DEFAULTS = {
    "alpha": 0.1,    # output rate from the infected state, /day
    "beta": 0.01,    # contagion rate, /day
    "mu": 1e-4,      # natural death rate, /day
    "f": 0.98,       # recovering fraction
    "P_max": 30.0,   # maximum population, 1e6 persons
}


def _validate_positive(params, keys):
    for k in keys:
        if params[k] <= 0:
            raise ModelError(f"parameter {k} must be positive")


def make_ndde(params=None) -> DdeModel:
    """Two-car following model in distance/relative-velocity coordinates."""
    p = dict(NDDE_DEFAULTS)
    if params:
        p.update(params)
    _validate_positive(p, ("a", "b", "v0", "M", "d", "K"))
    a, b, d, K = p["a"], p["b"], p["d"], p["K"]
    ratio = b / a

    def rhs(lam, x, y):
        drive = d * (y[0] + K * y[1])
        accel = -a + (a + b) / (1.0 + ratio * es.exp(drive))
        return [x[1], accel]

    return DdeModel(
        name="ndde", dim=2, params=p, rhs=rhs,
        equilibrium_hint=[0.0, 0.0], hopf_hint=(1.1, 1.3),
        time_unit="s", state_labels=["x1 [m]", "x2 [m/s]"])


def make_sir(params=None) -> DdeModel:
    """SIR model with temporary immunity of length lam (days).

    The birth function mu*(1+P_max)*P/(1+P) keeps the total population
    asymptotically stable.  The term (1 - mu*lam) discounts recovered
    individuals who die before losing immunity; it is accepted as written,
    so delays should stay below 1/mu for the flow to keep its sign.
    """
    p = dict(SIR_DEFAULTS)
    if params:
        p.update(params)
    _validate_positive(p, ("alpha", "beta", "mu", "f", "P_max"))
    if p["f"] > 1.0:
        raise ModelError("recovered fraction f must be <= 1")
    alpha, beta, mu, f, pmax = p["alpha"], p["beta"], p["mu"], p["f"], p["P_max"]

    def rhs(lam, x, y):
        I, S, R = x[0], x[1], x[2]
        P = I + S + R
        births = mu * (1.0 + pmax) * P / (1.0 + P)
        returning = f * alpha * (1.0 - mu * lam) * y[0]
        dI = beta * S * I - (mu + alpha) * I
        dS = births - beta * S * I - mu * S + returning
        dR = -mu * R + f * alpha * I - returning
        return [dI, dS, dR]

    return DdeModel(
        name="sir", dim=3, params=p, rhs=rhs,
        equilibrium_hint=[0.6, 10.0, 7.0], hopf_hint=(0.035, 100.0),
        time_unit="day",
        state_labels=["I [1e6 persons]", "S [1e6 persons]", "R [1e6 persons]"])


BUILTIN_MODELS = {"ndde": make_ndde, "sir": make_sir}


def sir_r0(params) -> float:
    """Basic reproduction number beta*P_max/(mu + alpha)."""
    return params["beta"] * params["P_max"] / (params["mu"] + params["alpha"])


# -- equilibrium and linearization ------------------------------------------------


def _jet_jacobians(model, lam, point):
    """(Jx, Jy): Jacobians of the rhs in the instantaneous and delayed slots,
    from first-order series probes at ``point`` (exact to rounding)."""
    n = model.dim
    Jx = np.empty((n, n))
    Jy = np.empty((n, n))
    base = [float(v) for v in point]
    for j in range(n):
        probe = [EpsSeries([base[i], 1.0 if i == j else 0.0]) for i in range(n)]
        fixed = [EpsSeries([base[i], 0.0]) for i in range(n)]
        gx = model.rhs(lam, probe, fixed)
        gy = model.rhs(lam, fixed, probe)
        for i in range(n):
            Jx[i, j] = _order1(gx[i])
            Jy[i, j] = _order1(gy[i])
    return Jx, Jy


def _order1(value) -> float:
    if isinstance(value, EpsSeries):
        return float(value.coeffs[1])
    return 0.0  # rhs component independent of the probed arguments


def equilibrium(model: DdeModel, lam: float) -> np.ndarray:
    """Steady state x* with g(lam, x*, x*) = 0, by Newton from the model hint."""
    if lam < 0:
        raise NewtonError("delay must be nonnegative")
    x = model.equilibrium_hint.copy()
    scale = max(1.0, float(np.max(np.abs(x))))
    converged = False
    for _ in range(EQ_MAX_ITER):
        g = np.array(model.rhs(lam, list(x), list(x)), dtype=float)
        if np.max(np.abs(g)) <= EQ_TOL * scale:
            if converged:
                return x
            converged = True  # one extra polish step sharpens x itself
        Jx, Jy = _jet_jacobians(model, lam, x)
        J = Jx + Jy
        try:
            step = np.linalg.solve(J, g)
        except np.linalg.LinAlgError as exc:
            raise NewtonError(f"singular equilibrium Jacobian at lam={lam}") from exc
        x = x - step
        scale = max(1.0, float(np.max(np.abs(x))))
    if converged:
        return x
    raise NewtonError(
        f"equilibrium Newton did not converge in {EQ_MAX_ITER} iterations "
        f"(model={model.name}, lam={lam})")


def equilibrium_series(model: DdeModel, lam_series: EpsSeries) -> list:
    """Equilibrium family x*(lam(eps)) as scalar series, one per component.

    Solved order-by-order: a Newton sweep with the (constant) Jacobian at the
    base point gains one correct order per pass, so order+1 sweeps suffice.
    """
    if lam_series.is_trig:
        raise DimensionMismatchError("lam must be a scalar series")
    order = lam_series.order
    lam0 = float(lam_series.coeffs[0])
    x0 = equilibrium(model, lam0)
    Jx, Jy = _jet_jacobians(model, lam0, x0)
    try:
        Jinv = np.linalg.inv(Jx + Jy)
    except np.linalg.LinAlgError as exc:
        raise NewtonError(
            f"singular equilibrium Jacobian at base lam={lam0}") from exc
    xs = [EpsSeries.constant(float(v), order) for v in x0]
    scale = max(1.0, float(np.max(np.abs(x0))))
    for _ in range(order + 1):
        g = model.rhs(lam_series, xs, xs)
        res = max(max(abs(c) for c in gi.coeffs) for gi in g)
        if res <= 1e-14 * scale:
            break
        xs = [xs[i] - sum_series([float(Jinv[i, j]) * g[j]
                                  for j in range(model.dim)])
              for i in range(model.dim)]
    g = model.rhs(lam_series, xs, xs)
    res = max(max(abs(c) for c in gi.coeffs) for gi in g)
    if res > 1e-10 * scale:
        raise NewtonError(
            f"equilibrium series residual {res:.2e} exceeds tolerance")
    return xs


def sum_series(terms):
    acc = terms[0]
    for t in terms[1:]:
        acc = acc + t
    return acc


def linearization(model: DdeModel, lam: float):
    """(P, Q): Jacobians of the rhs at the lam-dependent equilibrium."""
    x_star = equilibrium(model, lam)
    return _jet_jacobians(model, lam, x_star)
