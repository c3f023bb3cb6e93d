"""Physical-time periodic solutions from a computed expansion.

Given the series coefficients, a delay lam beyond the bifurcation maps to an
amplitude parameter eps through the delay equation

    lam = (1/omega0) * sum_j lh_j * eps^j,

whose smallest nonnegative root is tracked from eps = 0 at the bifurcation.
The orbit is then

    x(t) = equilibrium(lam) + eps * sum_j Z_j(omega_eff * t) * eps^j,

with omega_eff = 2*pi*omega0/Th(eps), so the period is Th(eps)/omega0.
This module also measures the defect of that orbit inside the model equation
(the relative residual) and sweeps delay grids into bifurcation diagrams.
"""

from __future__ import annotations

import numpy as np

from . import models as mdl
from .errors import BelowBifurcationError, NewtonError, NoRealRootError
from .expansion import ExpansionResult

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
EXTRAPOLATION_RESIDUAL = 0.05  # diagram points with larger residual are flagged


def solve_epsilon(exp: ExpansionResult, lam: float, start=None) -> float:
    """Smallest nonnegative amplitude parameter for a prescribed delay.

    A sign scan of the delay polynomial on [0, 2*start] locates the first
    crossing (the branch continuous from eps = 0 at the bifurcation), which
    is then bisected and Newton-polished to 1e-14.  The scan radius comes
    from the order-2 inversion, or from ``start`` when sweeping a grid by
    continuation.  Later crossings, where the truncated polynomial bends
    back beyond its validity, are ignored.
    """
    lam0 = exp.hopf.lambda0
    target = exp.omega0 * lam
    coeffs = exp.lambda_hats
    if lam < lam0 * (1.0 - 1e-12):
        raise BelowBifurcationError(
            f"delay {lam} is below the bifurcation delay {lam0:.6f}: "
            "no periodic orbit on this side")
    if abs(lam - lam0) <= 1e-12 * max(1.0, lam0):
        return 0.0

    def p(e):
        return float(np.polyval(coeffs[::-1], e)) - target

    def dp(e):
        d = np.polyder(np.poly1d(coeffs[::-1]))
        return float(d(e))

    if start is None:
        lh2 = coeffs[2] if exp.order >= 2 else 0.0
        if lh2 <= 0.0:
            raise NoRealRootError(
                "cannot seed the amplitude solve: the order-2 delay "
                f"coefficient {lh2:.3e} is not positive")
        start = float(np.sqrt((target - coeffs[0]) / lh2))

    # Sign scan on [0, 2*start]: the branch grows from eps = 0, so the
    # wanted root is the first crossing; later crossings (the polynomial
    # bending back where the truncation breaks down) are ignored.
    hi = 2.0 * float(start)
    grid = np.linspace(0.0, hi, 257)
    vals = np.array([p(e) for e in grid])
    eps = None
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            eps = float(grid[i])
            break
        if vals[i] * vals[i + 1] < 0.0:
            a, b = float(grid[i]), float(grid[i + 1])
            fa = vals[i]
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = p(mid)
                if fa * fm <= 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            eps = 0.5 * (a + b)
            break
    if eps is None:
        raise NoRealRootError(
            f"no amplitude root in [0, {hi:.4f}] for delay {lam} "
            "(delay beyond the validity of the truncated series)")

    scale = max(1.0, abs(target))
    for _ in range(100):
        val = p(eps)
        if abs(val) <= 1e-14 * scale:
            break
        der = dp(eps)
        if der == 0.0:
            break
        step = val / der
        if not np.isfinite(eps - step) or abs(step) > 0.25 * max(eps, 1.0):
            break  # keep the bisection result near a fold of the polynomial
        eps -= step
    if eps < 0.0 or abs(p(eps)) > 1e-12 * scale:
        raise NoRealRootError(
            f"amplitude root polish failed for delay {lam} "
            f"(residual {p(eps):.2e})")
    return float(eps)


class ReconstructedOrbit:
    """Explicit periodic solution at one delay.

    Attributes
    ----------
    lam : float
        Physical delay.
    eps : float
        Amplitude parameter solving the delay equation.
    period : float
        Th(eps)/omega0 in physical time units.
    equilibrium : ndarray
        Model equilibrium at lam (the orbit oscillates around it).
    """

    def __init__(self, expansion: ExpansionResult, lam: float, eps: float):
        self.expansion = expansion
        self.lam = float(lam)
        self.eps = float(eps)
        T_hat = expansion.T_hat_of(self.eps)
        self.period = T_hat / expansion.omega0
        self.omega_eff = 2.0 * np.pi / self.period
        self.equilibrium = mdl.equilibrium(expansion.model, self.lam)
        self.profile = expansion.orbit_profile(self.eps)
        self._dprofile = self.profile.diff()
        residual = abs(self.lam - expansion.lambda_hat_of(self.eps) / expansion.omega0)
        if residual > 1e-12 * max(1.0, self.lam):
            raise NewtonError(
                f"delay equation residual {residual:.2e} too large at eps={eps}")

    @property
    def order(self) -> int:
        return self.expansion.order

    def phase(self, t):
        return self.omega_eff * np.asarray(t, dtype=float)

    def evaluate(self, t):
        """Orbit state at time t (scalar or array), physical coordinates."""
        return self.profile.eval(self.phase(t)) + self.equilibrium

    def deviation(self, t):
        """Orbit state minus the equilibrium."""
        return self.profile.eval(self.phase(t))

    def derivative(self, t):
        return self._dprofile.eval(self.phase(t)) * self.omega_eff

    def __repr__(self):
        return (f"ReconstructedOrbit(lam={self.lam:.6g}, eps={self.eps:.6g}, "
                f"period={self.period:.6g}, order={self.order})")


def reconstruct(exp: ExpansionResult, lam: float, eps=None) -> ReconstructedOrbit:
    """Orbit at delay lam; eps may be supplied to skip the root solve."""
    if eps is None:
        eps = solve_epsilon(exp, lam)
    return ReconstructedOrbit(exp, lam, eps)


# -- residual ---------------------------------------------------------------------


def _golden_max(f, a, b, fa_mid, iterations=3):
    """A few golden-section steps refining a grid maximum of a scalar f."""
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    best = fa_mid
    for _ in range(iterations):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        best = max(best, f1, f2)
    return best


def residual(model, orbit: ReconstructedOrbit, samples: int = 2048) -> float:
    """Relative defect sup|x' - g(lam, x, x_delayed)| / sup|x'| over a period.

    Both suprema are taken on a uniform grid (at least 256 points) and then
    sharpened by a short golden-section refinement around the grid maxima;
    x' is the exact derivative of the trigonometric profile.
    """
    if samples < 256:
        raise ValueError("residual needs at least 256 samples")
    lam = orbit.lam
    shifted = orbit.profile.shift(orbit.omega_eff * lam)
    dprofile = orbit.profile.diff()
    eq = orbit.equilibrium

    taus = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    x = orbit.profile.eval(taus) + eq
    xd = shifted.eval(taus) + eq
    dx = dprofile.eval(taus) * orbit.omega_eff
    g = model.rhs_vector(lam, x.T, xd.T).T
    num = np.max(np.abs(dx - g), axis=1)
    den = np.max(np.abs(dx), axis=1)

    def num_at(tau):
        xv = orbit.profile.eval(tau) + eq
        xdv = shifted.eval(tau) + eq
        dxv = dprofile.eval(tau) * orbit.omega_eff
        gv = model.rhs_vector(lam, xv, xdv)
        return float(np.max(np.abs(dxv - gv)))

    def den_at(tau):
        return float(np.max(np.abs(dprofile.eval(tau) * orbit.omega_eff)))

    dt = 2.0 * np.pi / samples
    i_num = int(np.argmax(num))
    i_den = int(np.argmax(den))
    sup_num = _golden_max(num_at, taus[i_num] - dt, taus[i_num] + dt, num[i_num])
    sup_den = _golden_max(den_at, taus[i_den] - dt, taus[i_den] + dt, den[i_den])
    if sup_den == 0.0:
        # zero-amplitude orbit: the defect is the equilibrium residual
        return 0.0 if sup_num < 1e-9 else float("inf")
    return sup_num / sup_den


# -- bifurcation diagram ------------------------------------------------------------


def orbit_extrema(orbit: ReconstructedOrbit, samples: int = 1024):
    """(min, max) per component over one period, grid plus refinement."""
    taus = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    vals = orbit.profile.eval(taus) + orbit.equilibrium
    dt = 2.0 * np.pi / samples
    out = []
    for i in range(vals.shape[1]):
        comp = orbit.profile.component(i)
        base = float(orbit.equilibrium[i])

        def lo(tau, comp=comp, base=base):
            return -(float(comp.eval(tau)[0]) + base)

        def hi(tau, comp=comp, base=base):
            return float(comp.eval(tau)[0]) + base

        k_lo = int(np.argmin(vals[:, i]))
        k_hi = int(np.argmax(vals[:, i]))
        vmin = -_golden_max(lo, taus[k_lo] - dt, taus[k_lo] + dt,
                            -float(vals[k_lo, i]))
        vmax = _golden_max(hi, taus[k_hi] - dt, taus[k_hi] + dt,
                           float(vals[k_hi, i]))
        out.append((vmin, vmax))
    return out


def bifurcation_diagram(exp: ExpansionResult, model, lam_grid, samples=1024):
    """Per-delay oscillation extrema, with the equilibrium branch below the
    bifurcation and a residual-based extrapolation flag beyond it.

    Returns a list of row dicts; failures at individual grid points are
    recorded in the row and the sweep continues.
    """
    lam0 = exp.hopf.lambda0
    rows = []
    eps_prev = None
    for lam in lam_grid:
        row = {"lambda": float(lam), "eps": 0.0, "residual": 0.0,
               "extrapolated": False, "components": None, "error": ""}
        try:
            eps = 0.0
            if lam >= lam0 * (1.0 - 1e-12):
                start = eps_prev if eps_prev else None
                eps = solve_epsilon(exp, lam, start=start)
                eps_prev = eps if eps > 0 else None
            if eps == 0.0:
                eq = mdl.equilibrium(model, lam)
                row["components"] = [(float(v), float(v)) for v in eq]
            else:
                orbit = ReconstructedOrbit(exp, lam, eps)
                row["eps"] = eps
                row["residual"] = residual(model, orbit, max(256, samples // 2))
                row["extrapolated"] = row["residual"] > EXTRAPOLATION_RESIDUAL
                row["components"] = orbit_extrema(orbit, samples)
        except Exception as exc:  # per-point failure, sweep continues
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows
