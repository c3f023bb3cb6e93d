"""Reference DDE integrator (method of steps) and orbit cross-validation.

The integrator advances a single-delay system with the embedded Dormand-
Prince 5(4) pair, with the step capped at a quarter of the delay so every
delayed lookup lands in already-completed territory (or in the constant
pre-history).  Dense output is the C1 cubic Hermite interpolant through the
step endpoints, which keeps the delayed-argument accuracy commensurate with
the local step error.

On top of it sit steady-state detection (upward equilibrium crossings of
the first component, bisected on the dense output, with period and peak-
amplitude convergence checks) and the phase-aligned relative error between
the numerical steady state and a reconstructed orbit.
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np

from .errors import ComparisonError, IntegrationError, SteadyStateError

# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                187 / 2100, 1 / 40])


class Trajectory:
    """Dense numerical solution with cubic Hermite segments between knots."""

    def __init__(self, ts, ys, fs, lam, history_value):
        self.ts = np.asarray(ts, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.fs = np.asarray(fs, dtype=float)
        self.lam = float(lam)
        self.history_value = np.asarray(history_value, dtype=float)
        self.t_start = float(self.ts[0])
        self.t_end = float(self.ts[-1])

    @property
    def dim(self) -> int:
        return self.ys.shape[1]

    def _segment_eval(self, t, deriv=False):
        ts = self.ts
        i = int(np.searchsorted(ts, t, side="right")) - 1
        i = min(max(i, 0), len(ts) - 2)
        t0, t1 = ts[i], ts[i + 1]
        dt = t1 - t0
        s = (t - t0) / dt
        y0, y1 = self.ys[i], self.ys[i + 1]
        f0, f1 = self.fs[i], self.fs[i + 1]
        if not deriv:
            h00 = (1 + 2 * s) * (1 - s) ** 2
            h10 = s * (1 - s) ** 2
            h01 = s * s * (3 - 2 * s)
            h11 = s * s * (s - 1)
            return h00 * y0 + h10 * dt * f0 + h01 * y1 + h11 * dt * f1
        d00 = 6 * s * (s - 1) / dt
        d10 = (1 - 4 * s + 3 * s * s)
        d01 = -d00
        d11 = (3 * s * s - 2 * s)
        return d00 * y0 + d10 * f0 + d01 * y1 + d11 * f1

    def value(self, t):
        """Dense-output state; scalar t gives (dim,), array t gives (m, dim)."""
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            tv = float(t_arr)
            if tv <= self.t_start:
                if tv < self.t_start - self.lam - 1e-9 * max(1.0, self.lam):
                    raise IntegrationError(
                        f"delayed lookup at t={tv} precedes the history interval")
                return self.history_value.copy()
            if tv > self.t_end + 1e-9 * max(1.0, abs(self.t_end)):
                raise IntegrationError(
                    f"lookup at t={tv} beyond the trajectory end {self.t_end}")
            return self._segment_eval(min(tv, self.t_end))
        return np.stack([self.value(float(tv)) for tv in t_arr])

    def derivative(self, t):
        tv = float(t)
        if tv <= self.t_start:
            return np.zeros(self.dim)
        return self._segment_eval(min(tv, self.t_end), deriv=True)

    def __repr__(self):
        return (f"Trajectory(lam={self.lam}, t=[{self.t_start}, {self.t_end}], "
                f"knots={len(self.ts)})")


class Alignment:
    """Phase anchor of a steady oscillation: crossing time and period."""

    def __init__(self, t0, period_est):
        self.t0 = float(t0)
        self.period_est = float(period_est)

    def __repr__(self):
        return f"Alignment(t0={self.t0:.6g}, period={self.period_est:.6g})"


class _History:
    """Growing step record used for delayed lookups during integration."""

    def __init__(self, t0, y0, f0, history_value, lam):
        self.ts = [float(t0)]
        self.ys = [np.asarray(y0, dtype=float)]
        self.fs = [np.asarray(f0, dtype=float)]
        self.history_value = np.asarray(history_value, dtype=float)
        self.t_start = float(t0)
        self.lam = float(lam)

    def push(self, t, y, f):
        self.ts.append(float(t))
        self.ys.append(y)
        self.fs.append(f)

    def lookup(self, t):
        if t <= self.t_start:
            if t < self.t_start - self.lam - 1e-9 * max(1.0, self.lam):
                raise IntegrationError(
                    f"delayed lookup at t={t} precedes the history interval")
            return self.history_value
        i = bisect_right(self.ts, t) - 1
        if i >= len(self.ts) - 1:
            i = len(self.ts) - 2
        t0, t1 = self.ts[i], self.ts[i + 1]
        dt = t1 - t0
        s = (t - t0) / dt
        y0, y1 = self.ys[i], self.ys[i + 1]
        f0, f1 = self.fs[i], self.fs[i + 1]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * y0 + h10 * dt * f0 + h01 * y1 + h11 * dt * f1


def integrate(model, lam, history, t_end, rtol=1e-9, atol=1e-9) -> Trajectory:
    """Integrate from a constant pre-history on [0, t_end].

    The step size is error-controlled to (rtol, atol) and capped at lam/4 so
    delayed arguments always fall behind the current step.
    """
    if t_end <= 0:
        raise IntegrationError("t_end must be positive")
    if not (1e-12 <= rtol <= 1e-3 and 1e-12 <= atol <= 1e-3):
        raise IntegrationError("tolerances must lie in [1e-12, 1e-3]")
    lam = float(lam)
    y = np.asarray(history, dtype=float).copy()
    if y.shape != (model.dim,):
        raise IntegrationError(
            f"history must be a constant state of dim {model.dim}")

    def rhs(t, state, rec):
        ydel = rec.lookup(t - lam)
        return np.array(model.rhs(lam, list(state), list(ydel)), dtype=float)

    h_max = lam / 4.0
    rec = _History(0.0, y, np.zeros(model.dim), y, lam)
    f = rhs(0.0, y, rec)
    rec.fs[0] = f

    t = 0.0
    h = min(h_max, t_end, 1e-2 * lam + 1e-12)
    n_stages = 7
    k = np.zeros((n_stages, model.dim))
    min_h_floor = 1e-14
    while t < t_end:
        h = min(h, h_max, t_end - t)
        if h < min_h_floor * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t={t}")
        k[0] = f
        for i in range(1, n_stages):
            ti = t + _C[i] * h
            yi = y + h * (_A[i] @ k[:i])
            k[i] = rhs(ti, yi, rec)
        y5 = y + h * (_B5 @ k)
        y4 = y + h * (_B4 @ k)
        if not np.all(np.isfinite(y5)):
            raise IntegrationError(f"non-finite state at t={t + h}")
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.max(np.abs(y5 - y4) / scale))
        if err <= 1.0:
            t += h
            y = y5
            f = k[6].copy()  # FSAL: last stage is f(t+h, y5)
            rec.push(t, y, f)
        factor = 0.9 * (max(err, 1e-16)) ** (-0.2)
        h *= min(5.0, max(0.2, factor))
    return Trajectory(rec.ts, rec.ys, rec.fs, lam, rec.history_value)


# -- steady state ---------------------------------------------------------------


def _bisect_crossing(traj, level, a, b):
    """Upward crossing time of component 1 through ``level`` in [a, b]."""
    fa = traj.value(a)[0] - level
    for _ in range(80):
        mid = 0.5 * (a + b)
        fm = traj.value(mid)[0] - level
        if fa * fm <= 0.0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def _cycle_peak(traj, ts, d, level, i0, i1):
    """Peak |deviation| within one cycle, refined on the dense output.

    The knot values alone jitter with the step pattern; a short golden-
    section maximization of |x1(t) - level| around the knot maximum brings
    the estimate down to the interpolant accuracy."""
    seg = np.abs(d[i0:i1 + 1])
    k = i0 + int(np.argmax(seg))
    a = ts[max(k - 1, 0)]
    b = ts[min(k + 1, len(ts) - 1)]

    def f(t):
        return abs(float(traj.value(t)[0]) - level)

    gr = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - gr * (b - a)
    x2 = a + gr * (b - a)
    f1, f2 = f(x1), f(x2)
    best = float(np.abs(d[k]))
    for _ in range(25):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + gr * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - gr * (b - a)
            f1 = f(x1)
        best = max(best, f1, f2)
    return best


def detect_steady_state(traj: Trajectory, level=0.0, tol_amp=1e-6,
                        tol_per=1e-6) -> Alignment:
    """Find the settled oscillation phase reference.

    Scans upward crossings of component 1 through ``level`` (bisected on the
    dense output); steady state is declared when the last three period
    estimates agree to tol_per (relative) and the last three per-cycle peak
    amplitudes agree to tol_amp (absolute).  Returns the last crossing and
    the last period estimate.
    """
    d = traj.ys[:, 0] - level
    up = np.nonzero((d[:-1] <= 0.0) & (d[1:] > 0.0))[0]
    if len(up) < 6:
        raise SteadyStateError(
            f"only {len(up)} upward crossings found; trajectory too short "
            "or not oscillating")
    crossings = np.array([_bisect_crossing(traj, level, traj.ts[i],
                                           traj.ts[i + 1]) for i in up])
    periods = np.diff(crossings)
    if len(periods) < 3:
        raise SteadyStateError("fewer than 3 full cycles in the trajectory")
    last_p = periods[-3:]
    last_a = np.array([_cycle_peak(traj, traj.ts, d, level, up[i], up[i + 1])
                       for i in range(len(up) - 4, len(up) - 1)])
    p_ok = np.max(np.abs(np.diff(last_p))) <= tol_per * float(np.mean(last_p))
    a_ok = np.max(np.abs(np.diff(last_a))) <= tol_amp
    if not (p_ok and a_ok):
        raise SteadyStateError(
            "oscillation not settled: period spread "
            f"{np.max(np.abs(np.diff(last_p))):.3e}, amplitude spread "
            f"{np.max(np.abs(np.diff(last_a))):.3e}; integrate longer")
    return Alignment(crossings[-1], float(periods[-1]))


# -- phase-aligned comparison -----------------------------------------------------


def _orbit_anchor(orbit) -> float:
    """Time in [0, period) where the orbit's first component crosses its
    equilibrium level upward.  The construction places a crossing at t = 0;
    if its slope is negative the other crossing of the fundamental is used."""
    if orbit.derivative(0.0)[0] > 0.0:
        return 0.0
    ts = np.linspace(0.0, orbit.period, 512, endpoint=False)
    d = orbit.deviation(ts)[:, 0]
    for i in range(len(ts) - 1):
        if d[i] <= 0.0 < d[i + 1]:
            a, b = ts[i], ts[i + 1]
            fa = d[i]
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = float(orbit.deviation(mid)[0])
                if fa * fm <= 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            return 0.5 * (a + b)
    raise ComparisonError("orbit has no upward equilibrium crossing")


def relative_error(orbit, traj: Trajectory, align: Alignment,
                   samples: int = 1024) -> float:
    """Sup-norm deviation between the settled trajectory and the orbit over
    one numerical period, both as deviations from the equilibrium, divided
    by the sup of the reference."""
    T = align.period_est
    if abs(orbit.period - T) > 0.05 * T:
        raise ComparisonError(
            f"period mismatch: orbit {orbit.period:.6g} vs numerical "
            f"{T:.6g}; refusing to compare")
    t0 = align.t0
    # Keep one full period inside the trajectory by stepping whole periods back.
    while t0 + T > traj.t_end and t0 - T >= traj.t_start:
        t0 -= T
    if t0 + T > traj.t_end:
        raise ComparisonError("trajectory too short after the anchor")
    t_a = _orbit_anchor(orbit)
    eq = orbit.equilibrium
    offs = np.linspace(0.0, T, samples, endpoint=False)
    ref = traj.value(t0 + offs) - eq
    app = orbit.deviation(t_a + offs)
    return float(np.max(np.abs(ref - app)) / np.max(np.abs(ref)))


def cross_validate(orbit, rtol=1e-9, atol=1e-9, history=None, t_end=None,
                   tol_amp=1e-6, tol_per=1e-6, max_doublings=2):
    """Integrate the model at the orbit's delay and measure the phase-aligned
    error.  Returns (e_r, alignment, trajectory).

    The default constant history is the orbit state at t = 0 (a point on the
    attracting cycle), which keeps the transient short; t_end defaults to
    120 periods and doubles until steady state is detected.
    """
    model = orbit.expansion.model
    lam = orbit.lam
    if history is None:
        history = orbit.evaluate(0.0)
    if t_end is None:
        t_end = 120.0 * orbit.period
    level = float(orbit.equilibrium[0])
    last_exc = None
    for _ in range(max_doublings + 1):
        traj = integrate(model, lam, history, t_end, rtol=rtol, atol=atol)
        try:
            align = detect_steady_state(traj, level=level, tol_amp=tol_amp,
                                        tol_per=tol_per)
            return relative_error(orbit, traj, align), align, traj
        except SteadyStateError as exc:
            last_exc = exc
            t_end *= 2.0
    raise SteadyStateError(
        f"no steady state reached after extending t_end: {last_exc}")
