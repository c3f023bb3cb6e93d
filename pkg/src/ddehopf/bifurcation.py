"""Hopf point location and null-space bases of the critical delay operator.

The characteristic matrix of the linearized delayed system is

    M(omega, lam) = i*omega*I - P(lam) - Q(lam) * e^(-i*omega*lam),

with P, Q re-linearized at the lam-dependent equilibrium.  The Hopf point
(omega0, lam0) solves det M = 0 with omega0 > 0.  In rescaled time the
critical operator and its formal adjoint act on 2*pi-periodic functions as

    L u  = u' - A u - B u(. - lh0),        A = P/omega0, B = Q/omega0,
    L* u = u' + A^T u + B^T u(. + lh0),    lh0 = omega0*lam0,

and both have two-dimensional null spaces spanned by first-harmonic
trigonometric polynomials built from the null vectors of the characteristic
matrices.
"""

from __future__ import annotations

import numpy as np

from . import models as mdl
from . import trigpoly as tp
from .errors import HopfError, ResonanceError
from .trigpoly import TrigPoly

HOPF_MAX_ITER = 100
RESONANCE_TOL = 1e-6
RESONANCE_MAX_HARMONIC = 8


class HopfPoint:
    """Bifurcation point data: frequency, delay and complex null vectors."""

    def __init__(self, omega0, lambda0, right_null, left_null):
        self.omega0 = float(omega0)
        self.lambda0 = float(lambda0)
        self.right_null = np.asarray(right_null, dtype=complex)
        self.left_null = np.asarray(left_null, dtype=complex)

    @property
    def lambda_hat0(self) -> float:
        return self.omega0 * self.lambda0

    def to_dict(self) -> dict:
        return {
            "omega0": self.omega0,
            "lambda0": self.lambda0,
            "lambda_hat0": self.lambda_hat0,
        }

    def __repr__(self):
        return f"HopfPoint(omega0={self.omega0:.6g}, lambda0={self.lambda0:.6g})"


class LinearBases:
    """Orthonormal bases of N(L) (v1, v2) and N(L*) (w1, w2)."""

    def __init__(self, v1, v2, w1, w2):
        self.v1 = v1
        self.v2 = v2
        self.w1 = w1
        self.w2 = w2


def characteristic_matrix(model, omega, lam):
    P, Q = mdl.linearization(model, lam)
    n = model.dim
    return (1j * omega * np.eye(n) - P - Q * np.exp(-1j * omega * lam))


def _scaled_det(mat) -> complex:
    """Determinant of the row-normalized matrix; zero exactly when det is."""
    norms = np.linalg.norm(mat, axis=1)
    norms[norms == 0.0] = 1.0
    return complex(np.linalg.det(mat / norms[:, None]))


def find_hopf(model, omega_guess=None, lambda_guess=None,
              resonance_tol=RESONANCE_TOL) -> HopfPoint:
    """Locate (omega0, lambda0) by a 2D Newton iteration on the real and
    imaginary parts of the row-scaled characteristic determinant."""
    w = model.hopf_hint[0] if omega_guess is None else float(omega_guess)
    lam = model.hopf_hint[1] if lambda_guess is None else float(lambda_guess)

    w_floor = 1e-6 * max(abs(w), 1e-6)
    lam_floor = 1e-6 * max(abs(lam), 1e-6)

    def f(w_, lam_):
        d = _scaled_det(characteristic_matrix(model, max(w_, w_floor),
                                              max(lam_, lam_floor)))
        return np.array([d.real, d.imag])

    converged = False
    r = f(w, lam)
    for _ in range(HOPF_MAX_ITER):
        if np.max(np.abs(r)) <= 1e-13:
            converged = True
            break
        hw = 1e-7 * max(abs(w), 1e-3)
        hl = 1e-7 * max(abs(lam), 1e-3)
        J = np.column_stack([
            (f(w + hw, lam) - f(w - hw, lam)) / (2 * hw),
            (f(w, lam + hl) - f(w, lam - hl)) / (2 * hl),
        ])
        try:
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError as exc:
            raise HopfError("singular Jacobian in the Hopf point Newton") from exc
        # backtracking keeps the iterate in the valid quadrant and prevents
        # jumps across the oscillatory determinant landscape
        norm0 = float(np.max(np.abs(r)))
        for _ in range(40):
            w_new, lam_new = w - step[0], lam - step[1]
            if w_new > 0.0 and lam_new > 0.0:
                r_new = f(w_new, lam_new)
                if float(np.max(np.abs(r_new))) < norm0:
                    break
            step = 0.5 * step
        else:
            raise HopfError("Hopf point Newton stalled (no descent step)")
        w, lam, r = w_new, lam_new, r_new
        if not (np.isfinite(w) and np.isfinite(lam)):
            raise HopfError("Hopf point Newton diverged")
    residual = float(np.max(np.abs(f(w, lam))))
    if not converged and residual > 1e-11:
        raise HopfError(
            f"Hopf point Newton did not converge in {HOPF_MAX_ITER} iterations "
            f"(residual {residual:.2e})")
    if w <= 0:
        raise HopfError(f"nonpositive frequency {w} at the Hopf point")

    # A1 guard: no harmonic multiple of i*omega0 may also be a root.
    for mharm in range(0, RESONANCE_MAX_HARMONIC + 1):
        if mharm == 1:
            continue
        d = _scaled_det(characteristic_matrix(model, mharm * w, lam))
        if abs(d) < resonance_tol:
            raise ResonanceError(
                f"characteristic root near harmonic {mharm} of omega0 "
                f"(scaled determinant {abs(d):.2e})")

    M = characteristic_matrix(model, w, lam)
    alpha = _null_vector(M)
    P, Q = mdl.linearization(model, lam)
    A, B = P / w, Q / w
    lh0 = w * lam
    W = 1j * np.eye(model.dim) + A.T + B.T * np.exp(1j * lh0)
    beta = _null_vector(W)
    hp = HopfPoint(w, lam, alpha, beta)
    _check_null_residuals(M, W, hp)
    return hp


def _null_vector(mat) -> np.ndarray:
    """Unit right null vector (smallest singular direction), with a canonical
    phase: the largest-magnitude entry is made real positive."""
    _, s, vh = np.linalg.svd(mat)
    v = vh[-1].conj()
    k = int(np.argmax(np.abs(v)))
    v = v * (np.abs(v[k]) / v[k])
    return v


def _check_null_residuals(M, W, hp: HopfPoint):
    ra = float(np.linalg.norm(M @ hp.right_null))
    rb = float(np.linalg.norm(W @ hp.left_null))
    if ra > 1e-9 or rb > 1e-9:
        raise HopfError(
            f"null vector residuals too large: |M a|={ra:.2e}, |W b|={rb:.2e}")


# -- null-space bases -----------------------------------------------------------


def _first_harmonic(zeta, vec) -> TrigPoly:
    """Real part of zeta*vec*e^(i*tau) as a degree-1 polynomial."""
    zv = zeta * vec
    return TrigPoly.harmonic(len(vec), 1, cos_vec=zv.real, sin_vec=-zv.imag)


def null_bases(model, hp: HopfPoint) -> LinearBases:
    """Construct orthonormal bases for N(L) and N(L*).

    v2 is the unit null element whose first component is a pure sine, with
    the overall sign fixed by a positive cosine coefficient in the second
    component; v1 is its quarter-period shift.  Both choices keep the
    expansion output reproducible.  The adjoint basis w1, w2 is built the
    same way from the left null vector (its phase is immaterial downstream,
    since it only enters homogeneous orthogonality conditions).
    """
    alpha = hp.right_null
    if abs(alpha[0]) < 1e-12 * np.linalg.norm(alpha):
        raise HopfError(
            "degenerate null vector: first component vanishes, the phase "
            "condition cannot anchor the solution")
    # zeta*alpha_1 = -i*|alpha_1| makes the first component |alpha_1|*sin(tau)
    zeta = -1j * np.conj(alpha[0]) / abs(alpha[0])
    norm = np.sqrt(np.pi) * np.linalg.norm(alpha)
    v2 = _first_harmonic(zeta / norm, alpha)
    if model.dim > 1 and v2.cos[0, 1] < 0:
        v2 = -v2
    v1 = v2.shift(-np.pi / 2)

    beta = hp.left_null
    norm_b = np.sqrt(np.pi) * np.linalg.norm(beta)
    w1 = _first_harmonic(1.0 / norm_b, beta)
    w2 = w1.shift(-np.pi / 2)

    bases = LinearBases(v1, v2, w1, w2)
    _check_orthonormal(bases)
    return bases


def _check_orthonormal(bases: LinearBases):
    for pair in ((bases.v1, bases.v2), (bases.w1, bases.w2)):
        gram = np.array([[tp.inner(a, b) for b in pair] for a in pair])
        if np.max(np.abs(gram - np.eye(2))) > 1e-10:
            raise HopfError(f"basis not orthonormal: gram={gram}")


# -- critical operator and adjoint ------------------------------------------------


def critical_operator(u: TrigPoly, A, B, lam_hat0: float) -> TrigPoly:
    """L u = u' - A u - B u(. - lam_hat0)."""
    return u.diff() - tp.matvec(A, u) - tp.matvec(B, u.shift(lam_hat0))


def adjoint_operator(u: TrigPoly, A, B, lam_hat0: float) -> TrigPoly:
    """L* u = u' + A^T u + B^T u(. + lam_hat0)."""
    A = np.asarray(A)
    B = np.asarray(B)
    return u.diff() + tp.matvec(A.T, u) + tp.matvec(B.T, u.shift(-lam_hat0))


def rescaled_matrices(model, hp: HopfPoint):
    """(A, B) = (P, Q)/omega0 at the bifurcation delay."""
    P, Q = mdl.linearization(model, hp.lambda0)
    return P / hp.omega0, Q / hp.omega0
