"""Quadratic master equations and their link to the oscillator-bath model.

The master equation

    drho/dt = [H_s, rho] / (i hbar) - k1 {q,rho,q} - k2 {p,rho,p}
              + k3 {p,rho,q} + k3^* {q,rho,p},
    H_s = b11 q^2 + b12 (qp + pq) + b22 p^2,
    {A, rho, B} = B A^dag rho + rho B A^dag - 2 A^dag rho B,

is solved by a reversible propagator followed by a dissipative exponential
parameterized by four real functions w1..w4.  Only their action on second
moments and the scalar Lindblad-form criterion are represented here.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NonPositiveR2, PreconditionFailure, StepFailure
from .fluctuation import fluctuation_rates, mode_integrals, xy_quantities
from .moments import GaussianMomentState, transform_moments
from .propagator import SpectralDecomposition

__all__ = [
    "MasterModel",
    "WState",
    "LadderCoefficients",
    "constant_master_model",
    "ullersma_master_model",
    "solve_w",
    "w_from_ullersma",
    "lindblad39_residual",
    "master_moments",
    "uncertainty43_residual",
    "reversible_moments",
    "ladder_coefficients",
    "first_exponent_coefficient",
    "appendix2_construct",
    "appendix2_bracket",
]


def _const(value):
    return lambda t: value


@dataclass(frozen=True)
class MasterModel:
    """Coefficient functions of time; ``k3`` is complex and k4 = conj(k3)."""

    b11: Callable[[float], float]
    b12: Callable[[float], float]
    b22: Callable[[float], float]
    k1: Callable[[float], float]
    k2: Callable[[float], float]
    k3: Callable[[float], complex]


def constant_master_model(b11=0.0, b12=0.0, b22=0.0, k1=0.0, k2=0.0, k3=0j) -> MasterModel:
    return MasterModel(
        _const(float(b11)), _const(float(b12)), _const(float(b22)),
        _const(float(k1)), _const(float(k2)), _const(complex(k3)),
    )


@dataclass(frozen=True)
class WState:
    t: float
    w1: float
    w2: float
    w3: float
    w4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.w1, self.w2, self.w3, self.w4])


def solve_w(
    mm: MasterModel,
    t_grid: Sequence[float],
    hbar: float = 1.0,
    rtol: float = 1e-11,
    atol: float = 1e-13,
) -> list[WState]:
    """Integrate the w-equations from w(0) = 0.

        d(w1, w2, w3)/dt = 2 M(b) (w1, w2, w3) + exp(w4) (k1, k2, Re k3)
        dw4/dt = 2 i hbar (k3 - k4) = -4 hbar Im k3
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0 or t_grid[0] != 0.0:
        raise ValueError("t_grid must start at 0")

    def rhs(t, y):
        w1, w2, w3, w4 = y
        b11, b12, b22 = mm.b11(t), mm.b12(t), mm.b22(t)
        k3 = complex(mm.k3(t))
        dw4 = 2j * hbar * (k3 - k3.conjugate())
        source = math.exp(w4)
        return [
            2 * (-2 * b12 * w1 - 2 * b11 * w3) + source * mm.k1(t),
            2 * (2 * b12 * w2 + 2 * b22 * w3) + source * mm.k2(t),
            2 * (b22 * w1 - b11 * w2) + source * k3.real,
            dw4.real,
        ]

    if t_grid[-1] == 0.0:
        ys = np.zeros((4, t_grid.size))
    else:
        sol = solve_ivp(
            rhs, (0.0, t_grid[-1]), np.zeros(4), method="DOP853",
            t_eval=t_grid, rtol=rtol, atol=atol,
        )
        if not sol.success:
            raise StepFailure(sol.message)
        ys = sol.y
    return [WState(float(t), *map(float, ys[:, i])) for i, t in enumerate(t_grid)]


def _require_r2(R2: float, t: float) -> None:
    if not R2 > 0:
        raise NonPositiveR2(f"R^2({t}) = {R2:.3e} <= 0")


def w_from_ullersma(decomp: SpectralDecomposition, T: float, t: float) -> WState:
    """w's reproducing the exact reduced dynamics at time ``t``.

    Matching the dissipative exponents term by term gives
    w4 = -ln R^2, w1 = m0 Y / (2 hbar^2 R^2), w2 = X / (2 hbar^2 m0 R^2),
    w3 = X_dot / (4 hbar^2 R^2).
    """
    model = decomp.model
    hbar, m0 = model.hbar, model.m0
    fs = xy_quantities(decomp, T, t)
    _require_r2(fs.R2, t)
    den = hbar**2 * fs.R2
    return WState(
        float(t),
        m0 * fs.Y / (2 * den),
        fs.X / (2 * den * m0),
        fs.X_dot / (4 * den),
        -math.log(fs.R2),
    )


def ullersma_master_model(decomp: SpectralDecomposition, T: float) -> MasterModel:
    """Time-dependent coefficients whose master equation reproduces the exact moments.

    H_s generates U~(t) (the symplectic map S(t) = [[A_dot, A/m0], [m0 A_ddot, A_dot]] / R),
    Im k3 carries the decay of R^2 and (k1, k2, Re k3) the diffusion of
    (m0 Y, X/m0, X_dot).  k2 vanishes identically.
    Valid while R^2(t) > 0.
    """
    model = decomp.model
    hbar, m0 = model.hbar, model.m0

    def coefficients(t):
        mi = mode_integrals(decomp, t)
        pr = mi.propagator
        _require_r2(pr.R2, t)
        fs = xy_quantities(decomp, T, t, mi)
        X_ddot, Y_dot = fluctuation_rates(decomp, T, t, mi)
        growth = pr.A_dot * pr.A_ddot - pr.A * pr.A_dddot  # = d(R^2)/dt
        w4_dot = -growth / pr.R2
        b11 = m0 * (pr.A_ddot**2 - pr.A_dot * pr.A_dddot) / (2 * pr.R2)
        b12 = -growth / (4 * pr.R2)
        b22 = 1.0 / (2 * m0)
        X, Y, Xd = fs.X, fs.Y, fs.X_dot
        k1 = (m0 * Y_dot + 2 * b11 * Xd + 4 * b12 * m0 * Y + w4_dot * m0 * Y) / (2 * hbar**2)
        k2 = (Xd / m0 - 4 * b12 * X / m0 - 2 * b22 * Xd + w4_dot * X / m0) / (2 * hbar**2)
        re_k3 = (X_ddot - 4 * b22 * m0 * Y + 4 * b11 * X / m0 + w4_dot * Xd) / (4 * hbar**2)
        im_k3 = -w4_dot / (4 * hbar)
        return b11, b12, b22, k1, k2, complex(re_k3, im_k3)

    def pick(i):
        return lambda t: coefficients(t)[i]

    return MasterModel(*(pick(i) for i in range(6)))


def lindblad39_residual(w: WState, hbar: float = 1.0) -> float:
    """w1 w2 - w3^2 - ((exp(w4) - 1) / (4 hbar))^2."""
    return w.w1 * w.w2 - w.w3**2 - (math.expm1(w.w4) / (4 * hbar)) ** 2


def master_moments(
    w: WState, reversible: GaussianMomentState, hbar: float = 1.0
) -> GaussianMomentState:
    """Second moments exp(-w4) [reversible + diffusion from w].

    First moments only feel the exp(-w4/2) contraction of the dissipator; they
    are carried along for central-moment checks.
    """
    decay = math.exp(-w.w4)
    half = math.exp(-0.5 * w.w4)
    return GaussianMomentState(
        half * reversible.mean_q,
        half * reversible.mean_p,
        decay * (reversible.qq + 2 * hbar**2 * w.w2),
        decay * (reversible.pp + 2 * hbar**2 * w.w1),
        decay * (reversible.qp_sym + 4 * hbar**2 * w.w3),
    )


def uncertainty43_residual(
    w: WState, reversible: GaussianMomentState, evolved: GaussianMomentState, hbar: float = 1.0
) -> float:
    decay = math.exp(-w.w4)
    dq = evolved.qq - decay * reversible.qq
    dp = evolved.pp - decay * reversible.pp
    dc = evolved.qp_sym - decay * reversible.qp_sym
    return dq * dp - 0.25 * dc**2 - 0.25 * hbar**2 * (-math.expm1(-w.w4)) ** 2


def reversible_moments(
    mm: MasterModel,
    initial: GaussianMomentState,
    t_grid: Sequence[float],
    hbar: float = 1.0,
    rtol: float = 1e-11,
    atol: float = 1e-13,
) -> list[GaussianMomentState]:
    """Moments under H_s alone: q' = 2 b12 q + 2 b22 p, p' = -2 b11 q - 2 b12 p."""
    t_grid = np.asarray(t_grid, dtype=float)

    def rhs(t, y):
        G = np.array([[2 * mm.b12(t), 2 * mm.b22(t)], [-2 * mm.b11(t), -2 * mm.b12(t)]])
        return (G @ y.reshape(2, 2)).ravel()

    if t_grid[-1] == 0.0:
        mats = [np.eye(2)] * t_grid.size
    else:
        sol = solve_ivp(
            rhs, (0.0, t_grid[-1]), np.eye(2).ravel(), method="DOP853",
            t_eval=t_grid, rtol=rtol, atol=atol,
        )
        if not sol.success:
            raise StepFailure(sol.message)
        mats = [sol.y[:, i].reshape(2, 2) for i in range(t_grid.size)]
    return [transform_moments(S, initial) for S in mats]


@dataclass(frozen=True)
class LadderCoefficients:
    a: float
    b: float
    c: complex
    phi_minus_theta: float
    u: complex
    v: complex
    first_exponent: float

    def commutator(self, hbar: float = 1.0) -> float:
        """[B, B^dag] = 2 hbar |u| |v| sin(phi - theta)."""
        return 2 * hbar * abs(self.u) * abs(self.v) * math.sin(self.phi_minus_theta)


def first_exponent_coefficient(R2: float, covariance_gap: float, hbar: float = 1.0) -> float:
    """-ln(R^2)/2 - ln(1 + (sqrt(XY - X_dot^2/4)/hbar + (1 - R^2)/2) / R^2) / 2.

    Vanishes exactly when sqrt(XY - X_dot^2/4) = hbar (1 - R^2) / 2, i.e. D = 0
    with 1 - R^2 > 0.
    """
    root = math.sqrt(max(covariance_gap, 0.0))
    return -0.5 * math.log(R2) - 0.5 * math.log1p((root / hbar + 0.5 * (1 - R2)) / R2)


def ladder_coefficients(decomp: SpectralDecomposition, T: float, t: float) -> LadderCoefficients:
    """Coefficients a, b, c of the interaction-picture dissipator and the ladder operator B.

    The dissipator reads -a {q,.,q} - b {p,.,p} + c {q,.,p} + c^* {p,.,q}.
    B = u q + v p with theta = 0, so u is real and v = |v| exp(i phi).
    """
    model = decomp.model
    hbar, m = model.hbar, model.m0
    mi = mode_integrals(decomp, t)
    pr = mi.propagator
    fs = xy_quantities(decomp, T, t, mi)
    R2 = pr.R2
    if not R2 > 0:
        raise PreconditionFailure(f"R^2 = {R2:.3e} must be > 0")
    if R2 == 1.0:
        raise PreconditionFailure("R^2 = 1: coefficients divide by 1 - R^2")
    if not fs.covariance_gap > 0:
        raise PreconditionFailure(f"XY - X_dot^2/4 = {fs.covariance_gap:.3e} must be > 0")

    A, Ad, Add = pr.A, pr.A_dot, pr.A_ddot
    X, Y, Xd = fs.X, fs.Y, fs.X_dot
    log_r2 = math.log(R2)
    pref = log_r2 / (2 * hbar**2 * R2 * (1 - R2))
    a = -m * pref * (Add**2 * X - Ad * Add * Xd + Ad**2 * Y)
    b = -pref / m * (A**2 * Y - A * Ad * Xd + Ad**2 * X)
    c = 0.5 * pref * complex(
        2 * A * Ad * Y - A * Add * Xd + 2 * Ad * Add * X - Ad**2 * Xd, -hbar * R2 * (1 - R2)
    )
    det = a * b - c.real**2
    if not (a > 0 and b > 0 and det > 0):
        raise PreconditionFailure(f"need a, b > 0 and ab - Re(c)^2 > 0; got a={a}, b={b}, det={det}")
    root = math.sqrt(det)
    phi_minus_theta = math.atan2(root, -c.real)
    norm = 2 * hbar * root
    u = complex(math.sqrt(a / norm), 0.0)
    v = math.sqrt(b / norm) * cmath.exp(1j * phi_minus_theta)
    return LadderCoefficients(
        a, b, c, phi_minus_theta, u, v,
        first_exponent_coefficient(R2, fs.covariance_gap, hbar),
    )


def appendix2_construct(
    w4_fn: Callable[[float], float],
    split: float,
    t_grid: Sequence[float],
    hbar: float = 1.0,
    w3_sign: int = 1,
) -> list[WState]:
    """w's with w1 w2 = w3^2 = (exp(2 w4) - 1) / (4 hbar)^2.

    w1 = split * s, w2 = s / split, w3 = +/- s with
    s = sqrt(exp(2 w4) - 1) / (4 hbar).  The Lindblad-form criterion then
    fails for every t > 0 while <q^2><p^2> >= hbar^2/4 survives.
    """
    if not split > 0:
        raise ValueError("split must be positive")
    if w3_sign not in (1, -1):
        raise ValueError("w3_sign must be +1 or -1")
    out = []
    for t in np.asarray(t_grid, dtype=float):
        w4 = float(w4_fn(t))
        s = math.sqrt(math.expm1(2 * w4)) / (4 * hbar)
        out.append(WState(float(t), split * s, s / split, w3_sign * s, w4))
    return out


def appendix2_bracket(w: WState, hbar: float = 1.0) -> float:
    """2 hbar^2 (w1 w2 - ((e^{w4} - 1)/(4 hbar))^2) - (e^{w4} - 1)/4; zero under the construction."""
    em1 = math.expm1(w.w4)
    return 2 * hbar**2 * (w.w1 * w.w2 - (em1 / (4 * hbar)) ** 2) - em1 / 4
