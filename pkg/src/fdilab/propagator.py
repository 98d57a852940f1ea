"""Exact propagator of the system oscillator via normal modes.

With V the potential matrix and V = U diag(lambda) U^T,

    A_{0 nu}(t) = sum_j U_{0j} U_{nu j} sin(sqrt(lambda_j) t) / sqrt(lambda_j)

and A(t) = A_00(t).  Derivatives follow termwise.  ``ode_oracle`` solves the
same linear equations of motion by adaptive integration for cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NonPositiveMode, NumericalFailure, PositivityViolation, StepFailure
from .model import OscillatorBathModel, validate_model

__all__ = [
    "SpectralDecomposition",
    "PropagatorSample",
    "decompose",
    "propagator_at",
    "ode_oracle",
    "min_dissipation_scan",
    "sum_rule_residual",
]


@dataclass(frozen=True)
class SpectralDecomposition:
    model: OscillatorBathModel
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns

    @property
    def frequencies(self) -> np.ndarray:
        return np.sqrt(self.eigenvalues)

    @property
    def system_weights(self) -> np.ndarray:
        """U_{0j}^2, the overlap of each normal mode with the system."""
        return self.eigenvectors[0] ** 2


@dataclass(frozen=True)
class PropagatorSample:
    t: float
    A: float
    A_dot: float
    A_ddot: float
    A_dddot: float
    R2: float
    bath_A: Optional[np.ndarray] = None
    bath_A_dot: Optional[np.ndarray] = None
    bath_A_ddot: Optional[np.ndarray] = None

    @property
    def one_minus_R2(self):
        return 1.0 - self.R2


def decompose(model: OscillatorBathModel) -> SpectralDecomposition:
    report = validate_model(model)
    if report:
        raise PositivityViolation("; ".join(v.message for v in report))
    V = model.potential_matrix()
    try:
        lam, U = np.linalg.eigh(V)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    if lam[0] <= 0:
        raise NonPositiveMode(
            f"smallest normal-mode eigenvalue {lam[0]:.3e} <= 0 for a validated model"
        )
    lam.setflags(write=False)
    U.setflags(write=False)
    return SpectralDecomposition(model, lam, U)


def propagator_at(decomp: SpectralDecomposition, t, bath: bool = False) -> PropagatorSample:
    """Evaluate A, its first three derivatives and R^2 at time(s) ``t``.

    ``t`` may be a scalar or an array; negative times are accepted (the mode
    sums are odd/even in t).  With ``bath=True`` the bath-resolved A_{0n}
    and two derivatives are included, shaped (N,) + shape(t).
    """
    t_arr = np.asarray(t, dtype=float)
    kappa = decomp.frequencies
    phase = np.multiply.outer(kappa, t_arr)
    sin, cos = np.sin(phase), np.cos(phase)
    k = kappa.reshape(kappa.shape + (1,) * t_arr.ndim)

    w = decomp.system_weights.reshape(k.shape)
    A = np.sum(w * sin / k, axis=0)
    A_dot = np.sum(w * cos, axis=0)
    A_ddot = -np.sum(w * k * sin, axis=0)
    A_dddot = -np.sum(w * k**2 * cos, axis=0)
    R2 = A_dot**2 - A * A_ddot
    if decomp.model.is_uncoupled:
        # cos^2 + sin^2 is 1 only up to rounding; the bare oscillator has R = 1
        R2 = np.ones_like(R2)
    origin = t_arr == 0.0
    if np.any(origin):
        # exact initial data; the mode sums only reproduce them to rounding
        A = np.where(origin, 0.0, A)
        A_dot = np.where(origin, 1.0, A_dot)
        A_ddot = np.where(origin, 0.0, A_ddot)
        A_dddot = np.where(origin, -decomp.model.omega0**2, A_dddot)
        R2 = np.where(origin, 1.0, R2)

    bath_fields = {}
    if bath:
        U = decomp.eigenvectors
        # rows n = 1..N of U, weighted by the system row
        cross = (U[0] * U[1:]).reshape(U[1:].shape + (1,) * t_arr.ndim)
        k1 = k[None]
        bath_fields = dict(
            bath_A=np.sum(cross * (sin / k)[None], axis=1),
            bath_A_dot=np.where(origin, 0.0, np.sum(cross * cos[None], axis=1)),
            bath_A_ddot=-np.sum(cross * (k1 * sin[None]), axis=1),
        )

    def _out(x):
        return float(x) if np.ndim(x) == 0 else x

    return PropagatorSample(
        _out(t_arr), _out(A), _out(A_dot), _out(A_ddot), _out(A_dddot), _out(R2), **bath_fields
    )


def sum_rule_residual(sample: PropagatorSample) -> float:
    """A_dot^2 - A A_ddot + sum_n (A_0n_dot^2 - A_0n A_0n_ddot) - 1 (commutator sum rule)."""
    if sample.bath_A is None:
        raise ValueError("sum rule needs a sample computed with bath=True")
    bath = np.sum(sample.bath_A_dot**2 - sample.bath_A * sample.bath_A_ddot, axis=0)
    return sample.R2 + bath - 1.0


def ode_oracle(
    model: OscillatorBathModel,
    t_grid: Sequence[float],
    rtol: float = 1e-11,
    atol: float = 1e-11,
) -> list[PropagatorSample]:
    """Integrate Q'' = -V Q from Q(0) = 0, P(0) = e_0 with DOP853.

    Because A is symmetric, this single column yields A = Q_0 and the bath
    row A_{0n} = Q_n, with derivatives P and -V Q.  ``A_dddot`` is
    -(V P)_0.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0 or t_grid[0] != 0.0 or np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be sorted ascending and start at 0")
    V = model.potential_matrix()
    dim = V.shape[0]
    y0 = np.zeros(2 * dim)
    y0[dim] = 1.0

    if t_grid[-1] == 0.0:
        ys = np.repeat(y0[:, None], t_grid.size, axis=1)
    else:
        def rhs(_t, y):
            return np.concatenate([y[dim:], -V @ y[:dim]])

        sol = solve_ivp(
            rhs, (0.0, t_grid[-1]), y0, method="DOP853", t_eval=t_grid,
            rtol=rtol, atol=atol,
        )
        if not sol.success:
            raise StepFailure(sol.message)
        ys = sol.y

    samples = []
    for i, t in enumerate(t_grid):
        Q, P = ys[:dim, i], ys[dim:, i]
        acc = -V @ Q
        jerk = -V @ P
        A, A_dot, A_ddot = Q[0], P[0], acc[0]
        samples.append(
            PropagatorSample(
                float(t), float(A), float(A_dot), float(A_ddot), float(jerk[0]),
                float(A_dot**2 - A * A_ddot),
                bath_A=Q[1:].copy(), bath_A_dot=P[1:].copy(), bath_A_ddot=acc[1:].copy(),
            )
        )
    return samples


def min_dissipation_scan(model: OscillatorBathModel, t_max: float, n_steps: int):
    """Grid minimum of 1 - R^2(t) on ``linspace(0, t_max, n_steps)``.

    Returns ``(t_star, min_value)``; a negative minimum signals negative
    dissipation.
    """
    if t_max <= 0 or n_steps < 2:
        raise ValueError("need t_max > 0 and n_steps >= 2")
    decomp = decompose(model)
    t = np.linspace(0.0, t_max, n_steps)
    diss = 1.0 - propagator_at(decomp, t).R2
    i = int(np.argmin(diss))
    return float(t[i]), float(diss[i])
