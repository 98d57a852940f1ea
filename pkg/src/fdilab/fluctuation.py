"""Energy functions, bath mode integrals and the fluctuation-dissipation inequality.

For each bath mode n the four integrals

    C0 = int_0^t A(s) cos w_n(t-s) ds      S0 = int_0^t A(s) sin w_n(t-s) ds
    C1 = int_0^t A'(s) cos w_n(t-s) ds     S1 = int_0^t A'(s) sin w_n(t-s) ds

are evaluated in closed form from the normal-mode expansion of A.  All
fluctuation quantities (X, X_dot, Y and their generalizations to any energy
function E(w, x)) are weighted sums of these.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NegativeEnergy
from .propagator import PropagatorSample, SpectralDecomposition, propagator_at

__all__ = [
    "EnergyFunction",
    "ENERGY_FUNCTIONS",
    "energy_function",
    "ModeIntegrals",
    "FluctuationSample",
    "mode_integrals",
    "fe_vector",
    "fluctuation_sample",
    "xy_quantities",
    "fd15_lhs",
    "fd16_x_derivative_check",
    "fd16_closed_form",
    "fd17_residual",
    "ref2_comparison_residual",
    "im_sum_identity",
    "dissipation_from_bath",
]


def _coth_half(omega, x, hbar, boltzmann):
    """(hbar w / 2) coth(hbar w / 2kx) with the x = 0 limit hbar w / 2."""
    omega = np.asarray(omega, dtype=float)
    half = 0.5 * hbar * omega
    if x == 0:
        return half
    with np.errstate(over="ignore"):
        y = hbar * omega / (2.0 * boltzmann * x)
    return half / np.tanh(y)


def _bose(omega, x, hbar, boltzmann):
    omega = np.asarray(omega, dtype=float)
    if x == 0:
        return np.zeros_like(omega)
    with np.errstate(over="ignore"):
        z = hbar * omega / (boltzmann * x)
        return hbar * omega / np.expm1(z)


def _bose_dx(omega, x, hbar, boltzmann):
    # d/dx of both coth and Bose forms: k (y / sinh y)^2, y = hbar w / 2kx
    omega = np.asarray(omega, dtype=float)
    if x == 0:
        return np.zeros_like(omega)
    with np.errstate(over="ignore"):
        y = hbar * omega / (2.0 * boltzmann * x)
    ratio = 2.0 * y * np.exp(-y) / -np.expm1(-2.0 * y)
    return boltzmann * ratio**2


def _classical(omega, x, hbar, boltzmann):
    return np.full(np.shape(omega), boltzmann * float(x))


def _classical_dx(omega, x, hbar, boltzmann):
    return np.full(np.shape(omega), float(boltzmann))


@dataclass(frozen=True)
class EnergyFunction:
    """Per-mode bath energy E(w, x).

    ``satisfies_constraints`` records whether E(w, 0) = hbar w / 2, E >= 0
    and dE/dx >= 0 hold; only then is the FD inequality guaranteed.
    """

    name: str
    func: Callable
    dx: Callable
    satisfies_constraints: bool

    def __call__(self, omega, x, hbar=1.0, boltzmann=1.0):
        return self.func(omega, x, hbar, boltzmann)

    def derivative(self, omega, x, hbar=1.0, boltzmann=1.0):
        return self.dx(omega, x, hbar, boltzmann)


ENERGY_FUNCTIONS = {
    "thermal": EnergyFunction("thermal", _coth_half, _bose_dx, True),
    "no_zero_point": EnergyFunction("no_zero_point", _bose, _bose_dx, False),
    "classical": EnergyFunction("classical", _classical, _classical_dx, False),
}
THERMAL = ENERGY_FUNCTIONS["thermal"]


def energy_function(name: str) -> EnergyFunction:
    try:
        return ENERGY_FUNCTIONS[name]
    except KeyError:
        raise KeyError(f"unknown energy function {name!r}; choose from {sorted(ENERGY_FUNCTIONS)}")


@dataclass(frozen=True)
class ModeIntegrals:
    t: float
    C0: np.ndarray
    S0: np.ndarray
    C1: np.ndarray
    S1: np.ndarray
    propagator: PropagatorSample

    @property
    def Z0(self) -> np.ndarray:
        """C0 + i S0 = int_0^t A(s) exp(i w (t-s)) ds."""
        return self.C0 + 1j * self.S0

    @property
    def Z1(self) -> np.ndarray:
        return self.C1 + 1j * self.S1


# below this |kappa - omega| t the difference quotients are taken in sinc form
_NEAR_RESONANCE = 0.1


def _kernel_integrals(kappa, omega, t):
    """Closed-form integrals of sin/cos(kappa s) against cos/sin(omega (t-s)).

    Returns (I_c, I_s, J_c, J_s) shaped (len(kappa), len(omega)):
        I_c = int sin(k s) cos(w(t-s)),  I_s = int sin(k s) sin(w(t-s)),
        J_c = int cos(k s) cos(w(t-s)),  J_s = int cos(k s) sin(w(t-s)).
    Near resonance the (k - w) difference quotients are rewritten with
    sinc((k - w) t / 2), which is exact and reaches k = w smoothly.
    """
    ck, sk = np.cos(kappa * t), np.sin(kappa * t)
    cw, sw = np.cos(omega * t), np.sin(omega * t)
    kdiff = kappa[:, None] - omega[None, :]
    ksum = kappa[:, None] + omega[None, :]
    dcos = cw[None, :] - ck[:, None]
    dsin = sk[:, None] - sw[None, :]

    near = np.abs(kdiff) * t < _NEAR_RESONANCE
    safe = np.where(near, 1.0, kdiff)
    dc = dcos / safe  # (cos wt - cos kt) / (k - w)
    ds = dsin / safe  # (sin kt - sin wt) / (k - w)
    if np.any(near):
        half_sum = 0.5 * ksum[near] * t
        sinc = np.sinc(0.5 * kdiff[near] * t / np.pi)
        dc[near] = t * np.sin(half_sum) * sinc
        ds[near] = t * np.cos(half_sum) * sinc
    dcp = dcos / ksum  # (cos wt - cos kt) / (k + w)
    dsp = (sk[:, None] + sw[None, :]) / ksum  # (sin kt + sin wt) / (k + w)
    return 0.5 * (dc + dcp), 0.5 * (dsp - ds), 0.5 * (dsp + ds), 0.5 * (dc - dcp)


def mode_integrals(decomp: SpectralDecomposition, t: float) -> ModeIntegrals:
    if t < 0:
        raise ValueError("mode integrals need t >= 0")
    t = float(t)
    kappa = decomp.frequencies
    weights = decomp.system_weights
    omega = decomp.model.bath_omegas
    I_c, I_s, J_c, J_s = _kernel_integrals(kappa, omega, t)
    a_coef = weights / kappa
    return ModeIntegrals(
        t,
        C0=a_coef @ I_c,
        S0=a_coef @ I_s,
        C1=weights @ J_c,
        S1=weights @ J_s,
        propagator=propagator_at(decomp, t),
    )


def _energies(decomp, E: EnergyFunction, x) -> np.ndarray:
    model = decomp.model
    values = np.asarray(E(model.bath_omegas, x, model.hbar, model.boltzmann), dtype=float)
    if np.any(values < 0):
        raise NegativeEnergy(f"energy function {E.name!r} is negative at x = {x}")
    return values


def _coupling_weights(decomp) -> np.ndarray:
    model = decomp.model
    return model.bath_epsilons**2 / model.bath_omegas**2


def fe_vector(decomp: SpectralDecomposition, E: EnergyFunction, x: float, t: float, mi=None):
    """F_E(w_n, t) = -(eps_n / w_n) sqrt(E(w_n, x)) (C0 + i S0) and its time derivative.

    Returns the pair ``(F, dF/dt)`` of complex arrays of length N.
    """
    mi = mi if mi is not None else mode_integrals(decomp, t)
    model = decomp.model
    amp = -(model.bath_epsilons / model.bath_omegas) * np.sqrt(_energies(decomp, E, x))
    return amp * mi.Z0, amp * mi.Z1


@dataclass(frozen=True)
class FluctuationSample:
    """X, X_dot, Y (generalized to an arbitrary energy function) at one (t, x)."""

    t: float
    x: float
    X: float
    X_dot: float
    Y: float
    R2: float
    hbar: float

    @property
    def covariance_gap(self) -> float:
        """X Y - X_dot^2 / 4, non-negative by Cauchy-Schwarz."""
        return self.X * self.Y - 0.25 * self.X_dot**2

    @property
    def dissipation_term(self) -> float:
        return 0.25 * self.hbar**2 * (1.0 - self.R2) ** 2

    @property
    def fd_residual(self) -> float:
        return self.covariance_gap - self.dissipation_term

    @property
    def ref2_term(self) -> float:
        return 0.25 * self.hbar**2 * (1.0 - self.R2**2)

    @property
    def ref2_residual(self) -> float:
        return self.covariance_gap - self.ref2_term

    @property
    def scale(self) -> float:
        """max(1, largest additive term) for relative tolerances."""
        return max(
            1.0,
            abs(self.X * self.Y),
            0.25 * self.X_dot**2,
            self.dissipation_term,
            abs(self.ref2_term),
        )


def fluctuation_sample(
    decomp: SpectralDecomposition, E: EnergyFunction, x: float, t: float, mi=None
) -> FluctuationSample:
    """X = sum |F_E|^2, Y = sum |dF_E/dt|^2, X_dot = 2 sum Re(F_E^* dF_E/dt)."""
    mi = mi if mi is not None else mode_integrals(decomp, t)
    ew = _energies(decomp, E, x) * _coupling_weights(decomp)
    X = float(ew @ (mi.C0**2 + mi.S0**2))
    Y = float(ew @ (mi.C1**2 + mi.S1**2))
    X_dot = float(2.0 * ew @ (mi.C0 * mi.C1 + mi.S0 * mi.S1))
    return FluctuationSample(mi.t, float(x), X, X_dot, Y, mi.propagator.R2, decomp.model.hbar)


def xy_quantities(decomp: SpectralDecomposition, T: float, t: float, mi=None) -> FluctuationSample:
    """Thermal X(t), X_dot(t), Y(t) at temperature ``T`` (T = 0 allowed)."""
    if T < 0:
        raise ValueError("temperature must be >= 0")
    return fluctuation_sample(decomp, THERMAL, T, t, mi)


def fluctuation_rates(decomp: SpectralDecomposition, T: float, t: float, mi=None):
    """Closed-form (X_ddot, Y_dot) of the thermal quantities."""
    mi = mi if mi is not None else mode_integrals(decomp, t)
    omega = decomp.model.bath_omegas
    ew = _energies(decomp, THERMAL, T) * _coupling_weights(decomp)
    C1_dot = mi.propagator.A_dot - omega * mi.S1
    S1_dot = omega * mi.C1
    X_ddot = 2.0 * ew @ (mi.C1**2 + mi.S1**2 + mi.C0 * C1_dot + mi.S0 * S1_dot)
    Y_dot = 2.0 * ew @ (mi.C1 * C1_dot + mi.S1 * S1_dot)
    return float(X_ddot), float(Y_dot)


def fd15_lhs(decomp: SpectralDecomposition, E: EnergyFunction, x: float, t: float) -> float:
    """sum|F|^2 sum|dF/dt|^2 - (d/dt sum|F|^2)^2 / 4 - hbar^2 (1 - R^2)^2 / 4."""
    return fluctuation_sample(decomp, E, x, t).fd_residual


def fd17_residual(decomp: SpectralDecomposition, T: float, t: float) -> float:
    """X Y - X_dot^2/4 - hbar^2 (1 - R^2)^2 / 4 for the thermal bath."""
    return xy_quantities(decomp, T, t).fd_residual


def ref2_comparison_residual(decomp: SpectralDecomposition, T: float, t: float) -> float:
    """X Y - X_dot^2/4 - hbar^2 (1 - R^4) / 4, the weaker-looking comparison bound."""
    return xy_quantities(decomp, T, t).ref2_residual


def fd16_closed_form(decomp: SpectralDecomposition, E: EnergyFunction, x: float, t: float, mi=None):
    """Double mode sum for the x-derivative of the FD left-hand side.

    sum_{m,n} (eps_m eps_n / w_m w_n)^2 E(w_m) dE(w_n)/dx
        * {[C0_n C1_m - C0_m C1_n]^2 + [S1_n C0_m - S0_n C1_m]^2
           + [S1_m C0_n - S0_m C1_n]^2 + [S1_m S0_n - S1_n S0_m]^2}
    Every summand is non-negative when E >= 0 and dE/dx >= 0.
    """
    mi = mi if mi is not None else mode_integrals(decomp, t)
    model = decomp.model
    w = _coupling_weights(decomp)
    e_m = _energies(decomp, E, x) * w
    de_n = np.asarray(E.derivative(model.bath_omegas, x, model.hbar, model.boltzmann)) * w
    C0, S0, C1, S1 = mi.C0, mi.S0, mi.C1, mi.S1
    # index [m, n]
    bracket = (
        (C0[None, :] * C1[:, None] - C0[:, None] * C1[None, :]) ** 2
        + (S1[None, :] * C0[:, None] - S0[None, :] * C1[:, None]) ** 2
        + (S1[:, None] * C0[None, :] - S0[:, None] * C1[None, :]) ** 2
        + (S1[:, None] * S0[None, :] - S1[None, :] * S0[:, None]) ** 2
    )
    return float(e_m @ bracket @ de_n)


def fd16_x_derivative_check(
    decomp: SpectralDecomposition, E: EnergyFunction, x: float, t: float, dx: float = 1e-4
):
    """Return ``(finite_difference, closed_form)`` for d/dx of the FD left-hand side.

    The dissipation term does not depend on x, so differencing the full
    left-hand side is the same as differencing its fluctuation part.
    """
    if dx <= 0:
        raise ValueError("dx must be positive")
    mi = mode_integrals(decomp, t)

    def lhs(xv):
        return fluctuation_sample(decomp, E, xv, t, mi).fd_residual

    if x >= 2 * dx:
        # fourth-order centered stencil; the thermal derivative varies quickly at small x
        numeric = (8 * (lhs(x + dx) - lhs(x - dx)) - (lhs(x + 2 * dx) - lhs(x - 2 * dx))) / (12 * dx)
    else:
        numeric = (-3 * lhs(x) + 4 * lhs(x + dx) - lhs(x + 2 * dx)) / (2 * dx)
    return float(numeric), fd16_closed_form(decomp, E, x, t, mi)


def dissipation_from_bath(decomp: SpectralDecomposition, t: float, mi=None) -> float:
    """1 - R^2 rebuilt as sum_n eps_n^2 {C0^2 + S0^2 - (A / w_n) S0}."""
    mi = mi if mi is not None else mode_integrals(decomp, t)
    model = decomp.model
    A = mi.propagator.A
    terms = mi.C0**2 + mi.S0**2 - A * mi.S0 / model.bath_omegas
    return float(model.bath_epsilons**2 @ terms)


def im_sum_identity(decomp: SpectralDecomposition, E: EnergyFunction, x: float, t: float):
    """Both sides of the identity for sum_n Im(F_E^* dF_E/dt).

    Returns ``(direct, rebuilt)`` where ``rebuilt`` is
    hbar sum eps^2 (E / hbar w - 1/2){...} + hbar (1 - R^2) / 2.
    """
    mi = mode_integrals(decomp, t)
    F, dF = fe_vector(decomp, E, x, t, mi)
    direct = float(np.sum(np.imag(np.conj(F) * dF)))
    model = decomp.model
    hbar, omega = model.hbar, model.bath_omegas
    braces = mi.C0**2 + mi.S0**2 - mi.propagator.A * mi.S0 / omega
    excess = _energies(decomp, E, x) / (hbar * omega) - 0.5
    rebuilt = hbar * float(model.bath_epsilons**2 * excess @ braces)
    rebuilt += 0.5 * hbar * (1.0 - mi.propagator.R2)
    return direct, rebuilt
