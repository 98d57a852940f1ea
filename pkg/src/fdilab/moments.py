"""Second moments of the system oscillator for a factorized thermal initial state.

Under the exact dynamics the system moments are an affine image of the
initial ones:

    <q^2>(t) = X/m0 + A_dot^2 <q^2> + (A_dot A / m0) <qp+pq> + (A / m0)^2 <p^2>

and analogues for <p^2> and <qp+pq>.  Removing the reversible part,
R^2 times the moments under the symplectic map U~(t), leaves the purely
diffusive pieces (delta q)^2 = X/m0, (delta p)^2 = m0 Y, C_delta = X_dot.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import ConfigError, NonPositiveR2, PreconditionFailure, UnphysicalInitialState
from .fluctuation import FluctuationSample, mode_integrals, xy_quantities
from .model import OscillatorBathModel
from .propagator import PropagatorSample, SpectralDecomposition, propagator_at

__all__ = [
    "GaussianMomentState",
    "DeltaQuantities",
    "Appendix1Report",
    "preset_state",
    "rs_residual",
    "transform_moments",
    "evolve_moments",
    "reference_moments",
    "delta_quantities",
    "appendix1_check",
]

PHYSICALITY_SLACK = 1e-12


@dataclass(frozen=True)
class GaussianMomentState:
    """First and (raw, not central) second moments of (q, p)."""

    mean_q: float
    mean_p: float
    qq: float
    pp: float
    qp_sym: float

    @property
    def var_q(self) -> float:
        return self.qq - self.mean_q**2

    @property
    def var_p(self) -> float:
        return self.pp - self.mean_p**2

    @property
    def cov_sym(self) -> float:
        """C_Delta = <qp + pq> - 2 <q><p>."""
        return self.qp_sym - 2.0 * self.mean_q * self.mean_p

    def as_array(self) -> np.ndarray:
        return np.array([self.mean_q, self.mean_p, self.qq, self.pp, self.qp_sym])


def rs_residual(state: GaussianMomentState, hbar: float = 1.0) -> float:
    """(Delta q)^2 (Delta p)^2 - C_Delta^2 / 4 - hbar^2 / 4."""
    return state.var_q * state.var_p - 0.25 * state.cov_sym**2 - 0.25 * hbar**2


def _check_physical(state: GaussianMomentState, hbar: float) -> None:
    residual = rs_residual(state, hbar)
    if residual < -PHYSICALITY_SLACK * hbar**2:
        raise UnphysicalInitialState(
            f"initial moments violate the uncertainty bound by {residual:.3e}"
        )


_PRESET = re.compile(r"^\s*(ground|coherent|squeezed|thermal)\s*(?:\((.*)\))?\s*$")


def preset_state(
    spec: Union[str, Mapping, Sequence[float]], model: OscillatorBathModel
) -> GaussianMomentState:
    """Expand a named preset or raw moment tuple into a state.

    Presets refer to the bare system oscillator (m0, omega0):

    * ``ground``: vacuum, <q^2> = hbar / 2 m0 w0, <p^2> = hbar m0 w0 / 2
    * ``coherent(q, p)``: vacuum displaced to means (q, p)
    * ``squeezed(r, phi)``: squeezed vacuum, squeeze r along angle phi
    * ``thermal(nbar)``: vacuum variances times 2 nbar + 1

    Raw states are ``[mean_q, mean_p, qq, pp, qp_sym]`` or a mapping with
    those keys.
    """
    hbar, m0, w0 = model.hbar, model.m0, model.omega0
    q_unit = hbar / (m0 * w0)
    p_unit = hbar * m0 * w0
    if isinstance(spec, Mapping):
        keys = ("mean_q", "mean_p", "qq", "pp", "qp_sym")
        unknown = set(spec) - set(keys)
        if unknown:
            raise ConfigError(f"unknown initial-state keys: {sorted(unknown)}")
        try:
            return GaussianMomentState(*(float(spec.get(k, 0.0)) for k in keys))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad initial state {spec!r}") from exc
    if not isinstance(spec, str):
        values = list(spec)
        if len(values) != 5:
            raise ConfigError("raw initial state needs 5 numbers: mean_q, mean_p, qq, pp, qp_sym")
        return GaussianMomentState(*(float(v) for v in values))

    match = _PRESET.match(spec)
    if not match:
        raise ConfigError(f"unknown initial-state preset {spec!r}")
    name, argtext = match.groups()
    try:
        args = [float(a) for a in argtext.split(",")] if argtext and argtext.strip() else []
    except ValueError as exc:
        raise ConfigError(f"bad preset arguments in {spec!r}") from exc
    expected = {"ground": 0, "coherent": 2, "squeezed": 2, "thermal": 1}[name]
    if len(args) != expected:
        raise ConfigError(f"preset {name!r} takes {expected} arguments, got {len(args)}")

    if name == "ground":
        return GaussianMomentState(0.0, 0.0, 0.5 * q_unit, 0.5 * p_unit, 0.0)
    if name == "coherent":
        q, p = args
        return GaussianMomentState(q, p, 0.5 * q_unit + q * q, 0.5 * p_unit + p * p, 2.0 * q * p)
    if name == "squeezed":
        r, phi = args
        ch, sh = math.cosh(2 * r), math.sinh(2 * r)
        return GaussianMomentState(
            0.0,
            0.0,
            0.5 * q_unit * (ch - sh * math.cos(phi)),
            0.5 * p_unit * (ch + sh * math.cos(phi)),
            -hbar * sh * math.sin(phi),
        )
    (nbar,) = args
    if nbar < 0:
        raise ConfigError("thermal occupation must be >= 0")
    scale = 2.0 * nbar + 1.0
    return GaussianMomentState(0.0, 0.0, 0.5 * q_unit * scale, 0.5 * p_unit * scale, 0.0)


def transform_moments(S, s: GaussianMomentState) -> GaussianMomentState:
    """Moments after the linear map (q, p) -> S (q, p), S a real 2x2 matrix."""
    (a, b), (c, d) = np.asarray(S, dtype=float)
    return GaussianMomentState(
        a * s.mean_q + b * s.mean_p,
        c * s.mean_q + d * s.mean_p,
        a * a * s.qq + a * b * s.qp_sym + b * b * s.pp,
        c * c * s.qq + c * d * s.qp_sym + d * d * s.pp,
        2 * a * c * s.qq + (a * d + b * c) * s.qp_sym + 2 * b * d * s.pp,
    )


def _homogeneous(prop: PropagatorSample, m0: float, s: GaussianMomentState):
    """Moments under (q, p) -> (A_dot q + A p / m0, m0 A_ddot q + A_dot p)."""
    S = [[prop.A_dot, prop.A / m0], [m0 * prop.A_ddot, prop.A_dot]]
    out = transform_moments(S, s)
    return out.mean_q, out.mean_p, out.qq, out.pp, out.qp_sym


def evolve_moments(
    decomp: SpectralDecomposition,
    T: float,
    initial: GaussianMomentState,
    t: float,
    fs: FluctuationSample | None = None,
) -> GaussianMomentState:
    """System moments at time ``t`` for a thermal bath at temperature ``T``."""
    model = decomp.model
    _check_physical(initial, model.hbar)
    if fs is None:
        mi = mode_integrals(decomp, t)
        fs, prop = xy_quantities(decomp, T, t, mi), mi.propagator
    else:
        prop = propagator_at(decomp, t)
    mq, mp, qq, pp, qp = _homogeneous(prop, model.m0, initial)
    return GaussianMomentState(
        mq, mp, qq + fs.X / model.m0, pp + model.m0 * fs.Y, qp + fs.X_dot
    )


def reference_moments(
    decomp: SpectralDecomposition, initial: GaussianMomentState, t: float, prop=None
) -> GaussianMomentState:
    """Moments of U~(t) rho U~(t)^dagger, U~ acting as (q, p) -> S(t)(q, p) / R(t).

    Requires R^2(t) > 0.
    """
    prop = prop if prop is not None else propagator_at(decomp, t)
    if not prop.R2 > 0:
        raise NonPositiveR2(f"R^2({t}) = {prop.R2:.3e} <= 0; the reference propagator is undefined")
    mq, mp, qq, pp, qp = _homogeneous(prop, decomp.model.m0, initial)
    R = math.sqrt(prop.R2)
    return GaussianMomentState(mq / R, mp / R, qq / prop.R2, pp / prop.R2, qp / prop.R2)


@dataclass(frozen=True)
class DeltaQuantities:
    delta_q2: float
    delta_p2: float
    c_delta: float
    d_value: float
    R2: float

    @property
    def delta_q(self) -> float:
        return math.sqrt(max(self.delta_q2, 0.0))

    @property
    def delta_p(self) -> float:
        return math.sqrt(max(self.delta_p2, 0.0))


def delta_quantities(
    decomp: SpectralDecomposition, T: float, initial: GaussianMomentState, t: float
) -> DeltaQuantities:
    """Diffusive parts of the moments and the decoherence functional D(t).

    Built by subtracting R^2 times the reference moments from the evolved
    moments, so the initial state must cancel out.
    """
    mi = mode_integrals(decomp, t)
    prop = mi.propagator
    if not prop.R2 > 0:
        raise NonPositiveR2(f"R^2({t}) = {prop.R2:.3e} <= 0; delta quantities undefined")
    evolved = evolve_moments(decomp, T, initial, t, xy_quantities(decomp, T, t, mi))
    ref = reference_moments(decomp, initial, t, prop)
    dq2 = evolved.qq - prop.R2 * ref.qq
    dp2 = evolved.pp - prop.R2 * ref.pp
    cd = evolved.qp_sym - prop.R2 * ref.qp_sym
    hbar = decomp.model.hbar
    d_value = dq2 * dp2 - 0.25 * cd**2 - 0.25 * hbar**2 * (1.0 - prop.R2) ** 2
    return DeltaQuantities(dq2, dp2, cd, d_value, prop.R2)


@dataclass(frozen=True)
class Appendix1Report:
    special_moment_inequality_54: float
    derived_55_residual: float
    fd17_residual: float
    one_minus_R2: float
    scale: float

    @property
    def chain_holds(self) -> bool:
        """Uncertainty bound at the special moments implies the square-root bound when 1 - R^2 >= 0."""
        tol = 1e-10 * self.scale
        if self.special_moment_inequality_54 < -tol:
            return True
        if self.one_minus_R2 < 0:
            return True
        return self.derived_55_residual >= -tol


def appendix1_check(decomp: SpectralDecomposition, T: float, t: float) -> Appendix1Report:
    """Uncertainty-principle route to the FD inequality at one (T, t).

    Inserts the minimum-uncertainty reference moments
    hbar X / (m0 s), hbar X_dot / (2 s), hbar m0 Y / s with s = sqrt(4XY - X_dot^2)
    into the product <q^2><p^2> - <qp+pq>^2/4 and returns it minus hbar^2/4,
    together with sqrt(XY - X_dot^2/4) - hbar (1 - R^2) / 2.
    """
    model = decomp.model
    hbar, m0 = model.hbar, model.m0
    fs = xy_quantities(decomp, T, t)
    if not fs.R2 > 0:
        raise PreconditionFailure(f"R^2 = {fs.R2:.3e} must be > 0")
    gap4 = 4.0 * fs.X * fs.Y - fs.X_dot**2
    if not gap4 > 0:
        raise PreconditionFailure(f"4XY - X_dot^2 = {gap4:.3e} must be > 0")
    s = math.sqrt(gap4)
    ref_qq = hbar * fs.X / (m0 * s)
    ref_half_qp = hbar * fs.X_dot / (2.0 * s)
    ref_pp = hbar * m0 * fs.Y / s
    R2 = fs.R2
    value = (
        fs.covariance_gap
        + R2**2 * (ref_qq * ref_pp - ref_half_qp**2)
        + R2 * (m0 * fs.Y * ref_qq - fs.X_dot * ref_half_qp + fs.X / m0 * ref_pp)
    )
    residual55 = math.sqrt(max(fs.covariance_gap, 0.0)) - 0.5 * hbar * (1.0 - R2)
    return Appendix1Report(
        value - 0.25 * hbar**2, residual55, fs.fd_residual, 1.0 - R2, max(fs.scale, value)
    )
