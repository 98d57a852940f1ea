"""Oscillator-bath Hamiltonians and bath discretization.

The total Hamiltonian, in mass-weighted coordinates, is

    H = sum_nu (P_nu^2 + omega_nu^2 Q_nu^2) / 2 + sum_n eps_n Q_0 Q_n

with nu = 0 the system oscillator and n = 1..N the bath.  It is positive
definite when ``sum eps_n^2 / omega_n^2 <= omega0^2``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigError, PositivityViolation

__all__ = [
    "OscillatorBathModel",
    "DrudeBathRecipe",
    "Violation",
    "validate_model",
    "drude_ullersma_strength",
    "discretize_drude",
    "model_from_dict",
    "model_to_dict",
    "model_hash",
]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OscillatorBathModel:
    """System oscillator ``omega0`` bilinearly coupled to ``N`` bath modes.

    ``bath_epsilons`` are couplings in mass-weighted coordinates (units of
    frequency squared).  ``m0`` only enters when converting to the physical
    ``(q0, p0)`` of the system.
    """

    omega0: float
    bath_omegas: np.ndarray = field(default_factory=lambda: _frozen([]))
    bath_epsilons: np.ndarray = field(default_factory=lambda: _frozen([]))
    m0: float = 1.0
    hbar: float = 1.0
    boltzmann: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "omega0", float(self.omega0))
        object.__setattr__(self, "bath_omegas", _frozen(self.bath_omegas))
        object.__setattr__(self, "bath_epsilons", _frozen(self.bath_epsilons))
        for name in ("m0", "hbar", "boltzmann"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def n_modes(self) -> int:
        return int(self.bath_omegas.size)

    @property
    def coupling_sum(self) -> float:
        """sum_n eps_n^2 / omega_n^2 (the frequency-squared shift)."""
        if self.n_modes == 0:
            return 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            return float(np.sum(self.bath_epsilons**2 / self.bath_omegas**2))

    @property
    def is_uncoupled(self) -> bool:
        return not np.any(self.bath_epsilons)

    def potential_matrix(self) -> np.ndarray:
        """The (N+1)x(N+1) matrix V with H = P.P/2 + Q.V.Q/2."""
        n = self.n_modes
        V = np.zeros((n + 1, n + 1))
        V[0, 0] = self.omega0**2
        idx = np.arange(1, n + 1)
        V[idx, idx] = self.bath_omegas**2
        V[0, 1:] = self.bath_epsilons
        V[1:, 0] = self.bath_epsilons
        return V


@dataclass(frozen=True)
class Violation:
    name: str
    slack: float
    message: str


def validate_model(model: OscillatorBathModel) -> list[Violation]:
    """Check every model invariant; never raises.

    Returns an empty list for a valid model.  ``slack`` is the signed margin
    by which the bound failed (negative means violated).
    """
    report: list[Violation] = []
    try:
        omega0 = float(model.omega0)
        omegas = np.asarray(model.bath_omegas, dtype=float)
        eps = np.asarray(model.bath_epsilons, dtype=float)
    except (TypeError, ValueError) as exc:
        return [Violation("types", float("nan"), f"non-numeric model fields: {exc}")]

    if not np.isfinite(omega0) or omega0 <= 0:
        report.append(Violation("omega0_positive", omega0, f"omega0 = {omega0} must be > 0"))
    if omegas.shape != eps.shape:
        report.append(
            Violation(
                "bath_lengths",
                float(omegas.size - eps.size),
                f"{omegas.size} bath frequencies but {eps.size} couplings",
            )
        )
        return report
    if omegas.size and (not np.all(np.isfinite(omegas)) or omegas.min() <= 0):
        worst = float(np.nanmin(omegas))
        report.append(Violation("bath_omegas_positive", worst, "every bath frequency must be > 0"))
        return report
    if not np.all(np.isfinite(eps)):
        report.append(Violation("couplings_finite", float("nan"), "couplings must be finite"))
        return report
    for name in ("m0", "hbar", "boltzmann"):
        value = float(getattr(model, name))
        if not np.isfinite(value) or value <= 0:
            report.append(Violation(f"{name}_positive", value, f"{name} = {value} must be > 0"))

    shift = float(np.sum(eps**2 / omegas**2)) if omegas.size else 0.0
    if not np.isfinite(shift):
        report.append(Violation("coupling_sum_finite", float("inf"), "sum eps^2/omega^2 diverges"))
    elif np.isfinite(omega0):
        slack = omega0**2 - shift
        if slack < 0:
            report.append(
                Violation(
                    "positive_definite",
                    slack,
                    f"sum eps^2/omega^2 = {shift:.6g} > {omega0**2:.6g} = omega0^2",
                )
            )
    return report


@dataclass(frozen=True)
class DrudeBathRecipe:
    """Uniform discretization of a Drude-type spectral strength."""

    gamma: float
    alpha: float
    omega_max: float
    n_modes: int

    def __post_init__(self):
        if self.gamma < 0 or self.alpha <= 0 or self.omega_max <= 0 or self.n_modes < 1:
            raise ValueError(
                "DrudeBathRecipe needs gamma >= 0, alpha > 0, omega_max > 0, n_modes >= 1; "
                f"got {self}"
            )

    @property
    def weak_coupling_regime(self) -> bool:
        """Whether alpha >= 3 * gamma (recorded, never enforced)."""
        return self.alpha >= 3.0 * self.gamma


def drude_ullersma_strength(omega, gamma: float, alpha: float):
    """gamma^2(omega) = (2/pi) Gamma omega^2 alpha^2 / (omega^2 + alpha^2).

    The memory kernel it produces is Gamma * alpha * exp(-alpha t), i.e.
    ohmic damping at rate Gamma with a Drude cutoff alpha.
    """
    omega = np.asarray(omega, dtype=float)
    return (2.0 / np.pi) * gamma * omega**2 * alpha**2 / (omega**2 + alpha**2)


def discretize_drude(
    recipe: DrudeBathRecipe,
    omega0: float = 1.0,
    m0: float = 1.0,
    hbar: float = 1.0,
    boltzmann: float = 1.0,
    strength: Callable[..., np.ndarray] = drude_ullersma_strength,
) -> OscillatorBathModel:
    """Midpoint grid omega_n = (n - 1/2) d_omega with eps_n^2 = strength(omega_n) d_omega.

    ``strength(omega, gamma, alpha)`` may be replaced by any other spectral
    strength with the same signature.
    """
    d_omega = recipe.omega_max / recipe.n_modes
    omegas = (np.arange(1, recipe.n_modes + 1) - 0.5) * d_omega
    eps = np.sqrt(strength(omegas, recipe.gamma, recipe.alpha) * d_omega)
    model = OscillatorBathModel(omega0, omegas, eps, m0=m0, hbar=hbar, boltzmann=boltzmann)
    report = validate_model(model)
    if report:
        raise PositivityViolation("; ".join(v.message for v in report))
    return model


_MODEL_KEYS = {"omega0", "m0", "hbar", "boltzmann", "omegas", "epsilons", "drude"}
_DRUDE_KEYS = {"gamma", "alpha", "omega_max", "n_modes"}


def model_from_dict(doc: Mapping) -> OscillatorBathModel:
    """Build a model from its JSON form.

    Either an explicit bath ``{"omegas": [...], "epsilons": [...]}`` or a
    recipe ``{"drude": {"gamma", "alpha", "omega_max", "n_modes"}}``, plus
    optional ``omega0``, ``m0``, ``hbar``, ``boltzmann``.  Unknown keys raise
    ``ConfigError``.
    """
    if not isinstance(doc, Mapping):
        raise ConfigError("model must be a JSON object")
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise ConfigError(f"unknown model keys: {sorted(unknown)}")
    base = {k: doc[k] for k in ("m0", "hbar", "boltzmann") if k in doc}
    omega0 = doc.get("omega0", 1.0)
    has_bath = "omegas" in doc or "epsilons" in doc
    if has_bath and "drude" in doc:
        raise ConfigError("give either an explicit bath or a drude recipe, not both")
    try:
        if "drude" in doc:
            recipe_doc = doc["drude"]
            if not isinstance(recipe_doc, Mapping):
                raise ConfigError("drude recipe must be a JSON object")
            unknown = set(recipe_doc) - _DRUDE_KEYS
            missing = _DRUDE_KEYS - set(recipe_doc)
            if unknown or missing:
                raise ConfigError(
                    f"drude recipe keys: unknown {sorted(unknown)}, missing {sorted(missing)}"
                )
            recipe = DrudeBathRecipe(
                float(recipe_doc["gamma"]),
                float(recipe_doc["alpha"]),
                float(recipe_doc["omega_max"]),
                int(recipe_doc["n_modes"]),
            )
            return discretize_drude(recipe, omega0=omega0, **base)
        model = OscillatorBathModel(
            omega0, doc.get("omegas", []), doc.get("epsilons", []), **base
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad model document: {exc}") from exc
    report = validate_model(model)
    if report:
        raise ConfigError("invalid model: " + "; ".join(v.message for v in report))
    return model


def model_to_dict(model: OscillatorBathModel) -> dict:
    return {
        "omega0": model.omega0,
        "m0": model.m0,
        "hbar": model.hbar,
        "boltzmann": model.boltzmann,
        "omegas": model.bath_omegas.tolist(),
        "epsilons": model.bath_epsilons.tolist(),
    }


def model_hash(model: OscillatorBathModel) -> str:
    """Short content hash identifying a model in CSV rows."""
    blob = json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]
