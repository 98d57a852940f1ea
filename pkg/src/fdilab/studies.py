"""Scenario configurations and the registered studies.

Each study turns a :class:`Scenario` into CSV rows plus a list of verdicts,
one per checked claim.  Cells of a study grid are independent and may be
evaluated on a thread pool; results are always merged in grid order.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional

import numpy as np

from .errors import ConfigError, NonPositiveR2, PreconditionFailure
from .fluctuation import (
    energy_function,
    fd16_x_derivative_check,
    fluctuation_sample,
    mode_integrals,
)
from .master import (
    appendix2_bracket,
    appendix2_construct,
    constant_master_model,
    lindblad39_residual,
    master_moments,
    reversible_moments,
    uncertainty43_residual,
    w_from_ullersma,
)
from .model import OscillatorBathModel, model_from_dict, model_hash, model_to_dict
from .moments import (
    appendix1_check,
    delta_quantities,
    evolve_moments,
    preset_state,
    reference_moments,
    rs_residual,
)
from .propagator import decompose, min_dissipation_scan

__all__ = ["Scenario", "Verdict", "StudyResult", "STUDIES", "scenario_from_dict", "run_study"]

INEQUALITY_TOL = 1e-10
STATE_TOL = 1e-9
CROSS_ROUTE_TOL = 1e-8
BRACKET_TOL = 1e-12

_SCENARIO_KEYS = {
    "study", "model", "temperatures", "energy_function", "t_max", "n_steps",
    "initial_states", "seed", "out", "x_grid", "dx", "search", "appendix2",
}


@dataclass
class Scenario:
    model_doc: Mapping
    temperatures: list[float] = field(default_factory=lambda: [1.0])
    energy_function: list[str] = field(default_factory=lambda: ["thermal"])
    t_max: float = 10.0
    n_steps: int = 101
    initial_states: list = field(default_factory=lambda: ["ground"])
    seed: int = 0
    study: Optional[str] = None
    out: Optional[str] = None
    x_grid: Optional[list[float]] = None
    dx: float = 1e-4
    search: dict = field(default_factory=dict)
    appendix2: dict = field(default_factory=dict)
    threads: int = 1
    raw: dict = field(default_factory=dict)

    _model: Optional[OscillatorBathModel] = field(default=None, repr=False)

    @property
    def model(self) -> OscillatorBathModel:
        if self._model is None:
            self._model = model_from_dict(self.model_doc)
        return self._model

    @property
    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps)


def scenario_from_dict(doc: Mapping) -> Scenario:
    if not isinstance(doc, Mapping):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(doc) - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    model_doc = doc.get("model", {"omega0": 1.0})
    efs = doc.get("energy_function", "thermal")
    efs = [efs] if isinstance(efs, str) else list(efs)
    for name in efs:
        try:
            energy_function(name)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        sc = Scenario(
            model_doc=model_doc,
            temperatures=[float(T) for T in doc.get("temperatures", [1.0])],
            energy_function=efs,
            t_max=float(doc.get("t_max", 10.0)),
            n_steps=int(doc.get("n_steps", 101)),
            initial_states=list(doc.get("initial_states", ["ground"])),
            seed=int(doc.get("seed", 0)),
            study=doc.get("study"),
            out=doc.get("out"),
            x_grid=[float(x) for x in doc["x_grid"]] if "x_grid" in doc else None,
            dx=float(doc.get("dx", 1e-4)),
            search=dict(doc.get("search", {})),
            appendix2=dict(doc.get("appendix2", {})),
            raw=dict(doc),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad configuration value: {exc}") from exc
    if sc.n_steps < 2:
        raise ConfigError("n_steps must be >= 2")
    if not sc.t_max > 0:
        raise ConfigError("t_max must be > 0")
    if any(T < 0 for T in sc.temperatures) or not sc.temperatures:
        raise ConfigError("temperatures must be a non-empty list of values >= 0")
    if sc.study is not None and sc.study not in STUDIES:
        raise ConfigError(f"unknown study {sc.study!r}")
    sc.model  # validate eagerly
    return sc


@dataclass
class Verdict:
    claim: str
    status: str  # holds | violated | not-applicable
    worst_residual: Optional[float] = None
    at_t: Optional[float] = None
    at_T: Optional[float] = None
    detail: Optional[str] = None

    def to_dict(self) -> dict:
        out = {
            "claim": self.claim,
            "status": self.status,
            "worst_residual": _json_float(self.worst_residual),
            "at_t": _json_float(self.at_t),
            "at_T": _json_float(self.at_T),
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class StudyResult:
    study: str
    columns: list[str]
    rows: list[dict]
    verdicts: list[Verdict]
    extra: dict = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return any(v.status == "violated" for v in self.verdicts)


class _Tracker:
    """Tracks the worst scaled residual of an inequality claimed to be >= 0."""

    def __init__(self, claim: str, tol: float = INEQUALITY_TOL):
        self.claim, self.tol = claim, tol
        self.worst = math.inf
        self.worst_scaled = math.inf
        self.at_t = self.at_T = None
        self.seen = False

    def add(self, value: float, scale: float, t=None, T=None):
        if value is None or not math.isfinite(value):
            return
        self.seen = True
        scaled = value / scale
        if scaled < self.worst_scaled:
            self.worst_scaled, self.worst, self.at_t, self.at_T = scaled, value, t, T

    def verdict(self, applicable: bool = True) -> Verdict:
        if not self.seen or not applicable:
            status = "not-applicable"
        else:
            status = "holds" if self.worst_scaled >= -self.tol else "violated"
        worst = self.worst if self.seen else None
        return Verdict(self.claim, status, worst, self.at_t, self.at_T)


class _Existence:
    """Tracks whether some value drops below zero by more than the tolerance.

    A dip inside the rounding band (value >= -tol * scale) does not count as
    evidence.  The most negative value is reported either way.
    """

    def __init__(self, claim: str, tol: float = INEQUALITY_TOL):
        self.claim, self.tol = claim, tol
        self.best = math.inf
        self.at_t = self.at_T = None
        self.first_t = None

    def add(self, value, t=None, T=None, scale: float = 1.0):
        if value is None or not math.isfinite(value):
            return
        if value < -self.tol * scale and self.first_t is None:
            self.first_t = t
        if value < self.best:
            self.best, self.at_t, self.at_T = value, t, T

    def verdict(self, applicable: bool = True) -> Verdict:
        if not applicable or not math.isfinite(self.best):
            return Verdict(self.claim, "not-applicable")
        if self.first_t is not None:
            return Verdict(
                self.claim, "holds", self.best, self.at_t, self.at_T,
                detail=f"first below -tol*scale at t = {self.first_t!r}",
            )
        return Verdict(
            self.claim, "violated", self.best, self.at_t, self.at_T,
            detail="never below tolerance on the grid; worst_residual is the closest approach",
        )


def _pmap(fn: Callable, cells: list, threads: int) -> list:
    if threads <= 1 or len(cells) < 2:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, cells))


def _state_labels(sc: Scenario) -> list[str]:
    return [s if isinstance(s, str) else json.dumps(s, sort_keys=True) for s in sc.initial_states]


# ---------------------------------------------------------------- studies


def fd_scan(sc: Scenario) -> StudyResult:
    model = sc.model
    decomp = decompose(model)
    E = energy_function(sc.energy_function[0])
    thermal = energy_function("thermal")
    mh = model_hash(model)
    times = sc.t_grid

    def cell(t):
        mi = mode_integrals(decomp, t)
        out = []
        for T in sc.temperatures:
            th = fluctuation_sample(decomp, thermal, T, t, mi)
            gen = th if E is thermal else fluctuation_sample(decomp, E, T, t, mi)
            out.append((T, t, mi.propagator, th, gen))
        return out

    fd15 = _Tracker("fd15_nonnegative")
    fd17 = _Tracker("fd17_nonnegative")
    ref2 = _Existence("ref2_residual_negative_somewhere")
    rows = []
    results = _pmap(cell, list(times), sc.threads)
    for T in sc.temperatures:
        for per_t in results:
            for TT, t, pr, th, gen in per_t:
                if TT != T:
                    continue
                fd15.add(gen.fd_residual, gen.scale, t, T)
                fd17.add(th.fd_residual, th.scale, t, T)
                ref2.add(th.ref2_residual, t, T, th.scale)
                rows.append(dict(
                    model_hash=mh, energy_function=E.name, T=T, t=t, A=pr.A, Adot=pr.A_dot,
                    R2=pr.R2, X=th.X, Xdot=th.X_dot, Y=th.Y, fd15_lhs=gen.fd_residual,
                    fd17_residual=th.fd_residual, ref2_residual=th.ref2_residual,
                ))
    verdicts = [
        fd15.verdict(applicable=E.satisfies_constraints),
        fd17.verdict(),
        ref2.verdict(applicable=not model.is_uncoupled),
    ]
    cols = ["model_hash", "energy_function", "T", "t", "A", "Adot", "R2", "X", "Xdot", "Y",
            "fd15_lhs", "fd17_residual", "ref2_residual"]
    return StudyResult("fd-scan", cols, rows, verdicts)


def fd16_check(sc: Scenario) -> StudyResult:
    model = sc.model
    decomp = decompose(model)
    E = energy_function(sc.energy_function[0])
    mh = model_hash(model)
    x_grid = sc.x_grid or list(np.linspace(0.1, 2.0, 10))
    times = sc.t_grid

    def cell(t):
        out = []
        for x in x_grid:
            numeric, closed = fd16_x_derivative_check(decomp, E, x, t, sc.dx)
            lhs = fluctuation_sample(decomp, E, x, t)
            out.append((x, t, numeric, closed, lhs))
        return out

    identity = _Tracker("fd16_identity")
    positive = _Tracker("fd16_closed_form_nonnegative")
    monotone = _Tracker("fd15_monotone_in_x")
    rows = []
    for per_t in _pmap(cell, list(times), sc.threads):
        prev = None
        for x, t, numeric, closed, lhs in per_t:
            tol = max(1e-7, 1e-5 * abs(closed))
            identity.add(tol - abs(numeric - closed), 1.0, t, x)
            positive.add(closed, max(1.0, abs(closed)), t, x)
            if prev is not None:
                monotone.add(lhs.fd_residual - prev.fd_residual, max(lhs.scale, prev.scale), t, x)
            prev = lhs
            rows.append(dict(
                model_hash=mh, energy_function=E.name, x=x, t=t, fd15_lhs=lhs.fd_residual,
                numeric_dx=numeric, closed_form=closed, abs_diff=abs(numeric - closed), tol=tol,
            ))
    applicable = E.satisfies_constraints
    verdicts = [
        identity.verdict(),
        positive.verdict(applicable),
        monotone.verdict(applicable and list(x_grid) == sorted(x_grid)),
    ]
    # the identity tracker works on tol - |diff|; zero tolerance on that margin
    identity_v = verdicts[0]
    if identity_v.worst_residual is not None and identity_v.status != "not-applicable":
        identity_v.status = "holds" if identity_v.worst_residual >= 0 else "violated"
    cols = ["model_hash", "energy_function", "x", "t", "fd15_lhs", "numeric_dx", "closed_form",
            "abs_diff", "tol"]
    return StudyResult("fd16-check", cols, rows, verdicts)


def d_scan(sc: Scenario) -> StudyResult:
    model = sc.model
    decomp = decompose(model)
    mh = model_hash(model)
    states = [preset_state(s, model) for s in sc.initial_states]
    labels = _state_labels(sc)
    temps = sorted(sc.temperatures)

    def cell(t):
        out = {}
        for T in temps:
            try:
                out[T] = [delta_quantities(decomp, T, s, t) for s in states]
            except NonPositiveR2:
                out[T] = None
        return t, out

    nonneg = _Tracker("D_nonnegative")
    indep = _Tracker("D_state_independent", STATE_TOL)
    mono = _Tracker("D_monotone_in_T")
    d_zero = _Tracker("D_zero_at_t0", 0.0)
    rows = []
    cells = _pmap(cell, list(sc.t_grid), sc.threads)
    for T_index, T in enumerate(temps):
        for t, out in cells:
            dqs = out[T]
            row = dict(model_hash=mh, T=T, t=t)
            if dqs is None:
                row.update(R2=float("nan"), **{f"D[{lab}]": float("nan") for lab in labels})
                rows.append(row)
                continue
            ref = dqs[0]
            scale = max(1.0, abs(ref.delta_q2 * ref.delta_p2), 0.25 * ref.c_delta**2)
            nonneg.add(ref.d_value, scale, t, T)
            for dq in dqs[1:]:
                indep.add(-abs(dq.d_value - ref.d_value), scale, t, T)
            if t == 0.0:
                d_zero.add(-abs(ref.d_value), 1.0, t, T)
            if T_index > 0 and out[temps[T_index - 1]] is not None:
                lower = out[temps[T_index - 1]][0]
                mono.add(ref.d_value - lower.d_value, scale, t, T)
            row["R2"] = ref.R2
            row.update({f"D[{lab}]": dq.d_value for lab, dq in zip(labels, dqs)})
            rows.append(row)
    verdicts = [
        nonneg.verdict(),
        d_zero.verdict(),
        indep.verdict(applicable=len(states) > 1),
        mono.verdict(applicable=len(temps) > 1),
    ]
    cols = ["model_hash", "T", "t", "R2"] + [f"D[{lab}]" for lab in labels]
    return StudyResult("d-scan", cols, rows, verdicts)


def _rel_diff(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def moments_study(sc: Scenario) -> StudyResult:
    model = sc.model
    hbar = model.hbar
    decomp = decompose(model)
    mh = model_hash(model)
    states = [preset_state(s, model) for s in sc.initial_states]
    labels = _state_labels(sc)

    def cell(t):
        out = []
        for T in sc.temperatures:
            for lab, s in zip(labels, states):
                ev = evolve_moments(decomp, T, s, t)
                try:
                    ref = reference_moments(decomp, s, t)
                    w = w_from_ullersma(decomp, T, t)
                except NonPositiveR2:
                    out.append((T, t, lab, ev, None, None, None))
                    continue
                out.append((T, t, lab, ev, ref, w, master_moments(w, ref, hbar)))
        return out

    cross = _Tracker("cross_route_moments", CROSS_ROUTE_TOL)
    rs = _Tracker("robertson_schroedinger")
    l39 = _Tracker("lindblad39_nonnegative")
    u43 = _Tracker("uncertainty43_nonnegative")
    rows = []
    for per_t in _pmap(cell, list(sc.t_grid), sc.threads):
        for T, t, lab, ev, ref, w, mm in per_t:
            rs_val = rs_residual(ev, hbar)
            rs.add(rs_val, hbar**2, t, T)
            row = dict(model_hash=mh, T=T, t=t, state=lab, qq=ev.qq, pp=ev.pp, qp_sym=ev.qp_sym,
                       rs_residual=rs_val)
            if mm is None:
                row.update(master_qq=float("nan"), master_pp=float("nan"),
                           master_qp_sym=float("nan"), max_rel_diff=float("nan"),
                           lindblad39=float("nan"), uncertainty43=float("nan"))
            else:
                rel = max(_rel_diff(ev.qq, mm.qq), _rel_diff(ev.pp, mm.pp),
                          _rel_diff(ev.qp_sym, mm.qp_sym))
                cross.add(-rel, 1.0, t, T)
                l39_val = lindblad39_residual(w, hbar)
                u43_val = uncertainty43_residual(w, ref, mm, hbar)
                scale39 = max(1.0, abs(w.w1 * w.w2), w.w3**2, (math.expm1(w.w4) / (4 * hbar)) ** 2)
                l39.add(l39_val, scale39, t, T)
                scale43 = max(1.0, abs(ev.qq * ev.pp), ev.qp_sym**2 / 4)
                u43.add(u43_val, scale43, t, T)
                row.update(master_qq=mm.qq, master_pp=mm.pp, master_qp_sym=mm.qp_sym,
                           max_rel_diff=rel, lindblad39=l39_val, uncertainty43=u43_val)
            rows.append(row)
    verdicts = [cross.verdict(), rs.verdict(), l39.verdict(), u43.verdict()]
    cols = ["model_hash", "T", "t", "state", "qq", "pp", "qp_sym", "master_qq", "master_pp",
            "master_qp_sym", "max_rel_diff", "rs_residual", "lindblad39", "uncertainty43"]
    return StudyResult("moments", cols, rows, verdicts)


def random_coupled_model(rng: np.random.Generator, omega0: float, max_modes: int,
                         omega_range=(0.2, 3.0), fill_range=(0.5, 1.0)) -> OscillatorBathModel:
    """Random valid model using a fraction ``fill`` of the positivity budget."""
    n = int(rng.integers(1, max_modes + 1))
    omegas = rng.uniform(*omega_range, size=n) * omega0
    eps = rng.uniform(0.1, 1.0, size=n)
    fill = rng.uniform(*fill_range)
    eps *= omega0 * math.sqrt(fill / float(np.sum(eps**2 / omegas**2)))
    return OscillatorBathModel(omega0, omegas, eps)


def neg_dissipation_search(sc: Scenario) -> StudyResult:
    opts = dict(sc.search)
    unknown = set(opts) - {"n_candidates", "max_modes", "n_best", "omega_range", "fill_range"}
    if unknown:
        raise ConfigError(f"unknown search keys: {sorted(unknown)}")
    n_candidates = int(opts.get("n_candidates", 200))
    max_modes = int(opts.get("max_modes", 3))
    n_best = int(opts.get("n_best", 10))
    if not 1 <= max_modes <= 3:
        raise ConfigError("max_modes must be between 1 and 3")
    omega0 = float(sc.model_doc.get("omega0", 1.0)) if isinstance(sc.model_doc, Mapping) else 1.0
    rng = np.random.default_rng(sc.seed)
    candidates = [
        random_coupled_model(rng, omega0, max_modes,
                             tuple(opts.get("omega_range", (0.2, 3.0))),
                             tuple(opts.get("fill_range", (0.5, 1.0))))
        for _ in range(n_candidates)
    ]

    def cell(model):
        return min_dissipation_scan(model, sc.t_max, sc.n_steps)

    scans = _pmap(cell, candidates, sc.threads)
    order = sorted(range(n_candidates), key=lambda i: (scans[i][1], i))
    found = _Existence("negative_dissipation_exists")
    rows = []
    for rank, i in enumerate(order[:n_best]):
        model = candidates[i]
        t_star, value = scans[i]
        found.add(value, t_star)
        rows.append(dict(
            rank=rank, candidate=i, model_hash=model_hash(model), n_modes=model.n_modes,
            omega0=model.omega0,
            omegas=";".join(format(w, ".17g") for w in model.bath_omegas),
            epsilons=";".join(format(e, ".17g") for e in model.bath_epsilons),
            t_star=t_star, min_one_minus_R2=value,
        ))
    verdict = found.verdict()
    verdict.detail = (
        f"best of {n_candidates} random models with N <= {max_modes}, "
        f"grid of {sc.n_steps} points up to t = {sc.t_max}"
    )
    extra = {"best_models": [model_to_dict(candidates[i]) for i in order[:n_best]]}
    cols = ["rank", "candidate", "model_hash", "n_modes", "omega0", "omegas", "epsilons",
            "t_star", "min_one_minus_R2"]
    return StudyResult("neg-dissipation-search", cols, rows, [verdict], extra)


def continuum_study(sc: Scenario) -> StudyResult:
    model = sc.model
    decomp = decompose(model)
    mh = model_hash(model)
    efs = [energy_function(n) for n in sc.energy_function]

    def cell(t):
        mi = mode_integrals(decomp, t)
        return [(E, T, fluctuation_sample(decomp, E, T, t, mi))
                for E in efs for T in sc.temperatures]

    trackers = {}
    for E in efs:
        for T in sc.temperatures:
            if E.satisfies_constraints:
                trackers[E.name, T] = _Tracker(f"{E.name}_D_nonnegative[T={T:g}]")
            else:
                trackers[E.name, T] = _Existence(f"{E.name}_D_negative_somewhere[T={T:g}]")
    rows = []
    for per_t in _pmap(cell, list(sc.t_grid), sc.threads):
        for E, T, fs in per_t:
            tr = trackers[E.name, T]
            if isinstance(tr, _Tracker):
                tr.add(fs.fd_residual, fs.scale, fs.t, T)
            else:
                tr.add(fs.fd_residual, fs.t, T, fs.scale)
            rows.append(dict(model_hash=mh, energy_function=E.name, T=T, t=fs.t, R2=fs.R2,
                             X=fs.X, Xdot=fs.X_dot, Y=fs.Y, D=fs.fd_residual))
    rows.sort(key=lambda r: (sc.energy_function.index(r["energy_function"]),
                             sc.temperatures.index(r["T"]), r["t"]))
    verdicts = [tr.verdict() for tr in trackers.values()]
    extra = {}
    drude = model_doc_drude(sc.model_doc)
    if drude is not None:
        extra["alpha_ge_3gamma"] = bool(float(drude["alpha"]) >= 3 * float(drude["gamma"]))
    cols = ["model_hash", "energy_function", "T", "t", "R2", "X", "Xdot", "Y", "D"]
    return StudyResult("continuum-study", cols, rows, verdicts, extra)


def model_doc_drude(doc) -> Optional[Mapping]:
    return doc.get("drude") if isinstance(doc, Mapping) else None


def appendix2_demo(sc: Scenario) -> StudyResult:
    opts = dict(sc.appendix2)
    unknown = set(opts) - {"w4_rate", "splits", "w3_signs"}
    if unknown:
        raise ConfigError(f"unknown appendix2 keys: {sorted(unknown)}")
    model = sc.model
    hbar, m0, w0 = model.hbar, model.m0, model.omega0
    rate = float(opts.get("w4_rate", 1.0))
    if not rate > 0:
        raise ConfigError("w4_rate must be > 0")
    splits = [float(s) for s in opts.get("splits", [0.5, 1.0, 2.0])]
    signs = [int(s) for s in opts.get("w3_signs", [1, -1])]
    states = [preset_state(s, model) for s in sc.initial_states]
    labels = _state_labels(sc)
    times = sc.t_grid
    free = constant_master_model(b11=0.5 * m0 * w0**2, b22=0.5 / m0)
    reversible = {lab: reversible_moments(free, s, times) for lab, s in zip(labels, states)}

    negative = _Tracker("lindblad39_negative_for_t_gt_0", 0.0)
    survives = _Tracker("uncertainty_product_survives")
    bracket = _Tracker("bracket_vanishes", BRACKET_TOL)
    rows = []
    for split in splits:
        for sign in signs:
            ws = appendix2_construct(lambda t: rate * t, split, times, hbar, sign)
            for k, w in enumerate(ws):
                l39 = lindblad39_residual(w, hbar)
                br = appendix2_bracket(w, hbar)
                scale = max(1.0, abs(w.w1 * w.w2), (math.expm1(w.w4) / (4 * hbar)) ** 2)
                bracket.add(-abs(br), scale, w.t, None)
                if w.t > 0:
                    negative.add(-l39, 1.0, w.t, None)
                for lab in labels:
                    mm = master_moments(w, reversible[lab][k], hbar)
                    product = mm.qq * mm.pp - 0.25 * hbar**2
                    survives.add(product, hbar**2, w.t, None)
                    rows.append(dict(split=split, w3_sign=sign, state=lab, t=w.t, w1=w.w1,
                                     w2=w.w2, w3=w.w3, w4=w.w4, lindblad39=l39, bracket=br,
                                     qq=mm.qq, pp=mm.pp, qq_pp_minus_bound=product))
    v_neg = negative.verdict()
    # strictness: every t > 0 must give a strictly negative residual
    if v_neg.status == "holds" and not (v_neg.worst_residual is not None and v_neg.worst_residual > 0):
        v_neg.status = "violated"
    verdicts = [v_neg, survives.verdict(), bracket.verdict()]
    cols = ["split", "w3_sign", "state", "t", "w1", "w2", "w3", "w4", "lindblad39", "bracket",
            "qq", "pp", "qq_pp_minus_bound"]
    return StudyResult("appendix2-demo", cols, rows, verdicts)


def appendix1_study(sc: Scenario) -> StudyResult:
    model = sc.model
    decomp = decompose(model)
    mh = model_hash(model)

    def cell(t):
        out = []
        for T in sc.temperatures:
            try:
                out.append((T, t, appendix1_check(decomp, T, t), None))
            except PreconditionFailure as exc:
                out.append((T, t, None, str(exc)))
        return out

    special = _Tracker("special_moment_bound_nonnegative")
    sqrt_form = _Tracker("sqrt_fd_bound_nonnegative_under_positive_dissipation")
    chain = _Tracker("chain_holds", 0.0)
    rows = []
    for per_t in _pmap(cell, list(sc.t_grid), sc.threads):
        for T, t, rep, reason in per_t:
            if rep is None:
                rows.append(dict(model_hash=mh, T=T, t=t, one_minus_R2=float("nan"),
                                 special_moment_value=float("nan"), sqrt_fd_residual=float("nan"),
                                 fd17_residual=float("nan"), chain_holds="", skipped=reason))
                continue
            special.add(rep.special_moment_inequality_54, rep.scale, t, T)
            if rep.one_minus_R2 >= 0:
                sqrt_form.add(rep.derived_55_residual, rep.scale, t, T)
            chain.add(0.0 if rep.chain_holds else -1.0, 1.0, t, T)
            rows.append(dict(model_hash=mh, T=T, t=t, one_minus_R2=rep.one_minus_R2,
                             special_moment_value=rep.special_moment_inequality_54,
                             sqrt_fd_residual=rep.derived_55_residual,
                             fd17_residual=rep.fd17_residual,
                             chain_holds=str(rep.chain_holds).lower(), skipped=""))
    rows.sort(key=lambda r: (sc.temperatures.index(r["T"]), r["t"]))
    verdicts = [special.verdict(), sqrt_form.verdict(), chain.verdict()]
    cols = ["model_hash", "T", "t", "one_minus_R2", "special_moment_value", "sqrt_fd_residual",
            "fd17_residual", "chain_holds", "skipped"]
    return StudyResult("appendix1-check", cols, rows, verdicts)


STUDIES: dict[str, Callable[[Scenario], StudyResult]] = {
    "fd-scan": fd_scan,
    "fd16-check": fd16_check,
    "d-scan": d_scan,
    "moments": moments_study,
    "neg-dissipation-search": neg_dissipation_search,
    "continuum-study": continuum_study,
    "appendix2-demo": appendix2_demo,
    "appendix1-check": appendix1_study,
}


def run_study(study: str, scenario: Scenario) -> StudyResult:
    try:
        fn = STUDIES[study]
    except KeyError:
        raise ConfigError(f"unknown study {study!r}; choose from {sorted(STUDIES)}")
    return fn(scenario)
