"""Two pathologies: dropping the zero-point energy, and negative dissipation.

A Drude bath with 400 modes behaves like a continuum over the time window.
With the full thermal energy D(t) stays non-negative; with the zero-point
term removed it goes negative almost immediately.  Separately, strongly
coupled few-mode models can have R^2 > 1, i.e. negative dissipation.
"""
import json
from pathlib import Path

import numpy as np

from fdilab import decompose, energy_function, fluctuation_sample, min_dissipation_scan, mode_integrals, model_from_dict

configs = Path(__file__).resolve().parents[1] / "configs"
doc = json.loads((configs / "continuum-study.json").read_text())
d = decompose(model_from_dict(doc["model"]))
T = 1.0
print(f"Drude bath, {d.model.n_modes} modes, T = {T}")
print("   t     D (thermal)     D (no zero point)   D (classical)")
for t in (0.1, 0.5, 1.0, 5.0, 20.0):
    mi = mode_integrals(d, t)
    vals = [fluctuation_sample(d, energy_function(n), T, t, mi).fd_residual
            for n in ("thermal", "no_zero_point", "classical")]
    print(f"{t:5.1f}  " + "  ".join(f"{v: .6e}" for v in vals))

neg = json.loads((configs / "neg-dissipation-model.json").read_text())
model = model_from_dict(neg["model"])
t_star, value = min_dissipation_scan(model, neg["t_max"], neg["n_steps"])
print(f"\nfew-mode model {model.bath_omegas}, {model.bath_epsilons}:")
print(f"  min of 1 - R^2 = {value:.4f} at t = {t_star}")
