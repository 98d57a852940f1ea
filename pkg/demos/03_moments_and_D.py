"""Moment evolution, the reference propagator and D(t).

Evolving several initial Gaussian states, then removing the reversible part
(R^2 times the moments under the rescaled symplectic map), leaves diffusive
pieces that do not depend on the initial state.  D(t) built from them is
zero at t = 0, non-negative afterwards and grows with temperature.
"""
import numpy as np

from fdilab import OscillatorBathModel, decompose, delta_quantities, evolve_moments, preset_state, rs_residual

model = OscillatorBathModel(1.0, [0.7, 1.3, 2.1], [0.3, 0.4, 0.5])
d = decompose(model)
states = ["ground", "coherent(1.0, -0.5)", "squeezed(0.8, 0.3)", "thermal(0.7)"]

t = 4.0
print(f"moments at t = {t}, T = 1")
for spec in states:
    out = evolve_moments(d, 1.0, preset_state(spec, model), t)
    dq = delta_quantities(d, 1.0, preset_state(spec, model), t)
    print(f"  {spec:22s} <q2>={out.qq:.5f} <p2>={out.pp:.5f} RS={rs_residual(out):.4f} D={dq.d_value:.12f}")

print("\nD(t) for the ground state at three temperatures")
g = preset_state("ground", model)
for ti in np.linspace(0, 10, 6):
    row = [delta_quantities(d, T, g, ti).d_value for T in (0.0, 0.5, 2.0)]
    print(f"  t={ti:4.1f}  " + "  ".join(f"{v:.6e}" for v in row))
