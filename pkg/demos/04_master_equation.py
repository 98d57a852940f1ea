"""The exact dynamics as a time-local quadratic master equation.

The w-functions of the dissipative exponent follow directly from X, Y, X_dot
and R^2.  Integrating the w-equations with the matched time-dependent
coefficients reproduces them, the master-route moments agree with direct
evolution, and the ladder operator built from the dissipator is normalized.
"""
import numpy as np

from fdilab import (
    OscillatorBathModel,
    decompose,
    evolve_moments,
    ladder_coefficients,
    lindblad39_residual,
    master_moments,
    preset_state,
    reference_moments,
    solve_w,
    ullersma_master_model,
    w_from_ullersma,
)

model = OscillatorBathModel(1.0, [1.6], [0.5])
d = decompose(model)
T = 1.0
grid = np.linspace(0, 6, 7)
solved = solve_w(ullersma_master_model(d, T), grid)
print("   t    w1 (ODE)     w1 (mapped)   w4        positivity residual")
for w in solved:
    m = w_from_ullersma(d, T, w.t)
    print(f"{w.t:4.1f}  {w.w1:.8f}  {m.w1:.8f}  {m.w4:.6f}  {lindblad39_residual(m): .3e}")

s = preset_state("squeezed(0.8, 0.3)", model)
direct = evolve_moments(d, T, s, 3.0)
via = master_moments(w_from_ullersma(d, T, 3.0), reference_moments(d, s, 3.0))
print("\ndirect moments      :", np.round(direct.as_array(), 10))
print("master-route moments:", np.round(via.as_array(), 10))

lc = ladder_coefficients(d, T, 3.0)
print(f"\nladder commutator [B, B^dag] = {lc.commutator():.15f}")
