"""A master equation that respects <q^2><p^2> >= hbar^2/4 but is not of Lindblad form.

Pick any growing w4(t) and set w1 w2 = w3^2 = (exp(2 w4) - 1) / 16.  The scalar
positivity criterion is then negative for every t > 0, while the product of
variances of every tested initial state stays above hbar^2 / 4.
"""
import numpy as np

from fdilab import (
    OscillatorBathModel,
    appendix2_construct,
    constant_master_model,
    lindblad39_residual,
    master_moments,
    preset_state,
    reversible_moments,
)

grid = np.linspace(0, 3, 7)
model = OscillatorBathModel(1.0)
ws = appendix2_construct(lambda t: t, split=2.0, t_grid=grid)
rev = reversible_moments(constant_master_model(b11=0.5, b22=0.5), preset_state("squeezed(0.8, 0.3)", model), grid)
print("   t    positivity residual   <q2><p2> - 1/4")
for w, r in zip(ws, rev):
    m = master_moments(w, r)
    print(f"{w.t:4.1f}   {lindblad39_residual(w): .6e}      {m.qq * m.pp - 0.25:.6e}")

(w,) = appendix2_construct(lambda t: 1.0, 1.0, [1.0])
print(f"\nat w4 = 1: w1 w2 = {w.w1 * w.w2:.6f}, positivity residual = {lindblad39_residual(w):.6f}")
