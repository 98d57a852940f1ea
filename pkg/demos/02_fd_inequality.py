"""Fluctuation integrals and the fluctuation-dissipation inequality.

X, X_dot and Y measure how much noise the bath has injected by time t;
1 - R^2 measures dissipation.  The inequality

    X Y - X_dot^2 / 4 >= hbar^2 (1 - R^2)^2 / 4

holds for the thermal bath at every temperature and time.  We also show that
its left side only grows with temperature, and that the tempting stronger
bound with (1 - R^4) in place of (1 - R^2)^2 fails at short times.
"""
import numpy as np

from fdilab import (
    THERMAL,
    OscillatorBathModel,
    decompose,
    fd16_x_derivative_check,
    fluctuation_sample,
    xy_quantities,
)

model = OscillatorBathModel(1.0, [0.7, 1.3, 2.1], [0.3, 0.4, 0.5])
d = decompose(model)

print("   T     t       X          Y        FD residual   comparison residual")
for T in (0.0, 1.0):
    for t in (0.2, 1.0, 5.0, 20.0):
        fs = xy_quantities(d, T, t)
        print(f"{T:4.1f} {t:5.1f} {fs.X:.4e} {fs.Y:.4e} {fs.fd_residual: .4e}   {fs.ref2_residual: .4e}")

print("\nleft side along a temperature grid at t = 5 (must not decrease):")
xs = np.linspace(0, 3, 7)
print(np.round([fluctuation_sample(d, THERMAL, x, 5.0).fd_residual for x in xs], 8))

numeric, closed = fd16_x_derivative_check(d, THERMAL, 1.0, 5.0)
print(f"\nd/dx of the left side at x=1, t=5: finite difference {numeric:.10f}, mode sum {closed:.10f}")
