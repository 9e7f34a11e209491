"""Mellin symbols of a meromorphic kernel, three ways.

The kernel 1/(pi (1 + t)) is the simplest admissible kernel.  Its symbol on
the line Re z = beta is 1/sin(pi (beta - i xi)).  We compute it by adaptive
quadrature, from the pole closed form, and by applying the operator to a
log-Gaussian on a grid and reading off the ratio of transforms.
"""

import numpy as np

from mellinbvp.mellin import (
    LogGridFunction,
    MellinLine,
    apply_mellin_convolution,
    conjugate_xi_grid,
    k1_kernel,
    mellin_forward,
    mellin_symbol,
    mellin_symbol_closed_form,
)

kernel = k1_kernel(-1.0)
line = MellinLine(0.25)
xi = np.linspace(-4, 4, 9)

quad = mellin_symbol(kernel, 0, 0, line, xi)
closed = mellin_symbol_closed_form(kernel, 0, 0, line, xi)
exact = 1 / np.sin(np.pi * (line.beta - 1j * xi))
print("xi      |quad - exact|  |closed - exact|")
for x, a, b, e in zip(xi, quad, closed, exact):
    print(f"{x:+.1f}   {abs(a - e):.2e}        {abs(b - e):.2e}")

# Operator route: M[K u] = symbol * M[u].  K u only decays like a power of t,
# so the grid has to be wide for the weighted samples to vanish at its ends.
u = LogGridFunction.from_function(lambda t: np.exp(-0.5 * np.log(t) ** 2), 1e-60, 1e60, 8192)
ku = apply_mellin_convolution(kernel, 0, 0, u, line)
grid_xi = conjugate_xi_grid(u.n, u.h)
sel = np.abs(grid_xi) <= 3
ratio = mellin_forward(ku, line, grid_xi[sel]) / mellin_forward(u, line, grid_xi[sel])
err = np.max(np.abs(ratio - 1 / np.sin(np.pi * (line.beta - 1j * grid_xi[sel]))))
print(f"\noperator route, |xi| <= 3: max deviation {err:.2e}")
