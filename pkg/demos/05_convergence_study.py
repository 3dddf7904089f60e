"""
Convergence under refinement and Richardson extrapolation
=========================================================

P1 eigenvalues converge at second order in h.  On the unit square with a
constant Robin coefficient the exact eigenvalues factor into 1D problems

    X'' + alpha^2 X = 0,   X'(0) = theta X(0),  X'(1) = -theta X(1),

whose alphas solve the transcendental equation
(alpha^2 - theta^2) sin(alpha) = 2 theta alpha cos(alpha).  That gives an
independent target to measure both the raw error and the extrapolated one.
"""

import numpy as np
from scipy.optimize import bisect

import robineig as rb

THETA = 1.0


def alphas_1d(count):
    """First positive roots of the 1D characteristic equation."""
    f = lambda a: (a * a - THETA**2) * np.sin(a) - 2 * THETA * a * np.cos(a)
    roots, a = [], 1e-4
    step = 1e-3
    while len(roots) < count:
        b = a + step
        if np.sign(f(a)) != np.sign(f(b)):
            roots.append(bisect(f, a, b, xtol=1e-14))
        a = b
    return np.asarray(roots)


al = alphas_1d(3)
exact = np.sort([am * am + an * an for am in al for an in al])[:4]

square = rb.build_polygon(
    [[0, 0], [1, 0], [1, 1], [0, 1]],
    ["bottom", "right", "top", "left"],
)
c = rb.laplacian()
theta = rb.robin_constant(THETA)

# Solve on a ladder of meshes; refine() halves h exactly.
mesh = rb.mesh_uniform(square, h_target=1 / 8)
levels, tables = [], []
for _ in range(4):
    spec = rb.solve_pencil(rb.assemble_form(mesh, c, theta), k=4)
    levels.append(mesh.h)
    tables.append(spec.eigenvalues[:4])
    mesh = rb.refine(mesh)
tables = np.array(tables)

print("eigenvalues of the theta = 1 square under refinement:")
print("      h      " + "".join(f"  lambda_{k + 1:<8d}" for k in range(4)))
for h, row in zip(levels, tables):
    print(f"  {h:.5f}  " + "".join(f"  {v:14.8f}" for v in row))
print("    exact  " + "".join(f"  {v:14.8f}" for v in exact))

# Error ratios between consecutive levels: ~4 means clean O(h^2).
err = tables - exact
print("\nerror ratios per halving (4.0 = exact second order):")
for k in range(4):
    ratios = err[:-1, k] / err[1:, k]
    print(f"  lambda_{k + 1}: " + "  ".join(f"{r:5.2f}" for r in ratios))

# Richardson extrapolation from the three finest levels removes the leading
# h^2 term and gains roughly three digits here.
print("\nRichardson extrapolation (three finest levels):")
print("   k    raw rel error    extrapolated rel error   observed order")
for k in range(4):
    rr = rb.richardson_extrapolate(tables[:, k])
    raw = abs(tables[-1, k] - exact[k]) / exact[k]
    ext = abs(rr.estimate - exact[k]) / exact[k]
    print(f"   {k + 1}      {raw:.3e}          {ext:.3e}            {rr.order:.2f}")
