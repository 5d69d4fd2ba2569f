"""Newtonian limit of the weak-field metric, and homogeneity of Bianchi models."""

import numpy as np

from relcosmo import catalog as cat
from relcosmo.curvature import curvature_at
from relcosmo.newtonian import convergence_ratios

rng = np.random.default_rng(0)
pts = rng.uniform(1.0, 3.0, size=(8, 3))
devs, ratios = convergence_ratios(cat.point_mass_potential(1.0), lambda y: 0.0, pts, 1e-4)
print("weak-field deviation for eps = 1e-4, 5e-5, 2.5e-5:", [f"{d:.3e}" for d in devs])
print("ratios per halving:", [f"{r:.4f}" for r in ratios])

frame = cat.bianchi_frame("IX")
spec = cat.bianchi_metric(frame, lambda t: [[1.0 + t * t, 0.2 * t, 0.0], [0.2 * t, 2.0 + t, 0.1],
                                            [0.0, 0.1, 1.5 + 0.0 * t]])
for _ in range(3):
    x = np.array([0.5, *rng.uniform(0.3, 2.8, size=3)])
    G = cat.to_frame(curvature_at(spec, x).einstein, frame, x)
    print(f"type IX at {np.round(x, 3).tolist()}: coframe G_00 = {G[0, 0]:.12f}, G_11 = {G[1, 1]:.12f}")
