"""Expansion and recollapse of a closed dust universe compared with the cycloid."""

import math

from relcosmo.flrw import Dust, FLRWParams, age_bound_check, integrate_scale_factor

A, a0 = 1.0, 0.5
params = FLRWParams(k=1, Lambda=0.0, matter=Dust(A))
da0 = math.sqrt(A / a0 - 1.0)
traj = integrate_scale_factor(params, 0.0, a0, da0, (-10.0, 10.0), n_samples=201)
bang, crunch = traj.singularities()
(turn,) = traj.turning_points()
print(f"big bang at t = {bang.t:.12f}, crunch at t = {crunch.t:.12f}")
print(f"lifetime {crunch.t - bang.t:.12f} (cycloid: pi A = {math.pi * A:.12f})")
print(f"maximum radius {turn.a:.12f} at t = {turn.t:.6f}")
print(f"first-integral drift {traj.first_integral_drift():.2e}")
holds, worst, n = age_bound_check(traj)
print(f"age below the Hubble time at all {n} expanding samples: {holds}")
for eta in (0.5, 1.5, 3.0, 5.0):
    t = bang.t + 0.5 * A * (eta - math.sin(eta))
    print(f"  eta = {eta:3.1f}: a = {traj.scale_factor(t)[0]:.10f}, cycloid {0.5 * A * (1 - math.cos(eta)):.10f}")
