"""Redshift from two integrated light pulses, and the small-z distance law."""

import numpy as np

from relcosmo import catalog as cat
from relcosmo.optics import distance_redshift_table, hubble_constant, hubble_fit, two_pulse_shift

for name, emit, target in (("flrw", [0.6, 0.3, 1.2, 0.4], 1.3), ("de_sitter_cosh", [0.0, 0.2, 1.2, 0.4], 1.2),
                           ("friedman_dust", [0.3, 0.2, 1.2, 0.4], 1.0)):
    entry = cat.make_entry(name)
    a = entry.extra["scale"]
    s = two_pulse_shift(entry.spec, emit, target)
    ratio = float(a(s.recv[0])) / float(a(emit[0]))
    print(f"{name:<16} two-pulse 1+z = {s.nu_ratio:.12f}, a(t0)/a(te) = {ratio:.12f}")

a = lambda t: t ** (2 / 3)
t0 = 1.0
H0 = hubble_constant(a, t0)
rows = distance_redshift_table(a, t0, t0 - np.linspace(0.0, 0.01 / H0, 21))
fit = hubble_fit(rows, H0)
print(f"matter-dominated power law: fitted slope {fit.slope:.6f}, H0/c {fit.H0_over_c:.6f}, "
      f"relative error {fit.rel_error:.2%}")
