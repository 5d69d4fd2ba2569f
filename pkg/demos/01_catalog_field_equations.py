"""Check every catalog spacetime against the field equations at a few events."""

import numpy as np

from relcosmo import catalog as cat
from relcosmo.curvature import efe_residual

rng = np.random.default_rng(0)
print(f"{'entry':<18}{'source':<20}{'Lambda':>12}{'max residual':>16}")
for name in cat.ENTRY_NAMES:
    entry = cat.make_entry(name)
    src = entry.source
    worst = max(efe_residual(entry.spec, src.Lambda, src.T, x, entry.c, entry.G).max_abs
                for x in cat.sample_events(entry, 10, rng))
    print(f"{name:<18}{src.kind:<20}{src.Lambda:>12.4g}{worst:>16.2e}")
