"""Rotation, isometries and closed timelike curves of the Godel universe."""

import numpy as np

from relcosmo import catalog as cat
from relcosmo.causal import ctc_scan, kinematic_decomposition, killing_residual
from relcosmo.manifold import evaluate_metric

entry = cat.godel(a=1.0)
rng = np.random.default_rng(0)
events = cat.sample_events(entry, 20, rng)
x = events[0]
norms = kinematic_decomposition(entry.observers["dust"], entry.spec, x).norms(evaluate_metric(entry.spec, x))
print("matter flow:", {k: f"{v:.3g}" for k, v in norms.items()})
for name, X in sorted(entry.killing.items()):
    print(f"Killing field {name:<10} residual {killing_residual(X, entry.spec, events):.1e}")
scan = ctc_scan(1.0)
print(f"closed timelike curves: {int(scan.accepted.sum())} of {scan.accepted.size} (A, B) cells accepted,"
      f" bounding box {scan.bounding_box()}")
