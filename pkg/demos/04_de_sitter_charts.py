"""Static and global de Sitter charts: the coordinate map and the pulled-back metric."""

import numpy as np

from relcosmo import catalog as cat
from relcosmo.errors import ExtensionRegionError
from relcosmo.manifold import evaluate_metric
from relcosmo.taylor import Taylor2

a = 1.0
fwd = cat.desitter_coordinate_map(a)
static, cosh = cat.de_sitter_static(a=a).spec, cat.de_sitter_cosh(a=a).spec
for x in ([0.3, 0.4, 1.0, 2.0], [-0.5, 0.9, 2.0, 1.0], [1.0, 0.2, 0.5, 4.0]):
    x = np.array(x)
    J = np.array([v.grad for v in fwd(Taylor2.variables(x, order=1))])
    diff = np.max(np.abs(J.T @ evaluate_metric(static, fwd(x)) @ J - evaluate_metric(cosh, x)))
    print(f"global {x.tolist()} -> static {np.round(fwd(x), 6).tolist()}, metric mismatch {diff:.1e}")
try:
    fwd([2.0, 1.2, 1.0, 0.0])
except ExtensionRegionError as exc:
    print(f"outside the static patch: {exc}")
