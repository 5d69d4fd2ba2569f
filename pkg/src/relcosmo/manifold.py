"""Charts, metric evaluation, causal classification, jets and curve length.

Events are plain ``numpy`` arrays of four chart coordinates, index 0 being the
time coordinate of the chart.  Every catalog chart uses the coordinate time
``t`` itself (not ``ct``), so ``g_00`` carries the factor ``c**2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import (
    DegenerateMetricError,
    DomainError,
    InvalidInputError,
    MixedCausalTypeError,
    UnsupportedMetricError,
)
from .taylor import Taylor2, matrix_jet

DIM = 4
EPS = np.finfo(float).eps

# Finite-difference step scales for first and second derivatives (one
# Richardson halving is applied on top of each).
FD_STEP_FIRST = EPS ** (1.0 / 5.0)
FD_STEP_SECOND = EPS ** (1.0 / 6.0)

DEGENERACY_THRESHOLD = 1e-14
SINGULAR_VALUE_THRESHOLD = 1e-20


def as_event(x) -> np.ndarray:
    e = np.asarray(x, dtype=float).reshape(-1)
    if e.size != DIM:
        raise InvalidInputError(f"an event needs {DIM} coordinates, got {e.size}")
    if not np.all(np.isfinite(e)):
        raise InvalidInputError(f"non-finite coordinates {e}")
    return e


def _inside(x) -> Optional[str]:
    return None


@dataclass(frozen=True, eq=False)
class MetricSpec:
    """A metric on one coordinate chart.

    Parameters
    ----------
    name
        Identifier, e.g. ``"godel"``.
    params
        Parameter values the metric was built with.
    components
        ``components(x) -> 4x4 nested list``.  The formula must only use
        arithmetic and numpy ufuncs so that it also accepts
        :class:`~relcosmo.taylor.Taylor2` coordinates.
    violation
        ``violation(x) -> str | None``; returns a message naming the chart
        boundary when ``x`` lies outside the domain.
    coordinates
        Coordinate names, for reports.
    stationary
        ``True`` when no component depends on ``x[0]``.
    has_analytic_jet
        ``False`` when ``components`` cannot be evaluated on Taylor numbers;
        derivatives then come from :func:`numeric_jet` only.
    """

    name: str
    params: Mapping[str, float]
    components: Callable[[Sequence], list]
    violation: Callable[[np.ndarray], Optional[str]] = _inside
    coordinates: tuple = ("t", "x", "y", "z")
    stationary: bool = False
    has_analytic_jet: bool = True
    metadata: Mapping[str, object] = field(default_factory=dict)

    def domain(self, x) -> bool:
        return self.violation(np.asarray(x, dtype=float)) is None

    def require(self, x) -> np.ndarray:
        e = as_event(x)
        msg = self.violation(e)
        if msg is not None:
            raise DomainError(f"{self.name}: {msg} at {e.tolist()}")
        return e

    def raw(self, x) -> np.ndarray:
        """Metric matrix without the domain check."""
        g = np.array([[float(v) for v in row] for row in self.components(list(x))])
        return 0.5 * (g + g.T)

    def eval(self, x) -> np.ndarray:
        return evaluate_metric(self, x)

    def analytic_jet(self, x, order: int = 2) -> "Jet2":
        if not self.has_analytic_jet:
            raise UnsupportedMetricError(f"{self.name} has no analytic jet")
        e = self.require(x)
        entries = self.components(Taylor2.variables(e, order=order))
        g, dg, ddg = matrix_jet(entries, DIM, order=order)
        return Jet2.from_arrays(g, dg, ddg)


@dataclass(frozen=True, eq=False)
class Jet2:
    """Metric value with first and second partial derivatives at an event.

    Index layout puts derivative axes last::

        g[a, b]          = g_ab
        dg[a, b, c]      = d_c g_ab
        ddg[a, b, c, d]  = d_c d_d g_ab

    ``ddg`` may be ``None`` for first-order jets (enough for Christoffel
    symbols and geodesics, not for curvature).
    """

    g: np.ndarray
    dg: np.ndarray
    ddg: Optional[np.ndarray] = None

    @classmethod
    def from_arrays(cls, g, dg, ddg=None):
        g = 0.5 * (g + g.T)
        dg = 0.5 * (dg + dg.transpose(1, 0, 2))
        if ddg is not None:
            ddg = 0.5 * (ddg + ddg.transpose(1, 0, 2, 3))
            ddg = 0.5 * (ddg + ddg.transpose(0, 1, 3, 2))
        return cls(g, dg, ddg)


def evaluate_metric(spec: MetricSpec, e) -> np.ndarray:
    """Metric matrix at ``e``; raises :class:`DomainError` outside the chart."""
    return spec.raw(spec.require(e))


def metric_inverse(g, threshold: float = DEGENERACY_THRESHOLD,
                   sv_threshold: float = SINGULAR_VALUE_THRESHOLD) -> np.ndarray:
    """Inverse metric, refusing (near-)degenerate matrices.

    Two scale-free tests: ``|det g|`` over the Hadamard bound (product of row
    norms) catches nearly dependent rows, and the smallest-to-largest
    singular value ratio catches a collapsing diagonal entry such as
    ``g_tt = -c^2 cos^2(chi)`` at the static de Sitter horizon.
    """
    g = np.asarray(g, dtype=float)
    rows = np.linalg.norm(g, axis=1)
    if np.any(rows == 0.0):
        raise DegenerateMetricError("metric has a vanishing row")
    ratio = abs(np.linalg.det(g)) / np.prod(rows)
    sv = np.linalg.svd(g, compute_uv=False)
    if not (ratio > threshold and sv[-1] > sv_threshold * sv[0]):
        raise DegenerateMetricError(
            f"degenerate metric (|det g| / Hadamard bound = {ratio:.3e}, "
            f"singular value ratio = {sv[-1] / sv[0]:.3e})")
    ginv = np.linalg.solve(g, np.eye(g.shape[0]))
    return 0.5 * (ginv + ginv.T)


class CausalType(str, enum.Enum):
    TIMELIKE = "timelike"
    NULL = "null"
    SPACELIKE = "spacelike"


def classify_vector(g, v, null_tol: float = 1e-9) -> CausalType:
    """Causal character of ``v``; ``|g(v,v)| <= null_tol * max|g| * |v|^2`` counts as null."""
    g = np.asarray(g, dtype=float)
    v = np.asarray(v, dtype=float)
    vmax = float(np.max(np.abs(v)))
    if vmax == 0.0:
        raise InvalidInputError("the zero vector has no causal type")
    v = v / vmax  # the causal type is scale invariant; this avoids underflow
    vv = float(v @ v)
    q = float(v @ g @ v)
    if abs(q) <= null_tol * np.max(np.abs(g)) * vv:
        return CausalType.NULL
    return CausalType.TIMELIKE if q < 0 else CausalType.SPACELIKE


def signature(g) -> tuple:
    """Counts of (negative, zero, positive) eigenvalues."""
    w = np.linalg.eigvalsh(np.asarray(g, dtype=float))
    tol = 1e-12 * np.max(np.abs(w))
    return int(np.sum(w < -tol)), int(np.sum(np.abs(w) <= tol)), int(np.sum(w > tol))


def _steps(x, scale):
    return scale * np.maximum(1.0, np.abs(x))


def _check_stencil(spec: MetricSpec, points):
    for p in points:
        msg = spec.violation(p)
        if msg is not None:
            raise DomainError(f"{spec.name}: finite-difference stencil leaves the chart ({msg}) at {p.tolist()}")


def numeric_jet(spec: MetricSpec, e, first_scale: float = FD_STEP_FIRST,
                second_scale: float = FD_STEP_SECOND) -> Jet2:
    """Finite-difference jet with one Richardson halving.

    Central differences for first derivatives, the 3-point and 4-point cross
    stencils for second derivatives.
    """
    x = spec.require(e)
    return fd_jet(spec.raw, x, first_scale, second_scale, check=lambda pts: _check_stencil(spec, pts))


def fd_jet(fun, x, first_scale=FD_STEP_FIRST, second_scale=FD_STEP_SECOND, check=None) -> Jet2:
    """Jet of an arbitrary matrix-valued function ``fun(x)`` by finite differences."""
    x = np.asarray(x, dtype=float)
    n = x.size
    h1 = _steps(x, first_scale)
    h2 = _steps(x, second_scale)
    eye = np.eye(n)
    if check is not None:
        pts = [x + s * h * eye[i] for i in range(n) for h in (h1[i], h2[i]) for s in (1, -1)]
        pts += [x + s1 * h2[i] * eye[i] + s2 * h2[j] * eye[j]
                for i in range(n) for j in range(i + 1, n) for s1 in (1, -1) for s2 in (1, -1)]
        check(pts)

    f0 = np.asarray(fun(x), dtype=float)
    shape = f0.shape
    dg = np.zeros(shape + (n,))
    ddg = np.zeros(shape + (n, n))

    def d1(i, h):
        return (fun(x + h * eye[i]) - fun(x - h * eye[i])) / (2.0 * h)

    def d2(i, h):
        return (fun(x + h * eye[i]) - 2.0 * f0 + fun(x - h * eye[i])) / (h * h)

    def d11(i, j, hi, hj):
        return (fun(x + hi * eye[i] + hj * eye[j]) - fun(x + hi * eye[i] - hj * eye[j])
                - fun(x - hi * eye[i] + hj * eye[j]) + fun(x - hi * eye[i] - hj * eye[j])) / (4.0 * hi * hj)

    for i in range(n):
        coarse, fine = d1(i, h1[i]), d1(i, 0.5 * h1[i])
        dg[..., i] = fine + (fine - coarse) / 3.0
        coarse, fine = d2(i, h2[i]), d2(i, 0.5 * h2[i])
        ddg[..., i, i] = fine + (fine - coarse) / 3.0
        for j in range(i + 1, n):
            coarse = d11(i, j, h2[i], h2[j])
            fine = d11(i, j, 0.5 * h2[i], 0.5 * h2[j])
            val = fine + (fine - coarse) / 3.0
            ddg[..., i, j] = val
            ddg[..., j, i] = val
    if len(shape) == 2 and shape[0] == shape[1]:
        return Jet2.from_arrays(f0, dg, ddg)
    return Jet2(f0, dg, ddg)


def jet(spec: MetricSpec, e, method: str = "auto", order: int = 2) -> Jet2:
    """Analytic jet when available (``method='auto'``), otherwise finite differences."""
    if method == "analytic" or (method == "auto" and spec.has_analytic_jet):
        return spec.analytic_jet(e, order=order)
    if method in ("numeric", "auto"):
        return numeric_jet(spec, e)
    raise InvalidInputError(f"unknown jet method {method!r}")


def curve_length(spec: MetricSpec, curve: Callable, tangent: Callable, lam_i: float, lam_f: float,
                 null_tol: float = 1e-9, rtol: float = 1e-12) -> float:
    """Length functional: integral of sqrt|g(v, v)| along a curve.

    ``curve(lam)`` returns an event and ``tangent(lam)`` the velocity.  A
    curve whose tangent is timelike somewhere and spacelike elsewhere raises
    :class:`MixedCausalTypeError`; null stretches contribute zero.
    """
    signs = set()

    def integrand(lam):
        x = curve(lam)
        g = evaluate_metric(spec, x)
        v = np.asarray(tangent(lam), dtype=float)
        q = float(v @ g @ v)
        if abs(q) <= null_tol * np.max(np.abs(g)) * float(v @ v):
            return 0.0
        signs.add(q > 0)
        return np.sqrt(abs(q))

    total, _ = integrate.quad(integrand, lam_i, lam_f, epsabs=0.0, epsrel=rtol, limit=400)
    if len(signs) > 1:
        raise MixedCausalTypeError("tangent changes causal type along the curve")
    return abs(total)
