"""Exterior calculus, observer kinematics, Killing fields and Godel's closed
timelike curves.

Forms are stored as full antisymmetric arrays of shape ``(4,) * p``.  The
wedge product is ``alpha ^ beta = (p+q)!/(p! q!) Alt(alpha (x) beta)`` so that
``(dt ^ dx)_{01} = 1``; the Hodge dual is

    (*alpha)_{b...} = (1/p!) alpha^{a...} eps_{a... b...},  eps_{0123} = +sqrt|g|,

i.e. the coordinate volume form of each chart is positively oriented.  With
these conventions the rotation one-form is ``omega = (1/2) *(u ^ du)``; the
factor 1/2 makes ``*(u ^ omega)`` equal to the antisymmetric part of
``nabla u`` and ``g(omega, omega)`` equal to the usual vorticity scalar.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .curvature import _fd_gradient, christoffel
from .errors import InvalidInputError
from .flrw import fmt
from .manifold import DIM, MetricSpec, as_event, evaluate_metric, jet, metric_inverse

ROTATION_NORMALIZATION = 0.5


def _perm_sign(p) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def antisymmetrize(T: np.ndarray) -> np.ndarray:
    """``Alt(T)``: average over index permutations with signs."""
    T = np.asarray(T, dtype=float)
    p = T.ndim
    if p < 2:
        return T.copy()
    out = np.zeros_like(T)
    perms = list(itertools.permutations(range(p)))
    for perm in perms:
        out += _perm_sign(perm) * T.transpose(perm)
    return out / len(perms)


def levi_civita_symbol(n: int = DIM) -> np.ndarray:
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        eps[perm] = _perm_sign(perm)
    return eps


_EPS4 = levi_civita_symbol(DIM)


@dataclass(frozen=True, eq=False)
class FormField:
    """A differential ``p``-form given by a closure returning its components."""

    degree: int
    components: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        if not 0 <= self.degree <= DIM:
            raise InvalidInputError(f"form degree must be in 0..{DIM}")

    def at(self, x) -> np.ndarray:
        A = np.asarray(self.components(np.asarray(x, dtype=float)), dtype=float)
        if A.shape != (DIM,) * self.degree:
            raise InvalidInputError(f"expected shape {(DIM,) * self.degree}, got {A.shape}")
        return antisymmetrize(A)


def one_form(fun: Callable) -> FormField:
    return FormField(1, fun)


def wedge(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    alpha, beta = np.asarray(alpha, dtype=float), np.asarray(beta, dtype=float)
    p, q = alpha.ndim, beta.ndim
    if p + q > DIM:
        return np.zeros(())
    coef = math.factorial(p + q) / (math.factorial(p) * math.factorial(q))
    return coef * antisymmetrize(np.multiply.outer(alpha, beta))


def exterior_derivative(f: FormField, spec: Optional[MetricSpec], e) -> np.ndarray:
    """``(d alpha)_{c a...} = (p+1) d_[c alpha_{a...}]`` by finite differences."""
    x = as_event(e) if spec is None else spec.require(e)
    dA = _fd_gradient(f.at, x, spec)  # derivative axis last
    p = f.degree
    D = np.moveaxis(dA, -1, 0)
    return (p + 1) * antisymmetrize(D)


def raise_all(form: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    out = np.asarray(form, dtype=float)
    for k in range(out.ndim):
        out = np.moveaxis(np.tensordot(ginv, out, axes=([1], [k])), 0, k)
    return out


def hodge_dual(form: np.ndarray, g, orientation: int = 1) -> np.ndarray:
    """Hodge dual of a ``p``-form at a point with metric ``g``."""
    g = np.asarray(g, dtype=float)
    ginv = metric_inverse(g)
    form = np.asarray(form, dtype=float)
    p = form.ndim
    eps = orientation * math.sqrt(abs(np.linalg.det(g))) * _EPS4
    up = raise_all(form, ginv)
    return np.tensordot(up, eps, axes=(list(range(p)), list(range(p)))) / math.factorial(p)


def inner(alpha: np.ndarray, beta: np.ndarray, g) -> float:
    """``g(alpha, beta)`` for one-forms."""
    return float(alpha @ metric_inverse(g) @ beta)


def rotation_of(u_form: FormField, spec: MetricSpec, e, normalization: float = ROTATION_NORMALIZATION) -> np.ndarray:
    """Rotation one-form ``omega = normalization * *(u ^ du)``."""
    x = spec.require(e)
    u = u_form.at(x)
    du = exterior_derivative(u_form, spec, x)
    return normalization * hodge_dual(wedge(u, du), evaluate_metric(spec, x))


# --------------------------------------------------------------------------
# kinematics
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KinematicData:
    acceleration: np.ndarray
    deformation: np.ndarray
    rotation: np.ndarray
    residual: float
    expansion: float
    nabla_u: np.ndarray
    spatiality: float  # max of |a(u)|, |Sigma(u, .)|, |omega(u)|

    def norms(self, g) -> dict:
        ginv = metric_inverse(g)
        a2 = float(self.acceleration @ ginv @ self.acceleration)
        s2 = float(np.einsum("ab,cd,ac,bd->", ginv, ginv, self.deformation, self.deformation))
        w2 = float(self.rotation @ ginv @ self.rotation)
        return {"acceleration": math.sqrt(max(a2, 0.0)), "deformation": math.sqrt(max(s2, 0.0)),
                "rotation": math.sqrt(max(w2, 0.0)), "expansion": self.expansion}


def lower_field(X: Callable, spec: MetricSpec) -> Callable:
    return lambda x: spec.raw(x) @ np.asarray(X(x), dtype=float)


def covariant_derivative_form(X_flat: Callable, spec: MetricSpec, x) -> np.ndarray:
    """``N[a, b] = nabla_a X_b`` for a one-form field."""
    gam = christoffel(jet(spec, x, order=1)).gamma
    dX = _fd_gradient(X_flat, x, spec)  # dX[b, a] = d_a X_b
    return dX.T - np.einsum("cab,c->ab", gam, np.asarray(X_flat(x)))


def kinematic_decomposition(u: Callable, spec: MetricSpec, e, unit_tol: float = 1e-9) -> KinematicData:
    """Split ``nabla_a u_b = -u_a a_b + Sigma_ab + W_ab`` for a unit timelike field.

    ``W`` is compared with ``*(u ^ omega)``; the largest mismatch of the full
    identity is reported as ``residual``.
    """
    x = spec.require(e)
    g = evaluate_metric(spec, x)
    uv = np.asarray(u(x), dtype=float)
    norm = float(uv @ g @ uv)
    if abs(norm + 1.0) > unit_tol:
        raise InvalidInputError(f"observer field is not unit timelike: g(u,u) = {norm!r}")
    u_flat = lower_field(u, spec)
    uf = u_flat(x)
    N = covariant_derivative_form(u_flat, spec, x)
    acc = uv @ N
    h = g + np.outer(uf, uf)
    ginv = metric_inverse(g)
    hm = ginv @ h  # h^a_b
    P = hm.T @ N @ hm
    sigma = 0.5 * (P + P.T)
    omega = rotation_of(one_form(u_flat), spec, x)
    rot_part = hodge_dual(wedge(uf, omega), g)
    residual = float(np.max(np.abs(N - (-np.outer(uf, acc) + sigma + rot_part))))
    spatial = float(max(abs(acc @ uv), np.max(np.abs(sigma @ uv)), abs(omega @ uv)))
    theta = float(np.einsum("ab,ab->", ginv, sigma))
    return KinematicData(acc, sigma, omega, residual, theta, N, spatial)


def killing_tensor(X: Callable, spec: MetricSpec, e) -> np.ndarray:
    """``nabla_a X_b + nabla_b X_a`` at ``e``."""
    x = spec.require(e)
    N = covariant_derivative_form(lower_field(X, spec), spec, x)
    return N + N.T


def killing_residual(X: Callable, spec: MetricSpec, events) -> float:
    """Largest component of the symmetrized covariant derivative over ``events``."""
    return max(float(np.max(np.abs(killing_tensor(X, spec, e)))) for e in np.atleast_2d(events))


# --------------------------------------------------------------------------
# Godel closed timelike curves
# --------------------------------------------------------------------------

def ctc_curve(A: float, B: float, tau, c: float = 1.0) -> np.ndarray:
    """Event(s) of the closed curve family in the Godel chart ``(t, x, y, z)``.

    ``ct = A(2 sin tau - sin tau cos tau)``, ``x = -B cos tau``, ``y = 0``,
    ``z = -2A sin tau``; period ``2 pi``.
    """
    tau = np.asarray(tau, dtype=float)
    s, co = np.sin(tau), np.cos(tau)
    return np.stack([A * (2 * s - s * co) / c, -B * co, np.zeros_like(tau), -2 * A * s], axis=-1)


def ctc_tangent(A: float, B: float, tau, c: float = 1.0) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    s, co = np.sin(tau), np.cos(tau)
    return np.stack([A * (2 * co - np.cos(2 * tau)) / c, B * s, np.zeros_like(tau), -2 * A * co], axis=-1)


def ctc_norm(A: float, B: float, tau, a: float = 1.0):
    """``(g(gamma', gamma'), w)`` along the curve with ``w = -g(u, gamma')``.

    Both are independent of ``c``; ``w > 0`` means future-directed with
    respect to the dust velocity ``u = (1/c) d_t``.
    """
    tau = np.asarray(tau, dtype=float)
    co, s = np.cos(tau), np.sin(tau)
    E = np.exp(-a * B * co)
    zp = -2 * A * co
    w = A * (2 * co - np.cos(2 * tau)) + E * zp
    q = -w * w + (B * s) ** 2 + 0.5 * (E * zp) ** 2
    return q, w


# interval arithmetic on arrays of (lo, hi) ------------------------------

def _i_sin(lo, hi):
    slo, shi = np.sin(lo), np.sin(hi)
    out_lo, out_hi = np.minimum(slo, shi), np.maximum(slo, shi)
    # interior maxima at pi/2 + 2k pi, minima at -pi/2 + 2k pi
    kmax = np.ceil((lo - np.pi / 2) / (2 * np.pi))
    has_max = np.pi / 2 + 2 * np.pi * kmax <= hi
    kmin = np.ceil((lo + np.pi / 2) / (2 * np.pi))
    has_min = -np.pi / 2 + 2 * np.pi * kmin <= hi
    return np.where(has_min, -1.0, out_lo), np.where(has_max, 1.0, out_hi)


def _i_cos(lo, hi):
    return _i_sin(lo + np.pi / 2, hi + np.pi / 2)


def _i_mul(a, b):
    p = np.stack([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    return p.min(axis=0), p.max(axis=0)


def _i_scale(k, a):
    return (np.minimum(k * a[0], k * a[1]), np.maximum(k * a[0], k * a[1]))


def _i_add(a, b):
    return a[0] + b[0], a[1] + b[1]


def _i_sq(a):
    lo2, hi2 = a[0] ** 2, a[1] ** 2
    contains = (a[0] <= 0) & (a[1] >= 0)
    return np.where(contains, 0.0, np.minimum(lo2, hi2)), np.maximum(lo2, hi2)


def _i_exp(a):
    return np.exp(a[0]), np.exp(a[1])


def ctc_enclosure(A: float, B: float, lo, hi, a: float = 1.0):
    """Interval enclosures of ``g(gamma', gamma')`` and ``w`` on panels ``[lo, hi]``."""
    co = _i_cos(lo, hi)
    s = _i_sin(lo, hi)
    c2 = _i_cos(2 * lo, 2 * hi)
    E = _i_exp(_i_scale(-a * B, co))
    zp = _i_scale(-2 * A, co)
    Ezp = _i_mul(E, zp)
    w = _i_add(_i_scale(A, _i_add(_i_scale(2.0, co), _i_scale(-1.0, c2))), Ezp)
    w2 = _i_sq(w)
    xp2 = _i_sq(_i_scale(B, s))
    e2 = _i_sq(Ezp)
    q_hi = -w2[0] + xp2[1] + 0.5 * e2[1]
    q_lo = -w2[1] + xp2[0] + 0.5 * e2[0]
    return (q_lo, q_hi), w


@dataclass(frozen=True)
class CTCResult:
    A: float
    B: float
    accepted: bool
    reason: str  # "" when accepted
    tau_star: Optional[float]
    min_margin: float  # certified -sup g(gamma', gamma') when accepted, else sampled
    panels: int

    @property
    def closed(self) -> bool:
        return bool(np.array_equal(ctc_curve(self.A, self.B, 0.0), ctc_curve(self.A, self.B, 2 * np.pi)) or
                    np.allclose(ctc_curve(self.A, self.B, 0.0), ctc_curve(self.A, self.B, 2 * np.pi), rtol=0,
                                atol=1e-12 * (1 + abs(self.A) + abs(self.B))))


def ctc_classify(A: float, B: float, a: float = 1.0, n_grid: int = 720, margin: float = 1e-10,
                 max_depth: int = 40, orientation: int = 1) -> CTCResult:
    """Certify that the curve ``(A, B)`` is timelike and future-directed everywhere.

    The grid of ``n_grid`` panels over ``[0, 2 pi]`` is refined by bisection
    until interval enclosures prove ``g(gamma', gamma') <= -margin`` and
    ``orientation * w > 0`` on every panel.  Any sampled violation rejects
    the curve, reporting the offending ``tau``.
    """
    if n_grid < 720:
        raise InvalidInputError("the tau grid needs at least 720 panels")
    if A == 0 and B == 0:
        return CTCResult(A, B, False, "degenerate (constant curve)", None, float("nan"), 0)
    tau = np.linspace(0.0, 2 * np.pi, n_grid + 1)
    q, w = ctc_norm(A, B, tau, a)
    w = orientation * w
    imax = int(np.argmax(q))
    if q[imax] > -margin:
        return CTCResult(A, B, False, "not timelike", float(tau[imax]), float(-q[imax]), n_grid)
    imin = int(np.argmin(w))
    if w[imin] <= 0:
        return CTCResult(A, B, False, "not future-directed", float(tau[imin]), float(-q.max()), n_grid)
    lo, hi = tau[:-1], tau[1:]
    sup = -np.inf
    panels = n_grid
    for _ in range(max_depth):
        (qlo, qhi), (wlo, whi) = ctc_enclosure(A, B, lo, hi, a)
        wl = wlo if orientation > 0 else -whi
        ok = (qhi <= -margin) & (wl > 0)
        if np.any(ok):
            sup = max(sup, float(qhi[ok].max()))
        lo, hi = lo[~ok], hi[~ok]
        if lo.size == 0:
            return CTCResult(A, B, True, "", None, -sup, panels)
        mid = 0.5 * (lo + hi)
        qm, wm = ctc_norm(A, B, mid, a)
        wm = orientation * wm
        bad = (qm > -margin) | (wm <= 0)
        if np.any(bad):
            k = int(np.argmax(bad))
            reason = "not timelike" if qm[k] > -margin else "not future-directed"
            return CTCResult(A, B, False, reason, float(mid[k]), float(-qm[k]), panels)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        panels += mid.size
    return CTCResult(A, B, False, "uncertified (refinement limit)", float(lo[0]), float("nan"), panels)


@dataclass(frozen=True, eq=False)
class CTCScan:
    a: float
    A_values: np.ndarray
    B_values: np.ndarray
    cells: tuple  # CTCResult in row-major (A outer, B inner) order

    @property
    def accepted(self) -> np.ndarray:
        return np.array([c.accepted for c in self.cells]).reshape(len(self.A_values), len(self.B_values))

    def nonempty(self) -> bool:
        return bool(self.accepted.any())

    def bounding_box(self) -> Optional[tuple]:
        acc = [c for c in self.cells if c.accepted]
        if not acc:
            return None
        As, Bs = [c.A for c in acc], [c.B for c in acc]
        return (min(As), max(As), min(Bs), max(Bs))

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["A", "B", "accepted", "failure_reason", "min_margin"])
        for c in self.cells:
            wr.writerow([fmt(c.A), fmt(c.B), "1" if c.accepted else "0", c.reason, fmt(c.min_margin)])
        return buf.getvalue()


def _classify_row(args):
    A, Bs, a, n_grid, margin, orientation = args
    return [ctc_classify(A, B, a, n_grid, margin, orientation=orientation) for B in Bs]


def ctc_scan(a: float = 1.0, A_range: Sequence[float] = None, B_range: Sequence[float] = None,
             grid: Sequence[int] = (41, 41), n_grid: int = 720, margin: float = 1e-10, workers: int = 1,
             orientation: int = 1) -> CTCScan:
    """Classify every cell of an ``(A, B)`` grid; default ranges ``[0, 20/a]``."""
    nA, nB = int(grid[0]), int(grid[1])
    if nA < 1 or nB < 1:
        raise InvalidInputError("grid dimensions must be positive")
    if not a > 0:
        raise InvalidInputError("the Godel parameter a must be positive for the scan")
    A_range = (0.0, 20.0 / a) if A_range is None else A_range
    B_range = (0.0, 20.0 / a) if B_range is None else B_range
    As = np.linspace(A_range[0], A_range[1], nA)
    Bs = np.linspace(B_range[0], B_range[1], nB)
    jobs = [(float(A), [float(B) for B in Bs], a, n_grid, margin, orientation) for A in As]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_classify_row, jobs))
    else:
        rows = [_classify_row(j) for j in jobs]
    return CTCScan(a, As, Bs, tuple(c for row in rows for c in row))
