"""Levi-Civita connection, curvature tensors, field equations and geodesics.

Conventions
-----------
``gamma[a, b, c] = Gamma^a_{bc}``; ``riemann[a, b, c, d] = R^a_{bcd}`` with

    R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
                + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb},

``Ric_ab = R^c_{acb}`` and ``G = Ric - (R/2) g``.  With these signs the
Einstein static universe needs positive density and positive cosmological
constant, and the round 3-sphere has positive sectional curvature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize
from scipy.integrate import DOP853, RK45

from .errors import DegenerateMetricError, InvalidInputError, SingularApproachError
from .manifold import (
    FD_STEP_FIRST,
    Jet2,
    MetricSpec,
    _check_stencil,
    _steps,
    as_event,
    jet,
    metric_inverse,
)


@dataclass(frozen=True, eq=False)
class Christoffel:
    gamma: np.ndarray
    ginv: np.ndarray
    lowered: np.ndarray  # Gamma_{dbc}


@dataclass(frozen=True, eq=False)
class RiemannTensor:
    R: np.ndarray

    def lowered(self, g) -> np.ndarray:
        """R_{abcd} = g_{ae} R^e_{bcd}."""
        return np.einsum("ae,ebcd->abcd", g, self.R)


@dataclass(frozen=True, eq=False)
class EFEResidual:
    residual: np.ndarray
    max_abs: float


@dataclass(frozen=True, eq=False)
class Curvature:
    """Everything computed from one jet."""

    g: np.ndarray
    ginv: np.ndarray
    gamma: np.ndarray
    riemann: RiemannTensor
    ricci: np.ndarray
    scalar: float
    einstein: np.ndarray


def christoffel(j: Jet2) -> Christoffel:
    ginv = metric_inverse(j.g)
    dg = j.dg
    # dg[a, b, c] = d_c g_ab
    low = 0.5 * (dg.transpose(0, 2, 1) + dg - dg.transpose(2, 0, 1))
    gamma = np.einsum("ad,dbc->abc", ginv, low)
    return Christoffel(gamma, ginv, low)


def _christoffel_derivative(j: Jet2, ch: Christoffel) -> np.ndarray:
    """dgamma[a, b, c, e] = d_e Gamma^a_{bc}."""
    if j.ddg is None:
        raise InvalidInputError("curvature needs a second-order jet")
    ddg = j.ddg
    dlow = 0.5 * (ddg.transpose(0, 2, 1, 3) + ddg - ddg.transpose(2, 0, 1, 3))
    dginv = -np.einsum("af,fhe,hd->ade", ch.ginv, j.dg, ch.ginv)
    return np.einsum("ade,dbc->abce", dginv, ch.lowered) + np.einsum("ad,dbce->abce", ch.ginv, dlow)


def riemann(j: Jet2, ch: Optional[Christoffel] = None) -> RiemannTensor:
    if ch is None:
        ch = christoffel(j)
    G = ch.gamma
    dG = _christoffel_derivative(j, ch)
    # dG.transpose(0,2,3,1)[a,b,c,d] = dG[a,d,b,c] = d_c Gamma^a_{db}
    R = (dG.transpose(0, 2, 3, 1) - dG.transpose(0, 2, 1, 3)
         + np.einsum("ace,edb->abcd", G, G) - np.einsum("ade,ecb->abcd", G, G))
    return RiemannTensor(R)


def ricci_and_scalar(R: RiemannTensor, g, g_inv) -> tuple:
    ric = np.einsum("cacb->ab", R.R)
    ric = 0.5 * (ric + ric.T)
    return ric, float(np.einsum("ab,ab->", g_inv, ric))


def einstein_tensor(ric, scalar, g) -> np.ndarray:
    return ric - 0.5 * scalar * np.asarray(g)


def curvature_from_jet(j: Jet2) -> Curvature:
    ch = christoffel(j)
    R = riemann(j, ch)
    ric, scalar = ricci_and_scalar(R, j.g, ch.ginv)
    return Curvature(j.g, ch.ginv, ch.gamma, R, ric, scalar, einstein_tensor(ric, scalar, j.g))


def curvature_at(spec: MetricSpec, e, method: str = "auto") -> Curvature:
    return curvature_from_jet(jet(spec, e, method=method))


def efe_residual(spec: MetricSpec, Lambda: float, T: Callable, e, c: float = 1.0, G: float = 1.0,
                 method: str = "auto") -> EFEResidual:
    """``G_ab + Lambda g_ab - (8 pi G / c^4) T_ab`` at ``e``."""
    cur = curvature_at(spec, e, method=method)
    res = cur.einstein + Lambda * cur.g - (8.0 * np.pi * G / c**4) * np.asarray(T(as_event(e)), dtype=float)
    res = 0.5 * (res + res.T)
    return EFEResidual(res, float(np.max(np.abs(res))))


def _fd_gradient(fun, x, spec: Optional[MetricSpec] = None, scale: float = FD_STEP_FIRST):
    """Central-difference gradient with one Richardson halving; derivative axis last."""
    x = np.asarray(x, dtype=float)
    h = _steps(x, scale)
    eye = np.eye(x.size)
    if spec is not None:
        _check_stencil(spec, [x + s * h[i] * eye[i] for i in range(x.size) for s in (1, -1)])
    cols = []
    for i in range(x.size):
        coarse = (np.asarray(fun(x + h[i] * eye[i])) - np.asarray(fun(x - h[i] * eye[i]))) / (2 * h[i])
        hh = 0.5 * h[i]
        fine = (np.asarray(fun(x + hh * eye[i])) - np.asarray(fun(x - hh * eye[i]))) / (2 * hh)
        cols.append(fine + (fine - coarse) / 3.0)
    return np.stack(cols, axis=-1)


def covariant_divergence(field: Callable, spec: MetricSpec, e, method: str = "auto") -> np.ndarray:
    """``g^{ac} nabla_c S_ab`` of a covariant symmetric 2-tensor field.

    The field closure is differentiated by finite differences; Christoffel
    symbols come from the metric jet at ``e``.
    """
    x = spec.require(e)
    ch = christoffel(jet(spec, x, method=method, order=1))
    S = np.asarray(field(x), dtype=float)
    dS = _fd_gradient(field, x, spec)  # dS[a, b, c] = d_c S_ab
    G = ch.gamma
    nabla = (dS - np.einsum("dca,db->abc", G, S) - np.einsum("dcb,ad->abc", G, S))
    return np.einsum("ac,abc->b", ch.ginv, nabla)


def first_bianchi_residual(R: RiemannTensor) -> float:
    """max |R^a_{bcd} + R^a_{cdb} + R^a_{dbc}|."""
    r = R.R
    return float(np.max(np.abs(r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2))))


def ricci_identity_residual(spec: MetricSpec, Z: Callable, e, method: str = "auto") -> float:
    """Compare the commutator of coordinate covariant derivatives with curvature.

    For coordinate fields ``X = d_b`` and ``Y = d_c`` the bracket vanishes and
    ``(nabla_b nabla_c - nabla_c nabla_b) Z^a = R^a_{dbc} Z^d``.  The left side
    is assembled by finite differences of ``nabla Z``; returns the largest
    componentwise mismatch.
    """
    x = spec.require(e)

    def nabla_Z(p):
        ch = christoffel(jet(spec, p, method=method, order=1))
        dZ = _fd_gradient(Z, p)  # dZ[a, c] = d_c Z^a
        return dZ + np.einsum("ace,e->ac", ch.gamma, np.asarray(Z(p), dtype=float))

    cur = curvature_at(spec, x, method=method)
    N = nabla_Z(x)
    dN = _fd_gradient(nabla_Z, x, spec, scale=FD_STEP_FIRST * 4)  # dN[a, c, b] = d_b (nabla_c Z^a)
    G = cur.gamma
    # nabla_b nabla_c Z^a = d_b N^a_c + Gamma^a_{be} N^e_c - Gamma^e_{bc} N^a_e
    second = dN.transpose(0, 2, 1) + np.einsum("abe,ec->abc", G, N) - np.einsum("ebc,ae->abc", G, N)
    commutator = second - second.transpose(0, 2, 1)
    expected = np.einsum("adbc,d->abc", cur.riemann.R, np.asarray(Z(x), dtype=float))
    return float(np.max(np.abs(commutator - expected)))


# --------------------------------------------------------------------------
# geodesics
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GeodesicResult:
    """Sampled geodesic.

    ``status`` is ``"span_end"``, ``"boundary"`` (left the chart) or
    ``"event"`` (a terminal event function crossed zero).
    """

    lam: np.ndarray
    x: np.ndarray
    v: np.ndarray
    status: str
    norm: np.ndarray
    norm_drift: float
    event_lam: Optional[float] = None
    pieces: tuple = ()

    def state(self, lam: float) -> np.ndarray:
        """Dense-output state ``(x, v)`` at affine parameter ``lam``."""
        for t0, t1, interp in self.pieces:
            lo, hi = min(t0, t1), max(t0, t1)
            if lo <= lam <= hi:
                return interp(lam)
        raise InvalidInputError(f"lambda={lam} outside the integrated range")


_SOLVERS = {"RK45": RK45, "DOP853": DOP853}


def integrate_geodesic(spec: MetricSpec, e0, v0, span: Sequence[float], rtol: float = 1e-9,
                       atol: float = 1e-12, method: str = "RK45", events: Sequence[Callable] = (),
                       max_step: float = np.inf, jet_method: str = "auto") -> GeodesicResult:
    """Integrate the geodesic equation with an embedded Runge-Kutta pair.

    Parameters
    ----------
    span
        ``(lambda_start, lambda_end)``; may run backwards.
    method
        ``"RK45"`` (Dormand-Prince 5(4)) or ``"DOP853"``.
    events
        Callables ``f(lam, x, v) -> float``; integration stops at the first
        zero crossing of any of them, located on the dense output.

    Raises
    ------
    SingularApproachError
        Step size underflow away from the chart boundary (typically a
        degenerating metric).
    """
    x0 = spec.require(e0)
    v0 = np.asarray(v0, dtype=float)
    if not np.any(v0):
        raise InvalidInputError("initial tangent must be nonzero")
    outside = {"flag": False}

    def rhs(lam, y):
        x, v = y[:4], y[4:]
        if not np.all(np.isfinite(y)) or spec.violation(x) is not None:
            outside["flag"] = True
            return np.full(8, np.nan)
        try:
            gam = christoffel(jet(spec, x, method=jet_method, order=1)).gamma
        except DegenerateMetricError:
            return np.full(8, np.nan)
        return np.concatenate([v, -np.einsum("abc,b,c->a", gam, v, v)])

    solver = _SOLVERS[method](rhs, span[0], np.concatenate([x0, v0]), span[1],
                              rtol=rtol, atol=atol, max_step=max_step)
    lams, states, pieces = [solver.t], [solver.y.copy()], []
    status = "span_end"
    event_lam = None

    def ev_values(lam, y):
        return [f(lam, y[:4], y[4:]) for f in events]

    prev_ev = ev_values(solver.t, solver.y)
    while solver.status == "running":
        outside["flag"] = False
        t_old = solver.t
        msg = solver.step()
        if solver.status == "failed":
            if outside["flag"]:
                status = "boundary"
                break
            raise SingularApproachError(f"geodesic step size underflow: {msg}",
                                        last_event=solver.y[:4].copy(), last_parameter=solver.t)
        interp = solver.dense_output()
        new_ev = ev_values(solver.t, solver.y)
        hit = None
        for k, (a, b) in enumerate(zip(prev_ev, new_ev)):
            if a == 0.0 or np.sign(a) != np.sign(b):
                f = events[k]
                root = optimize.brentq(lambda s: f(s, interp(s)[:4], interp(s)[4:]), t_old, solver.t,
                                       xtol=1e-15, rtol=4 * np.finfo(float).eps)
                if hit is None or abs(root - t_old) < abs(hit - t_old):
                    hit = root
        if hit is not None:
            pieces.append((t_old, hit, interp))
            lams.append(hit)
            states.append(interp(hit))
            status = "event"
            event_lam = hit
            break
        pieces.append((t_old, solver.t, interp))
        lams.append(solver.t)
        states.append(solver.y.copy())
        prev_ev = new_ev

    Y = np.array(states)
    X, V = Y[:, :4], Y[:, 4:]
    norms = np.array([v @ spec.raw(x) @ v for x, v in zip(X, V)])
    g0 = spec.raw(x0)
    scale = max(abs(norms[0]), np.max(np.abs(g0)) * float(v0 @ v0) * 1e-3)
    drift = float(np.max(np.abs(norms - norms[0])) / scale)
    return GeodesicResult(np.array(lams), X, V, status, norms, drift, event_lam, tuple(pieces))
