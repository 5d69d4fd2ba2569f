"""Newtonian gravity and its relation to the weak-field metric.

Forces are signed radial magnitudes with attraction positive.  The
weak-field check builds ``g = -(c^2 + 2 eps Phi) dt^2 + dx^2 + dy^2 + dz^2``,
computes its Ricci component ``R_tt`` and compares it with the Poisson source
``4 pi G eps rho``.  For this metric ``G_tt`` vanishes identically; the
Newtonian content sits in the trace-reversed combination
``R_tt = G_tt - (1/2) g_tt tr G``, which equals
``eps Lap(Phi) - eps^2 |grad Phi|^2 / (c^2 + 2 eps Phi)`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .catalog import potential_jet
from .curvature import curvature_from_jet
from .errors import DomainError, InvalidInputError
from .manifold import DIM, Jet2
from .taylor import Taylor2


@dataclass(frozen=True)
class ForceLawParams:
    model: str = "newton"  # "newton" | "seeliger" | "lambda"
    k: float = 0.0
    Lambda: float = 0.0
    G: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.model not in ("newton", "seeliger", "lambda"):
            raise InvalidInputError(f"unknown force law {self.model!r}")
        if not (self.G > 0 and self.c > 0):
            raise InvalidInputError("G and c must be positive")
        if self.model == "seeliger" and not self.k >= 0:
            raise InvalidInputError("the screening constant k must be non-negative")


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("radius must be positive")
    return r


def central_force(params: ForceLawParams, M: float, m: float, r):
    """Radial force on ``m`` at distance ``r`` from ``M``; positive is attractive."""
    r = _check_r(r)
    if not (M > 0 and m > 0):
        raise InvalidInputError("masses must be positive")
    newton = params.G * M * m / r**2
    if params.model == "newton":
        return newton
    if params.model == "seeliger":
        return newton * np.exp(-params.k * r)
    return newton - params.Lambda / 3.0 * m * params.c**2 * r


def test_particle_acceleration(params: ForceLawParams, M: float, r):
    """``G M / r^2``: no test-mass argument, inertial and gravitational mass cancel."""
    if params.model != "newton":
        raise InvalidInputError("test_particle_acceleration is defined for the Newtonian law")
    r = _check_r(r)
    return params.G * M / r**2


def lambda_equilibrium_radius(params: ForceLawParams, M: float) -> float:
    """Radius where attraction and the ``Lambda`` repulsion balance."""
    if params.model != "lambda" or not params.Lambda > 0:
        raise InvalidInputError("needs the lambda law with Lambda > 0")
    return (3 * params.G * M / (params.Lambda * params.c**2)) ** (1.0 / 3.0)


def laplacian(phi: Callable, point, h: Optional[float] = None) -> float:
    """7-point Laplacian with one Richardson halving (fourth order)."""
    p = np.asarray(point, dtype=float)
    h = 2e-3 * max(1.0, float(np.max(np.abs(p)))) if h is None else h
    eye = np.eye(3)
    f0 = float(phi(p))

    def lap(s):
        return sum(float(phi(p + s * eye[i])) + float(phi(p - s * eye[i])) - 2 * f0 for i in range(3)) / (s * s)

    coarse, fine = lap(h), lap(0.5 * h)
    return fine + (fine - coarse) / 3.0


def poisson_residual(phi: Callable, rho: Callable, point, G: float = 1.0, h: Optional[float] = None) -> float:
    """``Lap(Phi) - 4 pi G rho`` at a spatial point."""
    return laplacian(phi, point, h) - 4 * math.pi * G * float(rho(np.asarray(point, dtype=float)))


def uniform_sphere_potential(rho0: float, R: float, G: float = 1.0) -> Callable:
    """Potential of a homogeneous ball, interior and exterior."""
    M = 4.0 / 3.0 * math.pi * R**3 * rho0

    def phi(y):
        r = math.sqrt(float(np.dot(y, y)))
        if r <= R:
            return -G * M * (3 * R * R - r * r) / (2 * R**3)
        return -G * M / r

    return phi


@dataclass(frozen=True, eq=False)
class WeakFieldCheck:
    eps: float
    deviation: float
    rho_recovered: np.ndarray
    R_tt: np.ndarray
    G_tt: np.ndarray


def weak_field_jet(phi: Callable, y, eps: float, c: float = 1.0, analytic: bool = True) -> Jet2:
    """Metric jet of the weak-field metric built from ``eps * Phi`` and its derivatives."""
    P, dP, ddP = potential_jet(phi, y, analytic)
    g = np.diag([-(c * c + 2 * eps * P), 1.0, 1.0, 1.0])
    dg = np.zeros((DIM, DIM, DIM))
    ddg = np.zeros((DIM, DIM, DIM, DIM))
    dg[0, 0, 1:] = -2 * eps * dP
    ddg[0, 0, 1:, 1:] = -2 * eps * ddP
    return Jet2(g, dg, ddg)


def weak_field_limit_check(phi: Callable, rho: Callable, points: Sequence, G: float = 1.0, c: float = 1.0,
                           eps: float = 1e-4, analytic: Optional[bool] = None) -> WeakFieldCheck:
    """Recover the Poisson source from the curvature of the weak-field metric.

    Returns the relative deviation

        max |R_tt - 4 pi G eps rho| / (eps * max(max |4 pi G rho|, max |grad Phi|^2 / c^2)),

    which is first order in ``eps``.  ``points`` are spatial points or full
    events (the last three coordinates are used).  Derivatives of ``Phi``
    are exact when it accepts Taylor numbers, otherwise finite differences
    of ``Phi`` itself.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))[:, -3:]
    if analytic is None:
        # analytic only when Phi propagates Taylor numbers; a float result means
        # the derivatives were dropped (or Phi is constant, where FD is exact)
        try:
            analytic = isinstance(phi(Taylor2.variables(pts[0], order=2)), Taylor2)
        except Exception:
            analytic = False
    Rtt, Gtt, src, grad2 = [], [], [], []
    for y in pts:
        P, dP, _ = potential_jet(phi, y, analytic)
        if abs(eps * P) / c**2 > 1e-4 + 1e-12:
            raise InvalidInputError(f"|eps Phi| / c^2 = {abs(eps * P) / c**2:.3g} is not small at {y.tolist()}")
        cur = curvature_from_jet(weak_field_jet(phi, y, eps, c, analytic))
        trG = float(np.einsum("ab,ab->", cur.ginv, cur.einstein))
        Rtt.append(cur.einstein[0, 0] - 0.5 * trG * cur.g[0, 0])
        Gtt.append(cur.einstein[0, 0])
        src.append(4 * math.pi * G * float(rho(y)))
        grad2.append(float(dP @ dP) / c**2)
    Rtt, Gtt, src, grad2 = map(np.array, (Rtt, Gtt, src, grad2))
    scale = eps * max(np.max(np.abs(src)), np.max(grad2))
    dev = 0.0 if scale == 0 else float(np.max(np.abs(Rtt - eps * src)) / scale)
    return WeakFieldCheck(eps, dev, Rtt / (4 * math.pi * G * eps), Rtt, Gtt)


def convergence_ratios(phi: Callable, rho: Callable, points: Sequence, eps0: float, n: int = 3,
                       G: float = 1.0, c: float = 1.0) -> tuple:
    """Deviations at ``eps0, eps0/2, ...`` and successive ratios."""
    devs = [weak_field_limit_check(phi, rho, points, G, c, eps0 / 2**i).deviation for i in range(n)]
    ratios = [devs[i] / devs[i + 1] for i in range(n - 1)]
    return devs, ratios
