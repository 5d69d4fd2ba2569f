"""Light propagation: FLRW redshift, static redshift and the Hubble law.

Frequencies are compared through the proper-time intervals of emitter and
receiver between two successive wave crests (``1 + z = nu_e / nu_r``).  The
closed forms here are checked against an explicit two-pulse experiment that
integrates both null rays with :func:`relcosmo.curvature.integrate_geodesic`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .curvature import integrate_geodesic
from .errors import InvalidInputError, SingularStateError, UnsupportedMetricError
from .flrw import fmt
from .manifold import MetricSpec, as_event, evaluate_metric
from .taylor import Taylor2


@dataclass(frozen=True)
class ShiftResult:
    z: float
    nu_ratio: float  # nu_e / nu_r = 1 + z
    emit: tuple
    recv: tuple
    distance: Optional[float] = None  # proper distance at reception (FLRW)


def _a_checked(a: Callable, t: float) -> float:
    v = a(t)
    if isinstance(v, complex) or np.iscomplexobj(v):
        raise SingularStateError(f"scale factor a({t}) = {v} is not real")
    v = float(v)
    if not v > 0:
        raise SingularStateError(f"scale factor a({t}) = {v} is not positive")
    return v


def comoving_distance(a: Callable, t_e: float, t_0: float, c: float = 1.0, rtol: float = 1e-10) -> float:
    """Coordinate distance travelled by a radial light ray, ``c * int dt / a``."""
    if not t_e <= t_0:
        raise InvalidInputError("emission must precede reception")
    if t_e == t_0:
        return 0.0
    for t in np.linspace(t_e, t_0, 17):
        _a_checked(a, t)
    val, _ = integrate.quad(lambda t: 1.0 / _a_checked(a, t), t_e, t_0, epsabs=0.0, epsrel=rtol, limit=200)
    return c * val


def flrw_redshift(a: Callable, t_e: float, t_0: float, c: float = 1.0) -> ShiftResult:
    """``1 + z = a(t_0) / a(t_e)``, with the present proper distance ``a(t_0) chi``."""
    ratio = _a_checked(a, t_0) / _a_checked(a, t_e)
    chi = comoving_distance(a, t_e, t_0, c)
    return ShiftResult(ratio - 1.0, ratio, (t_e,), (t_0,), float(a(t_0)) * chi)


def static_redshift(spec: MetricSpec, e_emit, e_recv) -> ShiftResult:
    """Shift between static observers (worldlines along the time coordinate).

    ``1 + z = sqrt(|g_00(recv)| / |g_00(emit)|)``.
    """
    if not spec.stationary:
        raise UnsupportedMetricError(f"{spec.name} is not stationary in this chart")
    ge, gr = evaluate_metric(spec, e_emit), evaluate_metric(spec, e_recv)
    if not (ge[0, 0] < 0 and gr[0, 0] < 0):
        raise InvalidInputError("static observers must be timelike at both events")
    ratio = math.sqrt(gr[0, 0] / ge[0, 0])
    return ShiftResult(ratio - 1.0, ratio, tuple(as_event(e_emit)), tuple(as_event(e_recv)))


def weak_field_expansions(phi_e: float, phi_r: float, c: float = 1.0) -> dict:
    """Exact and expanded gravitational shifts for ``g_00 = -(c^2 + 2 Phi)``.

    ``first_order`` is the Taylor expansion of the exact ratio; ``half`` is
    the expansion with an extra factor 1/2, kept for comparison with the
    alternative form of the formula.
    """
    exact = math.sqrt((c * c + 2 * phi_r) / (c * c + 2 * phi_e)) - 1.0
    first = (phi_r - phi_e) / c**2
    return {"exact": exact, "first_order": first, "half": 0.5 * first}


def hubble_constant(a: Callable, t_0: float) -> float:
    """``(1/a) da/dt`` at ``t_0``; exact for Taylor-compatible ``a``."""
    v = a(Taylor2.variables([t_0], order=1)[0])
    if isinstance(v, Taylor2):
        val, d = v.val, float(v.grad[0])
    else:
        h = 1e-5 * max(1.0, abs(t_0))
        val = float(a(t_0))
        d = (8 * (a(t_0 + h) - a(t_0 - h)) - (a(t_0 + 2 * h) - a(t_0 - 2 * h))) / (12 * h)
    if not val > 0:
        raise SingularStateError(f"a({t_0}) = {val}")
    return d / val


# --------------------------------------------------------------------------
# two-pulse experiment
# --------------------------------------------------------------------------

def _null_tangent(g: np.ndarray, axis: int, direction: float) -> np.ndarray:
    """Null vector ``d_0 + s d_axis`` moving along ``axis`` in ``direction``."""
    A, B, C = g[axis, axis], 2.0 * g[0, axis], g[0, 0]
    disc = B * B - 4 * A * C
    if disc < 0 or A == 0:
        raise InvalidInputError("no real null direction along the chosen axis")
    r = math.sqrt(disc)
    roots = [(-B + r) / (2 * A), (-B - r) / (2 * A)]
    s = max(roots) if direction > 0 else min(roots)
    v = np.zeros(4)
    v[0], v[axis] = 1.0, s
    return v


def arrival(spec: MetricSpec, emit, target: float, axis: int = 1, rtol: float = 1e-13, atol: float = 1e-15,
            lam_max: float = 1e8):
    """Integrate the null ray from ``emit`` towards coordinate ``x[axis] = target``.

    Returns the arrival event.
    """
    e = spec.require(emit)
    direction = 1.0 if target > e[axis] else -1.0
    v0 = _null_tangent(evaluate_metric(spec, e), axis, direction)

    def hit(lam, x, v):
        return x[axis] - target

    res = integrate_geodesic(spec, e, v0, (0.0, lam_max), rtol=rtol, atol=atol, method="DOP853", events=(hit,))
    if res.status != "event":
        raise InvalidInputError(f"null ray did not reach {target} (status {res.status})")
    return res.x[-1]


def two_pulse_shift(spec: MetricSpec, emit, target: float, axis: int = 1, rel_step: float = 1e-6,
                    rtol: float = 1e-13) -> ShiftResult:
    """Redshift from two light pulses sent by a fixed-coordinate emitter.

    Pulses leave at ``t_e +- h`` and ``t_e +- h/2`` with ``h = rel_step *
    (t_r - t_e)``; the arrival-time derivative is the Richardson combination
    of the two central differences.  Emitter and receiver are the observers
    at fixed spatial coordinates, so proper times follow from ``g_00``.
    """
    e = spec.require(emit)
    r0 = arrival(spec, e, target, axis, rtol)
    span = r0[0] - e[0]
    if span <= 0:
        raise InvalidInputError("arrival does not follow emission")
    h = rel_step * span

    def t_arr(dt):
        x = e.copy()
        x[0] += dt
        return arrival(spec, x, target, axis, rtol)[0]

    d1 = (t_arr(h) - t_arr(-h)) / (2 * h)
    d2 = (t_arr(0.5 * h) - t_arr(-0.5 * h)) / h
    dtr = d2 + (d2 - d1) / 3.0
    ge, gr = evaluate_metric(spec, e), evaluate_metric(spec, r0)
    ratio = dtr * math.sqrt(gr[0, 0] / ge[0, 0])
    return ShiftResult(ratio - 1.0, ratio, tuple(e), tuple(r0))


# --------------------------------------------------------------------------
# Hubble law and tables
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HubbleFit:
    slope: float
    H0_over_c: float
    rel_error: float
    n: int


def distance_redshift_table(a: Callable, t_0: float, t_emit: Sequence[float], c: float = 1.0) -> list:
    """Rows ``(t_e, chi, D, z, z_hubble_approx)`` with ``z_hubble_approx = H0 D / c``."""
    H0 = hubble_constant(a, t_0)
    rows = []
    for te in t_emit:
        if te > t_0:
            raise InvalidInputError(f"emitter time {te} is later than t_0 = {t_0}")
        s = flrw_redshift(a, te, t_0, c)
        chi = comoving_distance(a, te, t_0, c)
        rows.append((float(te), chi, s.distance, s.z, H0 * s.distance / c))
    return rows


def hubble_fit(rows: Sequence[tuple], H0: float, c: float = 1.0, z_max: float = 0.01) -> HubbleFit:
    """Least-squares slope of ``z`` against ``D`` through the origin, for ``0 < z <= z_max``."""
    D = np.array([r[2] for r in rows if 0 < r[3] <= z_max])
    z = np.array([r[3] for r in rows if 0 < r[3] <= z_max])
    if D.size == 0:
        return HubbleFit(float("nan"), H0 / c, float("nan"), 0)
    slope = float(D @ z / (D @ D))
    target = H0 / c
    rel = abs(slope - target) / abs(target) if target else float("inf")
    return HubbleFit(slope, target, rel, int(D.size))


def table_csv(rows: Sequence[tuple], fit: Optional[HubbleFit] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_e", "chi", "D", "z", "z_hubble_approx"])
    for r in rows:
        w.writerow([fmt(v) for v in r])
    text = buf.getvalue()
    if fit is not None:
        text += (f"# fitted_slope={fmt(fit.slope)} H0_over_c={fmt(fit.H0_over_c)} "
                 f"rel_error={fmt(fit.rel_error)} n={fit.n}\n")
    return text
