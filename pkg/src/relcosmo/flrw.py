"""Friedmann-Lemaitre dynamics of the scale factor.

Dots in this module mean derivatives with respect to ``ct`` (length units),
the convention of the field equations; functions that take or return
``da_dt`` use ordinary coordinate time.

Dust trajectories are integrated in conformal time ``eta`` (``d(ct) = a
d(eta)``).  With ``p = da/d(eta) = a * adot`` and the first integral, the
Raychaudhuri equation becomes

    d^2 a / d eta^2 = A/2 - k a + (2 Lambda / 3) a^3,

which stays regular through ``a = 0``; the big-bang and big-crunch times are
then ordinary roots located on the dense output.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InconsistentInitialDataError, InvalidInputError, SingularStateError


@dataclass(frozen=True)
class Dust:
    A: float

    def __post_init__(self):
        if not self.A > 0:
            raise InvalidInputError("dust constant A must be positive")


@dataclass(frozen=True)
class Tabulated:
    """Matter given as functions of coordinate time; no equation of state."""

    rho: Callable[[float], float]
    p: Callable[[float], float]


@dataclass(frozen=True)
class FLRWParams:
    k: int
    Lambda: float = 0.0
    c: float = 1.0
    G: float = 1.0
    matter: Union[Dust, Tabulated] = field(default_factory=lambda: Dust(1.0))

    def __post_init__(self):
        if self.k not in (-1, 0, 1):
            raise InvalidInputError(f"curvature index must be -1, 0 or 1, got {self.k}")
        if not (self.c > 0 and self.G > 0):
            raise InvalidInputError("c and G must be positive")

    @property
    def A(self) -> float:
        if not isinstance(self.matter, Dust):
            raise InvalidInputError("A is only defined for dust")
        return self.matter.A


def friedmann_residuals(params: FLRWParams, a, da_dct, d2a_dct2, rho, p) -> tuple:
    """Residuals of the two Friedmann equations and of their combination.

    ``r3 = r1 + 3 r2`` identically.
    """
    if not a > 0:
        raise SingularStateError(f"scale factor must be positive, got {a}")
    c, G, k, L = params.c, params.G, params.k, params.Lambda
    X = (da_dct**2 + k) / a**2
    r1 = 8 * math.pi * G / c**2 * rho + L - 3 * X
    r2 = 8 * math.pi * G / c**4 * p - L + 2 * d2a_dct2 / a + X
    r3 = 8 * math.pi * G / c**4 * (rho * c**2 + 3 * p) - 2 * L + 6 * d2a_dct2 / a
    return r1, r2, r3


def first_integral(params: FLRWParams, a, da_dct):
    """``a (adot^2 + k) - Lambda a^3 / 3``; equals ``A`` on dust solutions."""
    return a * (da_dct**2 + params.k) - params.Lambda * a**3 / 3.0


def dust_density(params: FLRWParams, a):
    if not np.all(np.asarray(a) > 0):
        raise SingularStateError(f"scale factor must be positive, got {a}")
    return 3 * params.c**2 * params.A / (8 * math.pi * params.G * a**3)


def dust_acceleration(params: FLRWParams, a):
    """``d^2a/d(ct)^2`` for dust (pressure-free combination of both equations)."""
    return params.Lambda * a / 3.0 - params.A / (2.0 * a**2)


@dataclass(frozen=True)
class CurvatureIndex:
    sign: int
    discriminant: float


def classify_curvature_index(rho0: float, H0: float, Lambda: float, c: float = 1.0,
                             G: float = 1.0) -> CurvatureIndex:
    """Sign of ``k`` from the first Friedmann equation at the present time.

    ``3k/a0^2 = 8 pi G rho0 / c^2 + Lambda - 3 H0^2 / c^2``.
    """
    if rho0 < 0:
        raise InvalidInputError("density must be non-negative")
    disc = 8 * math.pi * G * rho0 / c**2 + Lambda - 3 * H0**2 / c**2
    scale = max(8 * math.pi * G * rho0 / c**2, abs(Lambda), 3 * H0**2 / c**2, np.finfo(float).tiny)
    if abs(disc) <= 1e-14 * scale:
        return CurvatureIndex(0, disc)
    return CurvatureIndex(1 if disc > 0 else -1, disc)


def critical_density(H0: float, G: float = 1.0) -> float:
    return 3 * H0**2 / (8 * math.pi * G)


def recollapse_possible(params: FLRWParams) -> tuple:
    """Whether ``adot`` can vanish for positive density: needs ``k = 1`` or ``Lambda < 0``."""
    if params.k == 1:
        return True, "closed"
    if params.Lambda < 0:
        return True, "negative Lambda"
    return False, "open or flat with Lambda >= 0"


# --------------------------------------------------------------------------
# trajectories
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FLRWEvent:
    kind: str  # "singularity" | "turning_point" | "span_end"
    t: float
    a: float
    da_dt: float


@dataclass(eq=False)
class FLRWTrajectory:
    params: FLRWParams
    t: np.ndarray
    a: np.ndarray
    da_dt: np.ndarray
    events: list
    _pieces: list = field(default_factory=list, repr=False)

    @property
    def rho(self) -> np.ndarray:
        return dust_density(self.params, self.a)

    @property
    def d2a_dt2(self) -> np.ndarray:
        return self.params.c**2 * dust_acceleration(self.params, self.a)

    def singularities(self) -> list:
        return [e for e in self.events if e.kind == "singularity"]

    def turning_points(self) -> list:
        return [e for e in self.events if e.kind == "turning_point"]

    @property
    def t_range(self) -> tuple:
        return self._t_lo, self._t_hi

    def _nodes(self):
        if getattr(self, "_node_cache", None) is None:
            cache = []
            for sol, e0, e1 in self._pieces:
                lo, hi = min(e0, e1), max(e0, e1)
                etas = np.unique(np.concatenate([[lo, hi], np.asarray(sol.ts)]))
                etas = etas[(etas >= lo) & (etas <= hi)]
                taus = np.array([sol(x)[0] for x in etas])
                cache.append((sol, etas, taus))
            self._node_cache = cache
        return self._node_cache

    def _state(self, t: float) -> np.ndarray:
        """``(tau, a, p)`` at coordinate time ``t`` from the conformal-time dense output.

        ``tau(eta)`` is monotone with derivative ``a``; the root is found by
        safeguarded Newton iteration inside the bracketing solver step.
        """
        cache = self.__dict__.setdefault("_state_cache", {})
        hit = cache.get(t)
        if hit is not None:
            return hit.copy()
        if len(cache) >= 4096:
            cache.clear()
        y = self._solve_state(t)
        cache[t] = y
        return y.copy()

    def _solve_state(self, t: float) -> np.ndarray:
        tau = self.params.c * t
        for sol, etas, taus in self._nodes():
            if taus[0] <= tau <= taus[-1]:
                i = min(max(int(np.searchsorted(taus, tau)), 1), len(taus) - 1)
                lo, hi = etas[i - 1], etas[i]
                f_lo = taus[i - 1] - tau
                f_hi = taus[i] - tau
                if f_lo == 0.0:
                    return sol(lo)
                if f_hi == 0.0:
                    return sol(hi)
                eta = lo - f_lo * (hi - lo) / (f_hi - f_lo)
                for _ in range(60):
                    y = sol(eta)
                    f = y[0] - tau
                    if f > 0:
                        hi = eta
                    else:
                        lo = eta
                    step = f / y[1] if y[1] > 0 else np.inf
                    new = eta - step
                    if not lo < new < hi:
                        new = 0.5 * (lo + hi)
                    if abs(new - eta) <= 4 * np.finfo(float).eps * max(1.0, abs(eta)):
                        return sol(new)
                    eta = new
                return sol(eta)
        raise InvalidInputError(f"t={t} outside the integrated range {self.t_range}")

    def scale_factor(self, t: float) -> tuple:
        """``(a, da/dt, d^2a/dt^2)`` at coordinate time ``t``."""
        _, a, p = self._state(t)
        if not a > 0:
            raise SingularStateError(f"a <= 0 at t={t}")
        c = self.params.c
        return a, c * p / a, c**2 * dust_acceleration(self.params, a)

    def first_integral_drift(self) -> float:
        c = self.params.c
        fi = first_integral(self.params, self.a, self.da_dt / c)
        return float(np.max(np.abs(fi - self.params.A)) / self.params.A)

    def rows(self) -> list:
        """Samples and events merged in time order as ``(t, a, da_dt, rho, flag)``."""
        out = [(t, a, v, r, "") for t, a, v, r in zip(self.t, self.a, self.da_dt, self.rho)]
        for ev in self.events:
            rho = math.inf if ev.a == 0 else float(dust_density(self.params, ev.a))
            out.append((ev.t, ev.a, ev.da_dt, rho, ev.kind))
        out.sort(key=lambda r: (r[0], r[4] != ""))
        return out

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "a", "da_dt", "rho", "event_flag"])
        for t, a, v, r, flag in self.rows():
            w.writerow([fmt(t), fmt(a), fmt(v), fmt(r), flag])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text


def fmt(x) -> str:
    """17 significant digits, round-trip exact."""
    return format(float(x), ".17g")


def _dust_rhs(params: FLRWParams):
    A, k, L = params.A, params.k, params.Lambda

    def rhs(eta, y):
        _, a, p = y
        return [a, p, 0.5 * A - k * a + (2.0 * L / 3.0) * a**3]

    return rhs


def integrate_scale_factor(params: FLRWParams, t0: float, a0: float, da0: float,
                           span: Sequence[float], n_samples: int = 401, rtol: float = 1e-12,
                           atol: float = 1e-15, consistency_tol: float = 1e-9,
                           eta_max: float = 1e4) -> FLRWTrajectory:
    """Integrate a dust FLRW model from ``(t0, a0, da/dt(t0))`` across ``span``.

    Integration runs backward to ``span[0]`` and forward to ``span[1]`` and
    stops early at a singularity (``a -> 0``).  Turning points
    (``da/dt = 0``) are recorded without stopping.  Samples are spaced
    uniformly in conformal time, which concentrates them near singularities.

    Raises
    ------
    InconsistentInitialDataError
        When the initial data violate the first integral by more than
        ``consistency_tol`` (relative to ``A``).
    """
    if not isinstance(params.matter, Dust):
        raise InvalidInputError("integrate_scale_factor needs dust matter; use integrate_tabulated")
    if not a0 > 0:
        raise SingularStateError("a0 must be positive")
    t_lo, t_hi = float(span[0]), float(span[1])
    if not t_lo <= t0 <= t_hi:
        raise InvalidInputError("t0 must lie inside the span")
    c, A = params.c, params.A
    adot0 = da0 / c
    resid = first_integral(params, a0, adot0) - A
    if abs(resid) > consistency_tol * A:
        raise InconsistentInitialDataError(
            f"initial data violate the first integral: a(adot^2+k) - Lambda a^3/3 - A = {resid:.3e}",
            residual=resid)

    rhs = _dust_rhs(params)
    y0 = [c * t0, a0, a0 * adot0]
    # p = da/d(eta) satisfies p^2 = a (A - k a + Lambda a^3 / 3), so a singularity
    # is a tangential zero of a: a root of p with a at roundoff level.
    sing_tol = 1e-8 * max(A, a0)

    pieces, events = [], []
    ends = {}
    for sign, t_end in ((-1.0, t_lo), (1.0, t_hi)):
        if c * t_end == y0[0]:
            ends[sign] = 0.0
            events.append(FLRWEvent("span_end", t_end, a0, da0))
            continue

        def reach(eta, y, tau_end=c * t_end):
            return y[0] - tau_end

        def minimum(eta, y):
            return y[2]

        def maximum(eta, y):
            return y[2]

        reach.terminal = True
        minimum.terminal = True
        minimum.direction = sign
        maximum.direction = -sign
        eta0, state = 0.0, np.array(y0, dtype=float)
        while True:
            sol = solve_ivp(rhs, (eta0, sign * eta_max), state, method="DOP853", rtol=rtol, atol=atol,
                            dense_output=True, events=(minimum, maximum, reach))
            if sol.status == -1:
                raise RuntimeError(f"scale-factor integration failed: {sol.message}")
            for y_s in sol.y_events[1]:
                events.append(FLRWEvent("turning_point", y_s[0] / c, y_s[1], 0.0))
            if sol.t_events[2].size:
                pieces.append((sol.sol, eta0, sol.t[-1]))
                y_s = sol.y_events[2][0]
                events.append(FLRWEvent("span_end", t_end, y_s[1], c * y_s[2] / y_s[1]))
                break
            if sol.t_events[0].size:
                eta_s, y_s = sol.t_events[0][0], sol.y_events[0][0]
                if abs(y_s[1]) <= sing_tol:
                    pieces.append((sol.sol, eta0, eta_s))
                    events.append(FLRWEvent("singularity", y_s[0] / c, 0.0, -sign * math.inf))
                    break
                # a bounce at finite a: record it and continue just past it
                events.append(FLRWEvent("turning_point", y_s[0] / c, y_s[1], 0.0))
                eta_next = eta_s + sign * 1e-9 * max(1.0, abs(eta_s))
                pieces.append((sol.sol, eta0, eta_next))
                eta0, state = eta_next, sol.sol(eta_next)
                continue
            raise RuntimeError("scale-factor integration reached eta_max without an event")
        ends[sign] = pieces[-1][2]

    etas = np.linspace(ends[-1.0], ends[1.0], n_samples + 2)[1:-1]
    states = []
    for eta in etas:
        for sol, e0, e1 in pieces:
            if min(e0, e1) <= eta <= max(e0, e1):
                states.append(sol(eta))
                break
        else:
            states.append(np.array(y0))
    S = np.array(states)
    keep = S[:, 1] > 0
    S = S[keep]
    events.sort(key=lambda e: e.t)
    traj = FLRWTrajectory(params, S[:, 0] / c, S[:, 1], c * S[:, 2] / S[:, 1], events, pieces)
    taus = [sol(e)[0] for sol, e0, e1 in pieces for e in (e0, e1)] or [y0[0]]
    traj._t_lo, traj._t_hi = min(taus) / c, max(taus) / c
    return traj


def age_bound_check(traj: FLRWTrajectory) -> tuple:
    """Check ``t - t_bang <= a / (da/dt)`` at every expanding sample.

    Returns ``(holds, worst_margin, n_checked)`` with margin
    ``a/(da/dt) - (t - t_bang)`` (non-negative when the bound holds).
    """
    bangs = [e.t for e in traj.singularities() if e.da_dt > 0]
    if not bangs:
        return False, float("nan"), 0
    t_bang = min(bangs)
    mask = traj.da_dt > 0
    margin = traj.a[mask] / traj.da_dt[mask] - (traj.t[mask] - t_bang)
    if margin.size == 0:
        return True, float("inf"), 0
    return bool(np.all(margin >= 0)), float(np.min(margin)), int(margin.size)


@dataclass(eq=False)
class TabulatedCheck:
    t: np.ndarray
    a: np.ndarray
    da_dt: np.ndarray
    constraint: np.ndarray  # relative first-equation residual
    halted: Optional[str]


def integrate_tabulated(params: FLRWParams, t0: float, a0: float, da0: float, span: Sequence[float],
                        n_samples: int = 201, rtol: float = 1e-11, atol: float = 1e-14) -> TabulatedCheck:
    """Evolve with the second Friedmann equation and monitor the first one.

    Matter is tabulated, so the pair is treated as a differential-algebraic
    system: ``a`` follows the pressure equation and the density equation is
    reported as a constraint residual along the way.
    """
    if not isinstance(params.matter, Tabulated):
        raise InvalidInputError("integrate_tabulated needs tabulated matter")
    c, G, k, L = params.c, params.G, params.k, params.Lambda
    rho, p = params.matter.rho, params.matter.p

    def rhs(tau, y):
        a, v = y
        t = tau / c
        return [v, 0.5 * a * (L - 8 * math.pi * G * p(t) / c**4) - (v * v + k) / (2 * a)]

    def collapse(tau, y):
        return y[0] - 1e-12 * a0

    collapse.terminal = True
    taus = np.linspace(c * span[0], c * span[1], n_samples)
    out = []
    halted = None
    for lo, hi in ((c * t0, c * span[0]), (c * t0, c * span[1])):
        if lo == hi:
            continue
        sol = solve_ivp(rhs, (lo, hi), [a0, da0 / c], method="DOP853", rtol=rtol, atol=atol,
                        dense_output=True, events=collapse)
        if sol.t_events[0].size:
            halted = "singularity"
        sel = taus[(taus >= min(lo, sol.t[-1])) & (taus <= max(lo, sol.t[-1]))]
        for tau in sel:
            out.append((tau, *sol.sol(tau)))
    out = sorted(set(out))
    arr = np.array(out)
    tt, a, v = arr[:, 0] / c, arr[:, 1], arr[:, 2]
    r1 = np.array([friedmann_residuals(params, ai, vi, 0.0, rho(ti), 0.0)[0] for ti, ai, vi in zip(tt, a, v)])
    scale = 3 * (v**2 + abs(k)) / a**2 + abs(L) + 8 * math.pi * G * np.array([rho(ti) for ti in tt]) / c**2
    return TabulatedCheck(tt, a, c * v, r1 / scale, halted)
