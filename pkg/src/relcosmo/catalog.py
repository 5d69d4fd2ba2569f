"""Exact solutions paired with their sources.

Every entry bundles a :class:`~relcosmo.manifold.MetricSpec`, the
cosmological constant and stress-energy tensor it is meant to satisfy, a
sampling box for random events, named unit observer fields and candidate
Killing fields.  Component formulas are written with numpy ufuncs so that
analytic jets come for free from :mod:`relcosmo.taylor`.

Names accept either dashes or underscores: ``"einstein-static"`` and
``"einstein_static"`` are the same entry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import ExtensionRegionError, InvalidInputError, UnknownEntryError
from .flrw import Dust, FLRWParams, integrate_scale_factor
from .manifold import DIM, FD_STEP_SECOND, MetricSpec, fd_jet
from .taylor import Taylor2, lift

HORIZON_MARGIN = 1e-6

ENTRY_NAMES = (
    "minkowski",
    "rotating_frame",
    "weak_field",
    "einstein_static",
    "de_sitter_static",
    "de_sitter_cosh",
    "steady_state",
    "flrw",
    "friedman_dust",
    "godel",
    "bianchi",
)

SPHERICAL = ("t", "chi", "theta", "phi")


@dataclass(frozen=True, eq=False)
class SourceModel:
    """Right-hand side of the field equations.

    ``T(x)`` returns the covariant stress-energy tensor at an event.  ``rho``
    and ``p`` (when meaningful) return density and pressure at an event and
    ``u`` the unit matter velocity (contravariant).
    """

    Lambda: float
    T: Callable[[np.ndarray], np.ndarray]
    kind: str  # "vacuum" | "dust" | "perfect_fluid" | "anisotropic_stress"
    rho: Optional[Callable[[np.ndarray], float]] = None
    p: Optional[Callable[[np.ndarray], float]] = None
    u: Optional[Callable[[np.ndarray], np.ndarray]] = None
    description: str = ""


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    spec: MetricSpec
    source: SourceModel
    notes: Mapping[str, bool]
    c: float
    G: float
    sample_box: tuple
    observers: Mapping[str, Callable] = field(default_factory=dict)
    killing: Mapping[str, Callable] = field(default_factory=dict)
    extra: Mapping[str, object] = field(default_factory=dict)

    @property
    def params(self) -> Mapping[str, float]:
        return self.spec.params

    def T(self, x) -> np.ndarray:
        return np.asarray(self.source.T(np.asarray(x, dtype=float)), dtype=float)

    def summary(self) -> dict:
        out = {
            "name": self.name,
            "coordinates": list(self.spec.coordinates),
            "parameters": {k: _jsonable(v) for k, v in self.spec.params.items()},
            "source": {"kind": self.source.kind, "Lambda": self.source.Lambda,
                       "description": self.source.description},
            "notes": dict(self.notes),
            "observers": sorted(self.observers),
            "killing_candidates": sorted(self.killing),
        }
        return out


def _jsonable(v):
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return repr(v)


def canonical_name(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    aliases = {"desitter_static": "de_sitter_static", "desitter_cosh": "de_sitter_cosh",
               "goedel": "godel", "friedmann_dust": "friedman_dust", "rotating": "rotating_frame"}
    key = aliases.get(key, key)
    if key not in ENTRY_NAMES:
        raise UnknownEntryError(f"unknown metric {name!r}; known: {', '.join(ENTRY_NAMES)}")
    return key


def _positive(**kw):
    for k, v in kw.items():
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise InvalidInputError(f"parameter {k} must be positive, got {v!r}")


def _zero_tensor(x):
    return np.zeros((DIM, DIM))


def _diag(*d):
    return [[d[i] if i == j else 0.0 for j in range(DIM)] for i in range(DIM)]


def _angle_violation(th) -> Optional[str]:
    if not 0.0 < th < math.pi:
        return "polar angle outside (0, pi)"
    return None


# --------------------------------------------------------------------------
# flat space
# --------------------------------------------------------------------------

def minkowski(c: float = 1.0, G: float = 1.0) -> CatalogEntry:
    _positive(c=c, G=G)

    def comps(x):
        return _diag(-c * c, 1.0, 1.0, 1.0)

    spec = MetricSpec("minkowski", {"c": c}, comps, stationary=True)
    src = SourceModel(0.0, _zero_tensor, "vacuum", description="empty flat space")
    return CatalogEntry(
        "minkowski", spec, src, {"flat": True, "vacuum": True, "static": True}, c, G,
        ((-5, 5), (-5, 5), (-5, 5), (-5, 5)),
        observers={"inertial": lambda x: np.array([1.0 / c, 0, 0, 0])},
        killing={
            "d_t": lambda x: np.array([1.0, 0, 0, 0]),
            "d_x": lambda x: np.array([0, 1.0, 0, 0]),
            "d_y": lambda x: np.array([0, 0, 1.0, 0]),
            "d_z": lambda x: np.array([0, 0, 0, 1.0]),
            "rotation_z": lambda x: np.array([0, -x[2], x[1], 0]),
            "boost_x": lambda x: np.array([x[1] / c**2, x[0], 0, 0]),
        },
    )


def rotating_frame(c: float = 1.0, omega: float = 0.1, G: float = 1.0) -> CatalogEntry:
    """Minkowski space seen from a uniformly rotating frame, chart ``(T, rho, phi, Z)``."""
    _positive(c=c, G=G)
    if omega < 0 or not math.isfinite(omega):
        raise InvalidInputError("omega must be non-negative")
    w = float(omega)

    def comps(x):
        _, r, _, _ = x
        g = _diag(-(c * c - w * w * r * r), 1.0, r * r, 1.0)
        g[0][2] = g[2][0] = -w * r * r
        return g

    def violation(x):
        if not x[1] > 0:
            return "rho <= 0 (axis of the cylindrical chart)"
        if w * x[1] >= c:
            return "omega*rho >= c (rotating observers would exceed light speed)"
        return None

    rho_max = 5.0 if w == 0 else min(5.0, 0.9 * c / w)
    spec = MetricSpec("rotating_frame", {"c": c, "omega": w}, comps, violation,
                      coordinates=("T", "rho", "phi", "Z"), stationary=True)
    src = SourceModel(0.0, _zero_tensor, "vacuum", description="flat space in rotating coordinates")
    return CatalogEntry(
        "rotating_frame", spec, src, {"flat": True, "vacuum": True, "static": False}, c, G,
        ((-5, 5), (0.1 * rho_max, rho_max), (0, 2 * math.pi), (-5, 5)),
        observers={"corotating": lambda x: np.array([1.0 / math.sqrt(c * c - w * w * x[1] ** 2), 0, 0, 0])},
        killing={"d_T": lambda x: np.array([1.0, 0, 0, 0]),
                 "d_phi": lambda x: np.array([0, 0, 1.0, 0]),
                 "d_Z": lambda x: np.array([0, 0, 0, 1.0])},
    )


# --------------------------------------------------------------------------
# weak field
# --------------------------------------------------------------------------

def point_mass_potential(M: float, G: float = 1.0) -> Callable:
    """Newtonian potential ``-G M / r`` (Taylor-compatible)."""

    def phi(y):
        return -G * M / np.sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2])

    return phi


def potential_jet(phi: Callable, y, analytic: bool = True) -> tuple:
    """Value, gradient and Hessian of a scalar potential at a spatial point."""
    y = np.asarray(y, dtype=float)
    if analytic:
        v = phi(Taylor2.variables(y, order=2))
        if isinstance(v, Taylor2):
            return v.val, v.grad, v.hess
        return float(v), np.zeros(3), np.zeros((3, 3))
    j = fd_jet(lambda p: np.array([[phi(p)]]), y)
    return float(j.g[0, 0]), j.dg[0, 0], j.ddg[0, 0]


def weak_field(c: float = 1.0, G: float = 1.0, M: float = 1e-3, potential: Optional[Callable] = None,
               analytic: bool = True, r_min: float = 0.0) -> CatalogEntry:
    """Static weak-field metric ``-(c^2 + 2 Phi) dt^2 + dx^2 + dy^2 + dz^2``.

    ``Phi`` is the Newtonian potential (attractive wells are negative, force
    ``-grad Phi``).  Source: the exact static stresses that make this metric
    an exact solution; ``T_tt = 0`` and the Newtonian density enters only at
    first order through the weak-field check in :mod:`relcosmo.newtonian`.
    """
    _positive(c=c, G=G)
    point = potential is None
    phi = point_mass_potential(M, G) if point else potential

    def comps(x):
        return _diag(-(c * c + 2.0 * phi(x[1:])), 1.0, 1.0, 1.0)

    def violation(x):
        r = math.sqrt(x[1] ** 2 + x[2] ** 2 + x[3] ** 2)
        if point and M != 0 and r <= r_min:
            return "r = 0 (point mass)"
        if c * c + 2.0 * float(phi(x[1:])) <= 0:
            return "c^2 + 2 Phi <= 0 (static observers cease to be timelike)"
        return None

    def stresses(x):
        P, dP, ddP = potential_jet(phi, x[1:], analytic)
        N = math.sqrt(1.0 + 2.0 * P / c**2)
        dN = dP / (c * c * N)
        ddN = ddP / (c * c * N) - np.outer(dP, dP) / (c**4 * N**3)
        T = np.zeros((DIM, DIM))
        T[1:, 1:] = c**4 / (8 * math.pi * G) * (np.eye(3) * np.trace(ddN) - ddN) / N
        return T

    params = {"c": c, "G": G, "M": M if point else None}
    spec = MetricSpec("weak_field", params, comps, violation, stationary=True, has_analytic_jet=analytic)
    src = SourceModel(0.0, stresses, "anisotropic_stress",
                      description="exact static stresses; T_tt = 0, Newtonian density only at first order")

    def static_observer(x):
        return np.array([1.0 / math.sqrt(c * c + 2.0 * float(phi(x[1:]))), 0, 0, 0])

    killing = {"d_t": lambda x: np.array([1.0, 0, 0, 0])}
    if point:
        killing["rotation_z"] = lambda x: np.array([0, -x[2], x[1], 0])
    return CatalogEntry(
        "weak_field", spec, src, {"flat": M == 0 and point, "vacuum": False, "static": True}, c, G,
        ((-5, 5), (1, 4), (-4, 4), (-4, 4)),
        observers={"static": static_observer}, killing=killing,
        extra={"potential": phi},
    )


# --------------------------------------------------------------------------
# FLRW family
# --------------------------------------------------------------------------

def _sigma(k: int):
    if k == 1:
        return np.sin
    if k == -1:
        return np.sinh
    return lambda chi: chi


def flrw_metric(name: str, scale: Callable, k: int, c: float, params: Mapping,
                t_range=(-math.inf, math.inf)) -> MetricSpec:
    """Robertson-Walker metric ``-c^2 dt^2 + a(t)^2 [dchi^2 + S_k(chi)^2 dOmega^2]``.

    ``scale(t)`` must accept Taylor numbers (or be wrapped with
    :func:`relcosmo.taylor.lift`).
    """
    if k not in (-1, 0, 1):
        raise InvalidInputError("k must be -1, 0 or 1")
    S = _sigma(k)

    def comps(x):
        t, chi, th, _ = x
        a = scale(t)
        a2 = a * a
        s = S(chi)
        st = np.sin(th)
        return _diag(-c * c, a2, a2 * s * s, a2 * s * s * st * st)

    lo, hi = t_range

    def violation(x):
        if not lo < x[0] < hi:
            return f"t outside ({lo}, {hi})"
        if not x[1] > 0:
            return "chi <= 0 (chart origin)"
        if k == 1 and not x[1] < math.pi:
            return "chi >= pi (antipodal pole)"
        msg = _angle_violation(x[2])
        if msg:
            return msg
        if not float(scale(x[0])) > 0:
            return "a(t) <= 0"
        return None

    return MetricSpec(name, dict(params), comps, violation, coordinates=SPHERICAL,
                      metadata={"k": k, "scale": scale})


def scale_jet(scale: Callable, t: float) -> tuple:
    """``(a, da/dt, d^2a/dt^2)`` of a Taylor-compatible scale factor."""
    v = scale(Taylor2.variables([t], order=2)[0])
    if isinstance(v, Taylor2):
        return v.val, float(v.grad[0]), float(v.hess[0, 0])
    return float(v), 0.0, 0.0


def _flrw_fluid(spec: MetricSpec, scale: Callable, k: int, Lambda: float, c: float, G: float,
                kind: str = "perfect_fluid") -> SourceModel:
    """Perfect fluid whose density and pressure follow from the Friedmann equations."""

    def rho_p(x):
        a, at, att = scale_jet(scale, x[0])
        ad, add = at / c, att / c**2
        X = (ad * ad + k) / (a * a)
        rho = c**2 / (8 * math.pi * G) * (3 * X - Lambda)
        p = c**4 / (8 * math.pi * G) * (Lambda - 2 * add / a - X)
        return rho, p

    def T(x):
        rho, p = rho_p(x)
        g = spec.raw(x)
        out = p * g
        out[0, :] = 0.0
        out[:, 0] = 0.0
        out[0, 0] = rho * c**4
        return out

    return SourceModel(Lambda, T, kind, rho=lambda x: rho_p(x)[0], p=lambda x: rho_p(x)[1],
                       u=lambda x: np.array([1.0 / c, 0, 0, 0]),
                       description="comoving perfect fluid, rho and p from the Friedmann equations")


def _comoving(c):
    return {"comoving": lambda x: np.array([1.0 / c, 0, 0, 0])}


def _sphere_box(t_box, chi_max=math.pi):
    m = 0.1
    return (t_box, (m, chi_max - m), (m, math.pi - m), (0.0, 2 * math.pi))


def einstein_static(a: float = 1.0, c: float = 1.0, G: float = 1.0) -> CatalogEntry:
    """Static closed universe of radius ``a`` filled with dust; ``Lambda = 1/a^2``."""
    _positive(a=a, c=c, G=G)

    def scale(t):
        return a + 0.0 * t

    spec = flrw_metric("einstein_static", scale, 1, c, {"a": a, "c": c, "G": G})
    rho = c**2 / (4 * math.pi * G * a**2)

    def T(x):
        out = np.zeros((DIM, DIM))
        out[0, 0] = rho * c**4
        return out

    src = SourceModel(1.0 / a**2, T, "dust", rho=lambda x: rho, p=lambda x: 0.0,
                      u=lambda x: np.array([1.0 / c, 0, 0, 0]),
                      description=f"dust at rest, rho = c^2/(4 pi G a^2) = {rho:.17g}")
    return CatalogEntry(
        "einstein_static", spec, src, {"flat": False, "vacuum": False, "static": True}, c, G,
        _sphere_box((-5, 5)), observers=_comoving(c),
        killing={"d_t": lambda x: np.array([1.0, 0, 0, 0]), "d_phi": lambda x: np.array([0, 0, 0, 1.0])},
        extra={"rho": rho},
    )


def de_sitter_static(a: float = 1.0, c: float = 1.0, G: float = 1.0,
                     horizon_margin: float = HORIZON_MARGIN) -> CatalogEntry:
    """Static de Sitter chart ``-c^2 cos^2(chi) dt^2 + a^2 [dchi^2 + sin^2(chi) dOmega^2]``."""
    _positive(a=a, c=c, G=G)

    def comps(x):
        _, chi, th, _ = x
        s, st = np.sin(chi), np.sin(th)
        cc = np.cos(chi)
        return _diag(-c * c * cc * cc, a * a, a * a * s * s, a * a * s * s * st * st)

    def violation(x):
        if not x[1] > 0:
            return "chi <= 0 (chart origin)"
        if not x[1] < math.pi / 2 - horizon_margin:
            return "chi >= pi/2 (horizon, g_tt -> 0)"
        return _angle_violation(x[2])

    spec = MetricSpec("de_sitter_static", {"a": a, "c": c}, comps, violation, coordinates=SPHERICAL,
                      stationary=True)
    src = SourceModel(3.0 / a**2, _zero_tensor, "vacuum", description="empty, Lambda = 3/a^2")
    return CatalogEntry(
        "de_sitter_static", spec, src, {"flat": False, "vacuum": True, "static": True}, c, G,
        _sphere_box((-5, 5), math.pi / 2),
        observers={"static": lambda x: np.array([1.0 / (c * math.cos(x[1])), 0, 0, 0])},
        killing={"d_t": lambda x: np.array([1.0, 0, 0, 0]), "d_phi": lambda x: np.array([0, 0, 0, 1.0])},
    )


def de_sitter_cosh(a: float = 1.0, c: float = 1.0, G: float = 1.0) -> CatalogEntry:
    """Global de Sitter as a closed FLRW model with ``a(t) = a cosh(ct/a)``."""
    _positive(a=a, c=c, G=G)

    def scale(t):
        return a * np.cosh(c * t / a)

    spec = flrw_metric("de_sitter_cosh", scale, 1, c, {"a": a, "c": c})
    src = SourceModel(3.0 / a**2, _zero_tensor, "vacuum", rho=lambda x: 0.0, p=lambda x: 0.0,
                      description="empty, Lambda = 3/a^2")
    T = 2.0 * a / c
    return CatalogEntry(
        "de_sitter_cosh", spec, src, {"flat": False, "vacuum": True, "static": False}, c, G,
        _sphere_box((-T, T)), observers=_comoving(c),
        killing={"d_phi": lambda x: np.array([0, 0, 0, 1.0])},
        extra={"scale": scale},
    )


def steady_state(a: float = 1.0, c: float = 1.0, G: float = 1.0) -> CatalogEntry:
    """Flat slicing of de Sitter: ``-c^2 dT^2 + exp(2cT/a)(dx^2 + dy^2 + dz^2)``."""
    _positive(a=a, c=c, G=G)

    def comps(x):
        e2 = np.exp(2.0 * c * x[0] / a)
        return _diag(-c * c, e2, e2, e2)

    spec = MetricSpec("steady_state", {"a": a, "c": c}, comps, coordinates=("T", "x", "y", "z"))
    src = SourceModel(3.0 / a**2, _zero_tensor, "vacuum", description="empty, Lambda = 3/a^2")
    H = c / a
    return CatalogEntry(
        "steady_state", spec, src, {"flat": False, "vacuum": True, "static": False}, c, G,
        ((-2 * a / c, 2 * a / c), (-3, 3), (-3, 3), (-3, 3)), observers=_comoving(c),
        killing={"d_x": lambda x: np.array([0, 1.0, 0, 0]),
                 "d_y": lambda x: np.array([0, 0, 1.0, 0]),
                 "d_z": lambda x: np.array([0, 0, 0, 1.0]),
                 "dilation": lambda x: np.array([1.0, -H * x[1], -H * x[2], -H * x[3]])},
        extra={"scale": lambda t: np.exp(c * t / a)},
    )


def flrw(k: int = 0, a0: float = 1.0, t0: float = 1.0, n: float = 0.5, Lambda: float = 0.0,
         c: float = 1.0, G: float = 1.0, scale: Optional[Callable] = None,
         t_range: Optional[Sequence[float]] = None) -> CatalogEntry:
    """Robertson-Walker model with ``a(t) = a0 (t/t0)^n`` (or a supplied ``scale``).

    Density and pressure of the comoving perfect fluid are read off the
    Friedmann equations, so the entry is an exact solution by construction.
    The default ``n = 1/2`` with ``k = 0`` is a radiation-like fluid.
    """
    _positive(a0=a0, t0=t0, c=c, G=G)
    if scale is None:
        def scale(t):
            return a0 * (t / t0) ** n
        if t_range is None:
            t_range = (0.0, math.inf)
    if t_range is None:
        t_range = (-math.inf, math.inf)
    spec = flrw_metric("flrw", scale, k, c, {"k": k, "a0": a0, "t0": t0, "n": n, "Lambda": Lambda,
                                              "c": c, "G": G}, t_range)
    src = _flrw_fluid(spec, scale, k, Lambda, c, G)
    return CatalogEntry(
        "flrw", spec, src, {"flat": False, "vacuum": False, "static": n == 0}, c, G,
        _sphere_box((0.5 * t0, 2.0 * t0), math.pi if k == 1 else 3.0), observers=_comoving(c),
        killing={"d_phi": lambda x: np.array([0, 0, 0, 1.0])},
        extra={"scale": scale},
    )


def friedman_dust(A: float = 1.0, k: int = 1, Lambda: float = 0.0, c: float = 1.0, G: float = 1.0,
                  a0: Optional[float] = None, t0: float = 0.0, span: float = 200.0) -> CatalogEntry:
    """Dust model whose scale factor comes from the numerical integrator.

    Initial data: ``a(t0) = a0`` (default ``A/2``) expanding, with ``adot``
    fixed by the first integral.  The chart covers the computed lifetime
    minus 2% at each end.
    """
    _positive(A=A, c=c, G=G)
    a0 = 0.5 * A if a0 is None else a0
    params = FLRWParams(k, Lambda, c, G, Dust(A))
    v2 = (A + Lambda * a0**3 / 3.0) / a0 - k
    if v2 < 0:
        raise InvalidInputError("no real expansion rate for these initial data")
    traj = integrate_scale_factor(params, t0, a0, c * math.sqrt(v2), (t0 - span, t0 + span))
    lo, hi = traj.t_range
    width = hi - lo
    lo, hi = lo + 0.02 * width, hi - 0.02 * width

    def scale(t):
        if isinstance(t, Taylor2):
            return lift(t, *traj.scale_factor(t.val))
        return traj.scale_factor(float(t))[0]

    spec = flrw_metric("friedman_dust", scale, k, c,
                       {"A": A, "k": k, "Lambda": Lambda, "a0": a0, "t0": t0, "c": c, "G": G}, (lo, hi))
    rho_of = lambda x: 3 * c**2 * A / (8 * math.pi * G * traj.scale_factor(x[0])[0] ** 3)

    def T(x):
        out = np.zeros((DIM, DIM))
        out[0, 0] = rho_of(x) * c**4
        return out

    src = SourceModel(Lambda, T, "dust", rho=rho_of, p=lambda x: 0.0,
                      u=lambda x: np.array([1.0 / c, 0, 0, 0]),
                      description="comoving dust, rho = 3 c^2 A / (8 pi G a^3)")
    inner = (lo + 0.1 * width, hi - 0.1 * width)
    return CatalogEntry(
        "friedman_dust", spec, src, {"flat": False, "vacuum": False, "static": False}, c, G,
        _sphere_box(inner, math.pi if k == 1 else 3.0), observers=_comoving(c),
        killing={"d_phi": lambda x: np.array([0, 0, 0, 1.0])},
        extra={"trajectory": traj, "scale": scale},
    )


# --------------------------------------------------------------------------
# Godel
# --------------------------------------------------------------------------

def godel(a: float = 1.0, c: float = 1.0, G: float = 1.0) -> CatalogEntry:
    """Rotating dust universe ``-(c dt + e^{ax} dz)^2 + dx^2 + dy^2 + (1/2) e^{2ax} dz^2``.

    ``Lambda = -a^2/2`` and ``rho = a^2 c^2 / (8 pi G)``; ``a = 0`` is flat.
    """
    _positive(c=c, G=G)
    if a < 0 or not math.isfinite(a):
        raise InvalidInputError("a must be non-negative")

    def comps(x):
        E = np.exp(a * x[1])
        g = _diag(-c * c, 1.0, 1.0, -0.5 * E * E)
        g[0][3] = g[3][0] = -c * E
        return g

    spec = MetricSpec("godel", {"a": a, "c": c, "G": G}, comps, stationary=True)
    rho = a * a * c * c / (8 * math.pi * G)

    def u_flat(x):
        return -np.array([c, 0.0, 0.0, math.exp(a * x[1])])

    def T(x):
        uf = u_flat(x)
        return rho * c * c * np.outer(uf, uf)

    src = SourceModel(-0.5 * a * a, T, "dust" if a else "vacuum", rho=lambda x: rho, p=lambda x: 0.0,
                      u=lambda x: np.array([1.0 / c, 0, 0, 0]),
                      description=f"dust along u = (1/c) d_t, rho = a^2 c^2/(8 pi G) = {rho:.17g}")
    killing = {
        "d_t": lambda x: np.array([1.0, 0, 0, 0]),
        "d_x - a z d_z": lambda x: np.array([0, 1.0, 0, -a * x[3]]),
        "boost-like": lambda x: np.array([-2.0 * math.exp(-a * x[1]) / c, a * x[3], 0,
                                          math.exp(-2 * a * x[1]) - 0.5 * a * a * x[3] ** 2]),
        "d_y": lambda x: np.array([0, 0, 1.0, 0]),
        "d_z": lambda x: np.array([0, 0, 0, 1.0]),
    }
    return CatalogEntry(
        "godel", spec, src, {"flat": a == 0, "vacuum": a == 0, "static": False}, c, G,
        ((-2, 2), (-2, 2), (-2, 2), (-2, 2)),
        observers={"dust": lambda x: np.array([1.0 / c, 0, 0, 0])}, killing=killing,
        extra={"rho": rho, "u_flat": u_flat},
    )


# --------------------------------------------------------------------------
# Bianchi I and IX
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BianchiFrame:
    """Invariant coframe ``theta^alpha = theta^alpha_i(y) dy^i`` on the group orbits.

    ``coframe(y)`` returns the 3x3 nested list ``[alpha][i]``; ``C[alpha, beta,
    gamma]`` are the structure constants in ``d theta^a = -(1/2) C^a_{bc}
    theta^b ^ theta^c``.  Type IX uses Euler angles ``y = (psi, theta, phi)``.
    """

    type: str
    coframe: Callable[[Sequence], list]
    C: np.ndarray
    coordinates: tuple

    def matrix(self, y) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.coframe(list(y))])

    def one_form(self, alpha: int) -> Callable:
        """Spacetime components (``dt`` slot zero) of ``theta^alpha``."""
        return lambda x: np.concatenate([[0.0], self.matrix(np.asarray(x)[1:])[alpha]])


def bianchi_frame(type: str) -> BianchiFrame:
    t = str(type).upper()
    if t == "I":
        def cof(y):
            return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        return BianchiFrame("I", cof, np.zeros((3, 3, 3)), ("t", "x", "y", "z"))
    if t == "IX":
        def cof(y):
            psi, th, _ = y
            sp, cp = np.sin(psi), np.cos(psi)
            st, ct = np.sin(th), np.cos(th)
            return [[0.0 * psi, sp, -cp * st],
                    [0.0 * psi, cp, sp * st],
                    [1.0 + 0.0 * psi, 0.0 * th, ct]]
        eps = np.zeros((3, 3, 3))
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            eps[i, j, k], eps[i, k, j] = 1.0, -1.0
        return BianchiFrame("IX", cof, eps, ("t", "psi", "theta", "phi"))
    raise InvalidInputError(f"unsupported Bianchi type {type!r}; only I and IX")


def bianchi_metric(frame: BianchiFrame, gab: Callable, c: float = 1.0, name: str = "bianchi",
                   params: Optional[Mapping] = None, t_range=(-math.inf, math.inf)) -> MetricSpec:
    """``-c^2 dt^2 + g_ab(t) theta^a theta^b``; ``gab(t)`` returns a 3x3 nested list."""

    def comps(x):
        t = x[0]
        th = frame.coframe(x[1:])
        h = gab(t)
        g = [[0.0] * DIM for _ in range(DIM)]
        g[0][0] = -c * c
        for i in range(3):
            for j in range(i, 3):
                s = 0.0
                for al in range(3):
                    for be in range(3):
                        s = s + h[al][be] * th[al][i] * th[be][j]
                g[i + 1][j + 1] = s
                g[j + 1][i + 1] = s
        return g

    lo, hi = t_range

    def violation(x):
        if not lo < x[0] < hi:
            return f"t outside ({lo}, {hi})"
        if frame.type == "IX":
            return _angle_violation(x[2])
        return None

    return MetricSpec(name, dict(params or {}), comps, violation, coordinates=frame.coordinates,
                      metadata={"frame": frame, "gab": gab})


def coframe_matrix(frame: BianchiFrame, x) -> np.ndarray:
    """4x4 matrix ``Theta[A, mu]`` of the coframe ``(dt, theta^1, theta^2, theta^3)``."""
    M = np.zeros((DIM, DIM))
    M[0, 0] = 1.0
    M[1:, 1:] = frame.matrix(np.asarray(x)[1:])
    return M


def to_frame(tensor, frame: BianchiFrame, x) -> np.ndarray:
    """Covariant 2-tensor components in the invariant coframe."""
    E = np.linalg.inv(coframe_matrix(frame, x))
    return E.T @ np.asarray(tensor) @ E


def bianchi(type: str = "I", c: float = 1.0, G: float = 1.0, p: Sequence[float] = (-1 / 3, 2 / 3, 2 / 3),
            a: float = 1.0, gab: Optional[Callable] = None) -> CatalogEntry:
    """Spatially homogeneous model in an invariant coframe.

    Type I defaults to the vacuum Kasner solution with exponents ``p``
    (``sum p = sum p^2 = 1``); type IX defaults to ``g_ab = a^2 delta_ab``,
    which is the Einstein static universe of radius ``2a``.  A custom
    ``gab(t)`` gives a metric without a registered source (kind
    ``"unspecified"``).
    """
    _positive(c=c, G=G, a=a)
    frame = bianchi_frame(type)
    T_zero = _zero_tensor
    if gab is not None:
        spec = bianchi_metric(frame, gab, c, params={"type": frame.type, "c": c})
        src = SourceModel(0.0, T_zero, "unspecified", description="custom g_ab(t)")
        box = ((0.5, 2.0),) + _spatial_box(frame)
        notes = {"flat": False, "vacuum": False, "static": False}
    elif frame.type == "I":
        p = tuple(float(v) for v in p)
        if abs(sum(p) - 1) > 1e-12 or abs(sum(v * v for v in p) - 1) > 1e-12:
            raise InvalidInputError("Kasner exponents need sum p = sum p^2 = 1")

        def gab(t):
            return [[t ** (2 * p[0]), 0.0, 0.0], [0.0, t ** (2 * p[1]), 0.0], [0.0, 0.0, t ** (2 * p[2])]]

        spec = bianchi_metric(frame, gab, c, params={"type": "I", "p": p, "c": c}, t_range=(0.0, math.inf))
        src = SourceModel(0.0, T_zero, "vacuum", description="Kasner vacuum")
        box = ((0.5, 2.0),) + _spatial_box(frame)
        notes = {"flat": False, "vacuum": True, "static": False}
    else:
        def gab(t):
            s = a * a + 0.0 * t
            return [[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s]]

        R = 2.0 * a
        rho = c**2 / (4 * math.pi * G * R * R)

        def T(x):
            out = np.zeros((DIM, DIM))
            out[0, 0] = rho * c**4
            return out

        spec = bianchi_metric(frame, gab, c, params={"type": "IX", "a": a, "c": c, "G": G})
        src = SourceModel(1.0 / R**2, T, "dust", rho=lambda x: rho, p=lambda x: 0.0,
                          u=lambda x: np.array([1.0 / c, 0, 0, 0]),
                          description="Einstein static universe of radius 2a")
        box = ((-5.0, 5.0),) + _spatial_box(frame)
        notes = {"flat": False, "vacuum": False, "static": True}
    killing = {"d_phi": lambda x: np.array([0, 0, 0, 1.0])} if frame.type == "IX" else {
        "d_x": lambda x: np.array([0, 1.0, 0, 0]), "d_y": lambda x: np.array([0, 0, 1.0, 0]),
        "d_z": lambda x: np.array([0, 0, 0, 1.0])}
    return CatalogEntry("bianchi", spec, src, notes, c, G, box, observers=_comoving(c), killing=killing,
                        extra={"frame": frame})


def _spatial_box(frame: BianchiFrame) -> tuple:
    if frame.type == "IX":
        return ((0.0, 4 * math.pi), (0.2, math.pi - 0.2), (0.0, 2 * math.pi))
    return ((-5.0, 5.0), (-5.0, 5.0), (-5.0, 5.0))


# --------------------------------------------------------------------------
# registry, sampling, listing
# --------------------------------------------------------------------------

_BUILDERS = {
    "minkowski": minkowski,
    "rotating_frame": rotating_frame,
    "weak_field": weak_field,
    "einstein_static": einstein_static,
    "de_sitter_static": de_sitter_static,
    "de_sitter_cosh": de_sitter_cosh,
    "steady_state": steady_state,
    "flrw": flrw,
    "friedman_dust": friedman_dust,
    "godel": godel,
    "bianchi": bianchi,
}


def make_entry(name: str, **params) -> CatalogEntry:
    """Build a catalog entry by name; keyword arguments override defaults.

    Raises
    ------
    UnknownEntryError
        Unknown name.
    InvalidInputError
        Parameters out of range.
    """
    key = canonical_name(name)
    try:
        return _BUILDERS[key](**params)
    except TypeError as exc:
        raise InvalidInputError(f"{key}: {exc}") from None


def all_entries(**common) -> list:
    return [make_entry(n, **common) for n in ENTRY_NAMES]


def sample_events(entry: CatalogEntry, n: int, rng: np.random.Generator, margin: float = 1e-2) -> np.ndarray:
    """``n`` events drawn uniformly from the sample box, kept only when a
    neighbourhood of relative size ``margin`` lies in the chart."""
    box = np.array(entry.sample_box, dtype=float)
    out = []
    eye = np.eye(DIM)
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > 1000 * n:
            raise RuntimeError(f"{entry.name}: could not sample events inside the chart")
        x = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random(DIM)
        h = margin * np.maximum(1.0, np.abs(x))
        if entry.spec.domain(x) and all(entry.spec.domain(x + s * h[i] * eye[i]) for i in range(DIM) for s in (1, -1)):
            out.append(x)
    return np.array(out)


def catalog_json(entries: Optional[Sequence[CatalogEntry]] = None, indent: int = 2) -> str:
    entries = all_entries() if entries is None else entries
    return json.dumps([e.summary() for e in entries], indent=indent, sort_keys=True)


# --------------------------------------------------------------------------
# de Sitter: static patch inside the global (cosh) chart
# --------------------------------------------------------------------------

def _event_like(x, comps):
    """Float array for float input; a list of Taylor numbers otherwise."""
    if any(isinstance(v, Taylor2) for v in comps):
        return comps
    return np.array([float(v) for v in comps])


def desitter_coordinate_map(a: float = 1.0, c: float = 1.0, direction: str = "cosh_to_static") -> Callable:
    """Coordinate change between the global chart ``(tb, chib, theta, phi)``
    and the static chart ``(t, chi, theta, phi)``.

    With ``T = c tb / a``::

        t   = (a/c) log[(sinh T + cosh T cos chib) / sqrt(1 - cosh^2 T sin^2 chib)]
        sin chi = cosh T sin chib

    The static chart covers only the region ``cosh^2 T sin^2 chib < 1`` with
    ``sinh T + cosh T cos chib > 0``; elsewhere :class:`ExtensionRegionError`
    is raised.  ``direction="static_to_cosh"`` gives the inverse.  Both maps
    accept Taylor numbers, which yields exact Jacobians.
    """
    _positive(a=a, c=c)
    if direction == "cosh_to_static":
        def fwd(x):
            tb, chib, th, ph = x
            T = c * tb / a
            ch, sh = np.cosh(T), np.sinh(T)
            q = ch * np.sin(chib)
            num = sh + ch * np.cos(chib)
            if not (float(q * q) < 1.0 and float(num) > 0.0):
                raise ExtensionRegionError(
                    f"event {[float(v) for v in x]} lies outside the static patch "
                    f"(cosh^2 T sin^2 chib = {float(q * q):.6g})")
            t = (a / c) * np.log(num / np.sqrt(1.0 - q * q))
            return _event_like(x, [t, np.arcsin(q), th, ph])
        return fwd
    if direction == "static_to_cosh":
        def bwd(x):
            t, chi, th, ph = x
            S = c * t / a
            tb = (a / c) * np.arcsinh(np.cos(chi) * np.sinh(S))
            # 0 < chi < pi/2 in the static chart, so atan2 reduces to arctan
            chib = np.arctan(np.tan(chi) / np.cosh(S))
            return _event_like(x, [tb, chib, th, ph])
        return bwd
    raise InvalidInputError(f"unknown direction {direction!r}")
