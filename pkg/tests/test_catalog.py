import json
import math

import numpy as np
import pytest

from relcosmo import catalog as cat
from relcosmo.causal import exterior_derivative, inner, one_form, rotation_of, wedge
from relcosmo.curvature import _fd_gradient, curvature_at, efe_residual
from relcosmo.errors import ExtensionRegionError, InvalidInputError, UnknownEntryError
from relcosmo.manifold import evaluate_metric
from relcosmo.taylor import Taylor2


def test_einstein_static_source():
    e = cat.make_entry("einstein_static", a=1, c=1, G=1)
    assert e.source.Lambda == 1.0
    assert e.source.rho(np.zeros(4)) == pytest.approx(1 / (4 * math.pi), rel=1e-15)
    # Lambda = 1/a^2 = 4 pi G rho / c^2
    assert 4 * math.pi * e.G * e.extra["rho"] / e.c**2 == pytest.approx(e.source.Lambda, rel=1e-15)


def test_de_sitter_static_source():
    e = cat.make_entry("de-sitter-static", a=2)
    assert e.source.Lambda == pytest.approx(0.75)
    assert e.source.kind == "vacuum"
    assert np.all(e.T([0, 0.5, 1.0, 0]) == 0)


def test_godel_source_matches_rotation(rng):
    e = cat.make_entry("godel", a=1, c=1, G=1)
    uf = one_form(e.extra["u_flat"])
    for x in rng.uniform(-1, 1, size=(5, 4)):
        w = rotation_of(uf, e.spec, x)
        ww = inner(w, w, evaluate_metric(e.spec, x))
        assert ww > 0
        assert -e.source.Lambda == pytest.approx(ww, rel=1e-8)
        assert 4 * math.pi * e.G * e.extra["rho"] / e.c**2 == pytest.approx(ww, rel=1e-8)


def test_unknown_and_invalid():
    with pytest.raises(UnknownEntryError, match="unknown metric"):
        cat.make_entry("nosuch")
    with pytest.raises(InvalidInputError):
        cat.make_entry("einstein_static", a=-1)
    with pytest.raises(InvalidInputError):
        cat.make_entry("godel", bogus=1)
    with pytest.raises(InvalidInputError):
        cat.bianchi_frame("V")


def test_every_entry_solves_field_equations(entries, rng):
    for entry in entries.values():
        src = entry.source
        for x in cat.sample_events(entry, 20, rng):
            assert efe_residual(entry.spec, src.Lambda, src.T, x, entry.c, entry.G, "analytic").max_abs <= 1e-8
        for x in cat.sample_events(entry, 5, rng):
            assert efe_residual(entry.spec, src.Lambda, src.T, x, entry.c, entry.G, "numeric").max_abs <= 1e-5


def test_entries_solve_field_equations_with_other_units(rng):
    for name in ("einstein_static", "de_sitter_cosh", "godel", "flrw", "weak_field", "bianchi"):
        entry = cat.make_entry(name, c=2.5, G=0.3)
        for x in cat.sample_events(entry, 5, rng):
            r = efe_residual(entry.spec, entry.source.Lambda, entry.T, x, entry.c, entry.G)
            assert r.max_abs <= 1e-8, name


def test_source_model_invariants(entries, rng):
    for entry in entries.values():
        src = entry.source
        for x in cat.sample_events(entry, 5, rng):
            T = entry.T(x)
            np.testing.assert_array_equal(T, T.T)
            if src.kind == "vacuum":
                assert np.all(T == 0)
            if src.kind == "dust":
                g = evaluate_metric(entry.spec, x)
                u = src.u(x)
                assert u @ g @ u == pytest.approx(-1.0, abs=1e-12)
                uf = g @ u
                np.testing.assert_allclose(T, src.rho(x) * entry.c**2 * np.outer(uf, uf), rtol=1e-12, atol=1e-300)


def test_limits_equal_minkowski():
    x = np.array([0.3, 1.1, -0.4, 0.7])
    mk = evaluate_metric(cat.minkowski(c=2.0).spec, x)
    zero = cat.weak_field(c=2.0, potential=lambda y: 0.0 * y[0])
    np.testing.assert_array_equal(evaluate_metric(zero.spec, x), mk)
    rot0 = evaluate_metric(cat.rotating_frame(c=2.0, omega=0.0).spec, x)
    np.testing.assert_array_equal(rot0, np.diag([-4.0, 1.0, x[1] ** 2, 1.0]))  # cylindrical Minkowski
    c = 2.0
    g0 = evaluate_metric(cat.godel(a=0.0, c=c).spec, x)
    # t' = t + z/c, z' = z / sqrt(2) maps the a = 0 metric onto diag(-c^2, 1, 1, 1)
    J = np.eye(4)
    J[0, 3] = 1 / c
    J[3, 3] = 1 / math.sqrt(2)
    np.testing.assert_allclose(J.T @ mk @ J, g0, atol=1e-15)


def test_flrw_special_cases(rng):
    es = cat.einstein_static(a=1.4, c=1.2)
    fl = cat.flrw(k=1, c=1.2, scale=lambda t: 1.4 + 0.0 * t)
    dc = cat.de_sitter_cosh(a=1.4, c=1.2)
    fc = cat.flrw(k=1, c=1.2, scale=lambda t: 1.4 * np.cosh(1.2 * t / 1.4))
    for x in cat.sample_events(es, 10, rng):
        np.testing.assert_array_equal(evaluate_metric(fl.spec, x), evaluate_metric(es.spec, x))
    for x in cat.sample_events(dc, 10, rng):
        np.testing.assert_array_equal(evaluate_metric(fc.spec, x), evaluate_metric(dc.spec, x))


def test_desitter_map_fixes_t_zero_slice():
    fwd = cat.desitter_coordinate_map(a=1.3, c=0.7)
    for chib in (0.1, 0.7, 1.4):
        t, chi, _, _ = fwd([0.0, chib, 1.0, 2.0])
        assert t == pytest.approx(0.0, abs=1e-15)
        assert chi == pytest.approx(chib, rel=1e-15)


def _cosh_events(rng, n, a, c):
    out = []
    while len(out) < n:
        T = rng.uniform(-1.5, 1.5)
        chib = rng.uniform(0.05, 1.5)
        q = math.cosh(T) * math.sin(chib)
        if q * q < 0.95 and math.sinh(T) + math.cosh(T) * math.cos(chib) > 0.05:
            out.append(np.array([a * T / c, chib, rng.uniform(0.2, 2.9), rng.uniform(0, 6)]))
    return out


def test_desitter_map_pulls_back_static_metric(rng):
    a, c = 1.3, 0.7
    fwd = cat.desitter_coordinate_map(a, c)
    bwd = cat.desitter_coordinate_map(a, c, "static_to_cosh")
    static, cosh = cat.de_sitter_static(a=a, c=c).spec, cat.de_sitter_cosh(a=a, c=c).spec
    for x in _cosh_events(rng, 50, a, c):
        y = fwd(Taylor2.variables(x, order=1))
        J = np.array([v.grad for v in y])  # J[i, j] = d y^i / d x^j
        assert np.max(np.abs(_fd_gradient(fwd, x) - J)) <= 1e-6 * max(1.0, np.max(np.abs(J)))
        pulled = J.T @ evaluate_metric(static, fwd(x)) @ J
        assert np.max(np.abs(pulled - evaluate_metric(cosh, x))) <= 1e-8
        assert np.max(np.abs(bwd(fwd(x)) - x)) <= 1e-10


def test_desitter_map_extension_region():
    fwd = cat.desitter_coordinate_map()
    with pytest.raises(ExtensionRegionError):
        fwd([2.0, 1.2, 1.0, 0.0])  # cosh^2 sin^2 >= 1
    with pytest.raises(ExtensionRegionError):
        fwd([-1.0, 1.4, 1.0, 0.0])  # past the static patch
    with pytest.raises(InvalidInputError):
        cat.desitter_coordinate_map(direction="sideways")


def test_bianchi_I_is_flat_flrw():
    e = cat.bianchi_metric(cat.bianchi_frame("I"), lambda t: [[np.exp(2 * t), 0.0, 0.0], [0.0, np.exp(2 * t), 0.0],
                                                             [0.0, 0.0, np.exp(2 * t)]])
    ss = cat.steady_state(a=1.0).spec
    for x in ([0.1, 1, 2, 3], [-0.4, 0.3, -2, 1]):
        np.testing.assert_allclose(evaluate_metric(e, x), evaluate_metric(ss, x), rtol=1e-15)


def test_bianchi_IX_round_sphere_curvature(rng):
    # g_ab = (a^2/4) delta on the invariant coframe is the round 3-sphere of radius a
    a = 1.6
    spec = cat.bianchi_metric(cat.bianchi_frame("IX"), lambda t: [[a * a / 4 + 0.0 * t, 0.0, 0.0],
                                                                  [0.0, a * a / 4, 0.0], [0.0, 0.0, a * a / 4]])
    for _ in range(10):
        x = np.array([0.0, rng.uniform(0, 6), rng.uniform(0.3, 2.8), rng.uniform(0, 6)])
        cur = curvature_at(spec, x)
        assert cur.scalar == pytest.approx(6 / a**2, rel=1e-10)  # sectional curvature 1/a^2
        low = cur.riemann.lowered(cur.g)
        h = cur.g.copy()
        h[0, :] = h[:, 0] = 0.0
        expected = (np.einsum("ac,bd->abcd", h, h) - np.einsum("ad,bc->abcd", h, h)) / a**2
        assert np.max(np.abs(low - expected)) <= 1e-8


def test_bianchi_IX_maurer_cartan(rng):
    frame = cat.bianchi_frame("IX")
    th = [frame.one_form(i) for i in range(3)]
    for _ in range(10):
        x = np.array([0.0, rng.uniform(0, 6), rng.uniform(0.3, 2.8), rng.uniform(0, 6)])
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            d = exterior_derivative(one_form(th[i]), None, x)
            assert np.max(np.abs(d + wedge(th[j](x), th[k](x)))) <= 1e-8


def test_bianchi_efe_frame_components_homogeneous(rng):
    frame = cat.bianchi_frame("IX")

    def gab(t):
        return [[1.0 + t * t, 0.2 * t, 0.0], [0.2 * t, 2.0 + t, 0.1], [0.0, 0.1, 1.5 + 0.0 * t]]

    spec = cat.bianchi_metric(frame, gab)
    for t in (0.3, 1.1):
        comps = []
        for _ in range(6):
            x = np.array([t, rng.uniform(0, 6), rng.uniform(0.3, 2.8), rng.uniform(0, 6)])
            comps.append(cat.to_frame(curvature_at(spec, x).einstein, frame, x))
        comps = np.array(comps)
        assert np.max(np.abs(comps - comps[0])) <= 1e-8


def test_catalog_json_lists_all_entries():
    doc = json.loads(cat.catalog_json())
    assert [d["name"] for d in doc] == list(cat.ENTRY_NAMES)
    assert all("Lambda" in d["source"] for d in doc)


def test_sample_events_deterministic_and_in_domain(entries):
    for entry in entries.values():
        a = cat.sample_events(entry, 10, np.random.default_rng(5))
        b = cat.sample_events(entry, 10, np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)
        assert all(entry.spec.domain(x) for x in a)
