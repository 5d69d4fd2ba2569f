import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relcosmo import catalog as cat
from relcosmo.curvature import efe_residual
from relcosmo.errors import InconsistentInitialDataError, InvalidInputError, SingularStateError
from relcosmo.flrw import (Dust, FLRWParams, Tabulated, age_bound_check, classify_curvature_index, critical_density,
                           dust_acceleration, dust_density, first_integral, friedmann_residuals, integrate_scale_factor,
                           integrate_tabulated, recollapse_possible)


def expanding_rate(params, a0):
    """da/dt from the first integral for expanding initial data."""
    return params.c * math.sqrt((params.A + params.Lambda * a0**3 / 3) / a0 - params.k)


def run(k=1, Lambda=0.0, A=1.0, a0=0.5, c=1.0, G=1.0, span=(-50.0, 50.0), sign=1.0, **kw):
    p = FLRWParams(k, Lambda, c, G, Dust(A))
    return integrate_scale_factor(p, 0.0, a0, sign * expanding_rate(p, a0), span, **kw)


def test_residuals_einstein_static():
    p = FLRWParams(1, 1.0, 1.0, 1.0)
    r = friedmann_residuals(p, 1.0, 0.0, 0.0, 1 / (4 * math.pi), 0.0)
    assert max(map(abs, r)) <= 1e-15


@given(st.floats(-3, 3))
@settings(max_examples=30, deadline=None)
def test_residuals_de_sitter_cosh(tau):
    a0 = 1.7
    p = FLRWParams(1, 3 / a0**2)
    a = a0 * math.cosh(tau / a0)
    r = friedmann_residuals(p, a, math.sinh(tau / a0), math.cosh(tau / a0) / a0, 0.0, 0.0)
    assert max(map(abs, r)) <= 1e-10


@given(st.floats(0.1, 5), st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 3), st.floats(-2, 2),
       st.sampled_from([-1, 0, 1]), st.floats(-2, 2), st.floats(0.5, 3), st.floats(0.5, 3))
@settings(max_examples=200, deadline=None)
def test_third_residual_is_combination(a, ad, add, rho, p, k, L, c, G):
    r1, r2, r3 = friedmann_residuals(FLRWParams(k, L, c, G), a, ad, add, rho, p)
    assert r3 == pytest.approx(r1 + 3 * r2, abs=1e-9 * (1 + abs(r1) + abs(r2)))


def test_residuals_reject_nonpositive_a():
    with pytest.raises(SingularStateError):
        friedmann_residuals(FLRWParams(1), 0.0, 1.0, 0.0, 1.0, 0.0)


def test_first_integral_einstein_static():
    a = 1.3
    p = FLRWParams(1, 1 / a**2, matter=Dust(2 * a / 3))
    assert first_integral(p, a, 0.0) == pytest.approx(2 * a / 3, rel=1e-15)
    assert dust_density(p, a) == pytest.approx(1 / (4 * math.pi * a**2), rel=1e-14)


def test_dust_density_examples():
    p = FLRWParams(1, matter=Dust(8 * math.pi / 3))
    assert dust_density(p, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert dust_density(p, 0.5) == pytest.approx(8 * dust_density(p, 1.0), rel=1e-15)
    with pytest.raises(SingularStateError):
        dust_density(p, 0.0)


def test_first_integral_velocity_blows_up_near_zero():
    p = FLRWParams(1, matter=Dust(1.0))
    for a in (1e-2, 1e-4, 1e-6):
        adot = math.sqrt(1 / a - 1)
        assert first_integral(p, a, adot) == pytest.approx(1.0, rel=1e-12)
        assert adot > 0.9 / math.sqrt(a)


def test_closed_dust_cycle_against_cycloid():
    A = 1.0
    traj = run(A=A, n_samples=801)
    bang = [e for e in traj.singularities() if e.da_dt > 0]
    crunch = [e for e in traj.singularities() if e.da_dt < 0]
    assert len(bang) == 1 and len(crunch) == 1
    # cycloid: a = (A/2)(1 - cos eta), ct = (A/2)(eta - sin eta) + const
    assert crunch[0].t - bang[0].t == pytest.approx(math.pi * A, rel=1e-9)
    (tp,) = traj.turning_points()
    assert tp.a == pytest.approx(A, rel=1e-6)
    assert tp.t - bang[0].t == pytest.approx(math.pi * A / 2, rel=1e-9)
    assert traj.first_integral_drift() <= 1e-8
    eta = np.linspace(0.3, 2 * math.pi - 0.3, 7)
    for e in eta:
        t = bang[0].t + 0.5 * A * (e - math.sin(e))
        assert traj.scale_factor(t)[0] == pytest.approx(0.5 * A * (1 - math.cos(e)), rel=1e-9)


def test_flat_dust_power_law():
    A, a0 = 2.0, 1.0
    K = (9 * A / 4) ** (1 / 3)
    tau0 = (a0 / K) ** 1.5
    p = FLRWParams(0, 0.0, 1.0, 1.0, Dust(A))
    traj = integrate_scale_factor(p, tau0, a0, expanding_rate(p, a0), (-5.0, 5.0))
    (bang,) = traj.singularities()
    assert bang.t == pytest.approx(0.0, abs=1e-9)
    for t in (0.1, 0.7, 3.0):
        assert traj.scale_factor(t)[0] == pytest.approx(K * t ** (2 / 3), rel=1e-9)
    assert recollapse_possible(p) == (False, "open or flat with Lambda >= 0")
    assert not traj.turning_points()


def test_age_bound_holds():
    for k, L in ((1, 0.0), (0, 0.0), (-1, 0.0), (0, -0.3), (1, -0.1)):
        traj = run(k=k, Lambda=L)
        holds, worst, n = age_bound_check(traj)
        assert holds and n > 0 and worst >= 0


def test_negative_lambda_recollapses():
    traj = run(k=0, Lambda=-0.1)
    assert len(traj.singularities()) == 2
    assert len(traj.turning_points()) == 1


@pytest.mark.parametrize("seed", range(20))
def test_strong_energy_deceleration(seed):
    r = np.random.default_rng(seed)
    k = int(r.choice([-1, 0, 1]))
    L = -r.uniform(0, 0.5) if seed % 2 else 0.0
    A = r.uniform(0.2, 3.0)
    a0 = r.uniform(0.05, 0.6) * A
    traj = run(k=k, Lambda=L, A=A, a0=a0, span=(-30.0, 30.0))
    assert np.all(traj.d2a_dt2 < 0)


def test_constraints_along_trajectory():
    for k, L in ((1, 0.0), (-1, 0.2), (0, -0.2)):
        traj = run(k=k, Lambda=L)
        p = traj.params
        for t, a, v, rho in zip(traj.t, traj.a, traj.da_dt, traj.rho):
            add = dust_acceleration(p, a)
            r1, r2, r3 = friedmann_residuals(p, a, v / p.c, add, rho, 0.0)
            scale = 3 * (v * v + abs(k)) / a**2 + abs(L) + 8 * math.pi * rho
            assert abs(r1) <= 1e-8 * scale
            assert abs(r3) <= 1e-9 * scale


def test_time_reversal_symmetry():
    fwd = run(k=1, A=1.0, a0=0.6)
    bwd = run(k=1, A=1.0, a0=0.6, sign=-1.0)
    lo = max(fwd.t_range[0], -bwd.t_range[1]) + 0.05
    hi = min(fwd.t_range[1], -bwd.t_range[0]) - 0.05
    for t in np.linspace(lo, hi, 15):
        a1, v1, _ = fwd.scale_factor(t)
        a2, v2, _ = bwd.scale_factor(-t)
        assert a2 == pytest.approx(a1, abs=1e-9)
        assert -v2 == pytest.approx(v1, abs=1e-9 * max(1.0, abs(v1)))


def test_inconsistent_initial_data_rejected():
    p = FLRWParams(1, 0.0, matter=Dust(1.0))
    with pytest.raises(InconsistentInitialDataError) as err:
        integrate_scale_factor(p, 0.0, 0.5, 2.0, (-1, 1))
    assert err.value.residual == pytest.approx(0.5 * (4 + 1) - 1.0)


def test_csv_export():
    traj = run(n_samples=21)
    text = traj.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "a", "da_dt", "rho", "event_flag"]
    flags = [r[4] for r in rows[1:]]
    assert flags.count("singularity") == 2 and flags.count("turning_point") == 1
    assert "\r" not in text
    t = [float(r[0]) for r in rows[1:]]
    assert t == sorted(t)
    assert float(rows[5][1]) == traj.rows()[4][1]  # 17 significant digits round-trip


def test_trajectory_lifted_to_metric_solves_field_equations(rng):
    for k, L in ((1, 0.0), (-1, 0.0), (0, -0.2)):
        entry = cat.friedman_dust(k=k, Lambda=L, A=1.5)
        for x in cat.sample_events(entry, 10, rng):
            assert efe_residual(entry.spec, L, entry.T, x).max_abs <= 1e-6


def test_curvature_index_classification():
    es = classify_curvature_index(1 / (4 * math.pi), 0.0, 1.0)
    assert es.sign == 1
    assert classify_curvature_index(0.0, 0.7, 0.0).sign == -1
    H0 = 0.7
    assert classify_curvature_index(critical_density(H0), H0, 0.0).sign == 0
    c, G = 3.0, 0.5
    rho_c = 3 * H0**2 / (8 * math.pi * G)
    assert classify_curvature_index(rho_c, H0, 0.0, c, G).sign == 0
    assert classify_curvature_index(1.1 * rho_c, H0, 0.0, c, G).sign == 1
    with pytest.raises(InvalidInputError):
        classify_curvature_index(-1.0, 1.0, 0.0)


def test_recollapse_conditions():
    assert recollapse_possible(FLRWParams(1, 0.0)) == (True, "closed")
    assert recollapse_possible(FLRWParams(0, -0.1)) == (True, "negative Lambda")
    assert recollapse_possible(FLRWParams(-1, 0.0))[0] is False


def test_invalid_params():
    with pytest.raises(InvalidInputError):
        FLRWParams(2)
    with pytest.raises(InvalidInputError):
        Dust(0.0)
    with pytest.raises(SingularStateError):
        integrate_scale_factor(FLRWParams(1), 0.0, 0.0, 1.0, (-1, 1))


def test_tabulated_de_sitter_constraint():
    a0 = 1.0
    p = FLRWParams(1, 3 / a0**2, matter=Tabulated(lambda t: 0.0, lambda t: 0.0))
    chk = integrate_tabulated(p, 0.0, a0, 0.0, (-2.0, 2.0))
    assert np.max(np.abs(chk.constraint)) <= 1e-9
    np.testing.assert_allclose(chk.a, a0 * np.cosh(chk.t / a0), rtol=1e-9)
    assert chk.halted is None
