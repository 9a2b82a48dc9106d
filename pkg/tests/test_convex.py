"""Resolvent solves, Yosida surrogates, and the pointwise power inequalities."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from fplab import (
    Field,
    ParameterError,
    ProxSpec,
    check_energy_comparison,
    check_stroock_varopoulos,
    field_resolvent,
    g_scalar,
    lp_norm,
    moreau_yosida_value,
    project_lr_ball,
    resolvent_seminorm_decrease,
    scalar_resolvent,
    stroock_varopoulos_constant,
    yosida_apply,
)
from fplab.convex import _energy_comparison_terms


def test_prox_spec_validation():
    for m, lam in ((1.5, 1.0), (2.0, 0.0), (2.0, -1.0), (math.inf, 1.0), (2.0, math.nan)):
        with pytest.raises(ParameterError):
            ProxSpec(m=m, lam=lam)


# -- resolvent ----------------------------------------------------------------


def test_resolvent_linear_case():
    # m = 2 reduces to v (1 + lam) = u
    spec = ProxSpec(m=2.0, lam=1.0)
    assert scalar_resolvent(2.0, spec) == pytest.approx(1.0, rel=1e-14)
    spec = ProxSpec(m=2.0, lam=0.25)
    assert scalar_resolvent(-3.0, spec) == pytest.approx(-2.4, rel=1e-14)


def test_resolvent_cubic_case():
    # v + v^3 = 2 has the root v = 1
    spec = ProxSpec(m=4.0, lam=1.0)
    assert scalar_resolvent(2.0, spec) == pytest.approx(1.0, rel=1e-13)


def test_resolvent_fixes_zero():
    for m in (2.0, 3.0, 4.5):
        for lam in (1e-3, 1.0, 1e3):
            assert scalar_resolvent(0.0, ProxSpec(m=m, lam=lam)) == 0.0


def test_resolvent_rejects_nonfinite():
    with pytest.raises(ParameterError):
        scalar_resolvent(math.inf, ProxSpec(m=2.0, lam=1.0))


def test_resolvent_residual_property(line16, rng):
    # the defining equation v + lam |v|^(m-2) v = u is the oracle
    for m in (2.0, 2.5, 3.0, 4.0, 6.0):
        for lam in (0.01, 1.0, 100.0):
            spec = ProxSpec(m=m, lam=lam)
            u = Field(line16, 10.0 * rng.standard_normal(16))
            v = field_resolvent(u, spec).values
            resid = v + lam * np.abs(v) ** (m - 2.0) * v - u.values
            assert np.all(np.abs(resid) <= 1e-12 * np.maximum(1.0, np.abs(u.values)))


def test_resolvent_against_brentq(rng):
    # independent scalar root find per node
    for m, lam in ((3.0, 0.5), (4.0, 2.0), (2.5, 10.0)):
        spec = ProxSpec(m=m, lam=lam)
        for u in 5.0 * rng.standard_normal(20):
            got = scalar_resolvent(float(u), spec)
            f = lambda v: v + lam * abs(v) ** (m - 2.0) * v - u
            lo, hi = min(0.0, u) - 1e-9, max(0.0, u) + 1e-9
            want = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-13)


def test_resolvent_contraction(line16, rng):
    # pointwise nonexpansive, hence contraction in every l^m norm
    spec = ProxSpec(m=3.0, lam=0.7)
    for _ in range(100):
        u = Field(line16, 4.0 * rng.standard_normal(16))
        v = Field(line16, 4.0 * rng.standard_normal(16))
        ju, jv = field_resolvent(u, spec), field_resolvent(v, spec)
        assert np.all(
            np.abs(ju.values - jv.values) <= np.abs(u.values - v.values) + 1e-12
        )
        gap_in = Field(line16, u.values - v.values)
        gap_out = Field(line16, ju.values - jv.values)
        for m in (1.0, 2.0, 3.0, math.inf):
            assert lp_norm(gap_out, m) <= lp_norm(gap_in, m) + 1e-12


# -- yosida -------------------------------------------------------------------


def test_yosida_matches_power_of_resolvent(line16, rng):
    # (u - J u)/lam = |J u|^(m-2) J u by the resolvent equation
    for m, lam in ((2.0, 1.0), (4.0, 0.1), (3.0, 5.0)):
        spec = ProxSpec(m=m, lam=lam)
        u = Field(line16, 3.0 * rng.standard_normal(16))
        a = yosida_apply(u, spec).values
        j = field_resolvent(u, spec).values
        want = np.abs(j) ** (m - 2.0) * j
        assert np.allclose(a, want, rtol=1e-10, atol=1e-12)


def test_yosida_linear_case(line16, rng):
    # m = 2: A_lam u = u / (1 + lam)
    spec = ProxSpec(m=2.0, lam=0.5)
    u = Field(line16, rng.standard_normal(16))
    assert np.allclose(
        yosida_apply(u, spec).values, u.values / 1.5, rtol=1e-13, atol=1e-15
    )


def test_yosida_lipschitz(line16, rng):
    # firm nonexpansiveness of the resolvent gives the 1/lam bound
    lam = 0.3
    spec = ProxSpec(m=4.0, lam=lam)
    for _ in range(50):
        u = Field(line16, 3.0 * rng.standard_normal(16))
        v = Field(line16, 3.0 * rng.standard_normal(16))
        da = np.abs(yosida_apply(u, spec).values - yosida_apply(v, spec).values)
        du = np.abs(u.values - v.values)
        assert np.all(da <= du / lam * (1.0 + 1e-12) + 1e-12)


# -- moreau envelope ----------------------------------------------------------


def _theta(values, m, vol):
    return float((np.abs(values) ** m).sum() * vol) / m


def test_moreau_sandwich(line16, rng):
    m = 4.0
    vol = line16.cell_volume
    for lam in (1.0, 0.1, 0.01):
        spec = ProxSpec(m=m, lam=lam)
        u = Field(line16, 2.0 * rng.standard_normal(16))
        j = field_resolvent(u, spec)
        env = moreau_yosida_value(u, spec)
        assert env >= _theta(j.values, m, vol) - 1e-12
        assert env <= _theta(u.values, m, vol) + 1e-12


def test_moreau_lambda_ladder(line16, rng):
    # the envelope increases toward Theta(u) as lam decreases
    m = 3.0
    u = Field(line16, 2.0 * rng.standard_normal(16))
    envs = [
        moreau_yosida_value(u, ProxSpec(m=m, lam=lam)) for lam in (1.0, 0.1, 0.01)
    ]
    assert envs[0] <= envs[1] <= envs[2]
    theta = _theta(u.values, m, line16.cell_volume)
    assert envs[2] <= theta + 1e-12
    tight = moreau_yosida_value(u, ProxSpec(m=m, lam=1e-6))
    assert abs(tight - theta) <= 1e-3 * max(1.0, theta)


def test_moreau_custom_functional(line16, rng):
    # a zero functional leaves only the quadratic gap term
    spec = ProxSpec(m=4.0, lam=0.5)
    u = Field(line16, rng.standard_normal(16))
    j = field_resolvent(u, spec)
    gap = Field(line16, u.values - j.values)
    want = lp_norm(gap, 2.0) ** 2 / (2.0 * spec.lam)
    got = moreau_yosida_value(u, spec, functional=lambda v: 0.0)
    assert got == pytest.approx(want, rel=1e-13, abs=1e-15)


# -- pointwise inequality -----------------------------------------------------


def test_sv_constant_values():
    assert stroock_varopoulos_constant(2.0, 2.0) == 1.0
    assert stroock_varopoulos_constant(4.0, 2.0) == pytest.approx(0.75)
    assert stroock_varopoulos_constant(3.0, 2.0) == pytest.approx(8.0 / 9.0)
    with pytest.raises(ParameterError):
        stroock_varopoulos_constant(1.5, 2.0)
    with pytest.raises(ParameterError):
        stroock_varopoulos_constant(2.0, 1.0)


def test_g_scalar_known_values():
    assert g_scalar(1.0, 0.0, 2.0, 2.0) == pytest.approx(0.0, abs=1e-15)
    # first term 2 * 2^3 = 16, second 0.75 * 4^2 = 12
    assert g_scalar(2.0, 0.0, 2.0, 4.0) == pytest.approx(4.0, rel=1e-13)
    assert g_scalar(1.0, 0.0, 2.0, 4.0) == pytest.approx(0.25, rel=1e-13)


def test_g_scalar_diagonal_exact_zero():
    for z in (-3.0, 0.0, 1e-8, 7.5):
        for p, r in ((2.0, 2.0), (3.0, 4.0), (2.5, 6.0)):
            assert g_scalar(z, z, p, r) == 0.0


def test_g_scalar_axis_closed_form(rng):
    # g(z, 0) = (1 - C_{r,p}) |z|^(p+r-2)
    for p, r in ((2.0, 3.0), (3.0, 4.0), (6.0, 2.5)):
        c = stroock_varopoulos_constant(r, p)
        for z in (0.5, -2.0, 4.0):
            want = (1.0 - c) * abs(z) ** (p + r - 2.0)
            assert g_scalar(z, 0.0, p, r) == pytest.approx(want, rel=1e-12, abs=1e-15)


def test_g_scalar_symmetries(rng):
    zs = 10.0 * rng.standard_normal(50)
    ts = 10.0 * rng.standard_normal(50)
    for p, r in ((2.0, 4.0), (3.0, 3.0)):
        a = g_scalar(zs, ts, p, r)
        assert np.array_equal(g_scalar(-zs, -ts, p, r), a)
        assert np.array_equal(g_scalar(ts, zs, p, r), a)


def test_g_scalar_broadcasts():
    z = np.array([1.0, 2.0, 3.0])
    out = g_scalar(z, 0.0, 2.0, 4.0)
    assert out.shape == (3,)
    assert out[1] == pytest.approx(4.0, rel=1e-13)


def test_check_stroock_report(rng):
    rep = check_stroock_varopoulos(2000, seed=5)
    assert rep.ok
    assert rep.pairs_checked == 25
    assert rep.min_margin <= 0.0  # the diagonal attains equality exactly
    assert rep.min_margin >= -1e-12 * max(rep.scale, 1.0)
    assert rep.scale > 0.0
    again = check_stroock_varopoulos(2000, seed=5)
    assert again == rep


def test_check_stroock_custom_grid():
    rep = check_stroock_varopoulos(100, exponent_grid=[(2.0, 4.0)], seed=1)
    assert rep.pairs_checked == 1
    assert rep.worst_exponents == (2.0, 4.0)
    assert rep.ok


def test_check_stroock_validation():
    with pytest.raises(ParameterError):
        check_stroock_varopoulos(0)


# -- energy comparison --------------------------------------------------------


def test_energy_comparison_r2_exactly_zero(ctx16, line16, rng):
    u = Field(line16, rng.standard_normal(16))
    assert check_energy_comparison(u, None, 2.0, 2.0, ctx16) == 0.0
    kernel = np.ones((16, 16))
    assert check_energy_comparison(u, kernel, 2.0, 2.0, ctx16) == 0.0


def test_energy_comparison_default_kernel(ctx16, line16, rng):
    for r in (2.5, 3.0, 4.0):
        for _ in range(20):
            u = Field(line16, 2.0 * rng.standard_normal(16))
            lhs, rhs = _energy_comparison_terms(u, None, 2.0, r, ctx16)
            margin = check_energy_comparison(u, None, 2.0, r, ctx16)
            assert margin >= -1e-10 * max(1.0, abs(lhs), abs(rhs))


def test_energy_comparison_random_tables(ctx16, line16, rng):
    for p in (2.0, 2.5, 3.0):
        for r in (2.0, 3.0, 4.0):
            for _ in range(10):
                raw = rng.uniform(0.1, 3.0, size=(16, 16))
                kernel = 0.5 * (raw + raw.T)
                u = Field(line16, 3.0 * rng.standard_normal(16))
                lhs, rhs = _energy_comparison_terms(u, kernel, p, r, ctx16)
                margin = check_energy_comparison(u, kernel, p, r, ctx16)
                assert margin >= -1e-10 * max(1.0, abs(lhs), abs(rhs))


def test_energy_comparison_p_mismatch(ctx16, line16, rng):
    u = Field(line16, rng.standard_normal(16))
    with pytest.raises(ParameterError):
        check_energy_comparison(u, None, 3.0, 2.0, ctx16)


def test_energy_comparison_kernel_not_mutated(ctx16, line16, rng):
    raw = rng.uniform(0.5, 2.0, size=(16, 16))
    kernel = 0.5 * (raw + raw.T)
    np.fill_diagonal(kernel, 5.0)
    saved = kernel.copy()
    u = Field(line16, rng.standard_normal(16))
    check_energy_comparison(u, kernel, 2.0, 3.0, ctx16)
    assert np.array_equal(kernel, saved)


def test_resolvent_seminorm_decrease(ctx16, line16, rng):
    for lam in (0.1, 1.0):
        spec = ProxSpec(m=3.0, lam=lam)
        for _ in range(20):
            u = Field(line16, 2.0 * rng.standard_normal(16))
            drop = resolvent_seminorm_decrease(u, spec, ctx16)
            assert drop >= -1e-10


# -- truncation ---------------------------------------------------------------


def test_project_inside_is_identity(line16):
    u = Field(line16, 1e-3 * np.ones(16))
    out = project_lr_ball(u, 10.0, 3.0)
    assert out is u


def test_project_outside_lands_on_sphere(line16, rng):
    r, sigma = 3.0, 0.01
    u = Field(line16, 5.0 + rng.standard_normal(16))
    out = project_lr_ball(u, sigma, r)
    assert lp_norm(out, r) ** r / r == pytest.approx(sigma, rel=1e-12)
    # radial: direction preserved
    ratio = out.values / u.values
    assert np.allclose(ratio, ratio[0], rtol=1e-12)


def test_project_monotone_in_sigma(line16, rng):
    u = Field(line16, 5.0 + rng.standard_normal(16))
    r = 2.0
    norms = [
        lp_norm(project_lr_ball(u, sigma, r), r) for sigma in (0.01, 0.1, 1.0)
    ]
    assert norms[0] <= norms[1] <= norms[2]


def test_project_validation(line16):
    u = Field(line16, np.ones(16))
    with pytest.raises(ParameterError):
        project_lr_ball(u, 0.0, 2.0)
    with pytest.raises(ParameterError):
        project_lr_ball(u, 1.0, 0.5)
