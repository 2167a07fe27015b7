import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tangentpoint.bounds import (
    FLAGS,
    classify_region,
    f_slice_bound,
    g_slice_bound,
    gamma_fn,
    sigma_mu,
    sin_power_integral,
    tp_lower_bound,
    willmore_lower_bound,
)

from conftest import sin_power_oracle


# gamma_fn


def test_gamma_one():
    assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-15, abs=0)


def test_gamma_half_is_sqrt_pi():
    assert abs(gamma_fn(0.5) - math.sqrt(math.pi)) <= 1e-12 * math.sqrt(math.pi)


def test_gamma_matches_libm_on_range():
    # oracle: C library lgamma/tgamma via math.gamma
    xs = np.concatenate([np.linspace(1e-3, 50.0, 4001), [50.0]])
    err = max(abs(gamma_fn(x) / math.gamma(x) - 1.0) for x in xs)
    assert err <= 1e-12


def test_gamma_recurrence(rng):
    for x in rng.uniform(0.1, 20.0, 200):
        assert abs(gamma_fn(x + 1.0) / (x * gamma_fn(x)) - 1.0) <= 1e-12


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_gamma_rejects_nonpositive(x):
    with pytest.raises(ValueError):
        gamma_fn(x)


# sin_power_integral


def test_sin_power_zero_is_one():
    assert sin_power_integral(0.0) == pytest.approx(1.0, rel=1e-14)


def test_sin_power_one_is_two_over_pi():
    assert abs(sin_power_integral(1.0) - 2.0 / math.pi) <= 1e-10
    assert abs(sin_power_integral(1.0) - sin_power_oracle(1.0)) <= 1e-10


@pytest.mark.parametrize("a", [-0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0])
def test_sin_power_matches_endpoint_weighted_quadrature(a):
    assert sin_power_integral(a) == pytest.approx(sin_power_oracle(a), rel=1e-8)


def test_sin_power_minus_half_closed_form():
    # Gamma(1/4) / (sqrt(pi) Gamma(3/4)) by the C library
    expected = math.gamma(0.25) / (math.sqrt(math.pi) * math.gamma(0.75))
    assert sin_power_integral(-0.5) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("a", [-1.0, -1.5])
def test_sin_power_divergent(a):
    with pytest.raises(ValueError):
        sin_power_integral(a)


# tp_lower_bound


@pytest.mark.parametrize(
    "L,p,q,expected",
    [
        (1.0, 4.0, 2.0, math.pi**2),
        (1.0, 3.0, 2.0, 2.0),
        (2.0, 3.0, 2.0, 4.0),
        (1.0, 2.0, 1.0, math.pi),
    ],
)
def test_tp_lower_bound_values(L, p, q, expected):
    b = tp_lower_bound(L, p, q)
    assert b.value == pytest.approx(expected, rel=1e-13)
    assert b.formula == "tp_sharp"
    assert float(b) == b.value


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 3.0, 4.0])
def test_tp_lower_bound_geometric_case_is_pi_power(q):
    assert tp_lower_bound(1.0, 2.0 * q, q).value == pytest.approx(math.pi**q, rel=1e-13)


@pytest.mark.parametrize("p,q", [(5.0, 2.0), (5.5, 2.0), (7.0, 3.0)])
def test_tp_lower_bound_divergent_exponent(p, q):
    with pytest.raises(ValueError):
        tp_lower_bound(1.0, p, q)


def test_tp_lower_bound_rejects_bad_length():
    with pytest.raises(ValueError):
        tp_lower_bound(0.0, 4.0, 2.0)


@settings(max_examples=60, deadline=None)
@given(q=st.floats(1.0, 4.0), frac=st.floats(0.0, 0.999), L=st.floats(0.1, 10.0))
def test_tp_lower_bound_positive_and_homogeneous(q, frac, L):
    p = q + 1.0 + frac * q
    b1 = tp_lower_bound(1.0, p, q).value
    bL = tp_lower_bound(L, p, q).value
    assert b1 > 0
    assert bL == pytest.approx(L ** (q + 2.0 - p) * b1, rel=1e-12)


def test_tp_lower_bound_continuous_in_p():
    ps = np.linspace(3.0, 4.95, 400)
    vals = np.array([tp_lower_bound(1.0, p, 2.0).value for p in ps])
    assert np.all(np.abs(np.diff(np.log(vals))) < 0.1)


# willmore_lower_bound


def test_willmore_bound_unit_length():
    expected = math.pi**1.5 * sin_power_oracle(-0.5)
    assert willmore_lower_bound(1.0, 0.5, 1.0).value == pytest.approx(expected, rel=1e-10)


def test_willmore_bound_power_two_is_square():
    b1 = willmore_lower_bound(1.0, 0.5, 1.0).value
    assert willmore_lower_bound(1.0, 0.5, 2.0).value == pytest.approx(b1**2, rel=1e-14)


def test_willmore_bound_length_factor():
    b1 = willmore_lower_bound(1.0, 0.5, 1.0).value
    assert willmore_lower_bound(4.0, 0.5, 1.0).value == pytest.approx(2.0 * b1, rel=1e-14)


@pytest.mark.parametrize("L,s,p", [(1.0, 0.0, 1.0), (1.0, 1.0, 1.0), (1.0, 0.5, 0.5), (0.0, 0.5, 1.0)])
def test_willmore_bound_rejects(L, s, p):
    with pytest.raises(ValueError):
        willmore_lower_bound(L, s, p)


# slice bounds


def test_g_slice_bound_midpoint():
    assert g_slice_bound(4.5, 2.0, 0.5).value == pytest.approx(math.pi**2.5, rel=1e-14)


def test_f_slice_bound_matches_tp_bound_at_lower_limit():
    for q in (1.5, 2.0, 3.0):
        assert f_slice_bound(q).value == pytest.approx(tp_lower_bound(1.0, q + 1.0, q).value, rel=1e-13)


# classify_region


@pytest.mark.parametrize(
    "p,q,expected",
    [
        (4.0, 2.0, {"repulsive", "bound_valid_all"}),
        (3.0, 2.0, {"lower_limit", "bound_valid_all"}),
        (4.8, 2.0, {"repulsive", "bound_valid_all", "bound_valid_convex_only"}),
        (3.5, 2.0, {"mildly_repulsive", "bound_valid_all"}),
        (5.0, 2.0, {"infinite_energy"}),
        (5.5, 2.0, {"infinite_energy"}),
        (2.5, 2.0, {"no_minimizer"}),
    ],
)
def test_classify_region_examples(p, q, expected):
    assert set(classify_region(p, q).flags) == expected


def test_classify_region_flags_known():
    for p in np.linspace(0.0, 9.0, 37):
        for q in (1.0, 1.5, 2.0, 3.0):
            assert set(classify_region(p, q).flags) <= set(FLAGS)


@pytest.mark.parametrize("q", [1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0])
def test_classify_region_consistency(q):
    for p in np.linspace(0.0, 2.0 * q + 2.0, 201):
        r = classify_region(p, q)
        assert not ("bound_valid_all" in r and "no_minimizer" in r)
        assert not ("lower_limit" in r and "mildly_repulsive" in r)
        assert not ("infinite_energy" in r and "bound_valid_all" in r)
        assert ("lower_limit" in r) == (abs(p - (q + 1.0)) <= 1e-12)


def test_classify_region_boundary_tolerance():
    assert "lower_limit" in classify_region(3.0 + 5e-13, 2.0)
    assert "lower_limit" not in classify_region(3.0 + 1e-9, 2.0)


def test_classify_region_sorted_flags_order():
    r = classify_region(4.8, 2.0)
    assert r.sorted_flags() == [f for f in FLAGS if f in r.flags]


# sigma_mu


def test_sigma_mu_lower_limit():
    s, m = sigma_mu(3.0, 2.0)
    assert s == pytest.approx(1.0, abs=1e-15)
    assert m == pytest.approx(0.0, abs=1e-15)


def test_sigma_mu_sum(rng):
    for p, q in zip(rng.uniform(1.0, 6.0, 100), rng.uniform(1.0, 3.0, 100)):
        if abs(2.0 * q - p + 1.0) < 1e-3:
            continue
        s, m = sigma_mu(p, q)
        assert s + m == pytest.approx(2.0 * q - p, abs=1e-12 * max(1.0, p, q))


@pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
def test_sigma_mu_signs_between_lower_limit_and_geometric_case(q):
    for p in np.linspace(q + 1.0, 2.0 * q, 12)[1:-1]:
        s, m = sigma_mu(p, q)
        assert s > 0 and m < 0


def test_sigma_mu_degenerate():
    with pytest.raises(ValueError):
        sigma_mu(5.0, 2.0)
