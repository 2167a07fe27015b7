import math

import numpy as np
import pytest
from scipy import integrate

from tangentpoint.bounds import sin_power_integral
from tangentpoint.quadrature import (
    ConvergenceStudy,
    QuadratureSpec,
    convergence_study,
    graded_nodes,
    graded_rule,
    jacobi_rule,
    parse_quad,
    periodic_trapezoid,
    select_w_rule,
    summarize_levels,
)

from conftest import sin_power_oracle


def beta(a, b):
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


# QuadratureSpec


def test_spec_defaults():
    s = QuadratureSpec()
    assert (s.N_u, s.N_w, s.grading_exponent, s.doubling_rounds, s.convergence_rtol) == (256, 256, 4.0, 3, 1e-6)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"N_u": 8},
        {"N_w": 15},
        {"N_w": 33},
        {"grading_exponent": 0.5},
        {"grading_exponent": 9.0},
        {"doubling_rounds": 0},
        {"convergence_rtol": 0.0},
        {"rule": "magic"},
    ],
)
def test_spec_rejects(kwargs):
    with pytest.raises(ValueError):
        QuadratureSpec(**kwargs)


def test_parse_quad():
    s = parse_quad("128,64,3")
    assert (s.N_u, s.N_w, s.grading_exponent) == (128, 64, 3.0)
    assert parse_quad("64,32").grading_exponent == QuadratureSpec().grading_exponent
    with pytest.raises(ValueError):
        parse_quad("64")


# graded_nodes


def test_graded_exponent_one_is_midpoint():
    nodes, weights = graded_nodes(64, 1.0)
    np.testing.assert_array_equal(nodes, (np.arange(64) + 0.5) / 64)
    np.testing.assert_allclose(weights, np.full(64, 1 / 64), rtol=0, atol=1e-17)


@pytest.mark.parametrize("g", [1.0, 2.0, 4.0, 6.0, 8.0])
@pytest.mark.parametrize("N", [16, 256, 512])
def test_graded_weights_positive_symmetric_normalized(g, N):
    r = graded_rule(N, g)
    assert np.all(r.weights > 0)
    assert abs(r.weights.sum() - 1.0) <= 1e-12
    np.testing.assert_allclose(r.nodes, r.complements[::-1], rtol=0, atol=1e-16)
    np.testing.assert_allclose(r.weights, r.weights[::-1], rtol=1e-13)
    assert np.all((r.nodes > 0) & (r.complements > 0))


def test_graded_beta_half_half():
    # Beta(1/2, 1/2) = pi; grading 5 meets 1e-6 at N = 256 (grading 4 reaches 5e-6)
    r = graded_rule(256, 5.0)
    val = r.weights @ (r.nodes * r.complements) ** -0.5
    assert abs(val - math.pi) <= 1e-6


def test_graded_sin_power_minus_half():
    r = graded_rule(256, 5.0)
    val = r.weights @ np.sin(np.pi * r.nodes) ** -0.5
    assert abs(val - sin_power_integral(-0.5)) <= 1e-6


def test_graded_matches_uniform_for_smooth_integrand():
    # equal endpoint derivatives keep the uniform midpoint rule beyond second order
    f = lambda w: np.exp(np.cos(2 * np.pi * w)) + w**2 * (1 - w) ** 2
    u_nodes, u_w = graded_nodes(512, 1.0)
    g_nodes, g_w = graded_nodes(512, 4.0)
    assert abs(u_w @ f(u_nodes) - g_w @ f(g_nodes)) <= 1e-8


def test_graded_rejects_odd_or_small_exponent():
    with pytest.raises(ValueError):
        graded_nodes(15, 2.0)
    with pytest.raises(ValueError):
        graded_nodes(16, 0.9)


def test_offsets_map_near_one_to_negative_shift():
    r = graded_rule(64, 4.0)
    off = r.offsets
    assert np.all(np.abs(off) <= 0.5)
    np.testing.assert_array_equal(off[r.nodes > 0.5], -r.complements[r.nodes > 0.5])


# jacobi_rule


@pytest.mark.parametrize("a", [-0.9, -0.5, -0.2, 0.0, 0.5, 1.0])
@pytest.mark.parametrize("N", [16, 64, 256, 512])
def test_jacobi_integrates_beta_moment(a, N):
    r = jacobi_rule(N, a)
    val = r.weights @ (r.nodes * r.complements) ** a
    assert val == pytest.approx(beta(a + 1, a + 1), rel=1e-13)


@pytest.mark.parametrize("a", [-0.9, -0.5, 0.5])
def test_jacobi_against_quadpack(a):
    # oracle: QUADPACK with algebraic weights
    smooth = lambda w: math.exp(w) * math.cos(3 * w)
    ref, _ = integrate.quad(smooth, 0, 1, weight="alg", wvar=(a, a), epsabs=0, epsrel=1e-13)
    r = jacobi_rule(128, a)
    val = r.weights @ ((r.nodes * r.complements) ** a * np.exp(r.nodes) * np.cos(3 * r.nodes))
    assert val == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("a", [-0.9, -0.5, 0.0, 1.0, 3.0])
def test_jacobi_sin_power(a):
    r = jacobi_rule(256, a)
    # sample through the exact distance to the nearer endpoint
    near = np.minimum(r.nodes, r.complements)
    assert r.weights @ np.sin(np.pi * near) ** a == pytest.approx(sin_power_oracle(a), rel=1e-12)


def test_jacobi_node_complements_exact():
    r = jacobi_rule(64, -0.9)
    np.testing.assert_array_equal(r.nodes, r.complements[::-1])
    assert np.all(r.nodes > 0) and np.all(r.complements > 0)


def test_jacobi_rejects_divergent_exponent():
    with pytest.raises(ValueError):
        jacobi_rule(64, -1.0)


def test_select_w_rule():
    auto = QuadratureSpec()
    assert select_w_rule(auto, 64, -0.5).kind == "jacobi"
    assert select_w_rule(auto, 64, None).kind == "graded"
    assert select_w_rule(auto, 64, -1.2).kind == "graded"
    assert select_w_rule(QuadratureSpec(rule="graded"), 64, -0.5).kind == "graded"


# periodic_trapezoid


def test_trapezoid_constant():
    assert periodic_trapezoid(np.ones(10)) == 1.0


@pytest.mark.parametrize("N", [4, 8, 16, 100])
def test_trapezoid_cosine_vanishes(N):
    u = np.arange(N) / N
    assert abs(periodic_trapezoid(np.cos(2 * np.pi * u))) <= 1e-14


def test_trapezoid_sin_squared():
    u = np.arange(8) / 8
    assert abs(periodic_trapezoid(np.sin(2 * np.pi * u) ** 2) - 0.5) <= 1e-14


def test_trapezoid_empty():
    with pytest.raises(ValueError):
        periodic_trapezoid([])


# convergence_study


def midpoint_sum(f):
    return lambda n: float(np.mean(f((np.arange(n) + 0.5) / n)))


def test_study_second_order_rule():
    spec = QuadratureSpec(N_w=16, doubling_rounds=3, convergence_rtol=1e-3)
    st = convergence_study(midpoint_sum(lambda x: x**3), spec)
    assert st.sizes == [16, 32, 64, 128]
    assert st.observed_order == pytest.approx(2.0, abs=0.05)
    assert st.converged
    # Richardson removes the leading error term
    assert abs(st.richardson_estimate - 0.25) < abs(st.values[-1] - 0.25) / 100


def test_study_exact_evaluator_has_infinite_order():
    st = convergence_study(lambda n: 2.5, QuadratureSpec())
    assert st.converged and st.observed_order == math.inf and st.error_estimate == 0.0


def test_study_flags_divergent_sequence():
    st = convergence_study(lambda n: n**0.2, QuadratureSpec(N_w=32))
    assert not st.converged
    assert all(b > a for a, b in zip(st.values, st.values[1:]))


def test_summarize_levels_contract():
    st = summarize_levels([1.0, 1.0 + 1e-3, 1.0 + 1e-3 + 1e-7], [16, 32, 64], 1e-6)
    assert isinstance(st, ConvergenceStudy)
    assert st.converged
    assert st.error_estimate == pytest.approx(1e-7, rel=1e-6)
    assert not summarize_levels([1.0, 2.0], [16, 32], 1e-6).converged
