import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwdefect.analytic import Branch, DecayClass, build_solution, phase_grid
from qwdefect.errors import DivergentSeriesError, DomainError
from qwdefect.sgf import (
    Chirality,
    Side,
    build_system,
    det_A,
    det_A_quadratic,
    det_A_roots,
    lemma1_applicable,
    lemma1_residual,
    lemma1_tail_constant,
    truncated_series,
    unit_circle_points,
)

S2 = math.sqrt(2.0)
unit_z = st.floats(-math.pi, math.pi).map(lambda t: cmath.exp(1j * t))
decaying_phase = st.floats(0.3, 0.7)


def test_system_at_unit_point():
    sys = build_system(1, 1, 1j, 1, 1)
    np.testing.assert_allclose(sys.a_matrix, [[1 - 1 / S2, -1 / S2], [-1 / S2, 1 + 1 / S2]], atol=1e-15)
    assert det_A(sys) == pytest.approx(0, abs=1e-15)
    np.testing.assert_allclose(sys.rhs_plus, [-1, 0], atol=1e-15)
    np.testing.assert_allclose(sys.rhs_minus, [1j * 2 / S2, -1], atol=1e-15)


def test_system_rejects_zero_point():
    with pytest.raises(DomainError):
        build_system(0, 1, 1, 1, 1j)


@given(unit_z, st.floats(-math.pi, math.pi), st.floats(0.5, 2.0))
def test_det_factorization(z0, t, r):
    z = r * z0
    lam = cmath.exp(1j * t)
    d = det_A(build_system(z, lam, 1j, 1, 1j))
    assert abs(d - lam / (S2 * z) * det_A_quadratic(z, lam)) <= 1e-12 * max(1.0, abs(d))


def test_roots_for_lambda_i():
    lo, hi = det_A_roots(1j)
    assert abs(lo - 1j * (1 - S2)) <= 1e-15
    assert abs(hi + 1j * (1 + S2)) <= 1e-14


@given(st.floats(-math.pi, math.pi))
def test_roots_product_and_order(t):
    lam = cmath.exp(1j * t)
    lo, hi = det_A_roots(lam)
    assert abs(lo * hi + 1) <= 1e-12
    assert abs(lo) <= abs(hi) + 1e-12
    for r in (lo, hi):
        assert abs(det_A_quadratic(r, lam)) <= 1e-12 * max(1.0, abs(r) ** 2)


def test_roots_reject_off_circle_lambda():
    with pytest.raises(DomainError):
        det_A_roots(2)


def test_theta_s_is_a_root_on_grid():
    for phi in phase_grid(97):
        for branch in Branch:
            sol = build_solution(phi, branch)
            sys = build_system(sol.theta_s, sol.lambda_, sol.omega, sol.alpha, sol.beta)
            assert abs(det_A(sys)) <= 1e-12
            lo, hi = det_A_roots(sol.lambda_)
            assert min(abs(sol.theta_s - lo), abs(sol.theta_s - hi)) <= 1e-12 * max(1, abs(sol.theta_s))


# ---------------------------------------------------------------- series


def test_single_term_series():
    sol = build_solution(0.25, Branch.MINUS_I)
    z = cmath.exp(0.4j)
    v = (1 - sol.omega) * sol.alpha + sol.omega * sol.beta
    assert truncated_series(sol, Side.PLUS, Chirality.L, z, 1) == pytest.approx(-sol.theta_s * sol.alpha * z)
    assert truncated_series(sol, Side.PLUS, Chirality.R, z, 1) == pytest.approx(-sol.theta_s * v * z)
    assert truncated_series(sol, Side.MINUS, Chirality.R, z, 1) == pytest.approx(sol.theta_s * sol.beta / z)


@given(decaying_phase, unit_z)
def test_series_closed_forms(phi, z):
    sol = build_solution(phi, Branch.MINUS_I)
    th, w, a, b = sol.theta_s, sol.omega, sol.alpha, sol.beta
    v = (1 - w) * a + w * b
    u = w * a + (w - 1) * b
    closed = {
        (Side.PLUS, Chirality.L): -a * th * z / (1 + th * z),
        (Side.PLUS, Chirality.R): -v * th * z / (1 + th * z),
        (Side.MINUS, Chirality.L): u * th / (z - th),
        (Side.MINUS, Chirality.R): b * th / (z - th),
    }
    for (side, ch), expected in closed.items():
        got = truncated_series(sol, side, ch, z, 400)
        assert abs(got - expected) <= 1e-12 * max(1.0, abs(expected))


def test_series_divergent_for_growing_solution():
    sol = build_solution(0.125, Branch.PLUS_I)
    assert sol.decay_class is DecayClass.GROWING
    with pytest.raises(DivergentSeriesError):
        truncated_series(sol, Side.PLUS, Chirality.L, 1, 10)
    with pytest.raises(DivergentSeriesError):
        lemma1_residual(sol, 1)


def test_series_needs_a_term():
    with pytest.raises(DomainError):
        truncated_series(build_solution(0.5, Branch.PLUS_I), Side.PLUS, Chirality.L, 1, 0)


# ---------------------------------------------------------------- residual


def test_lemma1_quarter_minus():
    sol = build_solution(0.25, Branch.MINUS_I)
    res = lemma1_residual(sol, cmath.exp(1j * math.pi / 3), 200)
    assert max(res) <= 1e-10


def test_lemma1_empty_sum_baseline():
    sol = build_solution(0.25, Branch.MINUS_I)
    z = cmath.exp(1j * math.pi / 3)
    sys = build_system(z, sol.lambda_, sol.omega, sol.alpha, sol.beta)
    res = lemma1_residual(sol, z, 0)
    assert res.plus == pytest.approx(np.max(np.abs(sys.rhs_plus)))
    assert res.minus == pytest.approx(np.max(np.abs(sys.rhs_minus)))


def test_lemma1_residual_shrinks_with_terms():
    sol = build_solution(0.6, Branch.PLUS_I)
    z = cmath.exp(0.7j)
    prev = math.inf
    for n in (1, 2, 4, 8, 16, 32):
        r = max(lemma1_residual(sol, z, n))
        assert r < prev
        prev = r


@given(decaying_phase, unit_z, st.integers(1, 60))
def test_lemma1_within_tail_bound(phi, z, n):
    sol = build_solution(phi, Branch.MINUS_I)
    bound = lemma1_tail_constant(sol, z) * sol.theta_s_abs_sq ** (n / 2)
    # rounding floor: a few ulps of the O(1) right-hand side
    assert max(lemma1_residual(sol, z, n)) <= bound * (1 + 1e-9) + 1e-14


def test_applicability_follows_class():
    assert lemma1_applicable(build_solution(0.25, Branch.MINUS_I))
    assert not lemma1_applicable(build_solution(0.25, Branch.PLUS_I))
    assert not lemma1_applicable(build_solution(0.125, Branch.PLUS_I))


def test_unit_circle_points():
    pts = unit_circle_points(build_solution(0.25, Branch.MINUS_I))
    assert len(pts) == 8
    assert pts[2] == pytest.approx(1j)
    assert all(abs(abs(z) - 1) <= 1e-15 for z in pts)
