"""Sharp constants: spec examples, cross-identities and regime tagging."""

import math

import numpy as np
import pytest

from chordlab.constants import (
    AlphaParam,
    Regime,
    SharpConstants,
    alpha_sigma,
    ball_chord_power,
    e1_ball,
    en1_ball,
    exp_integral_tail,
    omega,
    sigma,
    sigma0,
    sigma_bar0,
    sigma_bar0_fd,
    sigma_bar0_report,
    sigma_tilde,
    theta_constant_c,
)
from chordlab.specials import EULER_GAMMA


def test_omega_examples():
    assert omega(2) == pytest.approx(math.pi, rel=1e-14)
    assert omega(3) == pytest.approx(4 * math.pi / 3, rel=1e-14)
    assert omega(1) == pytest.approx(2.0, rel=1e-14)


def test_sigma_at_alpha_equals_n():
    for n in range(1, 9):
        assert abs(sigma(n, float(n)) - 1.0) < 1e-12


def test_sigma_2_1_value():
    assert sigma(2, 1.0) == pytest.approx(16.0 / (3.0 * math.sqrt(math.pi)), rel=1e-12)


def test_sigma_3_1_internal_consistency():
    # sigma = n I_{a+1}(B^n) / (a (a+1) w_n^{a/n})
    n, a = 3, 1.0
    rhs = n * ball_chord_power(n, a) / (a * (a + 1) * omega(n) ** (a / n))
    assert sigma(n, a) == pytest.approx(rhs, rel=1e-12)


def test_sigma_rejects_bad_alpha():
    with pytest.raises(ValueError):
        sigma(2, 0.0)
    with pytest.raises(ValueError):
        sigma(2, -1.0)
    with pytest.raises(ValueError):
        sigma(2, -1.5)


def test_ball_chord_power_examples():
    assert ball_chord_power(2, 0.0) == pytest.approx(math.pi, rel=1e-13)
    assert ball_chord_power(2, 2.0) == pytest.approx(3 * math.pi, rel=1e-13)
    assert ball_chord_power(2, 1.0) == pytest.approx(16.0 / 3.0, rel=1e-12)
    # Poincare-Hadwiger in any n: I_{n+1}(B^n) = (n+1)/w_n |B^n|^2
    for n in range(1, 7):
        assert ball_chord_power(n, float(n)) == pytest.approx(
            (n + 1) * omega(n), rel=1e-12)
    # Crofton: I_1(B^n) = |B^n|
    for n in range(1, 7):
        assert ball_chord_power(n, 0.0) == pytest.approx(omega(n), rel=1e-12)


def test_sigma_relations_grid():
    # sigma * a(a+1) w^{a/n} / n = I_{a+1}(B^n), and the sigma~ identity
    for n in (1, 2, 3, 4, 5, 6):
        for a in np.linspace(0.1, n - 0.1, 7):
            lhs = sigma(n, a) * a * (a + 1) * omega(n) ** (a / n) / n
            assert lhs == pytest.approx(ball_chord_power(n, a), rel=1e-12)
    for n in (2, 3):
        for a in (-0.7, -0.3, 0.4, 1.7, n + 0.5, n + 2.0):
            assert sigma_tilde(n, a) * omega(n) ** ((n + a) / n) == pytest.approx(
                ball_chord_power(n, a), rel=1e-12)


def test_alpha_sigma_continuous_across_zero():
    for n in (1, 2, 3):
        target = n * omega(n)
        slope = abs(sigma_bar0(n)) * n * omega(n)
        assert alpha_sigma(n, 0.0) == pytest.approx(target, rel=1e-14)
        for eps in (1e-3, 1e-6, 1e-9):
            tol = 2.0 * slope * eps + 1e-9
            assert abs(alpha_sigma(n, eps) - target) < tol
            assert abs(alpha_sigma(n, -eps) - target) < tol


def test_sigma_bar0_fd_oracle():
    for n in (1, 2, 3, 4):
        fd = sigma_bar0_fd(n, step=1e-4)
        assert abs(fd - sigma_bar0(n)) < 1e-6


def test_sigma_bar0_report_has_both_routes():
    rep = sigma_bar0_report(3)
    assert rep["discrepancy"] < 1e-8
    assert rep["digamma"] == pytest.approx(rep["finite_difference"], abs=1e-8)


def test_sigma_bar0_entropy_form():
    # sigma_bar0 = -E_1(B^n) - (1/n) log w_n - 1
    for n in (1, 2, 3, 5):
        rhs = -e1_ball(n) - math.log(omega(n)) / n - 1.0
        assert sigma_bar0(n) == pytest.approx(rhs, rel=1e-13)


def test_sigma0_relation():
    # Theorem C constant vs the normalized derivative
    for n in (1, 2, 3):
        assert sigma0(n) == pytest.approx(
            n * omega(n) * (sigma_bar0(n) + EULER_GAMMA), rel=1e-13)


def test_e1_ball_known_values():
    assert e1_ball(1) == pytest.approx(-math.log(2.0), rel=1e-13)
    assert e1_ball(2) == pytest.approx(-0.5, rel=1e-13)
    assert en1_ball(1) == pytest.approx(-2.0 * math.log(2.0), rel=1e-13)
    assert en1_ball(2) == pytest.approx(-1.75, rel=1e-13)


def test_entropy_ball_chord_quadrature_oracle():
    # independent oracle: E_order(B^n) from the chord-length distribution,
    # -(coef) (n-1) w_{n-1} int_0^1 d^{n-2} l(d)^order log l(d) dd
    nodes, weights = np.polynomial.legendre.leggauss(64)
    for n in (2, 3):
        for order, exact in ((1, e1_ball(n)), (n + 1, en1_ball(n))):
            edges = np.sort(1.0 - np.linspace(0.0, 1.0, 61) ** 2)
            total = 0.0
            for lo, hi in zip(edges[:-1], edges[1:]):
                mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
                d = mid + half * nodes
                ell = 2.0 * np.sqrt(np.maximum(1.0 - d * d, 1e-300))
                vals = d ** (n - 2) * ell ** order * np.log(ell)
                total += half * float(np.dot(weights, vals))
            measure = (n - 1) * omega(n - 1) * total
            # both normalizations land on -measure/w_n for the unit ball
            est = -measure / omega(n)
            assert est == pytest.approx(exact, abs=1e-6)


def test_theta_constant():
    c = theta_constant_c()
    assert c > 0.0
    # classical identity gamma = int_0^1 (1-e^-r)/r - int_1^inf e^-r/r
    assert c - 2.0 * exp_integral_tail() == pytest.approx(EULER_GAMMA, abs=1e-10)
    # doubled panel count is converged
    assert abs(theta_constant_c(96) - c) < 1e-12


def test_alpha_param_regimes():
    n = 3
    assert AlphaParam.classify(-0.5, n).regime is Regime.NEG
    assert AlphaParam.classify(0.0, n).regime is Regime.ZERO
    assert AlphaParam.classify(1.7, n).regime is Regime.SUB
    assert AlphaParam.classify(3.0, n).regime is Regime.EQN
    assert AlphaParam.classify(3.0000001, n).regime is Regime.SUPER
    with pytest.raises(ValueError):
        AlphaParam.classify(-1.0, n)


def test_sharp_constants_table():
    t = SharpConstants.for_pair(2, 1.0)
    assert t.sigma == pytest.approx(sigma(2, 1.0))
    assert t.regime == "sub"
    z = SharpConstants.for_pair(2, 0.0)
    assert z.sigma is None and z.sigma_tilde is None
    assert z.sigma_bar0 == pytest.approx(sigma_bar0(2))
