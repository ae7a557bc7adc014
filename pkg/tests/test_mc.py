"""Monte Carlo engines: reproducibility, shard merging, unbiasedness at desk
scale, the singular-kernel pair sampler, and the level quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chordlab.constants import ball_chord_power
from chordlab.functions import Gaussian, Indicator
from chordlab.geometry import Ball, Box
from chordlab.mc import (
    BatchStats,
    Budget,
    DIVERGENT_TAIL_FLAG,
    Estimate,
    displacement_kernel_mc,
    kernel_r_integral,
    level_quadrature,
    line_functional,
    line_weight,
    mc_mean,
    riesz_pair_functional,
    riesz_pair_sample,
    sample_line,
    sample_lines,
    sphere_quadrature,
    tail_index,
)
from chordlab.specials import sphere_area, unit_ball_volume


def test_budget_validation_and_shards():
    with pytest.raises(ValueError):
        Budget(0, 1)
    b = Budget(10, 1, 3)
    assert b.shard_sizes() == [4, 3, 3]
    assert sum(b.shard_sizes()) == 10


def test_reproducibility_bit_identical():
    B = Ball(np.zeros(2), 1.0)
    budget = Budget(50_000, 123, 4)
    e1 = line_functional(B, lambda c: c, budget)
    e2 = line_functional(B, lambda c: c, budget)
    assert e1.value == e2.value
    assert e1.std_error == e2.std_error
    e3 = line_functional(B, lambda c: c, budget.with_seed(124))
    assert e3.value != e1.value


def test_shard_merge_exact():
    rng = np.random.default_rng(0)
    chunks = [rng.standard_normal(m) for m in (1000, 2000, 1500)]
    shards = []
    for ch in chunks:
        s = BatchStats()
        s.push(ch)
        shards.append(s)
    merged = shards[0].merge(shards[1]).merge(shards[2])
    single = BatchStats()
    for ch in chunks:
        single.push(ch)
    em, es = merged.estimate(), single.estimate()
    assert em.value == es.value                       # identical fsum reduction
    assert em.std_error == pytest.approx(es.std_error, rel=1e-12)
    assert em.n_samples == sum(len(c) for c in chunks)


def test_estimate_algebra():
    a = Estimate(2.0, 0.3, 100)
    b = Estimate(1.0, 0.4, 50)
    s = a + b
    assert s.value == 3.0
    assert s.std_error == pytest.approx(0.5)
    d = a - b
    assert d.value == 1.0
    assert d.std_error == pytest.approx(0.5)
    assert a.scaled(-2.0).value == -4.0
    assert a.scaled(-2.0).std_error == pytest.approx(0.6)
    assert a.shifted(1.0).value == 3.0
    flagged = Estimate(1.0, 0.1, 10, ("x",)) + Estimate(1.0, 0.1, 10, ("y",))
    assert flagged.flags == ("x", "y")


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.01, 2), st.floats(0.01, 2))
def test_estimate_affine_combination_property(v1, v2, s1, s2):
    a, b = Estimate(v1, s1, 10), Estimate(v2, s2, 10)
    combo = a.scaled(2.0) + b.scaled(-3.0)
    assert combo.value == pytest.approx(2 * v1 - 3 * v2, abs=1e-12)
    assert combo.std_error == pytest.approx(math.hypot(2 * s1, 3 * s2), rel=1e-12)


def test_sample_line_contract():
    rng = np.random.default_rng(5)
    line, w = sample_line(2.0, np.array([0.3, 0.4, -0.1]), rng)
    assert w == pytest.approx(line_weight(3, 2.0))
    assert abs(np.linalg.norm(line.u) - 1.0) < 1e-12
    assert abs(line.base @ line.u) < 1e-10
    U, B = sample_lines(1.5, np.zeros(2), rng, 1000)
    assert np.allclose(np.linalg.norm(U, axis=1), 1.0, atol=1e-12)
    assert np.max(np.abs(np.sum(U * B, axis=1))) < 1e-10


def test_crofton_and_cauchy_and_ph():
    budget = Budget(300_000, 17, 2)
    for K, n in ((Ball(np.zeros(2), 1.0), 2), (Ball(np.zeros(3), 1.0), 3)):
        est = line_functional(K, lambda c: c, budget)
        assert abs(est.value - K.volume) < 3 * est.std_error
    # hit measure = w_{n-1}/(n w_n) S(K) for ball and box (the ball case is
    # exact: every line from its own bounding ball hits it)
    for K in (Ball(np.zeros(2), 1.0), Box(np.zeros(2), np.array([1.0, 0.5]))):
        est = line_functional(K, lambda c: (c > 0).astype(float), budget)
        target = unit_ball_volume(K.n - 1) / sphere_area(K.n) * K.surface_area
        assert abs(est.value - target) < 3 * est.std_error + 1e-12
    # chord^{n+1}: Poincare-Hadwiger on the disk
    B2 = Ball(np.zeros(2), 1.0)
    est = line_functional(B2, lambda c: c ** 3, budget)
    assert abs(est.value - 3 * math.pi) < 3 * est.std_error


def test_crofton_unbiasedness_envelope():
    # 50 master seeds: studentized errors within +-4 in at least 48 cases
    B = Ball(np.zeros(2), 1.0)
    hits = 0
    for seed in range(50):
        est = line_functional(B, lambda c: c, Budget(20_000, 1000 + seed))
        z = (est.value - math.pi) / est.std_error
        hits += abs(z) <= 4.0
    assert hits >= 48


def test_riesz_pair_pure_kernel_1d_oracle():
    # int int_{[-R,R]^2} |x-y|^{a-1} dx dy = 2 (2R)^{a+1} / (a (a+1)), n = 1
    R, alpha = 1.0, 0.7
    seg = Box(np.zeros(1), np.array([R]))

    def W(X, Y):
        return (seg.contains_many(X) & seg.contains_many(Y)).astype(float)

    est = riesz_pair_functional(W, 1, R, np.zeros(1), alpha, Budget(400_000, 3))
    exact = 2 * (2 * R) ** (alpha + 1) / (alpha * (alpha + 1))
    assert abs(est.value - exact) < 3 * est.std_error
    # deterministic radial quadrature of the same kernel agrees
    val, err = kernel_r_integral(
        lambda r: np.maximum(2 * R - r, 0.0), alpha, 2 * R)
    assert 2 * val == pytest.approx(exact, rel=1e-8)


def test_riesz_pair_symmetry_and_regimes():
    rng = np.random.default_rng(2)
    X, Y, w = riesz_pair_sample(1.0, np.zeros(2), 1.5, rng, 4000)
    assert np.all(w > 0)
    d = np.linalg.norm(X - Y, axis=1)
    assert d.max() <= 2.0 + 1e-12
    with pytest.raises(ValueError):
        riesz_pair_sample(1.0, np.zeros(2), -1.0, rng, 10)
    with pytest.raises(ValueError):
        riesz_pair_sample(1.0, np.zeros(2), 0.0, rng, 10)


def test_raw_negative_alpha_sampler_flags_divergence():
    # the pointwise |chi - chi| estimator at alpha < 0 is heavy-tailed; the
    # tail diagnostic must fire
    K = Ball(np.zeros(2), 1.0)

    def W(X, Y):
        return 2.0 * (K.contains_many(X) & ~K.contains_many(Y)).astype(float)

    est = riesz_pair_functional(W, 2, 1.0, np.zeros(2), -0.6, Budget(200_000, 9))
    assert DIVERGENT_TAIL_FLAG in est.flags


def test_tail_index_detector():
    rng = np.random.default_rng(4)
    heavy = rng.pareto(1.5, 100_000)        # infinite variance
    light = rng.standard_normal(100_000)
    assert tail_index(heavy) < 2.2
    assert tail_index(light) > 2.2


def test_displacement_mc_matches_quadrature():
    K = Ball(np.zeros(2), 1.0)
    alpha = -0.5
    rmax = 2.0

    def D(Z):
        return 2.0 * (K.volume - K.covariogram_many(Z))

    mc = displacement_kernel_mc(D, 2, alpha, rmax, Budget(200_000, 5))
    # radial symmetry: deterministic r-quadrature of the same integrand
    val, err = kernel_r_integral(
        lambda r: 2.0 * (K.volume - K.covariogram_many(
            np.column_stack([r, np.zeros_like(r)]))), alpha, rmax)
    target = sphere_area(2) * val
    assert abs(mc.value - target) < 3 * mc.std_error + 10 * err


def test_level_quadrature_gaussian_and_indicator():
    g = Gaussian(1.0, np.zeros(1), 1.0)
    est = level_quadrature(g, lambda t: g.sup_level_body(t).volume)
    assert est.value == pytest.approx(math.sqrt(2 * math.pi), abs=1e-8)
    est2 = level_quadrature(g, lambda t: g.sup_level_body(t).volume, n_panels=128)
    assert abs(est2.value - est.value) < 1e-8
    ind = Indicator(2.5, Ball(np.zeros(2), 1.0))
    est3 = level_quadrature(ind, lambda t: ball_chord_power(2, 1.0)
                            * ind.sup_level_body(t).radius ** 3)
    assert est3.value == pytest.approx(2.5 * ball_chord_power(2, 1.0), rel=1e-10)


def test_level_quadrature_propagates_estimates():
    g = Gaussian(1.0, np.zeros(1), 1.0)
    est = level_quadrature(
        g, lambda t: Estimate(g.sup_level_body(t).volume, 0.01, 100))
    assert est.std_error > 0
    assert est.n_samples > 0
    assert est.value == pytest.approx(math.sqrt(2 * math.pi), abs=1e-6)


def test_sphere_quadrature_weights():
    for n in (1, 2, 3, 4):
        U, W = sphere_quadrature(n)
        assert np.allclose(np.linalg.norm(U, axis=1), 1.0, atol=1e-12)
        assert float(np.sum(W)) == pytest.approx(sphere_area(n), rel=1e-9)
        # odd moments vanish (exactly for the deterministic rules)
        mean = U.T @ W
        tol = 1e-9 if n <= 3 else 0.2
        assert np.all(np.abs(mean) < tol * sphere_area(n))
    U, W = sphere_quadrature(3)
    assert U.shape[0] == 350
    # degree-2 exactness in n = 3: int u_i^2 = area / 3
    second = (U ** 2 * W[:, None]).sum(axis=0)
    assert np.allclose(second, sphere_area(3) / 3, rtol=1e-9)


def test_budget_split_is_stable():
    b = Budget(1000, 42)
    assert b.split("x", "1").master_seed == b.split("x", "1").master_seed
    assert b.split("x", "1").master_seed != b.split("x", "2").master_seed
