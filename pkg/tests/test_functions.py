"""Log-concave catalog and grid functions: norms, entropies, level bodies,
rearrangement and displacement masses."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chordlab.functions import (
    Exponential,
    Gaussian,
    GridFn,
    Indicator,
    fn_from_spec,
    load_fn,
    two_bump_grid,
)
from chordlab.geometry import Ball, Box
from chordlab.mc import gauss_panels, geometric_edges
from chordlab.specials import sphere_area


def test_eval_examples():
    K = Ball(np.zeros(2), 1.0)
    ind = Indicator(2.0, K)
    assert ind.eval(np.array([0.3, 0.3])) == 2.0
    assert ind.eval(np.array([2.0, 0.0])) == 0.0
    g = Gaussian(1.0, np.zeros(2), 1.0)
    assert g.eval(np.zeros(2)) == 1.0
    e = Exponential(1.0, 2.0, np.zeros(2))
    x = np.array([0.3, 0.4])
    assert e.eval(x) == pytest.approx(math.exp(-2.0 * 0.5))


def test_sup_level_bodies():
    g = Gaussian(1.0, np.zeros(2), 1.0)
    lvl = g.sup_level_body(math.exp(-0.5))
    assert isinstance(lvl, Ball)
    assert lvl.radius == pytest.approx(1.0, rel=1e-12)
    ind = Indicator(2.0, Ball(np.zeros(2), 1.0))
    assert ind.sup_level_body(1.0).radius == 1.0
    e = Exponential(1.0, 1.0, np.zeros(2))
    assert e.sup_level_body(math.exp(-2.0)).radius == pytest.approx(2.0, rel=1e-12)
    assert g.sup_level_body(1.0).radius == 0.0      # degenerate top level
    with pytest.raises(ValueError):
        g.sup_level_body(1.5)
    with pytest.raises(ValueError):
        g.sup_level_body(0.0)


def test_lp_quasi_norm_examples():
    K = Ball(np.zeros(2), 1.0)
    ind = Indicator(3.0, K)
    for p in (0.5, 1.0):
        assert ind.lp_quasi_norm(p) == pytest.approx(3.0 * K.volume ** (1 / p), rel=1e-12)
    g1 = Gaussian(1.0, np.zeros(1), 1.0)
    assert g1.lp_quasi_norm(1.0) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-12)
    # Lemma conv-Lp: ||f||_{n/(n+a)} -> ||f||_1 monotonically from above
    g2 = Gaussian(1.0, np.zeros(2), 1.0)
    vals = [g2.lp_quasi_norm(2.0 / (2.0 + a)) for a in (0.5, 0.2, 0.05)]
    assert vals[0] > vals[1] > vals[2] > g2.l1_norm
    assert vals[2] == pytest.approx(g2.l1_norm, rel=0.2)
    with pytest.raises(ValueError):
        g2.lp_quasi_norm(0.0)


def test_lp_quadrature_oracle():
    # quadrature oracle for the analytic L^p masses of the radial catalog
    for f, n in ((Gaussian(1.3, np.zeros(2), 0.8), 2),
                 (Exponential(0.7, 1.5, np.zeros(2)), 2)):
        for p in (0.6, 1.0):
            # f^p has wider tails than f: stretch the truncation accordingly
            edges = geometric_edges(0.0, 2.0 * f.support_radius(1e-14), 48)
            r, w = gauss_panels(edges, 16)
            prof = f.eval_many(np.column_stack([r, np.zeros_like(r)]))
            mass = sphere_area(n) * float(np.dot(w, r ** (n - 1) * prof ** p))
            assert f.lp_quasi_norm(p) == pytest.approx(mass ** (1 / p), rel=1e-8)


def test_entropy_examples():
    K = Box(np.zeros(2), np.array([1.0, 0.5]))
    assert Indicator(1.0, K).entropy() == 0.0
    assert Indicator(2.5, K).entropy() == pytest.approx(
        2.5 * K.volume * math.log(2.5), rel=1e-12)
    g1 = Gaussian(1.0, np.zeros(1), 1.0)
    assert g1.entropy() == pytest.approx(-0.5 * math.sqrt(2 * math.pi), rel=1e-12)


def test_exponential_entropy_quadrature_vs_closed_form():
    # int f log f = ||f||_1 (log c - n) for the radial exponential
    for n in (1, 2, 3):
        f = Exponential(1.7, 2.3, np.zeros(n))
        closed = f.l1_norm * (math.log(1.7) - n)
        assert f.entropy() == pytest.approx(closed, rel=1e-9)


def test_scale_arg_laws():
    lam = 2.0
    ind = Indicator(1.5, Ball(np.zeros(2), 0.8))
    scaled = ind.scale_arg(lam)
    assert isinstance(scaled, Indicator)
    assert scaled.body.radius == pytest.approx(0.4, rel=1e-12)
    for f in (ind, Gaussian(1.2, np.array([0.3, 0.0]), 0.9),
              Exponential(1.1, 1.4, np.zeros(2))):
        fl = f.scale_arg(lam)
        n = f.n
        assert fl.l1_norm == pytest.approx(lam ** (-n) * f.l1_norm, rel=1e-10)
        assert fl.entropy() == pytest.approx(lam ** (-n) * f.entropy(), rel=1e-9)
        # pointwise: f_lam(x) = f(lam x)
        x = np.array([0.21, -0.34])
        assert fl.eval(x) == pytest.approx(f.eval(lam * x), rel=1e-12)


def test_level_measure_vs_rejection():
    # |{f >= t}| from the level body matches membership sampling within 3 sigma
    rng = np.random.default_rng(42)
    for f in (Gaussian(1.0, np.zeros(2), 1.0), Exponential(1.0, 1.0, np.zeros(2))):
        R = f.support_radius(1e-6)
        m = 200_000
        pts = rng.uniform(-R, R, size=(m, 2))
        box_vol = (2 * R) ** 2
        for t in (0.2, 0.5, 0.8):
            frac = (f.eval_many(pts) >= t).mean()
            mc = frac * box_vol
            se = box_vol * math.sqrt(frac * (1 - frac) / m)
            exact = f.sup_level_body(t).volume
            assert abs(mc - exact) < 3 * se + 1e-12


def test_gaussian_min_mass_closed_form_vs_grid():
    # erfc formula vs independent Riemann sum in n = 1
    f = Gaussian(1.0, np.zeros(1), 1.0)
    xs = np.linspace(-12, 12, 9001)[:, None]
    dx = xs[1, 0] - xs[0, 0]
    for d in (0.0, 0.5, 1.3, 3.0):
        brute = float(np.minimum(f.eval_many(xs), f.eval_many(xs + d)).sum() * dx)
        assert f.min_mass(np.array([d])) == pytest.approx(brute, rel=1e-6)


def test_exponential_min_mass_vs_brute():
    f = Exponential(1.0, 1.0, np.zeros(2))
    rng = np.random.default_rng(3)
    R = 25.0
    pts = rng.uniform(-R, R, size=(400_000, 2))
    for d in (0.5, 2.0):
        z = np.array([d, 0.0])
        vals = np.minimum(f.eval_many(pts), f.eval_many(pts + z))
        mc = vals.mean() * (2 * R) ** 2
        se = vals.std() * (2 * R) ** 2 / math.sqrt(len(pts))
        assert abs(f.min_mass(z) - mc) < 4 * se


def test_grid_layer_cake_exact():
    f = two_bump_grid()
    ts = np.unique(f.values)
    ts = ts[ts > 0]
    # int_0^inf |{f >= t}| dt over the exact staircase equals the mass
    levels = np.concatenate([[0.0], np.sort(ts)])
    total = 0.0
    for lo, hi in zip(levels[:-1], levels[1:]):
        total += (hi - lo) * f.level_measure(hi)
    assert total == pytest.approx(f.l1_norm, rel=1e-12)


def test_schwarz_symmetral_invariants():
    f = two_bump_grid()
    s = f.schwarz_symmetral()
    assert sorted(s.values.ravel()) == sorted(f.values.ravel())
    for p in (0.5, 1.0):
        assert s.lp_quasi_norm(p) == pytest.approx(f.lp_quasi_norm(p), rel=1e-14)
    assert s.entropy() == pytest.approx(f.entropy(), rel=1e-14)
    assert s.l1_norm == pytest.approx(f.l1_norm, rel=1e-14)
    # idempotent: the symmetral is a fixed point of the rearrangement
    assert np.array_equal(s.schwarz_symmetral().values, s.values)
    # level sets shrink toward the grid center: measures preserved per level
    for t in (0.1, 0.5, 1.0):
        assert s.level_measure(t) == pytest.approx(f.level_measure(t), rel=1e-14)


def test_lemma_m1_level_power_bound():
    # int_0^inf |{f>=t}|^{(n+a)/n} dt <= ||f||_{n/(n+a)}, equality for indicators
    for alpha in (0.5, 1.0):
        for f in (Gaussian(1.0, np.zeros(2), 1.0),
                  Exponential(1.0, 1.5, np.zeros(2))):
            n = f.n
            ts = np.linspace(1e-6, f.f_max * (1 - 1e-9), 4001)
            meas = np.array([f.sup_level_body(t).volume for t in ts]) ** ((n + alpha) / n)
            integral = float(np.trapezoid(meas, ts))
            assert integral <= f.lp_quasi_norm(n / (n + alpha)) * (1 + 1e-6)
        ind = Indicator(1.3, Ball(np.zeros(2), 0.9))
        n = ind.n
        lhs = ind.f_max * ind.body.volume ** ((n + alpha) / n)
        assert lhs == pytest.approx(ind.lp_quasi_norm(n / (n + alpha)), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 0.9), st.floats(0.05, 0.95))
def test_p_mean_monotonicity(p_lo, frac):
    # Jensen: M_p f <= M_q f for p < q on a bounded domain
    q = p_lo + frac * (1.0 - p_lo) + 0.01
    rng = np.random.default_rng(99)
    vals = rng.uniform(0.1, 2.0, 500)
    mp = (np.mean(vals ** p_lo)) ** (1 / p_lo)
    mq = (np.mean(vals ** q)) ** (1 / q)
    assert mp <= mq * (1 + 1e-12)


def test_grid_fn_validation_and_eval():
    with pytest.raises(ValueError):
        GridFn(np.zeros(2), 0.5, np.zeros((3, 3)))          # zero mass
    with pytest.raises(ValueError):
        GridFn(np.zeros(2), -1.0, np.ones((3, 3)))
    with pytest.raises(ValueError):
        GridFn(np.zeros(2), 0.5, -np.ones((3, 3)))
    f = GridFn(np.zeros(2), 0.5, np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert f.eval(np.array([0.25, 0.25])) == 1.0
    assert f.eval(np.array([0.75, 0.75])) == 4.0
    assert f.eval(np.array([5.0, 5.0])) == 0.0
    assert f.l1_norm == pytest.approx(0.25 * 10.0)


def test_grid_min_mass_exactness():
    # lattice shifts reduce to exact overlap sums; half-cell shifts mix them
    f = GridFn(np.zeros(1), 1.0, np.array([1.0, 3.0, 2.0]))
    assert f.min_mass(np.array([1.0])) == pytest.approx(1.0 + 2.0)
    assert f.min_mass(np.array([0.0])) == pytest.approx(6.0)
    # brute-force oracle at a fractional shift
    xs = np.linspace(-2, 7, 18001)[:, None]
    dx = xs[1, 0] - xs[0, 0]
    for d in (0.25, 0.5, 1.75):
        brute = float(np.minimum(f.eval_many(xs), f.eval_many(xs + d)).sum() * dx)
        assert f.min_mass(np.array([d])) == pytest.approx(brute, abs=2e-3)


def test_fn_spec_round_trip(tmp_path):
    specs = [
        {"type": "indicator", "scale": 2.0,
         "body": {"type": "ball", "center": [0.0, 0.0], "radius": 1.0}},
        {"type": "gaussian", "scale": 1.0, "center": [0.0, 0.0], "width": 1.0},
        {"type": "exponential", "scale": 1.0, "center": [0.0, 0.0], "rate": 2.0},
    ]
    for spec in specs:
        f = fn_from_spec(spec)
        g = fn_from_spec(f.to_spec())
        assert g.l1_norm == pytest.approx(f.l1_norm, rel=1e-12)
    # grid spec with little-endian float64 payload
    grid = two_bump_grid()
    raw = tmp_path / "vals.f64"
    grid.values.astype("<f8").tofile(raw)
    spec = grid.to_spec("vals.f64")
    path = tmp_path / "grid.json"
    path.write_text(json.dumps(spec))
    loaded = load_fn(path)
    assert np.array_equal(loaded.values, grid.values)
    assert loaded.l1_norm == pytest.approx(grid.l1_norm, rel=1e-14)
    with pytest.raises(ValueError):
        fn_from_spec({"type": "mystery"})
