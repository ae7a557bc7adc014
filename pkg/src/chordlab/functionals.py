"""Chord power integrals, radial mean bodies, dual log volumes and chord
entropies, each by every route the theory provides:

* LINES      — Haar line sampling of chord powers (bodies, alpha >= -1);
* PAIRS      — Riesz pair kernels: product/min kernel for alpha > 0, the
               |difference| kernel for alpha in (-1, 0).  The alpha < 0 route
               folds the position integral into the exact displacement mass
               2(||f||_1 - g(z)) before sampling (r, u); pointwise pair
               sampling of the difference kernel is heavy-tailed beyond repair;
* LEVELSET   — t-integration of per-level body functionals (functions whose
               superlevel sets are catalog bodies);
* RADIALMEAN — the radial-mean-body identity
               I_{a+1}(K) = (a+1)|K|/(n w_n) int_S rho_{R_a K}(u)^a du.

Cross-agreement of these routes on shared inputs is the library's primary
correctness instrument.
"""

from __future__ import annotations

import math

import numpy as np

from .constants import ball_chord_power, e1_ball, en1_ball
from .functions import Exponential, Gaussian, GridFn, Indicator, LogConcaveFn
from .geometry import Ball, ConvexBody
from .mc import (
    Budget,
    Estimate,
    displacement_kernel_mc,
    kernel_r_integral,
    level_quadrature,
    line_functional,
    mc_mean,
    quad_with_error,
    geometric_edges,
    riesz_pair_functional,
    sphere_quadrature,
    tail_index,
    DIVERGENT_TAIL_FLAG,
)
from .specials import EULER_GAMMA, sphere_area, unit_ball_volume

ROUTES = ("lines", "pairs", "levelset", "radialmean")


def _check_route(route: str):
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")


# ---------------------------------------------------------------------------
# chord power integrals of bodies
# ---------------------------------------------------------------------------

def chord_power_body(K: ConvexBody, alpha: float, route: str, budget: Budget) -> Estimate:
    """I_{alpha+1}(K) by the requested route."""
    _check_route(route)
    n = K.n
    if route == "lines":
        if alpha < -1.0:
            raise ValueError("lines route requires alpha >= -1")
        return _chord_power_lines(K, alpha, budget)
    if alpha <= -1.0:
        raise ValueError(f"alpha must be > -1 for route {route}, got {alpha}")
    if route == "pairs":
        if alpha == 0.0:
            raise ValueError("pairs route is undefined at alpha = 0")
        if alpha > 0.0:
            coef = alpha * (alpha + 1.0) / sphere_area(n)

            def W(X, Y):
                return (K.contains_many(X) & K.contains_many(Y)).astype(float)

            est = riesz_pair_functional(W, n, K.bounding_radius, K.bounding_center,
                                        alpha, budget)
            return est.scaled(coef)
        return _chord_power_pairs_neg(K, alpha, budget)
    if route == "radialmean":
        return _chord_power_radialmean(K, alpha, budget)
    raise ValueError("levelset route applies to functions; use chord_power_fn")


def _chord_power_lines(K, alpha, budget):
    if alpha == -1.0:
        chord_fn = lambda c: (c > 0.0).astype(float)
    else:
        expo = alpha + 1.0
        chord_fn = lambda c: np.where(c > 0.0, c ** expo, 0.0)
    return line_functional(K, chord_fn, budget)


def _chord_power_pairs_neg(K, alpha, budget):
    """(-1,0): |a|(a+1)/(2 n w_n) * int int |chi-chi| / |x-y|^(n-a)."""
    n = K.n
    vol = K.volume
    rmax = 2.0 * K.bounding_radius
    coef = abs(alpha) * (alpha + 1.0) / (2.0 * sphere_area(n))
    try:
        def D(Z):
            return 2.0 * (vol - K.covariogram_many(Z))

        near = displacement_kernel_mc(D, n, alpha, rmax, budget)
    except ValueError:
        # no deterministic covariogram: pointwise fallback with the roles of
        # the inside point fixed (W = 2 chi_K(x)(1 - chi_K(y)))
        def W(X, Y):
            return 2.0 * (K.contains_many(X) & ~K.contains_many(Y)).astype(float)

        near = riesz_pair_functional(W, n, K.bounding_radius, K.bounding_center,
                                     alpha, budget)
    # translates are disjoint beyond rmax: the r-tail is exact
    far = sphere_area(n) * 2.0 * vol * rmax ** alpha / abs(alpha)
    return near.shifted(far).scaled(coef)


def _chord_power_radialmean(K, alpha, budget, n_dirs=None):
    """(a+1)|K|/(n w_n) * int_S rho_{R_a K}(u)^a du with rho^a sampled over a
    shared uniform cloud in K.

    At alpha <= -1/2 the x-sample of rho^alpha has divergent variance (the
    boundary layer contributes rho ~ dist^alpha with non-integrable square),
    so the covariogram form of the same identity is used instead when a
    deterministic covariogram exists.
    """
    n = K.n
    U, W = sphere_quadrature(n, n_dirs)
    coef = (alpha + 1.0) * K.volume / sphere_area(n)
    if alpha <= -0.5 and K.covariogram(np.zeros(n)) is not None:
        vol = K.volume
        rmax = 2.0 * K.bounding_radius
        total, err = 0.0, 0.0
        for u, w in zip(U, W):
            phi = lambda r: vol - K.covariogram_many(np.outer(r, u))
            integral, e = kernel_r_integral(phi, alpha, rmax)
            integral += vol * rmax ** alpha / abs(alpha)
            total += w * abs(alpha) * integral / vol
            err += w * abs(alpha) * e / vol
        return Estimate(coef * total, coef * err, 0, ("radialmean-covariogram",))
    m_x = max(budget.n_samples // U.shape[0], 2000)

    def values(rng, m):
        X = K.sample_points(rng, m)
        acc = np.zeros(m)
        for u, w in zip(U, W):
            rho = K.radial_many(X, u)
            if alpha == 0.0:
                acc += w
            else:
                acc += w * np.where(rho > 0.0, rho, 1e-300) ** alpha
        return acc

    est = mc_mean(values, budget.with_samples(m_x), batch=1 << 13,
                  tail_diagnostic=alpha < 0)
    return est.scaled(coef)


def cauchy_surface_area(K: ConvexBody, budget: Budget) -> Estimate:
    """S(K) = (n w_n / w_{n-1}) I_0(K) by the line hit measure."""
    n = K.n
    i0 = _chord_power_lines(K, -1.0, budget)
    return i0.scaled(sphere_area(n) / unit_ball_volume(n - 1))


# ---------------------------------------------------------------------------
# chord power integrals of functions
# ---------------------------------------------------------------------------

def chord_power_fn(f, alpha: float, route: str, budget: Budget) -> Estimate:
    """I_{alpha+1}(f) in the level-set normalization."""
    _check_route(route)
    if route == "levelset":
        if not isinstance(f, LogConcaveFn):
            raise ValueError("levelset route requires catalog superlevel sets")
        if alpha < -1.0:
            raise ValueError("levelset route requires alpha >= -1")
        return _chord_power_fn_levelset(f, alpha, budget)
    if route == "pairs":
        if alpha == 0.0 or alpha <= -1.0:
            raise ValueError("pairs route requires alpha in (-1,0) or (0,inf)")
        if alpha > 0.0:
            coef = alpha * (alpha + 1.0) / sphere_area(f.n)
            return min_kernel_integral(f, alpha, budget).scaled(coef)
        coef = abs(alpha) * (alpha + 1.0) / (2.0 * sphere_area(f.n))
        return difference_kernel_integral(f, alpha, budget).scaled(coef)
    raise ValueError(f"route {route} applies to bodies; use chord_power_body")


def _chord_power_fn_levelset(f, alpha, budget):
    if isinstance(f, Indicator):
        if isinstance(f.body, Ball):
            val = f.body.radius ** (f.n + alpha) * ball_chord_power(f.n, alpha) \
                if f.body.radius > 0 else 0.0
            return Estimate.exact(f.scale * val)
        body_est = chord_power_body(f.body, alpha, "lines", budget)
        return body_est.scaled(f.scale)
    n = f.n
    const = ball_chord_power(n, alpha)

    def per_level(t):
        body = f.sup_level_body(t)
        r = body.radius
        return const * r ** (n + alpha) if r > 0 else 0.0

    return level_quadrature(f, per_level)


def min_kernel_integral(f, alpha: float, budget: Budget) -> Estimate:
    """int int min{f(x), f(y)} |x-y|^(alpha-n) dx dy by pointwise pair
    sampling over the (reported) truncated support."""
    n = f.n
    R = f.support_radius(1e-9)
    center = f.support_center
    flags = _truncation_flags(f, R)

    def W(X, Y):
        return np.minimum(f.eval_many(X), f.eval_many(Y))

    est = riesz_pair_functional(W, n, R, center, alpha, budget, tail_diagnostic=False)
    return Estimate(est.value, est.std_error, est.n_samples,
                    tuple(sorted(set(est.flags) | set(flags))))


def difference_kernel_integral(f, alpha: float, budget: Budget) -> Estimate:
    """int int |f(x)-f(y)| |x-y|^(alpha-n) dx dy for alpha in (-1, 0), via the
    exact displacement mass |f - f(.+z)|_1 = 2(||f||_1 - g(z))."""
    n = f.n
    l1 = f.l1_norm
    R = f.support_radius(1e-12)
    rmax = 2.0 * R

    def D(Z):
        return 2.0 * (l1 - f.min_mass_many(Z))

    near = displacement_kernel_mc(D, n, alpha, rmax, budget)
    far = sphere_area(n) * 2.0 * l1 * rmax ** alpha / abs(alpha)
    flags = _truncation_flags(f, R)
    out = near.shifted(far)
    return Estimate(out.value, out.std_error, out.n_samples,
                    tuple(sorted(set(out.flags) | set(flags))))


def _truncation_flags(f, R) -> tuple:
    if isinstance(f, Indicator) or isinstance(f, GridFn):
        return ()
    bound = _radial_tail_mass(f, R)
    return (f"support truncated at radius {R:.6g}; tail mass <= {bound:.3g}",)


def _radial_tail_mass(f, R):
    """n w_n int_R^(4R) r^(n-1) f(r) dr, the mass outside the truncation
    radius for the radial catalog envelope (decay makes the rest negligible)."""
    n = f.n
    e0 = np.zeros(n)
    e0[0] = 1.0

    def integrand(r):
        X = f.support_center[None, :] + r[:, None] * e0[None, :]
        return r ** (n - 1) * f.eval_many(X)

    edges = np.linspace(R, 4.0 * R, 49)
    val, _ = quad_with_error(integrand, edges, order=12)
    return sphere_area(n) * val


# ---------------------------------------------------------------------------
# radial mean bodies
# ---------------------------------------------------------------------------

def ball_radial_mean_pow(n: int, alpha: float) -> float:
    """rho_{R_alpha B^n}(u)^alpha = I_{alpha+1}(B^n) / ((alpha+1) omega_n),
    from the radial-mean identity evaluated on the unit ball."""
    return ball_chord_power(n, alpha) / ((alpha + 1.0) * unit_ball_volume(n))


def ball_log_radial_mean(n: int) -> float:
    """log rho_{R_0 B^n}(u) = -1 - E_1(B^n)."""
    return -1.0 - e1_ball(n)


def radial_mean_body_rho(K: ConvexBody, alpha: float, u, budget: Budget,
                         method: str = "sample") -> Estimate:
    """rho_{R_alpha K}(u) (the alpha-mean of rho_{K-x}(u) over x in K)."""
    u = np.asarray(u, dtype=float)
    if method == "covariogram":
        return _radial_mean_covariogram(K, alpha, u)
    if method != "sample":
        raise ValueError(f"unknown method {method!r}")

    def values(rng, m):
        X = K.sample_points(rng, m)
        rho = K.radial_many(X, u)
        rho = np.where(rho > 0.0, rho, 1e-300)
        return np.log(rho) if alpha == 0.0 else rho ** alpha

    est = mc_mean(values, budget, tail_diagnostic=alpha < 0)
    return _invert_mean(est, alpha)


def radial_mean_profile(K: ConvexBody, alphas, u, budget: Budget) -> list:
    """rho_{R_alpha K}(u) across an alpha grid from one shared x-cloud.

    Sharing the cloud makes the returned values sample power means of one
    empirical measure, which are monotone in alpha exactly; the grid then
    inherits the p-th-mean monotonicity rather than fighting MC noise."""
    u = np.asarray(u, dtype=float)
    rng = budget.shard_rng(0)
    X = K.sample_points(rng, budget.n_samples)
    rho = np.maximum(K.radial_many(X, u), 1e-300)
    m = budget.n_samples
    out = []
    for a in alphas:
        vals = np.log(rho) if a == 0.0 else rho ** a
        mean = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / math.sqrt(m))
        if a == 0.0:
            r = math.exp(mean)
            out.append(Estimate(r, r * se, m))
        else:
            out.append(_invert_mean(Estimate(mean, se, m), a))
    return out


def _invert_mean(est: Estimate, alpha: float) -> Estimate:
    if alpha == 0.0:
        rho = math.exp(est.value)
        return Estimate(rho, rho * est.std_error, est.n_samples, est.flags)
    rho = est.value ** (1.0 / alpha)
    se = abs(rho * est.std_error / (alpha * est.value)) if est.value > 0 else float("inf")
    return Estimate(rho, se, est.n_samples, est.flags)


def _radial_mean_covariogram(K, alpha, u) -> Estimate:
    vol = K.volume
    rmax = 2.0 * K.bounding_radius
    if alpha == 0.0:
        val, err = _log_rho_r0_quadrature(_MinMassAdapter.of_body(K), u)
        rho = math.exp(val)
        return Estimate(rho, rho * err, 0)
    if alpha > 0.0:
        phi = lambda r: K.covariogram_many(np.outer(r, u))
        integral, err = kernel_r_integral(phi, alpha, rmax)
        mean = alpha * integral / vol
        mean_err = alpha * err / vol
    else:
        phi = lambda r: vol - K.covariogram_many(np.outer(r, u))
        integral, err = kernel_r_integral(phi, alpha, rmax)
        integral += vol * rmax ** alpha / abs(alpha)   # exact r-tail
        mean = abs(alpha) * integral / vol
        mean_err = abs(alpha) * err / vol
    return _invert_mean(Estimate(mean, mean_err, 0), alpha)


class _MinMassAdapter:
    """Uniform view of (normalized) displacement mass for bodies, catalog
    functions and grid functions."""

    def __init__(self, min_mass_many, l1, n, support_radius, radial, center):
        self.min_mass_many = min_mass_many
        self.l1 = l1
        self.n = n
        self.support_radius = support_radius
        self.radial = radial
        self.center = center

    @classmethod
    def of_body(cls, K: ConvexBody) -> "_MinMassAdapter":
        return cls(K.covariogram_many, K.volume, K.n, 2.0 * K.bounding_radius,
                   isinstance(K, Ball), K.bounding_center)

    @classmethod
    def of_fn(cls, f) -> "_MinMassAdapter":
        radial = isinstance(f, (Gaussian, Exponential)) or (
            isinstance(f, Indicator) and isinstance(f.body, Ball)
        )
        return cls(f.min_mass_many, f.l1_norm, f.n,
                   2.0 * f.support_radius(1e-14), radial, f.support_center)


def _log_rho_r0_quadrature(src: _MinMassAdapter, u, n_panels: int = 40,
                           order: int = 12):
    """log rho_{R_0 .}(u) = G1 + G2 with
    G1 = int_0^1 (g_hat(ru) - 1)/r dr (g_hat the normalized min-mass) and
    G2 = int_1^R g_hat(ru)/r dr; the gamma from the exponential reference
    profile cancels the Gamma'(1) in the alpha -> 0 limit exactly."""
    u = np.asarray(u, dtype=float)
    ghat = lambda r: src.min_mass_many(np.outer(r, u)) / src.l1

    g1_fn = lambda r: (ghat(r) - 1.0) / r
    edges1 = geometric_edges(0.0, 1.0, n_panels, ratio=0.6)
    g1, e1 = quad_with_error(g1_fn, edges1, order)

    rmax = max(src.support_radius, 1.0 + 1e-9)
    g2_fn = lambda r: ghat(r) / r
    edges2 = 1.0 + (rmax - 1.0) * (np.linspace(0.0, 1.0, n_panels + 1) ** 1.5)
    g2, e2 = quad_with_error(g2_fn, edges2, order)
    return g1 + g2, e1 + e2 + 1e-12


def radial_mean_fn_rho(f, alpha: float, u, budget: Budget,
                       route: str = "levelwise") -> Estimate:
    """rho_{R_alpha f}(u): levelwise mixture over d mu_f, or the direct
    radial r-integral against the displacement min-mass."""
    u = np.asarray(u, dtype=float)
    if isinstance(f, Indicator) and route == "levelwise":
        return radial_mean_body_rho(f.body, alpha, u, budget)
    if route == "levelwise":
        return _radial_mean_fn_levelwise(f, alpha, u, budget)
    if route != "direct":
        raise ValueError(f"unknown route {route!r}")
    return _radial_mean_fn_direct(f, alpha, u)


def _radial_mean_fn_levelwise(f, alpha, u, budget):
    n = f.n
    l1 = f.l1_norm
    if alpha == 0.0:
        base = ball_log_radial_mean(n)

        def per_level(t):
            body = f.sup_level_body(t)
            r = body.radius
            if r <= 0.0:
                return 0.0
            return (base + math.log(r)) * body.volume / l1

        est = level_quadrature(f, per_level)
        rho = math.exp(est.value)
        return Estimate(rho, rho * est.std_error, est.n_samples, est.flags)
    const = ball_radial_mean_pow(n, alpha)

    def per_level(t):
        body = f.sup_level_body(t)
        r = body.radius
        if r <= 0.0:
            return 0.0
        return const * r ** alpha * body.volume / l1

    est = level_quadrature(f, per_level)
    return _invert_mean(est, alpha)


def _radial_mean_fn_direct(f, alpha, u):
    src = _MinMassAdapter.of_fn(f)
    if alpha == 0.0:
        val, err = _log_rho_r0_quadrature(src, u)
        rho = math.exp(val)
        return Estimate(rho, rho * err, 0)
    l1 = src.l1
    rmax = src.support_radius
    if alpha > 0.0:
        phi = lambda r: src.min_mass_many(np.outer(r, u))
        integral, err = kernel_r_integral(phi, alpha, rmax)
        mean = alpha * integral / l1
    else:
        phi = lambda r: l1 - src.min_mass_many(np.outer(r, u))
        integral, err = kernel_r_integral(phi, alpha, rmax)
        integral += l1 * rmax ** alpha / abs(alpha)
        mean = abs(alpha) * integral / l1
    return _invert_mean(Estimate(mean, abs(alpha) * err / l1, 0), alpha)


def dual_log_volume(f, budget: Budget, n_dirs: int | None = None) -> Estimate:
    """V~_log(B^n, R_0 f) = (1/(n w_n)) int_S log rho_{R_0 f}(u) du."""
    src = _MinMassAdapter.of_fn(f) if not isinstance(f, ConvexBody) \
        else _MinMassAdapter.of_body(f)
    n = src.n
    if src.radial:
        u0 = np.zeros(n)
        u0[0] = 1.0
        val, err = _log_rho_r0_quadrature(src, u0)
        return Estimate(val, err, 0)
    U, W = sphere_quadrature(n, n_dirs)
    total, toterr = 0.0, 0.0
    for u, w in zip(U, W):
        val, err = _log_rho_r0_quadrature(src, u)
        total += w * val
        toterr += w * err
    area = sphere_area(n)
    return Estimate(total / area, toterr / area, 0)


# ---------------------------------------------------------------------------
# chord entropies
# ---------------------------------------------------------------------------

def entropy_body(K: ConvexBody, order: int, budget: Budget) -> Estimate:
    """E_order(K) = -coef int chord^order log(chord) dl with coef = 1/|K| for
    order 1 and omega_n/|K|^2 for order n+1 (the CCPH normalizations)."""
    n = K.n
    if order == 1:
        coef = 1.0 / K.volume
    elif order == n + 1:
        coef = unit_ball_volume(n) / K.volume ** 2
    else:
        raise ValueError(f"order must be 1 or n+1, got {order}")

    def chord_fn(c):
        return np.where(c > 0.0, c ** order * np.log(np.where(c > 0.0, c, 1.0)), 0.0)

    est = line_functional(K, chord_fn, budget)
    return est.scaled(-coef)


def entropy_ball_exact(n: int, order: int, radius: float = 1.0) -> float:
    """E_order(r B^n) from the closed forms and the scaling laws."""
    if order == 1:
        return e1_ball(n) - math.log(radius)
    if order == n + 1:
        return en1_ball(n) - (n + 1.0) * math.log(radius)
    raise ValueError(f"order must be 1 or n+1, got {order}")


def fn_chord_power_np1(f) -> Estimate:
    """I_{n+1}(f) = (n+1)/omega_n int |{f >= t}|^2 dt (deterministic for the
    catalog)."""
    n = f.n
    if isinstance(f, Indicator):
        val = (n + 1.0) / unit_ball_volume(n) * f.scale * f.body.volume ** 2
        return Estimate.exact(val)

    def per_level(t):
        return f.sup_level_body(t).volume ** 2

    est = level_quadrature(f, per_level)
    return est.scaled((n + 1.0) / unit_ball_volume(n))


def entropy_fn(f, order: int, budget: Budget) -> Estimate:
    """E_1(f) (level mixture minus the information entropy term) or
    E_{n+1}(f) (mixture against d nu_f)."""
    n = f.n
    l1 = f.l1_norm
    if order == 1:
        if isinstance(f, Indicator):
            if isinstance(f.body, Ball):
                level = Estimate.exact(entropy_ball_exact(n, 1, f.body.radius))
            else:
                level = entropy_body(f.body, 1, budget)
            return level.shifted(-f.entropy() / (n * l1))

        def per_level(t):
            body = f.sup_level_body(t)
            if body.radius <= 0.0:
                return 0.0
            return entropy_ball_exact(n, 1, body.radius) * body.volume / l1

        est = level_quadrature(f, per_level)
        return est.shifted(-f.entropy() / (n * l1))
    if order != n + 1:
        raise ValueError(f"order must be 1 or n+1, got {order}")
    if isinstance(f, Indicator):
        if isinstance(f.body, Ball):
            return Estimate.exact(entropy_ball_exact(n, n + 1, f.body.radius))
        return entropy_body(f.body, n + 1, budget)
    i_np1 = fn_chord_power_np1(f)
    coef = (n + 1.0) / (unit_ball_volume(n) * i_np1.value)

    def per_level(t):
        body = f.sup_level_body(t)
        r = body.radius
        if r <= 0.0:
            return 0.0
        return entropy_ball_exact(n, n + 1, r) * coef * body.volume ** 2

    est = level_quadrature(f, per_level)
    # self-normalized by I_{n+1}(f) from the same pass
    rel = i_np1.std_error / i_np1.value if i_np1.value else 0.0
    return Estimate(est.value, math.hypot(est.std_error, abs(est.value) * rel),
                    est.n_samples, est.flags + ("self-normalized by I_{n+1}(f)",))


# ---------------------------------------------------------------------------
# Theorem C right side
# ---------------------------------------------------------------------------

def theorem_c_rhs(f, budget: Budget, n_dirs: int | None = None) -> Estimate:
    """int int (min{f(x),f(y)} - e^{-|x-y|}) / |x-y|^n dx dy for ||f||_1 = 1,
    evaluated through the near/far split: the exponential reference combines
    with the unit mass into n w_n gamma, the near part is the |difference|
    kernel on |x-y| <= 1 and the far part the min kernel on |x-y| >= 1."""
    src = _MinMassAdapter.of_fn(f)
    if abs(src.l1 - 1.0) > 1e-9:
        raise ValueError("theorem_c_rhs requires ||f||_1 = 1; normalize first")
    n = src.n
    area = sphere_area(n)
    if src.radial:
        u0 = np.zeros(n)
        u0[0] = 1.0
        val, err = _log_rho_r0_quadrature(src, u0)
        return Estimate(area * (val + EULER_GAMMA), area * err, 0)
    U, W = sphere_quadrature(n, n_dirs)
    total, toterr = 0.0, 0.0
    for u, w in zip(U, W):
        val, err = _log_rho_r0_quadrature(src, u)
        total += w * val
        toterr += w * err
    return Estimate(total + area * EULER_GAMMA, toterr, 0)


# ---------------------------------------------------------------------------
# deterministic pair functionals on grids
# ---------------------------------------------------------------------------

def grid_pair_integral(f: GridFn, kernel, pairing: str, kernel_range: float,
                       singular: bool = False, order: int = 10) -> tuple:
    """int int pairing(f(x), f(y)) kernel(|x-y|) dx dy for a piecewise-constant
    grid function, as an exact cell-pair sum

        sum_Delta P(Delta) * I_k(Delta),
        I_k(Delta) = int_{[-h,h]^n} k(|h Delta + w|) prod_d (h - |w_d|) dw.

    pairing "min" vanishes against the zero complement; "absdiff" pairs the
    support with the outside (the padded zero cells cover it out to
    kernel_range).  kernel is treated as zero beyond kernel_range; any
    analytic r-tail is the caller's business.  Cell windows containing the
    origin are refined recursively when singular=True.  Returns
    (value, error_estimate).
    """
    if pairing not in ("min", "absdiff"):
        raise ValueError(f"pairing must be 'min' or 'absdiff', got {pairing}")
    h = f.spacing
    n = f.n
    vals = f.values
    if pairing == "absdiff":
        pad = int(math.ceil(kernel_range / h)) + 2
        vals = np.pad(vals, pad)
    shape = np.array(vals.shape)

    # offsets whose kernel window can be nonzero
    max_cells = int(math.floor(kernel_range / h + math.sqrt(n))) + 1
    ranges = [np.arange(-min(s - 1, max_cells), min(s - 1, max_cells) + 1)
              for s in shape]
    grids = np.meshgrid(*ranges, indexing="ij")
    offsets = np.stack([g.ravel() for g in grids], axis=1)
    keep = np.linalg.norm(offsets, axis=1) * h <= kernel_range + math.sqrt(n) * h
    offsets = offsets[keep]

    pair_sums = np.array([_pair_sum(vals, off, pairing) for off in offsets])
    live = pair_sums != 0.0
    offsets, pair_sums = offsets[live], pair_sums[live]

    def window_integrals(gl_order, depth):
        out = np.empty(len(offsets))
        smooth = ~np.all(np.abs(offsets) <= 1, axis=1) if singular \
            else np.ones(len(offsets), bool)
        if np.any(smooth):
            out[smooth] = _smooth_windows(kernel, offsets[smooth], h, n, gl_order)
        for i in np.nonzero(~smooth)[0]:
            out[i] = _singular_window(kernel, offsets[i], h, n, gl_order, depth)
        return out

    fine = window_integrals(order, 44)
    coarse = window_integrals(max(order - 4, 4), 30)
    value = float(np.dot(pair_sums, fine))
    err = float(np.dot(np.abs(pair_sums), np.abs(fine - coarse))) + 1e-14 * abs(value)
    return value, err


def _pair_sum(vals, offset, pairing):
    a_sl, b_sl = [], []
    for d, s in enumerate(offset):
        size = vals.shape[d]
        lo, hi = max(0, s), min(size, size + s)
        if lo >= hi:
            return 0.0
        a_sl.append(slice(lo, hi))
        b_sl.append(slice(lo - s, hi - s))
    a = vals[tuple(a_sl)]
    b = vals[tuple(b_sl)]
    if pairing == "min":
        return float(np.minimum(a, b).sum())
    return float(np.abs(a - b).sum())


def _smooth_windows(kernel, offsets, h, n, order):
    # the triangular weight h - |w| kinks at 0: integrate each axis on
    # [-h, 0] and [0, h] separately so GL sees smooth factors
    x, w = np.polynomial.legendre.leggauss(order)
    ax_nodes = np.concatenate([0.5 * h * (x - 1.0), 0.5 * h * (x + 1.0)])
    ax_weights = np.concatenate([0.5 * h * w, 0.5 * h * w])
    axes = np.meshgrid(*([ax_nodes] * n), indexing="ij")
    nodes = np.stack([a.ravel() for a in axes], axis=1)            # (m, n)
    wts = np.meshgrid(*([ax_weights] * n), indexing="ij")
    weights = np.prod(np.stack([a.ravel() for a in wts], axis=1), axis=1)
    weights = weights * np.prod(h - np.abs(nodes), axis=1)
    Z = offsets[:, None, :] * h + nodes[None, :, :]
    K = kernel(np.linalg.norm(Z, axis=2))
    return K @ weights


def _singular_window(kernel, offset, h, n, order, depth):
    """I_k(Delta) for a window containing the origin: orthant split around 0,
    then geometric shells toward the nearest corner in each orthant box."""
    lo = offset * h - h
    hi = offset * h + h
    total = 0.0
    for signs in np.ndindex(*([2] * n)):
        box_lo, box_hi = [], []
        ok = True
        for d, sgn in enumerate(signs):
            if sgn == 0:
                a, b = max(lo[d], 0.0), hi[d]
            else:
                a, b = lo[d], min(hi[d], 0.0)
            if b - a <= 0.0:
                ok = False
                break
            box_lo.append(a)
            box_hi.append(b)
        if ok:
            total += _shell_integrate(kernel, np.array(box_lo), np.array(box_hi),
                                      offset * h, h, order, depth)
    return total


def _shell_integrate(kernel, lo, hi, center_z, h, order, depth):
    """Integrate k(|z|) prod(h - |z_d - center_z_d|) over the box [lo, hi]
    whose corner nearest the origin may touch it; dyadic shells anchor at
    that corner."""
    corner = np.where(np.abs(lo) <= np.abs(hi), lo, hi)
    far = np.where(np.abs(lo) <= np.abs(hi), hi, lo)
    ext = far - corner                       # signed extents away from 0
    x, w = np.polynomial.legendre.leggauss(order)
    total = 0.0
    lam = 1.0
    for _ in range(depth):
        nxt = 0.5 * lam
        # shell between nxt*ext and lam*ext, decomposed into len(ext) slabs
        for k in range(len(ext)):
            los, his = [], []
            for d in range(len(ext)):
                if d < k:
                    a, b = 0.0, lam * ext[d]
                elif d == k:
                    a, b = nxt * ext[d], lam * ext[d]
                else:
                    a, b = 0.0, nxt * ext[d]
                los.append(min(a, b))
                his.append(max(a, b))
            total += _box_gl(kernel, corner + np.array(los), corner + np.array(his),
                             center_z, h, x, w)
        lam = nxt
    return total


def _box_gl(kernel, lo, hi, center_z, h, x, w):
    n = len(lo)
    mids = 0.5 * (lo + hi)
    halfs = 0.5 * (hi - lo)
    if np.any(halfs <= 0.0):
        return 0.0
    axes = np.meshgrid(*[mids[d] + halfs[d] * x for d in range(n)], indexing="ij")
    nodes = np.stack([a.ravel() for a in axes], axis=1)
    wts = np.meshgrid(*[halfs[d] * w for d in range(n)], indexing="ij")
    weights = np.prod(np.stack([a.ravel() for a in wts], axis=1), axis=1)
    tri = np.prod(np.maximum(h - np.abs(nodes - center_z), 0.0), axis=1)
    K = kernel(np.linalg.norm(nodes, axis=1))
    return float(np.dot(weights, K * tri))
