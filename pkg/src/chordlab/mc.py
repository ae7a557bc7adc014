"""Seeded, sharded Monte Carlo and quadrature engines.

Three samplers drive every functional:

* a Haar line sampler (direction uniform on the sphere, base point uniform in
  the orthogonal disk of the bounding ball), normalized so that
  weight * mean[g(line)] estimates int g dl with dl = dH^{n-1} du / (n omega_n);

* a Riesz pair sampler whose displacement radius absorbs the kernel
  singularity: r ~ r^(alpha-1) on (0, rmax] for alpha > 0, r ~ r^alpha for
  alpha in (-1, 0); the raw alpha < 0 variant carries a tail-index diagnostic
  because the pointwise |chi - chi| estimator is provably heavy-tailed;

* a level quadrature that integrates per-level body functionals against the
  exponential substitution t = fmax (1 - e^{-s}), with geometric panels
  resolving the logarithmically growing level bodies near t = 0.

Estimates are bit-reproducible for a fixed Budget: per-shard generators are
derived from (master_seed, shard_index), samples are consumed in fixed-size
batches, and shard merging concatenates per-batch partial sums so that the
merged mean is computed by a single exact fsum over the same partials as the
single-stream evaluation.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field, replace

import numpy as np

from .specials import sphere_area, unit_ball_volume

_BATCH = 1 << 17

DIVERGENT_TAIL_FLAG = "tail-index-divergent"


# ---------------------------------------------------------------------------
# estimates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Estimate:
    """Monte Carlo value with standard error; stdError 0 marks analytic or
    quadrature-exact results (quadrature carries its refinement error)."""

    value: float
    std_error: float
    n_samples: int
    flags: tuple = ()

    def scaled(self, c: float) -> "Estimate":
        return Estimate(self.value * c, self.std_error * abs(c), self.n_samples, self.flags)

    def shifted(self, c: float) -> "Estimate":
        return Estimate(self.value + c, self.std_error, self.n_samples, self.flags)

    def __add__(self, other: "Estimate") -> "Estimate":
        return Estimate(
            self.value + other.value,
            math.hypot(self.std_error, other.std_error),
            self.n_samples + other.n_samples,
            tuple(sorted(set(self.flags) | set(other.flags))),
        )

    def __sub__(self, other: "Estimate") -> "Estimate":
        return (self + other.scaled(-1.0))

    @classmethod
    def exact(cls, value: float, err: float = 0.0) -> "Estimate":
        return cls(float(value), float(err), 0)

    def to_dict(self) -> dict:
        return {"value": self.value, "std_error": self.std_error,
                "n_samples": self.n_samples, "flags": list(self.flags)}


def combined_std_error(*estimates: Estimate) -> float:
    return math.sqrt(sum(e.std_error ** 2 for e in estimates))


@dataclass(frozen=True)
class Budget:
    n_samples: int
    master_seed: int
    n_shards: int = 1

    def __post_init__(self):
        if self.n_samples <= 0 or self.n_shards <= 0:
            raise ValueError("budget requires positive sample and shard counts")

    def shard_sizes(self) -> list[int]:
        base, rem = divmod(self.n_samples, self.n_shards)
        return [base + (1 if k < rem else 0) for k in range(self.n_shards)]

    def shard_rng(self, shard: int) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence((self.master_seed & 0xFFFFFFFFFFFFFFFF, shard))
        )

    def with_samples(self, n: int) -> "Budget":
        return replace(self, n_samples=n)

    def with_seed(self, seed: int) -> "Budget":
        return replace(self, master_seed=seed)

    def split(self, *tags: str) -> "Budget":
        """Independent sub-budget for a named sub-estimate of the same run
        (stable across processes: tags are mixed in by CRC, not hash())."""
        mix = np.random.SeedSequence(
            (self.master_seed & 0xFFFFFFFFFFFFFFFF,)
            + tuple(zlib.crc32(t.encode()) for t in tags)
        ).generate_state(1)[0]
        return replace(self, master_seed=int(mix))

    def to_dict(self) -> dict:
        return {"n_samples": self.n_samples, "master_seed": self.master_seed,
                "n_shards": self.n_shards}


@dataclass
class BatchStats:
    """Per-batch partial sums; merging concatenates, so merged and
    single-stream estimates share the identical fsum reduction."""

    sums: list = field(default_factory=list)
    sumsqs: list = field(default_factory=list)
    counts: list = field(default_factory=list)

    def push(self, values: np.ndarray):
        self.sums.append(float(np.sum(values)))
        self.sumsqs.append(float(np.sum(values * values)))
        self.counts.append(int(values.size))

    def merge(self, other: "BatchStats") -> "BatchStats":
        return BatchStats(self.sums + other.sums, self.sumsqs + other.sumsqs,
                          self.counts + other.counts)

    def estimate(self, flags: tuple = ()) -> Estimate:
        n = sum(self.counts)
        if n == 0:
            raise ValueError("no samples accumulated")
        mean = math.fsum(self.sums) / n
        if n > 1:
            var = max(math.fsum(self.sumsqs) - n * mean * mean, 0.0) / (n - 1)
            se = math.sqrt(var / n)
        else:
            se = float("inf")
        return Estimate(mean, se, n, flags)


def mc_mean(sample_values, budget: Budget, batch: int = _BATCH,
            tail_diagnostic: bool = False) -> Estimate:
    """mean of sample_values(rng, m) over the sharded budget."""
    stats = BatchStats()
    flags: set = set()
    probe = None
    for shard, size in enumerate(budget.shard_sizes()):
        rng = budget.shard_rng(shard)
        left = size
        while left > 0:
            m = min(batch, left)
            vals = np.asarray(sample_values(rng, m), dtype=float)
            stats.push(vals)
            if tail_diagnostic and probe is None:
                probe = vals
            left -= m
    if tail_diagnostic and probe is not None:
        idx = tail_index(probe)
        if idx < 2.2:
            flags.add(DIVERGENT_TAIL_FLAG)
    return stats.estimate(tuple(sorted(flags)))


def tail_index(values: np.ndarray, k: int | None = None) -> float:
    """Hill estimator of the tail index of |values|; < 2 means the estimator
    variance looks divergent."""
    a = np.abs(np.asarray(values, float))
    a = a[a > 0]
    if a.size < 200:
        return float("inf")
    if k is None:
        k = max(25, a.size // 100)
    k = min(k, a.size - 1)
    top = np.sort(a)[-(k + 1):]
    x0 = top[0]
    if x0 <= 0:
        return float("inf")
    logs = np.log(top[1:] / x0)
    mean_log = float(np.mean(logs))
    return float("inf") if mean_log == 0.0 else 1.0 / mean_log


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _unit_sphere(rng, m, n):
    g = rng.standard_normal((m, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # resample-free guard; zeros have probability ~0
    norms[norms == 0.0] = 1.0
    return g / norms


def _uniform_ball(rng, m, n):
    return _unit_sphere(rng, m, n) * (rng.random(m) ** (1.0 / n))[:, None]


def line_weight(n: int, radius: float) -> float:
    """Total dl-measure of the lines meeting a ball of the given radius."""
    return unit_ball_volume(n - 1) * radius ** (n - 1)


def sample_lines(radius: float, center, rng, m: int):
    """Batch Haar line sample: directions U on S^{n-1}, base points B uniform
    in the radius-R disk of U-perp through the projected center."""
    center = np.asarray(center, dtype=float)
    n = center.shape[0]
    U = _unit_sphere(rng, m, n)
    if n == 1:
        return U, np.zeros((m, 1))
    G = rng.standard_normal((m, n))
    G -= np.sum(G * U, axis=1, keepdims=True) * U
    norms = np.linalg.norm(G, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    V = G / norms
    rad = radius * rng.random(m) ** (1.0 / (n - 1))
    c_perp = center - np.sum(center * U, axis=1, keepdims=True) * U
    B = c_perp + rad[:, None] * V
    return U, B


def sample_line(radius: float, center, rng):
    """Single (AffineLine, weight) draw; the batch form drives the engines."""
    from .geometry import AffineLine

    U, B = sample_lines(radius, np.asarray(center, float), rng, 1)
    n = U.shape[1]
    return AffineLine(U[0], B[0]), line_weight(n, radius)


def line_functional(body, chord_fn, budget: Budget, radius=None, center=None) -> Estimate:
    """weight * mean[chord_fn(chord lengths)] ~= int chord_fn(|K cap l|) dl."""
    R = body.bounding_radius if radius is None else radius
    c = body.bounding_center if center is None else np.asarray(center, float)
    w = line_weight(body.n, R)

    def values(rng, m):
        U, B = sample_lines(R, c, rng, m)
        t0, t1 = body.line_interval(B, U)
        chords = np.maximum(t1 - t0, 0.0)
        return w * chord_fn(chords)

    return mc_mean(values, budget)


def riesz_pair_sample(radius: float, center, alpha: float, rng, m: int):
    """Batch draw of (X, Y, weight) with displacement importance density
    r ~ r^(alpha-1) for alpha > 0 and r ~ r^alpha for alpha in (-1, 0);
    weight * mean[W(X, Y)] estimates the Riesz double integral of W over
    pairs supported in the sampling ball with |X - Y| <= 2 radius."""
    if alpha <= -1.0:
        raise ValueError(f"alpha must be > -1, got {alpha}")
    if alpha == 0.0:
        raise ValueError("alpha = 0 has no pair kernel; use the limit checks")
    center = np.asarray(center, dtype=float)
    n = center.shape[0]
    rmax = 2.0 * radius
    X = center + radius * _uniform_ball(rng, m, n)
    V = _unit_sphere(rng, m, n)
    vol_x = unit_ball_volume(n) * radius ** n
    if alpha > 0:
        r = rmax * rng.random(m) ** (1.0 / alpha)
        weight = np.full(m, vol_x * sphere_area(n) * rmax ** alpha / alpha)
    else:
        r = rmax * rng.random(m) ** (1.0 / (alpha + 1.0))
        weight = vol_x * sphere_area(n) * rmax ** (alpha + 1.0) / ((alpha + 1.0) * r)
    Y = X + r[:, None] * V
    return X, Y, weight


def riesz_pair_functional(W, n: int, radius: float, center, alpha: float,
                          budget: Budget, tail_diagnostic: bool = True) -> Estimate:
    """Estimate of int int W(x,y) |x-y|^(alpha-n) dx dy over the truncated
    pair set (x in the sampling ball, |x-y| <= 2 radius)."""

    def values(rng, m):
        X, Y, w = riesz_pair_sample(radius, np.asarray(center, float), alpha, rng, m)
        return w * W(X, Y)

    return mc_mean(values, budget, tail_diagnostic=tail_diagnostic and alpha < 0)


_R_FLOOR_REL = 1e-8


def displacement_kernel_mc(D, n: int, alpha: float, rmax: float, budget: Budget) -> Estimate:
    """Monte Carlo over (r, u) of int_S int_0^rmax r^(alpha-1) D(r u) dr du for
    alpha in (-1, 0), with the x-integral already folded into D (which must
    vanish linearly at r = 0).  Radii below r_floor = 1e-8 rmax are integrated
    analytically through the measured slope of D."""
    if not -1.0 < alpha < 0.0:
        raise ValueError("displacement sampler covers alpha in (-1, 0)")
    r_floor = _R_FLOOR_REL * rmax
    t0 = (r_floor / rmax) ** (alpha + 1.0)
    const = sphere_area(n) * rmax ** (alpha + 1.0) * (1.0 - t0) / (alpha + 1.0)

    def values(rng, m):
        V = _unit_sphere(rng, m, n)
        t = t0 + (1.0 - t0) * rng.random(m)
        r = rmax * t ** (1.0 / (alpha + 1.0))
        return const * D(r[:, None] * V) / r

    U, W = sphere_quadrature(n, 64)
    slopes = D(r_floor * U) / r_floor
    near = float(np.dot(W, slopes)) * r_floor ** (alpha + 1.0) / (alpha + 1.0)
    return mc_mean(values, budget).shifted(near)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def gauss_panels(edges: np.ndarray, order: int = 16):
    """Composite Gauss-Legendre nodes/weights over consecutive panels."""
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def geometric_edges(a: float, b: float, n_panels: int, ratio: float = 0.5) -> np.ndarray:
    """Panel edges on [a, b] refining geometrically toward a."""
    steps = ratio ** np.arange(n_panels - 1, -1, -1, dtype=float)
    rel = np.concatenate([[0.0], np.cumsum(steps) / np.sum(steps)])
    return a + (b - a) * rel


def quad_with_error(fn_vec, edges: np.ndarray, order: int = 16):
    """(integral, refinement error estimate) by comparing against half order."""
    xf, wf = gauss_panels(edges, order)
    fine = float(np.dot(wf, fn_vec(xf)))
    xc, wc = gauss_panels(edges, max(order // 2, 2))
    coarse = float(np.dot(wc, fn_vec(xc)))
    return fine, abs(fine - coarse)


def kernel_r_integral(phi_vec, alpha: float, rmax: float, n_panels: int = 48,
                      order: int = 16):
    """(value, error) for int_0^rmax r^(alpha-1) phi(r) dr.

    alpha > 0: substitution t = (r/rmax)^alpha flattens the singular weight;
    alpha in (-1, 0): requires phi(0) = 0 with linear vanishing, and uses
    t = (r/rmax)^(alpha+1), integrating phi(r)/r.
    """
    if alpha > 0:
        def integrand(t):
            r = rmax * t ** (1.0 / alpha)
            return phi_vec(r)

        edges = geometric_edges(0.0, 1.0, n_panels)
        val, err = quad_with_error(integrand, edges, order)
        scale = rmax ** alpha / alpha
        return scale * val, scale * err
    if -1.0 < alpha < 0.0:
        # same r-floor treatment as the sampler: phi(r)/r below r_floor is
        # cancellation noise, integrate it by the measured slope instead
        r_floor = _R_FLOOR_REL * rmax
        t0 = (r_floor / rmax) ** (alpha + 1.0)

        def integrand(t):
            r = rmax * t ** (1.0 / (alpha + 1.0))
            return phi_vec(r) / r

        edges = t0 + (1.0 - t0) * geometric_edges(0.0, 1.0, n_panels)
        val, err = quad_with_error(integrand, edges, order)
        scale = rmax ** (alpha + 1.0) / (alpha + 1.0)
        slope = float(np.asarray(phi_vec(np.array([r_floor])))[0]) / r_floor
        near = slope * r_floor ** (alpha + 1.0) / (alpha + 1.0)
        return scale * val + near, scale * err + abs(near) * 1e-6
    raise ValueError(f"alpha must be in (-1,0) or (0,inf), got {alpha}")


def level_quadrature(f, per_level, n_panels: int = 64, order: int = 16,
                     s_max: float = 45.0) -> Estimate:
    """int_0^fmax per_level(t) dt with t = fmax (1 - e^{-s}) and geometric
    s-panels toward 0 (the large-body tail of log-concave catalogs).

    per_level may return floats (error from panel refinement) or Estimates
    (node standard errors propagated)."""
    fmax = f.f_max

    def run(panels, ord_):
        edges = geometric_edges(0.0, s_max, panels)
        s, w = gauss_panels(edges, ord_)
        t = fmax * (-np.expm1(-s))
        jac = fmax * np.exp(-s)
        total = 0.0
        var = 0.0
        n_mc = 0
        flags: set = set()
        for si, wi, ti, ji in zip(s, w, t, jac):
            if ti <= 0.0 or ti >= fmax:
                ti = min(max(ti, np.nextafter(0.0, 1.0)), np.nextafter(fmax, 0.0))
            coef = wi * ji
            out = per_level(float(ti))
            if isinstance(out, Estimate):
                total += coef * out.value
                var += (coef * out.std_error) ** 2
                n_mc += out.n_samples
                flags |= set(out.flags)
            else:
                total += coef * float(out)
        return total, var, n_mc, flags

    fine, var, n_mc, flags = run(n_panels, order)
    if var == 0.0:
        coarse, _, _, _ = run(max(n_panels // 2, 4), order)
        err = abs(fine - coarse)
        return Estimate(fine, err, 0, tuple(sorted(flags)))
    return Estimate(fine, math.sqrt(var), n_mc, tuple(sorted(flags)))


def sphere_quadrature(n: int, m_hint: int | None = None, rng=None):
    """(directions, weights) with sum(weights) = surface area n omega_n.

    n = 1: the two endpoints; n = 2: uniform angles (spectrally accurate);
    n = 3: 14 x 25 Gauss-Legendre / uniform product rule (350 nodes);
    n >= 4: Monte Carlo directions.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        m = m_hint or 256
        th = 2.0 * math.pi * (np.arange(m) + 0.5) / m
        U = np.stack([np.cos(th), np.sin(th)], axis=1)
        return U, np.full(m, 2.0 * math.pi / m)
    if n == 3:
        m_polar = 14
        m_phi = 25
        ct, wt = np.polynomial.legendre.leggauss(m_polar)
        phi = 2.0 * math.pi * (np.arange(m_phi) + 0.5) / m_phi
        st = np.sqrt(1.0 - ct ** 2)
        U = np.stack([
            np.repeat(st, m_phi) * np.cos(np.tile(phi, m_polar)),
            np.repeat(st, m_phi) * np.sin(np.tile(phi, m_polar)),
            np.repeat(ct, m_phi),
        ], axis=1)
        W = np.repeat(wt, m_phi) * (2.0 * math.pi / m_phi)
        return U, W
    m = m_hint or 2048
    rng = rng or np.random.default_rng(np.random.SeedSequence((0xD17EC, n)))
    U = _unit_sphere(rng, m, n)
    return U, np.full(m, sphere_area(n) / m)
