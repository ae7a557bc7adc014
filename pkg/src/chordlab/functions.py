"""Log-concave function catalog and finite grid functions.

The catalog (scaled indicators, Gaussians, radial exponentials) is chosen so
that superlevel sets are catalog bodies and the slicing quantities that feed
the level-set and displacement routes are deterministic: L^p quasi-norms,
entropy, level bodies, and the displacement min-mass

    g(z) = int min{f(x), f(x+z)} dx,

which drives the alpha < 0 kernels through |f(x)-f(x+z)| = 2(||f||_1 - g(z)).

GridFn is piecewise constant on cells, which makes layer-cake, rearrangement
and pair-sum identities exact; it is the input class of the rearrangement
checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import Ball, Box, ConvexBody, body_from_spec
from .specials import gamma_fn, sphere_area, unit_ball_volume


class LogConcaveFn:
    """Common interface of the analytic catalog."""

    n: int

    def eval(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.eval_many(x[None, :])[0])

    def eval_many(self, X) -> np.ndarray:
        raise NotImplementedError

    @property
    def f_max(self) -> float:
        raise NotImplementedError

    @property
    def l1_norm(self) -> float:
        raise NotImplementedError

    def sup_level_body(self, t: float) -> ConvexBody:
        raise NotImplementedError

    def lp_quasi_norm(self, p: float) -> float:
        raise NotImplementedError

    def entropy(self) -> float:
        """int f log f."""
        raise NotImplementedError

    def scale_arg(self, lam: float) -> "LogConcaveFn":
        """x -> f(lam x), staying inside the catalog."""
        raise NotImplementedError

    def normalized(self) -> "LogConcaveFn":
        """Same shape rescaled in value so that ||f||_1 = 1."""
        raise NotImplementedError

    def min_mass(self, z) -> float:
        """g(z) = int min{f(x), f(x+z)} dx."""
        return float(self.min_mass_many(np.asarray(z, float)[None, :])[0])

    def min_mass_many(self, Z) -> np.ndarray:
        raise NotImplementedError

    def support_radius(self, tiny: float = 1e-9) -> float:
        """Radius around the support center beyond which f < tiny * f_max."""
        raise NotImplementedError

    @property
    def support_center(self) -> np.ndarray:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Indicator(LogConcaveFn):
    scale: float
    body: ConvexBody

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("indicator scale must be positive")

    @property
    def n(self):
        return self.body.n

    def eval_many(self, X):
        return self.scale * self.body.contains_many(X).astype(float)

    @property
    def f_max(self):
        return self.scale

    @property
    def l1_norm(self):
        return self.scale * self.body.volume

    def sup_level_body(self, t):
        if not 0.0 < t <= self.f_max:
            raise ValueError(f"level {t} outside (0, {self.f_max}]")
        return self.body

    def lp_quasi_norm(self, p):
        _check_p(p)
        return self.scale * self.body.volume ** (1.0 / p)

    def entropy(self):
        return self.scale * self.body.volume * math.log(self.scale)

    def scale_arg(self, lam):
        return Indicator(self.scale, self.body.scaled(1.0 / lam))

    def normalized(self):
        return Indicator(self.scale / self.l1_norm, self.body)

    def min_mass_many(self, Z):
        return self.scale * self.body.covariogram_many(Z)

    def support_radius(self, tiny=1e-9):
        return self.body.bounding_radius

    @property
    def support_center(self):
        return self.body.bounding_center

    def to_spec(self):
        return {"type": "indicator", "scale": self.scale, "body": self.body.to_spec()}


@dataclass(frozen=True)
class Gaussian(LogConcaveFn):
    """f(x) = scale * exp(-|x - center|^2 / (2 width^2))."""

    scale: float
    center: np.ndarray
    width: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.scale <= 0 or self.width <= 0:
            raise ValueError("gaussian scale and width must be positive")

    @property
    def n(self):
        return self.center.shape[0]

    def eval_many(self, X):
        d2 = np.sum((np.asarray(X, float) - self.center) ** 2, axis=1)
        return self.scale * np.exp(-d2 / (2.0 * self.width ** 2))

    @property
    def f_max(self):
        return self.scale

    @property
    def l1_norm(self):
        return self.scale * (2.0 * math.pi * self.width ** 2) ** (self.n / 2.0)

    def sup_level_body(self, t):
        if not 0.0 < t <= self.f_max:
            raise ValueError(f"level {t} outside (0, {self.f_max}]")
        r = self.width * math.sqrt(max(2.0 * math.log(self.scale / t), 0.0))
        return Ball(self.center, r)

    def lp_quasi_norm(self, p):
        _check_p(p)
        return self.scale * (2.0 * math.pi * self.width ** 2 / p) ** (self.n / (2.0 * p))

    def entropy(self):
        return self.l1_norm * (math.log(self.scale) - self.n / 2.0)

    def scale_arg(self, lam):
        return Gaussian(self.scale, self.center / lam, self.width / lam)

    def normalized(self):
        return Gaussian(self.scale / self.l1_norm, self.center, self.width)

    def min_mass_many(self, Z):
        # min of two width-s bells at offset z integrates to
        # ||f||_1 * erfc(|z| / (2 sqrt(2) s))
        d = np.linalg.norm(np.asarray(Z, float), axis=1)
        arg = d / (2.0 * math.sqrt(2.0) * self.width)
        return self.l1_norm * np.array([math.erfc(a) for a in arg])

    def support_radius(self, tiny=1e-9):
        return self.width * math.sqrt(2.0 * math.log(1.0 / tiny))

    @property
    def support_center(self):
        return self.center

    def to_spec(self):
        return {"type": "gaussian", "scale": self.scale,
                "center": self.center.tolist(), "width": self.width}


@dataclass(frozen=True)
class Exponential(LogConcaveFn):
    """f(x) = scale * exp(-rate * |x - center|)."""

    scale: float
    rate: float
    center: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.scale <= 0 or self.rate <= 0:
            raise ValueError("exponential scale and rate must be positive")

    @property
    def n(self):
        return self.center.shape[0]

    def eval_many(self, X):
        d = np.linalg.norm(np.asarray(X, float) - self.center, axis=1)
        return self.scale * np.exp(-self.rate * d)

    @property
    def f_max(self):
        return self.scale

    @property
    def l1_norm(self):
        n = self.n
        return self.scale * sphere_area(n) * gamma_fn(n) / self.rate ** n

    def sup_level_body(self, t):
        if not 0.0 < t <= self.f_max:
            raise ValueError(f"level {t} outside (0, {self.f_max}]")
        return Ball(self.center, math.log(self.scale / t) / self.rate)

    def lp_quasi_norm(self, p):
        _check_p(p)
        n = self.n
        mass_p = self.scale ** p * sphere_area(n) * gamma_fn(n) / (p * self.rate) ** n
        return mass_p ** (1.0 / p)

    def entropy(self):
        # 1-D radial quadrature of n omega_n r^(n-1) f(r) log f(r)
        n, a, c = self.n, self.rate, self.scale
        nodes, weights = np.polynomial.legendre.leggauss(32)
        upper = 60.0 / a
        edges = np.linspace(0.0, 1.0, 65) ** 2 * upper
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            r = mid + half * nodes
            fr = c * np.exp(-a * r)
            total += half * float(np.dot(weights, r ** (n - 1) * fr * np.log(fr)))
        return sphere_area(n) * total

    def scale_arg(self, lam):
        return Exponential(self.scale, self.rate * lam, self.center / lam)

    def normalized(self):
        return Exponential(self.scale / self.l1_norm, self.rate, self.center)

    def min_mass_many(self, Z):
        d = np.linalg.norm(np.asarray(Z, float), axis=1)
        return 2.0 * self._halfspace_mass_many(d / 2.0)

    def _halfspace_mass_many(self, depths):
        """int_{<x, e1> >= depth} f(x) dx for the centered profile; closed
        forms in n = 1, 3, a vectorized shell quadrature in n = 2."""
        n, a, c = self.n, self.rate, self.scale
        d = np.asarray(depths, dtype=float)
        out = np.full(d.shape, 0.5 * self.l1_norm)
        pos = d > 0.0
        if not np.any(pos):
            return out
        dp = d[pos]
        if n == 1:
            out[pos] = c * np.exp(-a * dp) / a
        elif n == 3:
            out[pos] = 2.0 * math.pi * c * np.exp(-a * dp) * (dp / a ** 2 + 2.0 / a ** 3)
        elif n == 2:
            # shells {|x| = r, x1 >= d} of arc length 2 r acos(d/r); the
            # sqrt corner at r = d is flattened by r = d + s^2
            nodes, weights = np.polynomial.legendre.leggauss(64)
            smax = np.sqrt(60.0 / a + 2.0 * dp)
            s = 0.5 * smax[:, None] * (nodes[None, :] + 1.0)
            jac = 0.5 * smax[:, None] * (2.0 * s)
            r = dp[:, None] + s ** 2
            vals = np.exp(-a * r) * 2.0 * r * np.arccos(np.clip(dp[:, None] / r, -1, 1))
            out[pos] = c * np.sum(weights[None, :] * vals * jac, axis=1)
        else:
            out[pos] = np.array([self._halfspace_mass_slow(di) for di in dp])
        return out

    def _halfspace_mass_slow(self, depth):
        n, a, c = self.n, self.rate, self.scale
        nodes, weights = np.polynomial.legendre.leggauss(24)
        t_edges = depth + (np.linspace(0.0, 1.0, 17) ** 2) * (50.0 / a)
        rho_edges = (np.linspace(0.0, 1.0, 17) ** 2) * (50.0 / a)
        area = (n - 1) * unit_ball_volume(n - 1)
        total = 0.0
        for tlo, thi in zip(t_edges[:-1], t_edges[1:]):
            tm, th = 0.5 * (tlo + thi), 0.5 * (thi - tlo)
            t = tm + th * nodes
            inner = np.zeros_like(t)
            for rlo, rhi in zip(rho_edges[:-1], rho_edges[1:]):
                rm, rh = 0.5 * (rlo + rhi), 0.5 * (rhi - rlo)
                rho = rm + rh * nodes
                vals = rho[None, :] ** (n - 2) * np.exp(
                    -a * np.sqrt(t[:, None] ** 2 + rho[None, :] ** 2)
                )
                inner += rh * vals @ weights
            total += th * float(np.dot(weights, inner))
        return c * area * total

    def support_radius(self, tiny=1e-9):
        return math.log(1.0 / tiny) / self.rate

    @property
    def support_center(self):
        return self.center

    def to_spec(self):
        return {"type": "exponential", "scale": self.scale,
                "center": self.center.tolist(), "rate": self.rate}


def _check_p(p):
    # quasi-norm for p in (0,1), genuine norm beyond; the negative-alpha
    # Sobolev sides need p = n/(n+alpha) > 1
    if not p > 0.0:
        raise ValueError(f"p must be positive, got {p}")


class GridFn:
    """Nonnegative piecewise-constant function on a regular grid of cells.

    Cell (i1,..,in) covers origin + [i*h, (i+1)*h); eval uses the containing
    cell, so superlevel sets are unions of cells and the layer-cake formula
    is exact.
    """

    def __init__(self, origin, spacing, values):
        self.origin = np.asarray(origin, dtype=float)
        self.spacing = float(spacing)
        self.values = np.asarray(values, dtype=float)
        self.n = self.values.ndim
        if self.n not in (1, 2, 3):
            raise ValueError("GridFn supports n in {1, 2, 3}")
        if self.origin.shape != (self.n,):
            raise ValueError("origin dimension mismatch")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ValueError("grid values must be finite and >= 0")
        if float(self.values.sum()) <= 0:
            raise ValueError("grid function must have positive mass")

    # -- pointwise ------------------------------------------------------------
    def eval(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.eval_many(x[None, :])[0])

    def eval_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        idx = np.floor((X - self.origin) / self.spacing).astype(int)
        ok = np.all((idx >= 0) & (idx < np.array(self.values.shape)), axis=1)
        idx = np.clip(idx, 0, np.array(self.values.shape) - 1)
        vals = self.values[tuple(idx.T)]
        return np.where(ok, vals, 0.0)

    # -- integrals -------------------------------------------------------------
    @property
    def f_max(self) -> float:
        return float(self.values.max())

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.n

    @property
    def l1_norm(self) -> float:
        return self.cell_volume * float(self.values.sum())

    def lp_quasi_norm(self, p: float) -> float:
        _check_p(p)
        return float(self.cell_volume * np.sum(self.values ** p)) ** (1.0 / p)

    def entropy(self) -> float:
        v = self.values[self.values > 0]
        return self.cell_volume * float(np.sum(v * np.log(v)))

    def level_measure(self, t: float) -> float:
        return self.cell_volume * float(np.count_nonzero(self.values >= t))

    def normalized(self) -> "GridFn":
        return GridFn(self.origin, self.spacing, self.values / self.l1_norm)

    # -- rearrangement -----------------------------------------------------------
    def schwarz_symmetral(self) -> "GridFn":
        """Radially decreasing rearrangement on the same grid: the value
        multiset is reassigned to cells by increasing center distance from
        the grid center (stable lexicographic tie-break)."""
        shape = self.values.shape
        centers = np.stack(
            np.meshgrid(*[np.arange(s) + 0.5 for s in shape], indexing="ij"), axis=-1
        ).reshape(-1, self.n) * self.spacing + self.origin
        grid_center = self.origin + 0.5 * self.spacing * np.array(shape)
        dist = np.linalg.norm(centers - grid_center, axis=1)
        order = np.lexsort((np.arange(dist.size), dist))
        flat = np.sort(self.values.reshape(-1))[::-1]
        out = np.empty_like(flat)
        out[order] = flat
        return GridFn(self.origin, self.spacing, out.reshape(shape))

    # -- displacement mass (exact for piecewise constants) ------------------------
    def min_mass(self, z) -> float:
        return float(self.min_mass_many(np.asarray(z, float)[None, :])[0])

    def min_mass_many(self, Z) -> np.ndarray:
        """g(z) by exact cell-overlap decomposition: a shift of k + frac cells
        splits every cell across 2^n neighbours with product weights; the
        per-shift overlap sums are memoized and gathered by unique shift."""
        Z = np.asarray(Z, dtype=float)
        h = self.spacing
        K = np.floor(Z / h).astype(int)
        frac = Z / h - K
        total = np.zeros(Z.shape[0])
        for corner in np.ndindex(*([2] * self.n)):
            corner_arr = np.array(corner)
            w = np.prod(np.where(corner_arr[None, :] == 1, frac, 1.0 - frac), axis=1)
            shifts = K + corner_arr
            uniq, inverse = np.unique(shifts, axis=0, return_inverse=True)
            overlaps = np.array([self._min_overlap(tuple(int(s) for s in row))
                                 for row in uniq])
            total += w * overlaps[inverse]
        return total * self.cell_volume

    def _min_overlap(self, shift: tuple) -> float:
        """sum_i min(v_i, v_{i+shift}); memoized, the quadrature drivers hit
        the same integer shifts for many fractional displacements."""
        cache = getattr(self, "_overlap_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_overlap_cache", cache)
        hit = cache.get(shift)
        if hit is not None:
            return hit
        a_slices, b_slices = [], []
        out = 0.0
        ok = True
        for d, s in enumerate(shift):
            size = self.values.shape[d]
            lo_a, hi_a = max(0, s), min(size, size + s)
            if lo_a >= hi_a:
                ok = False
                break
            a_slices.append(slice(lo_a, hi_a))
            b_slices.append(slice(lo_a - s, hi_a - s))
        if ok:
            a = self.values[tuple(a_slices)]
            b = self.values[tuple(b_slices)]
            out = float(np.minimum(a, b).sum())
        cache[shift] = out
        return out

    @property
    def support_center(self) -> np.ndarray:
        return self.origin + 0.5 * self.spacing * np.array(self.values.shape)

    def support_radius(self, tiny: float = 0.0) -> float:
        return 0.5 * self.spacing * float(np.linalg.norm(self.values.shape))

    def to_spec(self, values_path: str) -> dict:
        return {
            "type": "grid",
            "origin": self.origin.tolist(),
            "spacing": self.spacing,
            "values": values_path,
            "shape": list(self.values.shape),
        }


def fn_from_spec(spec: dict, base_dir: Path | None = None):
    kind = spec.get("type")
    if kind == "indicator":
        return Indicator(float(spec["scale"]), body_from_spec(spec["body"]))
    if kind == "gaussian":
        return Gaussian(float(spec["scale"]), np.asarray(spec["center"], float),
                        float(spec["width"]))
    if kind == "exponential":
        return Exponential(float(spec["scale"]), float(spec["rate"]),
                           np.asarray(spec["center"], float))
    if kind == "grid":
        path = Path(spec["values"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        raw = np.fromfile(path, dtype="<f8")
        values = raw.reshape(spec["shape"])
        return GridFn(np.asarray(spec["origin"], float), float(spec["spacing"]), values)
    raise ValueError(f"unknown function type {kind!r}")


def load_fn(path):
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        return fn_from_spec(json.load(fh), base_dir=path.parent)


def two_bump_grid(n: int = 2, cells: int = 28, spacing: float = 0.25) -> GridFn:
    """Standard asymmetric two-bump fixture for the rearrangement suite."""
    shape = (cells,) * n
    centers = np.stack(
        np.meshgrid(*[np.arange(c) + 0.5 for c in shape], indexing="ij"), axis=-1
    ) * spacing
    extent = cells * spacing
    c1 = np.full(n, 0.28 * extent)
    c2 = np.full(n, 0.72 * extent)
    c2[0] = 0.70 * extent
    d1 = np.linalg.norm(centers - c1, axis=-1)
    d2 = np.linalg.norm(centers - c2, axis=-1)
    vals = 1.4 * np.exp(-(d1 / (0.11 * extent)) ** 2) + np.exp(-(d2 / (0.16 * extent)) ** 2)
    vals[vals < 1e-3] = 0.0
    return GridFn(np.zeros(n), spacing, vals)
