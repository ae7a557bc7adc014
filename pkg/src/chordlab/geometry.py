"""Convex body catalog: balls, boxes, axis-aligned (optionally rotated)
ellipsoids and bounded halfspace polytopes.

Every body answers the same set of queries: membership, the interval cut out
of an affine line (hence chord lengths), the radial function seen from an
interior point, uniform point sampling by rejection, and the covariogram
|K cap (K+z)|.  The line/ray queries are vectorized over batches because the
Monte Carlo drivers push 10^5..10^6 lines at a time.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .specials import unit_ball_volume

_BOUNDARY_SLACK = 1e-12
_UNIT_TOL = 1e-12
_PERP_TOL = 1e-10


def unit_vector(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > _UNIT_TOL:
        raise ValueError(f"direction must be unit length, |u| = {norm}")
    return u


@dataclass(frozen=True)
class Direction:
    """Unit vector in R^n."""

    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", unit_vector(self.u))

    @property
    def n(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True)
class AffineLine:
    """Line {base + t u} with u on the sphere and base in u-perp."""

    u: np.ndarray
    base: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", unit_vector(self.u))
        base = np.asarray(self.base, dtype=float)
        if abs(float(base @ self.u)) > _PERP_TOL:
            raise ValueError("line base point must be orthogonal to the direction")
        object.__setattr__(self, "base", base)


class ConvexBody:
    """Common interface of the shape catalog."""

    n: int

    # -- scalar API ---------------------------------------------------------
    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point dimension {x.shape} != body dimension {self.n}")
        return bool(self.contains_many(x[None, :])[0])

    def chord_length(self, line: AffineLine) -> float:
        t0, t1 = self.line_interval(line.base[None, :], line.u[None, :])
        return float(np.maximum(t1 - t0, 0.0)[0])

    def radial(self, x, u) -> float:
        """rho_{K-x}(u): forward reach from an interior point x along u."""
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise ValueError("radial() requires x in K")
        u = unit_vector(u)
        t0, t1 = self.line_interval(x[None, :], u[None, :])
        return float(np.maximum(t1, 0.0)[0])

    def radial_many(self, X, u) -> np.ndarray:
        """Forward reach for a batch of interior points, one direction."""
        U = np.broadcast_to(np.asarray(u, float), X.shape)
        t0, t1 = self.line_interval(X, U)
        return np.maximum(t1, 0.0)

    # -- batch API (implemented per variant) --------------------------------
    def contains_many(self, X) -> np.ndarray:
        raise NotImplementedError

    def line_interval(self, P, U):
        """Clip lines {P[i] + t U[i]} to the body.

        Returns (t0, t1); the intersection is empty where t0 > t1.
        U need not be unit, but chord lengths assume it is.
        """
        raise NotImplementedError

    # -- cached geometry -----------------------------------------------------
    @property
    def volume(self) -> float:
        raise NotImplementedError

    @property
    def surface_area(self) -> float | None:
        """Exact surface area, or None when only the Cauchy Monte Carlo
        route applies (general polytopes in n >= 4)."""
        raise NotImplementedError

    @property
    def bounding_radius(self) -> float:
        raise NotImplementedError

    @property
    def bounding_center(self) -> np.ndarray:
        raise NotImplementedError

    def covariogram(self, z) -> float | None:
        """|K cap (K + z)| when a deterministic formula exists, else None."""
        return None

    def covariogram_many(self, Z) -> np.ndarray:
        out = np.empty(len(Z))
        for i, z in enumerate(Z):
            c = self.covariogram(z)
            if c is None:
                raise ValueError("no deterministic covariogram for this body")
            out[i] = c
        return out

    def sample_points(self, rng: np.random.Generator, m: int,
                      max_consecutive_rejects: int = 10**6) -> np.ndarray:
        """Uniform points in K by rejection from the bounding ball."""
        out = np.empty((m, self.n))
        filled = 0
        consecutive = 0
        R, c = self.bounding_radius, self.bounding_center
        while filled < m:
            k = max(2 * (m - filled), 1024)
            props = c + R * _uniform_ball(rng, k, self.n)
            keep = self.contains_many(props)
            hits = props[keep]
            if hits.shape[0] == 0:
                consecutive += k
                if consecutive >= max_consecutive_rejects:
                    raise RuntimeError(
                        "rejection sampler starved: "
                        f"{consecutive} consecutive rejects (degenerate bounding data?)"
                    )
                continue
            consecutive = 0
            take = min(hits.shape[0], m - filled)
            out[filled:filled + take] = hits[:take]
            filled += take
        return out

    def scaled(self, factor: float) -> "ConvexBody":
        """The dilate factor * K (about the origin)."""
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError


def _uniform_ball(rng, m, n):
    g = rng.standard_normal((m, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = rng.random(m) ** (1.0 / n)
    return g * r[:, None]


def ball_lens_volume_many(radius: float, dists, n: int, gl_order: int = 24) -> np.ndarray:
    """Volume of the intersection of two n-balls of equal radius at center
    distances dists: 2 omega_{n-1} int_{d/2}^{r} (r^2 - x^2)^((n-1)/2) dx,
    via the x = r sin(theta) substitution (smooth integrand), vectorized."""
    d = np.asarray(dists, dtype=float)
    out = np.zeros(d.shape)
    if n == 1:
        return np.maximum(2.0 * radius - d, 0.0)
    mask = d < 2.0 * radius
    if not np.any(mask):
        return out
    lo = np.arcsin(np.clip(d[mask] / (2.0 * radius), 0.0, 1.0))
    nodes, weights = np.polynomial.legendre.leggauss(gl_order)
    mid = 0.5 * (lo + math.pi / 2.0)
    half = 0.5 * (math.pi / 2.0 - lo)
    theta = mid[:, None] + half[:, None] * nodes[None, :]
    integral = radius ** n * half * (np.cos(theta) ** n @ weights)
    out[mask] = 2.0 * unit_ball_volume(n - 1) * integral
    return out


def ball_lens_volume(radius: float, dist: float, n: int, gl_order: int = 24) -> float:
    return float(ball_lens_volume_many(radius, np.array([dist]), n, gl_order)[0])


@dataclass(frozen=True)
class Ball(ConvexBody):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius < 0:
            raise ValueError("ball radius must be >= 0")

    @property
    def n(self) -> int:
        return self.center.shape[0]

    def contains_many(self, X):
        d = np.linalg.norm(np.asarray(X, float) - self.center, axis=1)
        return d <= self.radius + _BOUNDARY_SLACK

    def line_interval(self, P, U):
        P = np.asarray(P, float) - self.center
        U = np.asarray(U, float)
        a = np.sum(U * U, axis=1)
        b = 2.0 * np.sum(P * U, axis=1)
        c = np.sum(P * P, axis=1) - self.radius ** 2
        disc = b * b - 4.0 * a * c
        hit = disc >= 0.0
        sq = np.sqrt(np.where(hit, disc, 0.0))
        t0 = np.where(hit, (-b - sq) / (2.0 * a), 1.0)
        t1 = np.where(hit, (-b + sq) / (2.0 * a), 0.0)
        return t0, t1

    @property
    def volume(self):
        return unit_ball_volume(self.n) * self.radius ** self.n

    @property
    def surface_area(self):
        return self.n * unit_ball_volume(self.n) * self.radius ** (self.n - 1)

    @property
    def bounding_radius(self):
        return self.radius

    @property
    def bounding_center(self):
        return self.center

    def covariogram(self, z):
        return ball_lens_volume(self.radius, float(np.linalg.norm(z)), self.n)

    def covariogram_many(self, Z):
        d = np.linalg.norm(np.asarray(Z, float), axis=1)
        return ball_lens_volume_many(self.radius, d, self.n)

    def scaled(self, factor):
        return Ball(self.center * factor, self.radius * factor)

    def to_spec(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True)
class Box(ConvexBody):
    center: np.ndarray
    halfwidths: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "halfwidths", np.asarray(self.halfwidths, dtype=float))
        if np.any(self.halfwidths <= 0):
            raise ValueError("box halfwidths must be positive")
        if self.center.shape != self.halfwidths.shape:
            raise ValueError("center / halfwidth dimension mismatch")

    @property
    def n(self) -> int:
        return self.center.shape[0]

    def contains_many(self, X):
        d = np.abs(np.asarray(X, float) - self.center)
        return np.all(d <= self.halfwidths + _BOUNDARY_SLACK, axis=1)

    def line_interval(self, P, U):
        P = np.asarray(P, float) - self.center
        U = np.asarray(U, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = (-self.halfwidths - P) / U
            tb = (self.halfwidths - P) / U
        lo = np.minimum(ta, tb)
        hi = np.maximum(ta, tb)
        # axes the line runs parallel to: inside-slab test replaces the clip
        parallel = U == 0.0
        inside = np.abs(P) <= self.halfwidths + _BOUNDARY_SLACK
        lo = np.where(parallel, np.where(inside, -np.inf, np.inf), lo)
        hi = np.where(parallel, np.where(inside, np.inf, -np.inf), hi)
        return np.max(lo, axis=1), np.min(hi, axis=1)

    @property
    def volume(self):
        return float(np.prod(2.0 * self.halfwidths))

    @property
    def surface_area(self):
        w = 2.0 * self.halfwidths
        total = float(np.prod(w))
        return float(np.sum(2.0 * total / w)) if self.n > 1 else 2.0

    @property
    def bounding_radius(self):
        return float(np.linalg.norm(self.halfwidths))

    @property
    def bounding_center(self):
        return self.center

    def covariogram(self, z):
        z = np.asarray(z, float)
        edges = 2.0 * self.halfwidths - np.abs(z)
        return float(np.prod(np.maximum(edges, 0.0)))

    def covariogram_many(self, Z):
        edges = 2.0 * self.halfwidths - np.abs(np.asarray(Z, float))
        return np.prod(np.maximum(edges, 0.0), axis=1)

    def scaled(self, factor):
        return Box(self.center * factor, self.halfwidths * factor)

    def to_spec(self):
        return {"type": "box", "center": self.center.tolist(),
                "halfwidths": self.halfwidths.tolist()}


@dataclass(frozen=True)
class Ellipsoid(ConvexBody):
    """Axis-aligned ellipsoid, optionally composed with a stored rotation:
    K = center + Q diag(semiaxes) B^n."""

    center: np.ndarray
    semiaxes: np.ndarray
    rotation: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "semiaxes", np.asarray(self.semiaxes, dtype=float))
        if np.any(self.semiaxes <= 0):
            raise ValueError("ellipsoid semiaxes must be positive")
        if self.rotation is not None:
            q = np.asarray(self.rotation, dtype=float)
            if not np.allclose(q @ q.T, np.eye(self.n), atol=1e-10):
                raise ValueError("rotation must be orthogonal")
            object.__setattr__(self, "rotation", q)

    @property
    def n(self) -> int:
        return self.center.shape[0]

    def _to_ball_frame(self, V):
        V = np.asarray(V, float)
        if self.rotation is not None:
            V = V @ self.rotation  # rows times Q == Q^T applied to columns
        return V / self.semiaxes

    def contains_many(self, X):
        Y = self._to_ball_frame(np.asarray(X, float) - self.center)
        return np.sum(Y * Y, axis=1) <= 1.0 + _BOUNDARY_SLACK

    def line_interval(self, P, U):
        Pb = self._to_ball_frame(np.asarray(P, float) - self.center)
        Ub = self._to_ball_frame(U)
        a = np.sum(Ub * Ub, axis=1)
        b = 2.0 * np.sum(Pb * Ub, axis=1)
        c = np.sum(Pb * Pb, axis=1) - 1.0
        disc = b * b - 4.0 * a * c
        hit = disc >= 0.0
        sq = np.sqrt(np.where(hit, disc, 0.0))
        t0 = np.where(hit, (-b - sq) / (2.0 * a), 1.0)
        t1 = np.where(hit, (-b + sq) / (2.0 * a), 0.0)
        return t0, t1

    @property
    def volume(self):
        return unit_ball_volume(self.n) * float(np.prod(self.semiaxes))

    @property
    def surface_area(self):
        if self.n == 2:
            # perimeter by quadrature of the arc-length integrand
            a, b = self.semiaxes
            nodes, weights = np.polynomial.legendre.leggauss(96)
            th = 0.25 * math.pi * (nodes + 1.0)
            integrand = np.sqrt((a * np.sin(th)) ** 2 + (b * np.cos(th)) ** 2)
            return 4.0 * 0.25 * math.pi * float(np.dot(weights, integrand))
        if self.n == 3:
            # area of x = diag(a) s over the unit sphere: |cross product| of
            # the parametrization; smooth 2-D tensor quadrature on a half sphere
            a1, a2, a3 = self.semiaxes
            nth, wth = np.polynomial.legendre.leggauss(64)
            theta = 0.25 * math.pi * (nth + 1.0)
            phi = np.linspace(0.0, 2.0 * math.pi, 128, endpoint=False)
            T, P = np.meshgrid(theta, phi, indexing="ij")
            st, ct = np.sin(T), np.cos(T)
            sp, cp = np.sin(P), np.cos(P)
            g = st * np.sqrt(
                (a2 * a3 * st * cp) ** 2 + (a1 * a3 * st * sp) ** 2 + (a1 * a2 * ct) ** 2
            )
            wt = wth * (math.pi / 4.0)
            upper = float(np.sum(wt[:, None] * g) * (2.0 * math.pi / len(phi)))
            return 2.0 * upper
        return None

    @property
    def bounding_radius(self):
        return float(np.max(self.semiaxes))

    @property
    def bounding_center(self):
        return self.center

    def covariogram(self, z):
        zb = self._to_ball_frame(np.asarray(z, float)[None, :])[0]
        lens = ball_lens_volume(1.0, float(np.linalg.norm(zb)), self.n)
        return float(np.prod(self.semiaxes)) * lens

    def covariogram_many(self, Z):
        Zb = self._to_ball_frame(np.asarray(Z, float))
        d = np.linalg.norm(Zb, axis=1)
        scale = float(np.prod(self.semiaxes))
        return scale * ball_lens_volume_many(1.0, d, self.n)

    def scaled(self, factor):
        return Ellipsoid(self.center * factor, self.semiaxes * factor, self.rotation)

    def to_spec(self):
        spec = {"type": "ellipsoid", "center": self.center.tolist(),
                "semiaxes": self.semiaxes.tolist()}
        if self.rotation is not None:
            spec["rotation"] = self.rotation.tolist()
        return spec


class Polytope(ConvexBody):
    """Bounded intersection of halfspaces normal . x <= offset."""

    def __init__(self, normals, offsets):
        self.normals = np.asarray(normals, dtype=float)
        self.offsets = np.asarray(offsets, dtype=float)
        if self.normals.ndim != 2 or self.normals.shape[0] != self.offsets.shape[0]:
            raise ValueError("normals must be (m, n) with m offsets")
        self._n = self.normals.shape[1]
        self._vertices = self._enumerate_vertices() if self._n <= 3 else None
        self._check_bounded()
        self._center = (
            np.mean(self._vertices, axis=0) if self._vertices is not None
            else self._interior_point_by_sampling()
        )
        self._bounding_radius = (
            float(np.max(np.linalg.norm(self._vertices - self._center, axis=1)))
            if self._vertices is not None else self._bounding_radius_by_rays()
        )
        self._volume, self._surface = self._exact_measures()

    @property
    def n(self) -> int:
        return self._n

    # -- construction helpers -------------------------------------------------
    def _enumerate_vertices(self):
        m, n = self.normals.shape
        verts = []
        for idx in itertools.combinations(range(m), n):
            a = self.normals[list(idx)]
            b = self.offsets[list(idx)]
            if abs(np.linalg.det(a)) < 1e-12:
                continue
            v = np.linalg.solve(a, b)
            if np.all(self.normals @ v <= self.offsets + 1e-9 * (1.0 + np.abs(self.offsets))):
                verts.append(v)
        if not verts:
            raise ValueError("polytope has no vertices (empty or unbounded)")
        deduped = []
        for v in verts:
            if not any(np.linalg.norm(v - w) < 1e-9 for w in deduped):
                deduped.append(v)
        return np.array(deduped)

    def _check_bounded(self):
        # ray escape test: a direction escapes iff no facet clips it
        rng = np.random.default_rng(0x5EED)
        dirs = rng.standard_normal((256, self._n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        dirs = np.vstack([dirs, np.eye(self._n), -np.eye(self._n)])
        denom = dirs @ self.normals.T  # (k, m)
        if np.any(np.all(denom <= 1e-12, axis=1)):
            raise ValueError("polytope is unbounded (ray escape)")

    def _interior_point_by_sampling(self):
        rng = np.random.default_rng(0xFACE7)
        scale = max(1.0, float(np.max(np.abs(self.offsets))) * 4.0)
        for _ in range(4000):
            x = rng.uniform(-scale, scale, self._n)
            if np.all(self.normals @ x <= self.offsets - 1e-12):
                return x
        raise ValueError("could not find an interior point by sampling")

    def _bounding_radius_by_rays(self):
        rng = np.random.default_rng(0xB0B)
        dirs = rng.standard_normal((4096, self._n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        P = np.broadcast_to(self._center, dirs.shape)
        _, t1 = self.line_interval(P, dirs)
        return float(np.max(t1)) * 1.5

    def _exact_measures(self):
        if self._n == 1:
            lo, hi = float(np.min(self._vertices)), float(np.max(self._vertices))
            return hi - lo, 2.0
        if self._n == 2:
            v = self._vertices - self._center
            order = np.argsort(np.arctan2(v[:, 1], v[:, 0]))
            v = self._vertices[order]
            x, y = v[:, 0], v[:, 1]
            area = 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
            per = float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))
            return area, per
        if self._n == 3:
            from scipy.spatial import ConvexHull

            hull = ConvexHull(self._vertices)
            return float(hull.volume), float(hull.area)
        return None, None

    # -- queries ---------------------------------------------------------------
    def contains_many(self, X):
        vals = np.asarray(X, float) @ self.normals.T - self.offsets
        return np.all(vals <= _BOUNDARY_SLACK * (1.0 + np.abs(self.offsets)), axis=1)

    def line_interval(self, P, U):
        P = np.asarray(P, float)
        U = np.asarray(U, float)
        denom = U @ self.normals.T                     # (k, m)
        num = self.offsets - P @ self.normals.T        # (k, m)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = num / denom
        pos = denom > 1e-14
        neg = denom < -1e-14
        par = ~(pos | neg)
        hi = np.where(pos, t, np.inf)
        lo = np.where(neg, t, -np.inf)
        # parallel facets: infeasible rows get an empty interval
        bad = par & (num < 0.0)
        hi = np.where(bad, -np.inf, hi)
        return np.max(lo, axis=1), np.min(hi, axis=1)

    @property
    def volume(self):
        if self._volume is None:
            raise ValueError("exact polytope volume only available in n <= 3; "
                             "use functionals.cauchy_surface_area / MC volume")
        return self._volume

    @property
    def surface_area(self):
        return self._surface

    @property
    def bounding_radius(self):
        return self._bounding_radius

    @property
    def bounding_center(self):
        return self._center

    @property
    def vertices(self):
        return self._vertices

    def covariogram(self, z):
        if self._n > 3:
            return None
        z = np.asarray(z, float)
        # K cap (K+z) is the polytope with both constraint sets
        normals = np.vstack([self.normals, self.normals])
        offsets = np.concatenate([self.offsets, self.offsets + self.normals @ z])
        try:
            return Polytope(normals, offsets).volume
        except ValueError:
            return 0.0

    def scaled(self, factor):
        return Polytope(self.normals, self.offsets * factor)

    def to_spec(self):
        return {
            "type": "polytope",
            "halfspaces": [
                {"normal": n.tolist(), "offset": float(b)}
                for n, b in zip(self.normals, self.offsets)
            ],
        }


def box_as_polytope(box: Box) -> Polytope:
    """The same box expressed through halfspaces (for cross-validation)."""
    n = box.n
    normals = np.vstack([np.eye(n), -np.eye(n)])
    offsets = np.concatenate([box.center + box.halfwidths,
                              -(box.center - box.halfwidths)])
    return Polytope(normals, offsets)


def body_from_spec(spec: dict) -> ConvexBody:
    kind = spec.get("type")
    if kind == "ball":
        return Ball(np.asarray(spec["center"], float), float(spec["radius"]))
    if kind == "box":
        return Box(np.asarray(spec["center"], float), np.asarray(spec["halfwidths"], float))
    if kind == "ellipsoid":
        rot = spec.get("rotation")
        return Ellipsoid(
            np.asarray(spec["center"], float),
            np.asarray(spec["semiaxes"], float),
            np.asarray(rot, float) if rot is not None else None,
        )
    if kind == "polytope":
        hs = spec["halfspaces"]
        normals = np.array([h["normal"] for h in hs], float)
        offsets = np.array([h["offset"] for h in hs], float)
        return Polytope(normals, offsets)
    raise ValueError(f"unknown shape type {kind!r}")


def load_body(path) -> ConvexBody:
    with open(Path(path), "r", encoding="utf-8") as fh:
        return body_from_spec(json.load(fh))
