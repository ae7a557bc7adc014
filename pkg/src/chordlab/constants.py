"""Sharp constants of the chord Sobolev family.

Everything here is deterministic: the optimal constant sigma_{n,alpha}, its
normalized companion sigma~_{n,alpha}, the chord power integral of the unit
ball, the alpha = 0 derivative constants (digamma route and finite-difference
route), the Theorem-C constant, and the exact chord entropies of the unit
ball that anchor the entropy inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .specials import EULER_GAMMA, digamma, gamma_fn, unit_ball_volume


class Regime(Enum):
    NEG = "neg"        # alpha in (-1, 0)
    ZERO = "zero"      # alpha == 0 exactly
    SUB = "sub"        # alpha in (0, n)
    EQN = "eqn"        # alpha == n exactly
    SUPER = "super"    # alpha in (n, inf)


@dataclass(frozen=True)
class AlphaParam:
    """Exponent alpha > -1 with its regime relative to a dimension n.

    The ZERO and EQN tags are decided by exact comparison of the *input*
    value, never by comparing computed floats.
    """

    alpha: float
    regime: Regime

    @classmethod
    def classify(cls, alpha: float, n: int) -> "AlphaParam":
        if not alpha > -1.0:
            raise ValueError(f"alpha must be > -1, got {alpha}")
        if alpha == 0.0:
            regime = Regime.ZERO
        elif alpha == float(n):
            regime = Regime.EQN
        elif alpha < 0.0:
            regime = Regime.NEG
        elif alpha < n:
            regime = Regime.SUB
        else:
            regime = Regime.SUPER
        return cls(alpha=alpha, regime=regime)


def omega(n: float) -> float:
    """Unit ball volume, real index allowed (needed at n + alpha)."""
    return unit_ball_volume(n)


def sigma(n: int, alpha: float) -> float:
    """Sharp constant sigma_{n,alpha} of the chord Sobolev inequalities,

        n 2^a pi^((n-a-1)/2) Gamma((a+1)/2) Gamma(n/2+1)^(a/n)
        ------------------------------------------------------ ,
                       |a| Gamma((n+a)/2 + 1)

    valid for alpha in (-1,0) u (0,inf)."""
    if alpha == 0.0:
        raise ValueError("sigma is singular at alpha = 0; use sigma_bar0")
    if not alpha > -1.0:
        raise ValueError(f"alpha must be > -1, got {alpha}")
    return (
        n
        * 2.0 ** alpha
        * math.pi ** ((n - alpha - 1.0) / 2.0)
        * gamma_fn((alpha + 1.0) / 2.0)
        * gamma_fn(n / 2.0 + 1.0) ** (alpha / n)
        / (abs(alpha) * gamma_fn((n + alpha) / 2.0 + 1.0))
    )


def alpha_sigma(n: int, alpha: float) -> float:
    """Continuous extension of |alpha| * sigma_{n,alpha}; equals n*omega_n
    at alpha = 0 from both sides."""
    if alpha == 0.0:
        return n * omega(n)
    return abs(alpha) * sigma(n, alpha)


def ball_chord_power(n: int, alpha: float) -> float:
    """Chord power integral I_{alpha+1}(B^n) = 2^(alpha+1) omega_{n+alpha} /
    omega_{alpha+1}."""
    if not alpha > -1.0:
        raise ValueError(f"alpha must be > -1, got {alpha}")
    return 2.0 ** (alpha + 1.0) * omega(n + alpha) / omega(alpha + 1.0)


def sigma_tilde(n: int, alpha: float) -> float:
    """Chord isoperimetric constant |alpha|(alpha+1) sigma_{n,alpha} / (n omega_n);
    also equals I_{alpha+1}(B^n) * omega_n^(-(n+alpha)/n)."""
    return abs(alpha) * (alpha + 1.0) * sigma(n, alpha) / (n * omega(n))


def sigma_bar0(n: int) -> float:
    """Normalized alpha-derivative (1/(n omega_n)) d/da|_0 (a sigma_{n,a}),
    evaluated analytically through digamma values."""
    return (
        -0.5 * math.log(math.pi)
        - 0.5 * EULER_GAMMA
        + math.log(gamma_fn(n / 2.0 + 1.0)) / n
        - 0.5 * digamma(n / 2.0 + 1.0)
    )


def sigma_bar0_fd(n: int, step: float = 1e-5) -> float:
    """Central finite-difference fallback for sigma_bar0, differencing the
    continuous branch |alpha| sigma_{n,alpha} (alpha sigma itself is
    odd-signed across 0)."""
    g_plus = step * sigma(n, step)
    g_minus = step * sigma(n, -step)
    return (g_plus - g_minus) / (2.0 * step) / (n * omega(n))


def sigma_bar0_report(n: int) -> dict:
    """Both sigma_bar0 routes and their discrepancy."""
    dg = sigma_bar0(n)
    fd = sigma_bar0_fd(n)
    return {"digamma": dg, "finite_difference": fd, "discrepancy": abs(dg - fd)}


def sigma0(n: int) -> float:
    """Theorem-C constant sigma_0 = n omega_n (sigma_bar0 + gamma)."""
    return n * omega(n) * (sigma_bar0(n) + EULER_GAMMA)


def e1_ball(n: int) -> float:
    """Chord entropy E_1(B^n) = gamma/2 + psi(n/2+1)/2 - 1 (exact)."""
    return 0.5 * EULER_GAMMA + 0.5 * digamma(n / 2.0 + 1.0) - 1.0


def en1_ball(n: int) -> float:
    """Chord entropy E_{n+1}(B^n) = -(n+1)[log2 + (psi((n+3)/2) - psi(n+1))/2]."""
    return -(n + 1.0) * (
        math.log(2.0) + 0.5 * (digamma((n + 3.0) / 2.0) - digamma(n + 1.0))
    )


def entropy_ball(n: int, order: int) -> float:
    """E_order(B^n) for order in {1, n+1}."""
    if order == 1:
        return e1_ball(n)
    if order == n + 1:
        return en1_ball(n)
    raise ValueError(f"order must be 1 or n+1 = {n + 1}, got {order}")


def theta_constant_c(n_panels: int = 48) -> float:
    """The constant C = int_0^1 (1-e^-r)/r dr + int_1^inf e^-r/r dr from the
    alpha = 0 radial mean body split; satisfies C - 2 int_1^inf e^-r/r = gamma."""
    nodes, weights = np.polynomial.legendre.leggauss(24)

    def panel(a, b, fn):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        x = mid + half * nodes
        return half * float(np.dot(weights, fn(x)))

    total = 0.0
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        total += panel(a, b, lambda r: -np.expm1(-r) / r)
    # e^-r/r decays fast; geometric panels out to r = 60 leave < 1e-28
    edges = 1.0 + 59.0 * (np.linspace(0.0, 1.0, n_panels + 1) ** 3)
    for a, b in zip(edges[:-1], edges[1:]):
        total += panel(a, b, lambda r: np.exp(-r) / r)
    return total


def exp_integral_tail(n_panels: int = 48) -> float:
    """int_1^inf e^-r / r dr by the same quadrature as theta_constant_c."""
    nodes, weights = np.polynomial.legendre.leggauss(24)
    total = 0.0
    edges = 1.0 + 59.0 * (np.linspace(0.0, 1.0, n_panels + 1) ** 3)
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        x = mid + half * nodes
        total += half * float(np.dot(weights, np.exp(-x) / x))
    return total


@dataclass(frozen=True)
class SharpConstants:
    """All constants for a (n, alpha) pair; sigma-family fields are None at
    alpha = 0 where the per-dimension sigma_bar0 path applies."""

    n: int
    alpha: float
    regime: str
    omega_n: float
    sigma: float | None
    sigma_tilde: float | None
    ball_chord_power: float
    sigma_bar0: float
    sigma_bar0_fd: float
    sigma0: float

    @classmethod
    def for_pair(cls, n: int, alpha: float) -> "SharpConstants":
        ap = AlphaParam.classify(alpha, n)
        at_zero = ap.regime is Regime.ZERO
        return cls(
            n=n,
            alpha=alpha,
            regime=ap.regime.value,
            omega_n=omega(n),
            sigma=None if at_zero else sigma(n, alpha),
            sigma_tilde=None if at_zero else sigma_tilde(n, alpha),
            ball_chord_power=ball_chord_power(n, alpha),
            sigma_bar0=sigma_bar0(n),
            sigma_bar0_fd=sigma_bar0_fd(n),
            sigma0=sigma0(n),
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "regime": self.regime,
            "omega_n": self.omega_n,
            "sigma": self.sigma,
            "sigma_tilde": self.sigma_tilde,
            "ball_chord_power": self.ball_chord_power,
            "sigma_bar0": self.sigma_bar0,
            "sigma_bar0_fd": self.sigma_bar0_fd,
            "sigma0": self.sigma0,
        }
