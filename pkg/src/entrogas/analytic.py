"""Closed-form evaluation of the analytic eigenvalue-density branches.

Each branch is a stationary eigenvalue density of the constrained log-gas,
parametrized by the support center m and half-width delta.  This module
holds the beta <-> delta relations, the scaled densities, the thermodynamic
potentials u, s, beta*f, the critical constants, entropy and volume as
functions of purity, the extreme eigenvalues, the integer series counting
rooted non-separable planar maps, and local expansion checks at the two
continuous critical points.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import (
    BranchKind,
    CriticalSet,
    DomainError,
    NoSignChange,
    OrderTooLarge,
    OutOfBranch,
    ThermoPoint,
    bracket_root,
)

BETA_PLUS = 2.0
BETA_G = -2.0 / 27.0
BETA_TANGENT = -1.5 + math.sqrt(2.0)   # where the two two-sided sub-branches meet
DELTA_TANGENT = 2.0 + math.sqrt(2.0)

_EPS = 1e-12


@dataclass(frozen=True)
class BranchWindow:
    kind: BranchKind
    beta_interval: tuple[float, float]
    delta_interval: tuple[float, float]


BRANCH_TABLE: tuple[BranchWindow, ...] = (
    BranchWindow(BranchKind.StableSemicircle, (2.0, math.inf), (0.0, 1.0)),
    BranchWindow(BranchKind.StableWishart, (BETA_G, 2.0), (1.0, 3.0)),
    BranchWindow(BranchKind.MetaWishartProlong, (BETA_G, 0.0), (2.0, 3.0)),
    BranchWindow(BranchKind.MetaTwoSidedLow, (BETA_TANGENT, BETA_G), (3.0, DELTA_TANGENT)),
    BranchWindow(BranchKind.MetaTwoSidedHigh, (-2.0, BETA_TANGENT), (1.0, DELTA_TANGENT)),
    BranchWindow(BranchKind.MetaSymmetric, (-math.inf, -2.0), (0.0, 1.0)),
    BranchWindow(BranchKind.SeparableSea, (-math.inf, 0.0), (2.0, 2.0)),
)

_WINDOWS = {w.kind: w for w in BRANCH_TABLE}


def branch_window(kind: BranchKind) -> BranchWindow:
    return _WINDOWS[kind]


def _check_beta(beta: float, kind: BranchKind) -> None:
    lo, hi = _WINDOWS[kind].beta_interval
    if not (lo - _EPS <= beta <= hi + _EPS):
        raise OutOfBranch(f"beta={beta} outside {kind.name} window [{lo}, {hi}]")


def _check_delta(delta: float, kind: BranchKind) -> None:
    lo, hi = _WINDOWS[kind].delta_interval
    if not (lo - _EPS <= delta <= hi + _EPS):
        raise OutOfBranch(f"delta={delta} outside {kind.name} window [{lo}, {hi}]")


def _wishart_cubic(delta: float, beta: float) -> float:
    # corner condition of the positivity cut with the upper level curve
    return beta * delta**3 / 4.0 + delta / 2.0 - 1.0


def _twosided_S(delta: float) -> float:
    val = -delta * delta + 4.0 * delta - 2.0
    return math.sqrt(max(val, 0.0))


def beta_of_delta(delta: float, kind: BranchKind) -> float:
    """Inverse temperature of a branch at half-width delta."""
    delta = float(delta)
    _check_delta(delta, kind)
    if kind is BranchKind.StableSemicircle:
        return 2.0 / delta**2
    if kind in (BranchKind.StableWishart, BranchKind.MetaWishartProlong):
        return 4.0 / delta**3 - 2.0 / delta**2
    if kind is BranchKind.MetaTwoSidedLow:
        return -1.0 / delta**2 + _twosided_S(delta) / delta**3
    if kind is BranchKind.MetaTwoSidedHigh:
        return -1.0 / delta**2 - _twosided_S(delta) / delta**3
    if kind is BranchKind.MetaSymmetric:
        return -2.0 / delta**2
    raise OutOfBranch("the sea half-width is pinned at 2; no beta(delta) relation")


def _invert_on_window(f, lo: float, hi: float) -> float:
    """bracket_root with a fallback for roots sitting on a window endpoint.

    At branch endpoints (and at the fold where the two two-sided sub-branches
    meet) the root coincides with lo or hi and roundoff can leave both
    endpoint values on the same side of zero.
    """
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0.0:
        if min(abs(flo), abs(fhi)) < 1e-9:
            return lo if abs(flo) <= abs(fhi) else hi
        raise NoSignChange(f"f({lo})={flo} and f({hi})={fhi} have the same sign")
    return bracket_root(f, lo, hi, tol=1e-14)


def delta_of_beta(beta: float, kind: BranchKind) -> float:
    """Support half-width of a branch at inverse temperature beta.

    Computed by bracketed root-finding on the branch's beta(delta) relation
    inside its delta window, which stays well conditioned all the way to the
    window endpoints.
    """
    beta = float(beta)
    _check_beta(beta, kind)
    if kind is BranchKind.StableSemicircle:
        return math.sqrt(2.0 / beta)
    if kind is BranchKind.StableWishart:
        return _invert_on_window(lambda d: _wishart_cubic(d, beta), 1.0, 3.0)
    if kind is BranchKind.MetaWishartProlong:
        return _invert_on_window(lambda d: _wishart_cubic(d, beta), 2.0, 3.0)
    if kind is BranchKind.MetaTwoSidedLow:
        return _invert_on_window(lambda d: beta_of_delta(d, kind) - beta,
                                 3.0, DELTA_TANGENT)
    if kind is BranchKind.MetaTwoSidedHigh:
        return _invert_on_window(lambda d: beta_of_delta(d, kind) - beta,
                                 1.0, DELTA_TANGENT)
    if kind is BranchKind.MetaSymmetric:
        return math.sqrt(-2.0 / beta)
    return 2.0


def delta_wishart_radical(beta: float) -> float:
    """Closed radical form of the Wishart-branch half-width.

    Ill conditioned near beta = 0; kept as an independent cross-check of the
    bracketed inversion for |beta| > 0.01.
    """
    if not (BETA_G - _EPS <= beta <= 2.0 + _EPS) or abs(beta) < 1e-6:
        raise DomainError("radical form used only inside the branch, away from beta = 0")
    ratio = beta / BETA_G
    big = (cmath.sqrt(-ratio) + cmath.sqrt(1.0 - ratio)) ** (1.0 / 3.0)
    val = (1.0 / beta) * cmath.sqrt(2.0 * beta / 3.0) * (big - 1.0 / big)
    return float(val.real)


def mu_of_beta(beta: float) -> float:
    """Detached eigenvalue of the spiked stationary solution, beta <= -2."""
    if beta > -2.0 + _EPS:
        raise OutOfBranch(f"no detached-eigenvalue solution for beta={beta} > -2")
    return 0.5 + 0.5 * math.sqrt(1.0 + 2.0 / beta)


@lru_cache(maxsize=1)
def critical_points() -> CriticalSet:
    """The four critical constants of the phase diagram.

    beta_plus and beta_g are exact; mu_minus solves
    mu / (2 (1 - mu)) = -ln(1 - mu) and beta_minus = -1 / (2 mu (1 - mu)).
    """
    mu = bracket_root(lambda m: m / (2.0 * (1.0 - m)) + math.log(1.0 - m),
                      0.1, 0.999, tol=1e-14)
    return CriticalSet(beta_plus=2.0, beta_g=BETA_G,
                       beta_minus=-1.0 / (2.0 * mu * (1.0 - mu)), mu_minus=mu)


def _zeta(m: float, delta: float, beta: float) -> float:
    # trace multiplier of the stationary density at (m, delta)
    return 4.0 * (m - 1.0) / delta**2 - 2.0 * beta * m


def thermo(beta: float, kind: BranchKind) -> ThermoPoint:
    """Full thermodynamic record of a branch at one temperature.

    u is the internal energy density, s the entropy density; the identity
    beta*f = beta*u - s holds on every branch.  On the separable branch u and
    s are those of the sea plus (for beta <= -2) the detached eigenvalue.
    """
    beta = float(beta)
    _check_beta(beta, kind)

    if kind is BranchKind.StableSemicircle:
        delta = math.sqrt(2.0 / beta)
        u = 1.0 + 1.0 / (2.0 * beta)
        s = -0.25 - 0.5 * math.log(2.0 * beta)
        return ThermoPoint(beta=beta, kind=kind, u=u, s=s, betaf=beta * u - s,
                           m=1.0, delta=delta, zeta=_zeta(1.0, delta, beta))

    if kind in (BranchKind.StableWishart, BranchKind.MetaWishartProlong):
        delta = delta_of_beta(beta, kind)
        u = 1.5 * delta - 0.25 * delta**2
        s = -2.25 + 5.0 / delta - 3.0 / delta**2 + math.log(delta / 2.0)
        return ThermoPoint(beta=beta, kind=kind, u=u, s=s, betaf=beta * u - s,
                           m=delta, delta=delta, zeta=_zeta(delta, delta, beta))

    if kind in (BranchKind.MetaTwoSidedLow, BranchKind.MetaTwoSidedHigh):
        delta = delta_of_beta(beta, kind)
        S = _twosided_S(delta)
        sign = 1.0 if kind is BranchKind.MetaTwoSidedLow else -1.0
        u = 2.0 * delta - 0.375 * delta**2 - sign * delta * S / 8.0
        s = (-2.0 + 15.0 / (4.0 * delta) - 15.0 / (8.0 * delta**2)
             + sign * S / (8.0 * delta) + math.log(delta / 2.0))
        return ThermoPoint(beta=beta, kind=kind, u=u, s=s, betaf=beta * u - s,
                           m=delta, delta=delta, zeta=_zeta(delta, delta, beta))

    if kind is BranchKind.MetaSymmetric:
        delta = math.sqrt(-2.0 / beta)
        u = 1.0 - 1.5 / beta
        s = -0.25 - 0.5 * math.log(-2.0 * beta)
        return ThermoPoint(beta=beta, kind=kind, u=u, s=s, betaf=beta * u - s,
                           m=1.0, delta=delta, zeta=_zeta(1.0, delta, beta))

    # separable sea at (m, delta) = (2, 2), plus the detached eigenvalue
    # whenever the spiked stationary solution exists
    mu = mu_of_beta(beta) if beta <= -2.0 + _EPS else 0.0
    if mu > 0.0:
        u = mu * mu
        s = math.log(1.0 - mu) - 0.5
    else:
        u = 0.0
        s = -0.5
    return ThermoPoint(beta=beta, kind=kind, u=u, s=s, betaf=beta * u - s,
                       m=2.0, delta=2.0, zeta=1.0 / (1.0 - mu), mu=mu)


def stable_branch(beta: float, alpha: int = 3) -> BranchKind:
    """Globally stable branch at the given temperature and Gibbs scaling.

    alpha = 3 is the scaling where the mean purity is O(1/N); alpha = 2 the
    finite-purity scaling where the sea-plus-spike solution competes.
    """
    if alpha == 3:
        if beta >= 2.0:
            return BranchKind.StableSemicircle
        if beta >= BETA_G - _EPS:
            return BranchKind.StableWishart
        raise OutOfBranch(f"no O(1/N)-purity stationary density below beta={BETA_G}")
    if alpha == 2:
        if beta < 0.0:
            return BranchKind.SeparableSea
        raise OutOfBranch("the finite-purity scaling is used at negative beta only")
    raise DomainError("alpha must be 2 or 3")


def metastable_branch(beta: float) -> BranchKind:
    """Metastable one-cut continuation at negative beta (same scaling as the
    stable branch); the four sub-branches tile beta < 0 and meet continuously
    at beta_g, the tangency, and -2."""
    if beta >= 0.0:
        raise OutOfBranch("metastable continuation exists for beta < 0 only")
    if beta >= BETA_G:
        return BranchKind.MetaWishartProlong
    if beta >= BETA_TANGENT:
        return BranchKind.MetaTwoSidedLow
    if beta > -2.0:
        return BranchKind.MetaTwoSidedHigh
    return BranchKind.MetaSymmetric


def density(point: ThermoPoint, x):
    """Scaled eigenvalue density phi(x) of a branch at x = (lambda - m)/delta.

    Vectorized over x; raises DomainError when any |x| >= 1.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) >= 1.0):
        raise DomainError("density is defined on the open interval -1 < x < 1")
    kind = point.kind
    delta = point.delta
    edge = np.sqrt(1.0 - xa * xa)
    if kind is BranchKind.StableSemicircle:
        out = (2.0 / math.pi) * edge
    elif kind in (BranchKind.StableWishart, BranchKind.MetaWishartProlong):
        out = (2.0 / (math.pi * delta)) * np.sqrt((1.0 - xa) / (1.0 + xa)) \
            * (1.0 + (2.0 - delta) * xa)
    elif kind in (BranchKind.MetaTwoSidedLow, BranchKind.MetaTwoSidedHigh):
        S = _twosided_S(delta)
        sign = 1.0 if kind is BranchKind.MetaTwoSidedLow else -1.0
        num = (0.5 * (delta + sign * S) + 2.0 * (1.0 - delta) * xa
               + (delta - sign * S) * xa * xa)
        out = num / (math.pi * delta * edge)
    elif kind is BranchKind.MetaSymmetric:
        out = 2.0 * xa * xa / (math.pi * edge)
    else:
        out = (1.0 - 2.0 * xa * (point.m - 1.0) / delta) / (math.pi * edge)
    return out if out.ndim else float(out)


class Regime(Enum):
    """Which energy scaling the entropy curve is expressed in."""

    ScaledByN = "scaled_by_n"
    Finite = "finite"


def entropy_of_energy(u: float, regime: Regime) -> float:
    """Entropy density of the isopurity manifold at internal energy u.

    ScaledByN covers u in (1, 2] where the purity is O(1/N) (semicircle piece
    up to u = 5/4, then the one-sided-support piece); Finite covers u in
    (0, 1) where the purity stays finite (linear coexistence piece up to
    u = mu_minus**2, then the detached-eigenvalue piece).
    """
    u = float(u)
    if regime is Regime.ScaledByN:
        if not (1.0 < u <= 2.0 + _EPS):
            raise DomainError(f"scaled energy u={u} outside (1, 2]")
        if u <= 1.25:
            return 0.5 * math.log(u - 1.0) - 0.25
        delta = 3.0 - math.sqrt(9.0 - 4.0 * u)
        return -2.25 + 5.0 / delta - 3.0 / delta**2 + math.log(delta / 2.0)
    if regime is Regime.Finite:
        if not (0.0 < u < 1.0):
            raise DomainError(f"finite energy u={u} outside (0, 1)")
        crit = critical_points()
        if u < crit.mu_minus**2:
            return crit.beta_minus * u - 0.5
        return math.log(1.0 - math.sqrt(u)) - 0.5
    raise DomainError("regime must be a Regime member")


def entropy_of_purity(pi: float, n: int) -> float:
    """Entropy density at purity pi for subsystem dimension n.

    Four pieces stitched at 5/(4n), 2/n and mu_minus**2: maximally entangled
    (semicircle), one-sided support, linear coexistence, and nearly
    separable.  Requires n >= 4 so the breakpoints are ordered.
    """
    pi = float(pi)
    if n < 4:
        raise DomainError("piecewise entropy needs n >= 4 to order its breakpoints")
    if not (1.0 / n < pi < 1.0):
        raise DomainError(f"purity pi={pi} outside (1/{n}, 1)")
    crit = critical_points()
    if pi < 1.25 / n:
        return 0.5 * math.log(n * pi - 1.0) - 0.25
    if pi < 2.0 / n:
        delta = 3.0 - math.sqrt(9.0 - 4.0 * n * pi)
        return -2.25 + 5.0 / delta - 3.0 / delta**2 + math.log(delta / 2.0)
    if pi <= crit.mu_minus**2:
        return crit.beta_minus * pi - 0.5
    return math.log(1.0 - math.sqrt(pi)) - 0.5


def volume_of_purity(pi: float, n: int) -> float:
    """Log-volume n**2 * s of the isopurity manifold; exponentiation is left
    to callers to avoid overflow."""
    return n * n * entropy_of_purity(pi, n)


def lambda_extremes(pi: float, n: int) -> tuple[float, float]:
    """Smallest and largest eigenvalue of the dominant spectrum at purity pi.

    The smallest closes its gap at pi = 5/(4n) and sticks to zero beyond; the
    largest follows the support edge until pi = 2/n and then the detached
    eigenvalue sqrt(pi).
    """
    pi = float(pi)
    if not (1.0 / n - _EPS <= pi < 1.0):
        raise DomainError(f"purity pi={pi} outside [1/{n}, 1)")
    npi = max(n * pi, 1.0)
    if npi <= 1.25:
        root = math.sqrt(npi - 1.0)
        return ((1.0 - 2.0 * root) / n, (1.0 + 2.0 * root) / n)
    if npi <= 2.0:
        return (0.0, (2.0 / n) * (3.0 - 2.0 * math.sqrt(2.25 - npi)))
    return (0.0, math.sqrt(pi))


def _poly_mul(a: list[Fraction], b: list[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j in range(min(len(b), order + 1 - i)):
            out[i + j] += ai * b[j]
    return out


def planar_map_series(order: int) -> list[int]:
    """Integer Taylor coefficients of r(x) = u at beta = -x/2, through x**order.

    r counts rooted non-separable planar maps by edge number.  The half-width
    series solves delta = 2 + (x/4) delta**3 by exact rational fixed-point
    iteration, then r = (3/2) delta - delta**2 / 4.  order is capped at 16,
    the last coefficient representable in 64 bits.
    """
    if order < 0:
        raise DomainError("order must be nonnegative")
    if order > 16:
        raise OrderTooLarge(f"order {order} > 16 would overflow 64-bit consumers")
    delta = [Fraction(0)] * (order + 1)
    delta[0] = Fraction(2)
    for _ in range(order + 1):
        cube = _poly_mul(_poly_mul(delta, delta, order), delta, order)
        new = [Fraction(0)] * (order + 1)
        new[0] = Fraction(2)
        for k in range(order):
            new[k + 1] = cube[k] / 4
        delta = new
    r = [Fraction(3, 2) * c for c in delta]
    sq = _poly_mul(delta, delta, order)
    coeffs = [r[k] - sq[k] / 4 for k in range(order + 1)]
    if any(c.denominator != 1 for c in coeffs):
        raise ArithmeticError("series coefficients failed to close over the integers")
    return [int(c) for c in coeffs]


class CriticalSide(Enum):
    BetaPlus = "beta_plus"
    BetaG = "beta_g"


@dataclass(frozen=True)
class ExpansionReport:
    """Locally fitted expansion data at a critical point.

    At beta_plus the entropy is expanded on both sides: the first derivative
    is continuous and the second derivative jumps.  At beta_g the free energy
    is expanded along the corner-condition continuation with half-width
    delta >= 3, whose leading singular term is a five-halves power with a
    negative coefficient; the delta <= 3 side carries the opposite sign and
    is reported alongside.
    """

    side: CriticalSide
    d1_jump: Optional[float] = None
    d2_jump: Optional[float] = None
    d2_left: Optional[float] = None
    d2_right: Optional[float] = None
    exponent: Optional[float] = None
    coefficient: Optional[float] = None
    coefficient_inner: Optional[float] = None
    residual: float = 0.0


def _entropy_near_beta_plus(beta: float) -> float:
    kind = BranchKind.StableSemicircle if beta >= 2.0 else BranchKind.StableWishart
    return thermo(beta, kind).s


def critical_expansion_check(side: CriticalSide) -> ExpansionReport:
    """Fit the local expansion of the exact branch formulas at a critical point."""
    if side is CriticalSide.BetaPlus:
        h = 1e-4
        s = _entropy_near_beta_plus
        s0 = s(2.0)
        d1_right = (-3.0 * s0 + 4.0 * s(2.0 + h) - s(2.0 + 2 * h)) / (2.0 * h)
        d1_left = (3.0 * s0 - 4.0 * s(2.0 - h) + s(2.0 - 2 * h)) / (2.0 * h)
        d2_right = (2.0 * s0 - 5.0 * s(2.0 + h) + 4.0 * s(2.0 + 2 * h)
                    - s(2.0 + 3 * h)) / h**2
        d2_left = (2.0 * s0 - 5.0 * s(2.0 - h) + 4.0 * s(2.0 - 2 * h)
                   - s(2.0 - 3 * h)) / h**2
        return ExpansionReport(side=side, d1_jump=d1_right - d1_left,
                               d2_jump=d2_right - d2_left,
                               d2_left=d2_left, d2_right=d2_right,
                               residual=abs(d1_right - d1_left))

    # free energy along both corner-condition continuations through delta = 3,
    # written as the cancellation-free excess over its value at delta = 3
    def betaf_excess(t: float, outer: bool) -> float:
        beta = BETA_G + t
        lo, hi = (3.0, 8.0) if outer else (1.0, 3.0)
        delta = bracket_root(lambda d: _wishart_cubic(d, beta), lo, hi, tol=1e-14)
        w = delta - 3.0
        return w * (3.0 + 2.0 * w) / delta**2 - math.log1p(w / 3.0)

    ts = np.array([1e-3 * 0.25**k for k in range(1, 6)])

    def fit_coefficient(outer: bool) -> tuple[float, float, float]:
        resid = np.array([betaf_excess(t, outer) - 2.25 * t + (81.0 / 16.0) * t * t
                          for t in ts])
        design = np.column_stack([np.ones_like(ts), np.sqrt(ts)])
        sol, *_ = np.linalg.lstsq(design, resid / ts**2.5, rcond=None)
        slope = np.polyfit(np.log(ts), np.log(np.abs(resid)), 1)[0]
        rms = float(np.sqrt(np.mean((resid / ts**2.5 - design @ sol) ** 2)))
        return float(sol[0]), float(slope), rms

    coeff_outer, exponent, rms = fit_coefficient(outer=True)
    coeff_inner, _, _ = fit_coefficient(outer=False)
    return ExpansionReport(side=side, exponent=exponent, coefficient=coeff_outer,
                           coefficient_inner=coeff_inner, residual=rms)
