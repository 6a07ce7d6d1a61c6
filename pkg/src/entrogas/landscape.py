"""The (delta, m) free-energy landscape of the constrained log-gas.

The general nonnegative-density domain is an eye-shaped region bounded by
level curves where the density first touches zero at an edge (Gamma1) or at
an interior point (Gamma2, negative beta only), cut by the positivity line
m = delta.  The free-energy surface has no interior stationary points inside
the cut domain, so branch selection reduces to 1-D minimization along the
boundary arcs; the minimizers recover the closed-form branches of
`analytic` independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .core import DomainError, Infeasible, NoConvergence, bracket_root

_EPS = 1e-12


@dataclass(frozen=True)
class DensityRoots:
    """Zeros x_minus <= x_plus of the general density numerator.

    Delta is the discriminant; when it is negative the zeros form a complex
    pair (density strictly positive except possibly at isolated points) and
    both roots are reported as NaN.
    """

    x_minus: float
    x_plus: float
    Delta: float

    @property
    def is_complex(self) -> bool:
        return self.Delta < 0.0


class SaddleLocation(Enum):
    Interior = "interior"
    UpperBoundary = "upper_boundary"
    LowerBoundary = "lower_boundary"
    CornerRight = "corner_right"
    CornerCut = "corner_cut"


@dataclass(frozen=True)
class SaddleSolution:
    """Boundary minimizer of the free-energy surface at one temperature."""

    m: float
    delta: float
    beta: float
    betaf: float
    zeta: float
    location: SaddleLocation


@dataclass(frozen=True)
class DomainSpec:
    """Boundary curves of the nonnegative-density domain at fixed beta.

    Gamma1 curves mark the density vanishing at a support edge, Gamma2 (for
    beta < 0) an interior double zero; h_plus/h_minus switch between them at
    the tangency half-width delta_t = sqrt(-2/(3 beta)).  All curves are
    symmetric under m -> 2 - m; the physical domain additionally imposes the
    cut m >= delta.
    """

    beta: float

    def gamma1_plus(self, delta):
        return 1.0 + (delta / 2.0) * (1.0 - self.beta * delta**2 / 2.0)

    def gamma1_minus(self, delta):
        return 2.0 - self.gamma1_plus(delta)

    def _gamma2_arm(self, delta):
        arg = -self.beta * (1.0 + self.beta * delta**2 / 2.0)
        return delta**2 * np.sqrt(np.maximum(arg, 0.0))

    def gamma2_plus(self, delta):
        if self.beta >= 0.0:
            raise DomainError("Gamma2 curves exist for negative beta only")
        return 1.0 + self._gamma2_arm(delta)

    def gamma2_minus(self, delta):
        if self.beta >= 0.0:
            raise DomainError("Gamma2 curves exist for negative beta only")
        return 1.0 - self._gamma2_arm(delta)

    @property
    def delta_tangent(self) -> Optional[float]:
        if self.beta >= 0.0:
            return None
        return math.sqrt(-2.0 / (3.0 * self.beta))

    @property
    def delta_max(self) -> float:
        """Largest half-width with anywhere-nonnegative density."""
        if self.beta == 0.0:
            return math.inf
        return math.sqrt(2.0 / abs(self.beta))

    def h_plus(self, delta):
        if self.beta >= 0.0:
            return self.gamma1_plus(delta)
        dt = self.delta_tangent
        return np.where(np.asarray(delta) <= dt,
                        self.gamma1_plus(delta), self.gamma2_plus(delta))

    def h_minus(self, delta):
        if self.beta >= 0.0:
            return self.gamma1_minus(delta)
        dt = self.delta_tangent
        return np.where(np.asarray(delta) <= dt,
                        self.gamma1_minus(delta), self.gamma2_minus(delta))

    @cached_property
    def corner_right(self) -> Optional[tuple[float, float]]:
        """Right corner (delta_max, 1); on the cut domain's boundary iff |beta| >= 2."""
        if abs(self.beta) >= 2.0 - _EPS and self.beta != 0.0:
            return (self.delta_max, 1.0)
        return None

    @cached_property
    def corner_cut(self) -> Optional[tuple[float, float]]:
        """Corner where the upper curve meets the positivity line m = delta."""
        if self.beta == 0.0:
            return (2.0, 2.0)
        if abs(self.beta) > 2.0 + _EPS:
            return None
        f = lambda d: float(self.h_plus(d)) - d
        d = bracket_root(f, 1e-9, self.delta_max, tol=1e-14)
        return (d, d)


def phi_general(m: float, delta: float, beta: float, x):
    """General scaled density at x = (lambda - m)/delta, any (m, delta, beta).

    Normalization and unit first moment are built into the formula; it is
    nonnegative on (-1, 1) only inside the feasibility domain.
    """
    if delta <= 0.0:
        raise DomainError("delta must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) >= 1.0):
        raise DomainError("density is defined on the open interval -1 < x < 1")
    num = (1.0 + beta * delta**2 / 2.0 + 2.0 * (1.0 - m) * xa / delta
           - beta * delta**2 * xa * xa)
    out = num / (math.pi * np.sqrt(1.0 - xa * xa))
    return out if out.ndim else float(out)


def density_roots(m: float, delta: float, beta: float) -> DensityRoots:
    """Zeros of the general density numerator in the x variable."""
    if delta <= 0.0:
        raise DomainError("delta must be positive")
    if beta == 0.0:
        raise DomainError("the quadratic term vanishes at beta = 0; no root pair")
    Delta = ((1.0 - m) / delta) ** 2 + beta * delta**2 * (1.0 + beta * delta**2 / 2.0)
    if Delta < 0.0:
        return DensityRoots(x_minus=math.nan, x_plus=math.nan, Delta=Delta)
    r1 = ((1.0 - m) / delta + math.sqrt(Delta)) / (beta * delta**2)
    r2 = ((1.0 - m) / delta - math.sqrt(Delta)) / (beta * delta**2)
    return DensityRoots(x_minus=min(r1, r2), x_plus=max(r1, r2), Delta=Delta)


def density_nonnegative(m: float, delta: float, beta: float) -> bool:
    """Whether the general density is nonnegative on (-1, 1).

    This is the uncut eye-shaped region bounded by the h curves, symmetric
    under m -> 2 - m for every beta; `feasible` additionally imposes the
    positivity cut m >= delta, which breaks the symmetry for |beta| < 2.
    """
    if delta < 0.0:
        return False
    if delta == 0.0:
        return abs(m - 1.0) <= _EPS
    dom = DomainSpec(beta)
    if beta < 0.0 and delta > dom.delta_max + _EPS:
        return False
    lo = float(dom.h_minus(delta))
    hi = float(dom.h_plus(delta))
    return lo - 1e-10 <= m <= hi + 1e-10


def feasible(m: float, delta: float, beta: float) -> bool:
    """Whether (m, delta) is an admissible density: nonnegative and supported
    on positive eigenvalues (m >= delta >= 0)."""
    if not (0.0 <= delta <= m + 1e-10):
        return False
    return density_nonnegative(m, delta, beta)


def free_energy_surface(m: float, delta: float, beta: float,
                        require_feasible: bool = False) -> float:
    """beta*f of the general density at (m, delta).

    The closed form extends smoothly outside the feasibility domain and is
    symmetric under m -> 2 - m everywhere; pass require_feasible=True to
    reject points outside the cut eye.
    """
    if delta <= 0.0:
        raise DomainError("delta must be positive")
    if require_feasible and not feasible(m, delta, beta):
        raise Infeasible(f"(m={m}, delta={delta}) outside the beta={beta} domain")
    return (beta - beta * (1.0 - m) ** 2 + 2.0 * (1.0 - m) ** 2 / delta**2
            + beta * delta**2 / 2.0 - beta**2 * delta**4 / 16.0
            - math.log(delta / 2.0))


def surface_gradient(m: float, delta: float, beta: float) -> tuple[float, float]:
    """Gradient of the surface; vanishes only on the m = 1, delta^2 = 2/beta set."""
    dfm = (1.0 - m) * (2.0 * beta - 4.0 / delta**2)
    dfd = (-4.0 * (1.0 - m) ** 2 / delta**3 + beta * delta
           - beta**2 * delta**3 / 4.0 - 1.0 / delta)
    return (dfm, dfd)


def sea_reduced_free_energy(m: float, delta: float, beta: float) -> float:
    """Reduced beta*f of the sea scaling, where the quadratic cost is
    subleading; valid for beta < 0 on the beta = 0 triangle."""
    if beta >= 0.0:
        raise DomainError("the reduced form applies at negative beta")
    if delta <= 0.0:
        raise DomainError("delta must be positive")
    if not (max(delta, 1.0 - delta / 2.0) - 1e-10 <= m <= 1.0 + delta / 2.0 + 1e-10):
        raise Infeasible(f"(m={m}, delta={delta}) outside the beta=0 triangle")
    return 2.0 * (m - 1.0) ** 2 / delta**2 - math.log(delta / 2.0)


def _golden_min(f: Callable[[float], float], a: float, b: float,
                tol: float = 1e-12) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = c if fc < fd else d
    return (x, f(x))


def _scan_arc(f: Callable[[float], float], lo: float, hi: float,
              grid: int) -> list[tuple[float, float]]:
    # grid seeding guards against multiple local minima on one arc
    ds = np.linspace(lo, hi, grid)
    vals = np.array([f(d) for d in ds])
    out = []
    for i in range(grid):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i < grid - 1 else math.inf
        if vals[i] <= left and vals[i] <= right:
            a = ds[max(i - 1, 0)]
            b = ds[min(i + 1, grid - 1)]
            x, fx = _golden_min(f, a, b)
            out.append((fx, x))
    return out


def minimize_landscape(beta: float, grid: int = 256) -> SaddleSolution:
    """Global minimum of the free-energy surface over the cut eye boundary.

    Scans the upper curve, the composite lower boundary max(delta, h_minus)
    and the exact corner candidates, refines with golden-section, and merges
    deterministically (ties broken toward smaller delta).  beta = 0 has no
    quadratic cost and is handled by sea_reduced_free_energy instead.
    """
    if beta == 0.0:
        raise DomainError("beta = 0 is a degenerate limit; use sea_reduced_free_energy")
    dom = DomainSpec(beta)
    d_hi = dom.delta_max
    cut = dom.corner_cut
    d_end = cut[0] if cut is not None else d_hi

    candidates: list[tuple[float, float, float, SaddleLocation]] = []
    if dom.corner_right is not None:
        d, m = dom.corner_right
        candidates.append((free_energy_surface(m, d, beta), d, m, SaddleLocation.CornerRight))
    if cut is not None:
        d, m = cut
        candidates.append((free_energy_surface(m, d, beta), d, m, SaddleLocation.CornerCut))

    def on_upper(d: float) -> float:
        return free_energy_surface(float(dom.h_plus(d)), d, beta)

    def on_lower(d: float) -> float:
        m = max(d, float(dom.h_minus(d)))
        return free_energy_surface(m, d, beta)

    d_lo = d_hi * 1e-6
    for f, loc in ((on_upper, SaddleLocation.UpperBoundary),
                   (on_lower, SaddleLocation.LowerBoundary)):
        for fx, d in _scan_arc(f, d_lo, d_end, grid):
            m = float(dom.h_plus(d)) if loc is SaddleLocation.UpperBoundary \
                else max(d, float(dom.h_minus(d)))
            candidates.append((fx, d, m, loc))

    if not candidates:
        raise NoConvergence(f"no boundary candidates at beta={beta}")
    candidates.sort(key=lambda c: (c[0], c[1]))
    betaf, d, m, loc = candidates[0]

    # a golden minimum that converged onto a corner is the corner; corners are
    # stationary along the adjacent arcs, so allow a flat-minimum position slop
    # but require the values to tie
    for corner, tag in ((dom.corner_right, SaddleLocation.CornerRight),
                        (cut, SaddleLocation.CornerCut)):
        if corner is None:
            continue
        f_corner = free_energy_surface(corner[1], corner[0], beta)
        if (abs(d - corner[0]) < 1e-4 and abs(m - corner[1]) < 1e-4
                and abs(betaf - f_corner) < 1e-9):
            d, m = corner
            betaf = f_corner
            loc = tag
            break

    zeta = 4.0 * (m - 1.0) / d**2 - 2.0 * beta * m
    return SaddleSolution(m=m, delta=d, beta=beta, betaf=betaf, zeta=zeta, location=loc)
