"""Shared domain types and numeric utilities.

Eigenvalue spectra on the unit simplex, the taxonomy of analytic density
branches, deterministic root bracketing, and a Gauss-Legendre quadrature
tuned for densities with inverse-square-root edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np


class EntrogasError(Exception):
    """Base class for all package errors."""


class NoSignChange(EntrogasError):
    """Root bracketing endpoints do not straddle a sign change."""


class NoConvergence(EntrogasError):
    """An iterative routine hit its iteration cap."""


class OutOfBranch(EntrogasError):
    """Parameter outside the validity window of the requested branch."""


class DomainError(EntrogasError):
    """Argument outside the mathematical domain of the operation."""


class OrderTooLarge(EntrogasError):
    """Series order beyond the supported range."""


class Infeasible(EntrogasError):
    """(m, delta) point outside the feasible eigenvalue-density region."""


class CollidingEigenvalues(EntrogasError):
    """Two eigenvalues coincide; the log repulsion is singular."""


class NoCrossing(EntrogasError):
    """The two free-energy basins never swap stability in the scanned range."""


class NoBirth(EntrogasError):
    """No detached-eigenvalue local minimum appears in the scanned range."""


class EmptyHistogram(EntrogasError):
    """Histogram holds no counts."""


class InvalidParams(EntrogasError):
    """Invalid sampler or CLI parameters."""


class BranchKind(Enum):
    """Named analytic solutions for the scaled eigenvalue density."""

    StableSemicircle = "stable_semicircle"
    StableWishart = "stable_wishart"
    SeparableSea = "separable_sea"
    MetaWishartProlong = "meta_wishart_prolong"
    MetaTwoSidedLow = "meta_two_sided_low"
    MetaTwoSidedHigh = "meta_two_sided_high"
    MetaSymmetric = "meta_symmetric"


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a reduced density matrix, stored descending.

    values are nonnegative and sum to 1 within 1e-12.
    """

    n: int
    values: np.ndarray

    @classmethod
    def from_values(cls, values) -> "Spectrum":
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise DomainError("spectrum must be a nonempty 1-d vector")
        if np.any(vals < 0):
            raise DomainError("spectrum entries must be nonnegative")
        total = vals.sum()
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"spectrum must sum to 1, got {total!r}")
        vals = np.sort(vals)[::-1].copy()
        vals.setflags(write=False)
        return cls(n=vals.size, values=vals)

    def __post_init__(self):
        if self.values.size != self.n:
            raise DomainError("n does not match the number of eigenvalues")


def purity(s: Spectrum) -> float:
    """Sum of squared eigenvalues; 1/n for uniform, 1 for a factorized state."""
    return float(np.dot(s.values, s.values))


@dataclass(frozen=True)
class BranchDensity:
    """Closed-form scaled density on support [m - delta, m + delta]."""

    kind: BranchKind
    beta: float
    m: float
    delta: float
    mu: Optional[float] = None

    @property
    def support(self) -> tuple[float, float]:
        return (self.m - self.delta, self.m + self.delta)


@dataclass(frozen=True)
class ThermoPoint:
    """All thermodynamic outputs of one branch at one temperature.

    u is the internal energy density, s the entropy density, betaf the
    product beta*f (= beta*u - s), zeta the real Lagrange multiplier that
    enforces unit trace.
    """

    beta: float
    kind: BranchKind
    u: float
    s: float
    betaf: float
    m: float
    delta: float
    zeta: float
    mu: Optional[float] = None


@dataclass(frozen=True)
class CriticalSet:
    """The four critical constants of the phase diagram."""

    beta_plus: float
    beta_g: float
    beta_minus: float
    mu_minus: float


@dataclass(frozen=True)
class Histogram:
    """Bin edges (length B+1) and per-bin counts (length B)."""

    edges: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_samples(cls, samples, bins: int, range_=None) -> "Histogram":
        counts, edges = np.histogram(np.asarray(samples, float), bins=bins, range=range_)
        return cls(edges=edges, counts=counts.astype(np.int64))

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def bracket_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Find the root of f on [lo, hi] by bisection refined with secant steps.

    Deterministic: identical inputs give identical bits.  Raises NoSignChange
    when f(lo) and f(hi) have the same (nonzero) sign, NoConvergence after
    200 iterations.
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    # sign tests never multiply: products of subnormals underflow to +-0
    # and would silently move the wrong endpoint
    if (fa < 0.0) == (fb < 0.0):
        raise NoSignChange(f"f({a})={fa} and f({b})={fb} have the same sign")

    def absorb(x, fx):
        nonlocal a, b, fa, fb
        if (fa < 0.0) != (fx < 0.0):
            b, fb = x, fx
        else:
            a, fa = x, fx

    for _ in range(200):
        if b - a <= tol:
            return 0.5 * (a + b)
        # secant candidate, used only when it lands strictly inside the bracket
        if fb != fa:
            x = b - fb * (b - a) / (fb - fa)
            if a < x < b:
                fx = f(x)
                if fx == 0.0:
                    return x
                absorb(x, fx)
                if b - a <= tol:
                    return 0.5 * (a + b)
        # bisection step guarantees the bracket halves every iteration
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0:
            return mid
        absorb(mid, fm)
    raise NoConvergence(f"no root localized to {tol} within 200 iterations")


def quad_edge_singular(f: Callable[[np.ndarray], np.ndarray], tol: float = 1e-9,
                       max_order: int = 4096) -> float:
    """Integrate f over (-1, 1) where f may carry 1/sqrt(1-x^2) edge factors.

    Substituting x = sin(theta) turns such integrands into smooth
    trigonometric ones; Gauss-Legendre order is doubled until two successive
    estimates agree within tol.
    """
    prev = None
    order = 16
    while order <= max_order:
        nodes, weights = np.polynomial.legendre.leggauss(order)
        theta = nodes * (np.pi / 2)
        x = np.sin(theta)
        val = float(np.sum(weights * f(x) * np.cos(theta)) * (np.pi / 2))
        if prev is not None and abs(val - prev) < tol:
            return val
        prev = val
        order *= 2
    raise NoConvergence(f"quadrature did not stabilize to {tol} by order {max_order}")
