"""Finite-N minimization of the fixed-trace eigenvalue free energy.

At the finite-purity scaling the objective is
beta*f_N = beta * sum(lambda_i^2) - (2/N^2) * sum_{i<j} ln|lambda_i - lambda_j|
on the simplex.  At negative beta it develops two competing local minima: a
sea of O(1/N) eigenvalues and a sea plus one detached eigenvalue mu = O(1).
This module tracks both basins, computes fixed-mu profiles, and locates the
finite-N analogs of the first-order transition (crossing) and of the spike
minimum's birth point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .core import (
    BranchKind,
    CollidingEigenvalues,
    NoBirth,
    NoConvergence,
    NoCrossing,
    OutOfBranch,
    Spectrum,
    bracket_root,
)
from .analytic import BETA_G, critical_points, delta_of_beta


class Basin(Enum):
    Sea = "sea"
    Spike = "spike"


@dataclass(frozen=True)
class FiniteNConfig:
    """Parameters of one finite-N minimization task.

    penalty_stages is the escalating quadratic-penalty schedule used by
    profile_mu to enforce the cap lambda_i <= mu on the non-fixed
    eigenvalues; seed drives the jittered initializations.
    """

    n: int
    beta: float
    max_iters: int = 2000
    grad_tol: float = 1e-7
    penalty_stages: tuple[float, ...] = (1e4, 1e6, 1e8)
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be positive")


@dataclass(frozen=True)
class BasinMinimum:
    """One converged local minimum."""

    spectrum: Spectrum
    mu: float
    betaf_n: float          # beta*f_N - ln N
    basin: Basin
    escaped: bool           # converged into the other basin's shape
    grad_norm: float

    @property
    def settled(self) -> Basin:
        """Basin the minimizer actually landed in."""
        if not self.escaped:
            return self.basin
        return Basin.Spike if self.basin is Basin.Sea else Basin.Sea


@dataclass(frozen=True)
class FiniteNResult:
    n: int
    beta: float
    minima: tuple[BasinMinimum, ...]
    global_index: int


@dataclass(frozen=True)
class ProfilePoint:
    mu: float
    betaf_n: float
    converged: bool
    grad_norm: float


def free_energy_n(s: Spectrum, beta: float) -> float:
    """beta*f_N of a spectrum (without the ln N reporting offset)."""
    lam = s.values
    diffs = np.abs(lam[:, None] - lam[None, :])
    iu = np.triu_indices(s.n, k=1)
    gaps = diffs[iu]
    if np.any(gaps < 1e-300):
        raise CollidingEigenvalues("coincident eigenvalues have infinite repulsion")
    return float(beta * np.dot(lam, lam) - (2.0 / s.n**2) * np.sum(np.log(gaps)))


def gradient(values: np.ndarray, beta: float) -> np.ndarray:
    """Unconstrained gradient g_i = d(beta*f_N)/d lambda_i."""
    lam = np.asarray(values, dtype=float)
    n = lam.size
    diff = lam[:, None] - lam[None, :]
    np.fill_diagonal(diff, np.inf)
    return 2.0 * beta * lam - (2.0 / n**2) * np.sum(1.0 / diff, axis=1)


def _reduced_gradient(lam: np.ndarray, beta: float) -> np.ndarray:
    # gradient in softmax coordinates; zero exactly at trace-constrained minima
    g = gradient(lam, beta)
    zeta = float(np.dot(lam, g))
    return lam * (g - zeta)


def _objective_full(u: np.ndarray, beta: float, n: int) -> tuple[float, np.ndarray]:
    w = u - np.max(u)
    e = np.exp(w)
    lam = e / np.sum(e)
    diff = lam[:, None] - lam[None, :]
    ad = np.abs(diff)
    iu = np.triu_indices(n, k=1)
    if np.any(ad[iu] < 1e-300):
        return (math.inf, np.zeros(n))
    val = beta * np.dot(lam, lam) - (2.0 / n**2) * np.sum(np.log(ad[iu]))
    return (val, _reduced_gradient(lam, beta))


def _mp_quantiles(n: int) -> np.ndarray:
    # quantiles of the beta -> 0 sea shape, used as the sea-basin seed
    def cdf(y: float) -> float:
        t = math.asin(min(math.sqrt(y) / 2.0, 1.0))
        return (2.0 * t + math.sqrt(max(y * (4.0 - y), 0.0)) / 2.0) / math.pi

    qs = (np.arange(n) + 0.5) / n
    return np.array([bracket_root(lambda y: cdf(y) - q, 1e-12, 4.0, tol=1e-12)
                     for q in qs])


def _run_lbfgs(u0: np.ndarray, beta: float, n: int, max_iters: int) -> np.ndarray:
    res = _scipy_minimize(_objective_full, u0, args=(beta, n), jac=True,
                          method="L-BFGS-B",
                          options={"maxiter": max_iters, "ftol": 1e-15, "gtol": 1e-12})
    return res.x


def minimize_basin(config: FiniteNConfig, basin: Basin) -> BasinMinimum:
    """Minimize beta*f_N from a basin-shaped initialization.

    Sea: eigenvalues seeded on the quantiles of the beta -> 0 sea density
    with 1% jitter.  Spike: largest eigenvalue seeded at 0.7, the rest equal
    with 1% jitter (requires beta < 0, where the spike basin can exist).
    Convergence means the reduced-coordinate gradient is below grad_tol;
    escapes into the other basin's shape are flagged, not fatal.
    """
    n, beta = config.n, config.beta
    rng = np.random.default_rng(config.seed)
    if basin is Basin.Sea:
        lam0 = _mp_quantiles(n) * (1.0 + 0.01 * rng.standard_normal(n))
    else:
        if beta >= 0.0:
            raise ValueError("the spike basin requires beta < 0")
        rest = np.full(n - 1, 0.3 / (n - 1)) * (1.0 + 0.01 * rng.standard_normal(n - 1))
        rest *= 0.3 / np.sum(rest)
        lam0 = np.concatenate([[0.7], rest])
    lam0 = np.abs(lam0)
    lam0 /= np.sum(lam0)

    u = np.log(lam0)
    gnorm = math.inf
    for _ in range(4):
        # restarting L-BFGS clears a stale Hessian approximation when the
        # line search stalls on nearly flat directions
        u = _run_lbfgs(u, beta, n, config.max_iters)
        w = u - np.max(u)
        lam = np.exp(w) / np.sum(np.exp(w))
        gnorm = float(np.max(np.abs(_reduced_gradient(lam, beta))))
        if gnorm <= config.grad_tol:
            break
    if gnorm > config.grad_tol:
        raise NoConvergence(
            f"reduced gradient {gnorm:.2e} > {config.grad_tol:.2e} "
            f"(n={n}, beta={beta}, basin={basin.value})")
    spec = Spectrum.from_values(lam)
    mu = float(spec.values[0])
    second = float(spec.values[1])
    spiky = mu > 3.0 * second
    escaped = (basin is Basin.Sea and spiky) or (basin is Basin.Spike and not spiky)
    betaf_n = free_energy_n(spec, beta) - math.log(n)
    return BasinMinimum(spectrum=spec, mu=mu, betaf_n=betaf_n, basin=basin,
                        escaped=escaped, grad_norm=gnorm)


def solve_point(config: FiniteNConfig) -> FiniteNResult:
    """Both basin minima at one (n, beta); global_index marks the lower one."""
    minima = [minimize_basin(config, Basin.Sea)]
    if config.beta < 0.0:
        minima.append(minimize_basin(config, Basin.Spike))
    idx = min(range(len(minima)), key=lambda i: minima[i].betaf_n)
    return FiniteNResult(n=config.n, beta=config.beta,
                         minima=tuple(minima), global_index=idx)


def _objective_rest(v: np.ndarray, mu: float, beta: float, n: int,
                    K: float) -> tuple[float, np.ndarray]:
    # rest eigenvalues via softmax scaled to 1 - mu; quadratic penalty
    # enforces the cap lambda_i <= mu that defines mu as the maximum
    w = v - np.max(v)
    e = np.exp(w)
    sig = e / np.sum(e)
    lam = (1.0 - mu) * sig
    diff = lam[:, None] - lam[None, :]
    ad = np.abs(diff)
    iu = np.triu_indices(n - 1, k=1)
    gap_mu = mu - lam
    if np.any(ad[iu] < 1e-300) or np.any(np.abs(gap_mu) < 1e-300):
        return (math.inf, np.zeros(n - 1))
    val = (beta * (mu * mu + np.dot(lam, lam))
           - (2.0 / n**2) * (np.sum(np.log(ad[iu])) + np.sum(np.log(np.abs(gap_mu)))))
    over = np.maximum(lam - mu, 0.0)
    val += K * float(np.sum(over * over))
    np.fill_diagonal(diff, np.inf)
    g = (2.0 * beta * lam
         - (2.0 / n**2) * (np.sum(1.0 / diff, axis=1) + 1.0 / (lam - mu))
         + 2.0 * K * over)
    gv = lam * g - lam * float(np.dot(sig, g))
    return (float(val), gv)


def profile_mu(config: FiniteNConfig, mu_grid: Sequence[float]) -> list[ProfilePoint]:
    """beta*f_N - ln N minimized over the rest at each fixed largest eigenvalue.

    Walks the grid with warm starts and an escalating penalty schedule for
    the cap; per-point failures are reported in the record, not raised.
    """
    n, beta = config.n, config.beta
    out: list[ProfilePoint] = []
    v = None
    base = _mp_quantiles(n - 1)
    for mu in mu_grid:
        mu = float(mu)
        if not (1.0 / n < mu < 1.0):
            out.append(ProfilePoint(mu=mu, betaf_n=math.nan, converged=False,
                                    grad_norm=math.nan))
            continue
        if v is None:
            seed = np.minimum(base / np.sum(base), 0.95 * mu / (1.0 - mu))
            # stagger entries flattened by the cap so no pair starts coincident
            seed *= 1.0 - 1e-4 * np.arange(n - 1)
            v = np.log(seed / np.sum(seed))
        gnorm = math.inf
        for K in config.penalty_stages:
            # restarts help when many eigenvalues pin against the stiff cap
            for _ in range(3):
                res = _scipy_minimize(_objective_rest, v, args=(mu, beta, n, K),
                                      jac=True, method="L-BFGS-B",
                                      options={"maxiter": config.max_iters,
                                               "ftol": 1e-15, "gtol": 1e-12})
                v = res.x
                gnorm = float(np.max(np.abs(
                    _objective_rest(v, mu, beta, n, K)[1])))
                if gnorm <= 10.0 * config.grad_tol:
                    break
        w = v - np.max(v)
        lam = (1.0 - mu) * np.exp(w) / np.sum(np.exp(w))
        spec = Spectrum.from_values(np.concatenate([[mu], lam]))
        betaf_n = free_energy_n(spec, beta) - math.log(n)
        out.append(ProfilePoint(mu=mu, betaf_n=betaf_n,
                                converged=gnorm <= 10.0 * config.grad_tol,
                                grad_norm=gnorm))
    return out


def _basin_gap(n: int, beta: float, seed: int) -> float:
    # betaf(spike) - betaf(sea); +inf when the spike basin is absent, -inf
    # when the sea basin itself has died (deep beta) and only the spike remains
    cfg = FiniteNConfig(n=n, beta=beta, seed=seed)
    sea = minimize_basin(cfg, Basin.Sea)
    if sea.escaped:
        return -math.inf
    try:
        spike = minimize_basin(cfg, Basin.Spike)
    except NoConvergence:
        return math.inf
    if spike.escaped:
        return math.inf
    return spike.betaf_n - sea.betaf_n


def find_crossing(n: int, seed: int = 0) -> float:
    """beta where the sea and spike minima exchange global stability.

    Bisection on [-6, -1] to 1e-3; the finite-N crossing sits well above the
    infinite-N transition and approaches it as n grows.
    """
    lo, hi = -6.0, -1.0
    if _basin_gap(n, lo, seed) >= 0.0:
        raise NoCrossing(f"spike basin never undercuts the sea on [{lo}, {hi}] at n={n}")
    if _basin_gap(n, hi, seed) <= 0.0:
        raise NoCrossing(f"spike basin already global at beta={hi} for n={n}")
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if _basin_gap(n, mid, seed) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _has_interior_minimum(n: int, beta: float, mu_grid: np.ndarray, seed: int) -> bool:
    pts = profile_mu(FiniteNConfig(n=n, beta=beta, seed=seed), mu_grid)
    vals = np.array([p.betaf_n for p in pts])
    for i in range(1, len(vals) - 1):
        if np.isfinite(vals[i - 1:i + 2]).all() \
                and vals[i] < vals[i - 1] and vals[i] < vals[i + 1]:
            return True
    return False


def find_birth(n: int, seed: int = 0) -> float:
    """Least-negative beta at which the fixed-mu profile develops an interior
    local minimum at mu = O(1) (the birth of the spike basin).

    Bisection on [-3, -1] to 1e-3 with a fixed mu-grid detector.
    """
    grid = np.linspace(0.30, 0.88, 19)
    lo, hi = -3.0, -1.0
    if not _has_interior_minimum(n, lo, grid, seed):
        raise NoBirth(f"no interior profile minimum down to beta={lo} at n={n}")
    if _has_interior_minimum(n, hi, grid, seed):
        raise NoBirth(f"interior profile minimum already present at beta={hi} at n={n}")
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if _has_interior_minimum(n, mid, grid, seed):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mu_theory_curve(n: int, beta: float) -> float:
    """Infinite-N prediction for the largest eigenvalue at finite n.

    Below the transition the detached eigenvalue; above it the sea edge
    (2/n) * delta evaluated at the rescaled temperature beta/n.  The sea
    form requires beta/n inside the cubic branch window, so n must exceed
    27*|beta|/2 on the sea side.
    """
    if beta >= 0.0:
        raise OutOfBranch("the finite-purity scaling applies at beta < 0")
    crit = critical_points()
    if beta <= crit.beta_minus:
        return 0.5 + 0.5 * math.sqrt(1.0 + 2.0 / beta)
    if beta / n < BETA_G:
        raise OutOfBranch(
            f"sea edge undefined: beta/n = {beta / n:.4f} below the branch window")
    return (2.0 / n) * delta_of_beta(beta / n, BranchKind.MetaWishartProlong)
