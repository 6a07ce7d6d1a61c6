"""Stochastic verification of the fixed-trace eigenvalue measure.

sample_induced draws exact spectra of trace-normalized complex Wishart
matrices (the measure induced by random pure states at equal subsystem
dimensions); metropolis_run samples the Gibbs weight
exp(-beta N^alpha sum(lambda^2) + 2 sum ln|lambda_i - lambda_j|) on the
simplex by exact pair transfers.  KS distances against the closed-form
densities quantify agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from numba import njit

from .core import (
    EmptyHistogram,
    EntrogasError,
    Histogram,
    InvalidParams,
    Spectrum,
)


@dataclass
class ChainState:
    """One Metropolis chain; rng supplies the pre-generated proposal blocks."""

    spectrum: Spectrum
    log_weight: float
    step_scale: float
    accepts: int
    proposals: int
    rng: np.random.Generator


@dataclass(frozen=True)
class SampleStats:
    """Pooled post-burn-in statistics of one or more chains."""

    histogram: Histogram
    purity_mean: float
    purity_var: float
    acceptance_rate: float
    mean_lambda_max: float
    samples: int
    ks: Optional[float] = None


def log_weight(values: np.ndarray, beta: float, alpha: int) -> float:
    """Exponent of the Gibbs weight at fixed trace (no multiplier term)."""
    lam = np.asarray(values, dtype=float)
    n = lam.size
    gaps = np.abs(lam[:, None] - lam[None, :])[np.triu_indices(n, k=1)]
    return float(-beta * n**alpha * np.dot(lam, lam) + 2.0 * np.sum(np.log(gaps)))


def sample_induced(n: int, count: int, seed: int) -> list[Spectrum]:
    """Exact spectra of the induced measure: eigenvalues of G G^dagger with
    complex Gaussian G, normalized by the trace."""
    if n < 2 or count < 1:
        raise InvalidParams("need n >= 2 and count >= 1")
    rng = np.random.default_rng(seed)
    out: list[Spectrum] = []
    batch = max(1, (1 << 22) // (n * n))
    left = count
    while left > 0:
        b = min(batch, left)
        g = rng.standard_normal((b, n, n)) + 1j * rng.standard_normal((b, n, n))
        h = g @ np.conjugate(np.swapaxes(g, 1, 2))
        vals = np.linalg.eigvalsh(h)
        vals /= vals.sum(axis=1, keepdims=True)
        for row in vals:
            out.append(Spectrum.from_values(np.clip(row, 0.0, None)))
        left -= b
    return out


@njit(cache=True)
def _mh_chunk(lam, q2, logw, coef, step, ii, jj0, ee, lnu, nswp, collect,
              counts, lo, inv_dy, scale):
    n = lam.size
    acc = 0
    t = 0
    sum_pi = 0.0
    sum_pi2 = 0.0
    sum_lmax = 0.0
    nsamp = 0
    for _ in range(nswp):
        for _ in range(n):
            i = ii[t]
            j = jj0[t]
            if j >= i:
                j += 1
            e = ee[t] * step
            li = lam[i]
            lj = lam[j]
            nli = li + e
            nlj = lj - e
            t += 1
            if nli <= 0.0 or nli >= 1.0 or nlj <= 0.0 or nlj >= 1.0:
                continue
            dq = 2.0 * e * (li - lj) + 2.0 * e * e
            dlog = -coef * dq
            ok = True
            for k in range(n):
                if k == i or k == j:
                    continue
                lk = lam[k]
                if nli == lk or nlj == lk:
                    ok = False
                    break
                dlog += 2.0 * (math.log(abs(nli - lk)) - math.log(abs(li - lk))
                               + math.log(abs(nlj - lk)) - math.log(abs(lj - lk)))
            if ok:
                if nli == nlj:
                    ok = False
                else:
                    dlog += 2.0 * (math.log(abs(nli - nlj)) - math.log(abs(li - lj)))
            if ok and lnu[t - 1] < dlog:
                lam[i] = nli
                lam[j] = nlj
                q2 += dq
                logw += dlog
                acc += 1
        if collect:
            mx = 0.0
            for k in range(n):
                y = lam[k] * scale
                b = int((y - lo) * inv_dy)
                if b < 0:
                    b = 0
                if b >= counts.size:
                    b = counts.size - 1
                counts[b] += 1
                if lam[k] > mx:
                    mx = lam[k]
            sum_pi += q2
            sum_pi2 += q2 * q2
            sum_lmax += mx
            nsamp += 1
    return acc, q2, logw, sum_pi, sum_pi2, sum_lmax, nsamp


def _run_chunk(state_lam, q2, lw, coef, step, rng, nswp, n, collect, counts,
               lo, inv_dy, scale):
    p = nswp * n
    ii = rng.integers(0, n, size=p)
    jj0 = rng.integers(0, n - 1, size=p)
    ee = rng.uniform(-1.0, 1.0, size=p)
    lnu = np.log(rng.random(size=p))
    return _mh_chunk(state_lam, q2, lw, coef, step, ii, jj0, ee, lnu, nswp,
                     collect, counts, lo, inv_dy, scale)


def metropolis_run(n: int, beta: float, alpha: int, sweeps: int, seed: int,
                   bins: int = 64, hist_range: tuple[float, float] = (0.0, 5.0),
                   chains: int = 1,
                   reference_cdf: Optional[Callable[[float], float]] = None
                   ) -> SampleStats:
    """Pair-transfer Metropolis sampling of the Gibbs measure.

    One sweep is n proposals: pick i != j uniformly, move (lambda_i,
    lambda_j) -> (lambda_i + eps, lambda_j - eps), reject outside (0, 1);
    the trace is conserved exactly.  The first 20% of sweeps are burn-in,
    during which the step scale adapts toward acceptance in [0.3, 0.5] and
    is then frozen.  The histogram collects eigenvalues scaled by n; the
    incremental weight is checked against full recomputation at every chunk
    boundary (at least every 10^4 proposals).
    """
    if n < 2 or sweeps < 1 or alpha not in (2, 3) or chains < 1:
        raise InvalidParams("need n >= 2, sweeps >= 1, alpha in {2, 3}, chains >= 1")
    coef = beta * float(n) ** alpha
    if not math.isfinite(coef):
        raise InvalidParams("beta * n**alpha must be finite")

    lo, hi = hist_range
    edges = np.linspace(lo, hi, bins + 1)
    inv_dy = bins / (hi - lo)
    counts = np.zeros(bins, dtype=np.int64)
    burn = int(0.2 * sweeps)
    acc_post = 0
    prop_post = 0
    sum_pi = 0.0
    sum_pi2 = 0.0
    sum_lmax = 0.0
    nsamp = 0

    for chain_seed in np.random.SeedSequence(seed).spawn(chains):
        rng = np.random.default_rng(chain_seed)
        init_seed = int(rng.integers(1 << 31))
        lam = sample_induced(n, 1, init_seed)[0].values.copy()
        state = ChainState(spectrum=Spectrum.from_values(lam),
                           log_weight=log_weight(lam, beta, alpha),
                           step_scale=0.5 / n, accepts=0, proposals=0, rng=rng)
        lam = state.spectrum.values.copy()
        q2 = float(np.dot(lam, lam))
        lw = state.log_weight

        done = 0
        while done < sweeps:
            in_burn = done < burn
            chunk_props = 2000 if in_burn else 10000
            nswp = min(max(chunk_props // n, 1), sweeps - done)
            if in_burn:
                nswp = min(nswp, burn - done)
            collect = not in_burn
            acc, q2, lw, spi, spi2, slm, ns = _run_chunk(
                lam, q2, lw, coef, state.step_scale, rng, nswp, n, collect,
                counts, lo, inv_dy, float(n))
            done += nswp
            state.accepts += acc
            state.proposals += nswp * n
            if collect:
                acc_post += acc
                prop_post += nswp * n
                sum_pi += spi
                sum_pi2 += spi2
                sum_lmax += slm
                nsamp += ns
            else:
                rate = acc / (nswp * n)
                if rate < 0.3:
                    state.step_scale *= 0.75
                elif rate > 0.5:
                    state.step_scale = min(state.step_scale * 1.3, 0.25)
            # invariant guard: incremental weight must track recomputation
            if abs(lam.sum() - 1.0) > 1e-12:
                raise EntrogasError("trace drifted beyond 1e-12")
            lam /= lam.sum()
            fresh = log_weight(lam, beta, alpha)
            if abs(fresh - lw) > 1e-8 * max(1.0, abs(fresh)):
                raise EntrogasError(
                    f"incremental log-weight drift {abs(fresh - lw):.2e}")
            lw = fresh
            q2 = float(np.dot(lam, lam))
        state.spectrum = Spectrum.from_values(lam)
        state.log_weight = lw

    hist = Histogram(edges=edges, counts=counts)
    mean = sum_pi / nsamp if nsamp else math.nan
    var = sum_pi2 / nsamp - mean * mean if nsamp else math.nan
    ks = None
    if reference_cdf is not None and nsamp:
        ks = ks_distance(hist, reference_cdf)
    return SampleStats(histogram=hist, purity_mean=mean, purity_var=max(var, 0.0),
                       acceptance_rate=(acc_post / prop_post) if prop_post else 0.0,
                       mean_lambda_max=sum_lmax / nsamp if nsamp else math.nan,
                       samples=nsamp, ks=ks)


def ks_distance(hist: Histogram, cdf: Callable[[float], float]) -> float:
    """Sup distance between the empirical CDF and a reference, at bin edges."""
    total = hist.total
    if total == 0:
        raise EmptyHistogram("histogram has no counts")
    ecdf = np.concatenate([[0.0], np.cumsum(hist.counts) / total])
    ref = np.array([cdf(e) for e in hist.edges])
    return float(np.max(np.abs(ecdf - ref)))


def ks_two_sample(a: Histogram, b: Histogram) -> float:
    """Sup distance between two empirical CDFs on a shared binning."""
    if a.total == 0 or b.total == 0:
        raise EmptyHistogram("histogram has no counts")
    if not np.array_equal(a.edges, b.edges):
        raise InvalidParams("two-sample comparison needs identical bin edges")
    ea = np.cumsum(a.counts) / a.total
    eb = np.cumsum(b.counts) / b.total
    return float(np.max(np.abs(ea - eb)))


def mp_cdf(y: float) -> float:
    """CDF of the squared-singular-value density sqrt((4-y)/y)/(2 pi) on [0, 4]."""
    if y <= 0.0:
        return 0.0
    if y >= 4.0:
        return 1.0
    t = math.asin(math.sqrt(y) / 2.0)
    return (2.0 * t + math.sqrt(y * (4.0 - y)) / 2.0) / math.pi


def semicircle_cdf(y: float, beta: float) -> float:
    """CDF of the semicircle stationary density at inverse temperature beta >= 2,
    supported on 1 -+ sqrt(2/beta) in scaled units."""
    delta = math.sqrt(2.0 / beta)
    x = (y - 1.0) / delta
    if x <= -1.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return 0.5 + (x * math.sqrt(1.0 - x * x) + math.asin(x)) / math.pi
