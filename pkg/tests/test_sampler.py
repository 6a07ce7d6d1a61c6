"""Monte Carlo verification of the eigenvalue measure.

The induced-measure sampler is exact (matrix diagonalization), so it doubles
as the oracle for the beta = 0 Metropolis chain; analytic CDFs provide the
references at beta = 0 and beta = 4.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from entrogas.core import EmptyHistogram, Histogram, InvalidParams, purity
from entrogas.sampler import (
    ks_distance,
    ks_two_sample,
    log_weight,
    metropolis_run,
    mp_cdf,
    sample_induced,
    semicircle_cdf,
)


class TestInduced:
    def test_mean_purity_n2(self):
        # exact first moment of the induced measure at equal dimensions:
        # E[purity] = 2n/(n^2 + 1) = 4/5 at n = 2
        sp = sample_induced(2, 100000, seed=1)
        mean = float(np.mean([purity(s) for s in sp]))
        assert abs(mean - 0.8) < 0.005

    def test_spectra_are_valid(self):
        for s in sample_induced(6, 50, seed=2):
            assert abs(s.values.sum() - 1.0) < 1e-12
            assert np.all(s.values >= 0.0)

    def test_ks_against_squared_singular_density(self):
        sp = sample_induced(64, 4000, seed=3)
        vals = np.concatenate([s.values for s in sp]) * 64
        h = Histogram.from_samples(vals, bins=64, range_=(0.0, 5.0))
        assert ks_distance(h, mp_cdf) < 0.05

    def test_eigensolver_residual(self):
        rng = np.random.default_rng(4)
        for _ in range(3):
            g = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
            hmat = g @ g.conj().T
            w, v = np.linalg.eigh(hmat)
            res = np.linalg.norm(hmat @ v - v * w, axis=0)
            assert np.all(res <= 1e-10 * np.linalg.norm(hmat))

    def test_invalid_params(self):
        with pytest.raises(InvalidParams):
            sample_induced(1, 10, seed=0)
        with pytest.raises(InvalidParams):
            sample_induced(4, 0, seed=0)

    def test_deterministic(self):
        a = sample_induced(5, 10, seed=9)
        b = sample_induced(5, 10, seed=9)
        assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))


class TestLogWeight:
    def test_hand_computed(self):
        vals = np.array([0.5, 0.3, 0.2])
        expect = -2.0 * 3**2 * 0.38 \
            + 2.0 * (math.log(0.2) + math.log(0.3) + math.log(0.1))
        assert abs(log_weight(vals, 2.0, 2) - expect) < 1e-12


class TestMetropolis:
    def test_beta0_matches_induced(self):
        st = metropolis_run(64, 0.0, 3, sweeps=3000, seed=5, reference_cdf=mp_cdf)
        assert st.ks < 0.05
        sp = sample_induced(64, 3000, seed=6)
        vals = np.concatenate([s.values for s in sp]) * 64
        h = Histogram.from_samples(vals, bins=64, range_=(0.0, 5.0))
        assert ks_two_sample(st.histogram, h) < 0.05

    def test_beta4_matches_semicircle(self):
        st = metropolis_run(64, 4.0, 3, sweeps=4000, seed=7,
                            reference_cdf=lambda y: semicircle_cdf(y, 4.0))
        assert st.ks < 0.07

    def test_counts_sum_invariant(self):
        st = metropolis_run(16, -1.0, 2, sweeps=500, seed=8)
        assert st.histogram.total == st.samples * 16
        assert 0.0 <= st.acceptance_rate <= 1.0

    def test_adaptation_reaches_window(self):
        st = metropolis_run(32, 1.0, 3, sweeps=3000, seed=9)
        assert 0.2 < st.acceptance_rate < 0.6

    def test_deterministic_and_chain_merge(self):
        a = metropolis_run(16, -1.0, 2, sweeps=400, seed=11)
        b = metropolis_run(16, -1.0, 2, sweeps=400, seed=11)
        assert np.array_equal(a.histogram.counts, b.histogram.counts)
        assert a.purity_mean == b.purity_mean
        c = metropolis_run(16, -1.0, 2, sweeps=400, seed=11, chains=3)
        assert c.histogram.total == c.samples * 16
        assert c.samples == 3 * a.samples

    def test_invalid_params(self):
        for kw in (dict(n=1), dict(alpha=4), dict(sweeps=0), dict(chains=0),
                   dict(beta=math.inf)):
            args = dict(n=8, beta=0.0, alpha=3, sweeps=10, seed=0)
            args.update(kw)
            with pytest.raises(InvalidParams):
                metropolis_run(args["n"], args["beta"], args["alpha"],
                               args["sweeps"], args["seed"],
                               chains=args.get("chains", 1))

    def test_evaporation_monotone(self):
        # alpha = 2 quench: the detached eigenvalue grows as beta decreases
        ms = [metropolis_run(32, b, 2, sweeps=3000, seed=12).mean_lambda_max
              for b in (-1.0, -2.5, -4.0)]
        assert ms[0] < ms[1] < ms[2]

    def test_detailed_balance_smoke_n3(self):
        # stationary law on the ordered 3-simplex is the squared Vandermonde;
        # moments computed by deterministic quadrature over the simplex
        def weight(l2, l1):
            l3 = 1.0 - l1 - l2
            return ((l1 - l2) * (l1 - l3) * (l2 - l3)) ** 2

        def moment(fn):
            val, _ = integrate.dblquad(
                lambda l2, l1: weight(l2, l1) * fn(l1, l2, 1.0 - l1 - l2),
                1.0 / 3.0, 1.0,
                lambda l1: max((1.0 - l1) / 2.0, 0.0),
                lambda l1: min(l1, 1.0 - l1),
                epsabs=1e-12, epsrel=1e-10)
            return val

        z = moment(lambda a, b, c: 1.0)
        purity_ref = moment(lambda a, b, c: a * a + b * b + c * c) / z
        lmax_ref = moment(lambda a, b, c: a) / z
        # cross-check the quadrature against the closed induced-measure
        # moment E[purity] = 2n/(n^2+1) = 0.6
        assert abs(purity_ref - 0.6) < 1e-9

        st = metropolis_run(3, 0.0, 3, sweeps=60000, seed=13)
        assert abs(st.purity_mean - purity_ref) < 0.01
        assert abs(st.mean_lambda_max - lmax_ref) < 0.01


class TestKsDistance:
    def test_empty_histogram(self):
        h = Histogram(edges=np.array([0.0, 1.0]), counts=np.array([0]))
        with pytest.raises(EmptyHistogram):
            ks_distance(h, mp_cdf)

    def test_single_bin_deterministic(self):
        h = Histogram(edges=np.array([0.0, 4.0]), counts=np.array([10]))
        assert ks_distance(h, mp_cdf) == 0.0

    def test_self_consistency(self):
        # inverse-transform samples from the reference must sit within 0.01
        rng = np.random.default_rng(14)
        ys = np.linspace(1e-9, 4.0 - 1e-9, 20001)
        cdf_vals = np.array([mp_cdf(y) for y in ys])
        samples = np.interp(rng.random(100000), cdf_vals, ys)
        h = Histogram.from_samples(samples, bins=64, range_=(0.0, 4.0))
        assert ks_distance(h, mp_cdf) < 0.01

    def test_discriminates_references(self):
        rng = np.random.default_rng(15)
        ys = np.linspace(1e-9, 4.0 - 1e-9, 20001)
        cdf_vals = np.array([mp_cdf(y) for y in ys])
        samples = np.interp(rng.random(20000), cdf_vals, ys)
        h = Histogram.from_samples(samples, bins=64, range_=(0.0, 4.0))
        assert ks_distance(h, lambda y: semicircle_cdf(y, 4.0)) > 0.1

    def test_two_sample_requires_shared_edges(self):
        a = Histogram(edges=np.array([0.0, 1.0, 2.0]), counts=np.array([1, 1]))
        b = Histogram(edges=np.array([0.0, 0.5, 1.0]), counts=np.array([1, 1]))
        with pytest.raises(InvalidParams):
            ks_two_sample(a, b)

    def test_reference_cdf_shapes(self):
        assert mp_cdf(-1.0) == 0.0 and mp_cdf(5.0) == 1.0
        assert abs(mp_cdf(2.0) - (2.0 * math.asin(math.sqrt(2.0) / 2.0)
                                  + 1.0) / math.pi) < 1e-12
        assert semicircle_cdf(0.0, 4.0) == 0.0
        assert semicircle_cdf(2.0, 4.0) == 1.0
        assert abs(semicircle_cdf(1.0, 4.0) - 0.5) < 1e-12
