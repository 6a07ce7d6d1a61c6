"""Scalar utilities: root bracketing, edge-singular quadrature, containers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrogas.core import (
    BranchKind,
    DomainError,
    EntrogasError,
    Histogram,
    NoSignChange,
    Spectrum,
    bracket_root,
    purity,
    quad_edge_singular,
)


class TestBracketRoot:
    def test_cube_root_oracle(self):
        # independent oracle: x**3 = 2 has the closed-form root 2**(1/3)
        r = bracket_root(lambda x: x**3 - 2.0, 0.0, 2.0)
        assert abs(r - 2.0 ** (1.0 / 3.0)) < 1e-12

    def test_endpoint_zero_returns_endpoint(self):
        assert bracket_root(lambda x: x - 1.0, 1.0, 3.0) == 1.0
        assert bracket_root(lambda x: x - 3.0, 1.0, 3.0) == 3.0

    def test_no_sign_change_raises(self):
        with pytest.raises(NoSignChange):
            bracket_root(lambda x: x * x + 1.0, -1.0, 1.0)

    def test_steep_function(self):
        r = bracket_root(lambda x: math.expm1(50.0 * (x - 0.123)), 0.0, 1.0)
        assert abs(r - 0.123) < 1e-12

    @given(st.floats(min_value=-5.0, max_value=5.0))
    @settings(max_examples=50, deadline=None)
    def test_linear_root_recovered(self, c):
        r = bracket_root(lambda x: x - c, -6.0, 6.0)
        assert abs(r - c) < 1e-10


class TestQuadEdgeSingular:
    def test_arcsine_weight(self):
        # integral of 1/sqrt(1-x^2) over (-1, 1) is pi
        val = quad_edge_singular(lambda x: 1.0 / np.sqrt(1.0 - x * x))
        assert abs(val - math.pi) < 1e-9

    def test_second_moment_of_arcsine(self):
        val = quad_edge_singular(lambda x: x * x / np.sqrt(1.0 - x * x))
        assert abs(val - math.pi / 2.0) < 1e-9

    def test_semicircle_normalization(self):
        val = quad_edge_singular(lambda x: (2.0 / math.pi) * np.sqrt(1.0 - x * x))
        assert abs(val - 1.0) < 1e-9

    def test_smooth_polynomial(self):
        val = quad_edge_singular(lambda x: x**4)
        assert abs(val - 2.0 / 5.0) < 1e-9


class TestSpectrum:
    def test_sorted_descending(self):
        s = Spectrum.from_values([0.1, 0.5, 0.4])
        assert np.all(np.diff(s.values) <= 0)
        assert s.n == 3

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            Spectrum.from_values([1.1, -0.1])

    def test_rejects_unnormalized(self):
        with pytest.raises(DomainError):
            Spectrum.from_values([0.5, 0.4])

    def test_values_are_immutable(self):
        s = Spectrum.from_values([0.5, 0.5])
        with pytest.raises(ValueError):
            s.values[0] = 0.9

    def test_purity_bounds(self):
        assert purity(Spectrum.from_values([1.0])) == 1.0
        s = Spectrum.from_values([0.25] * 4)
        assert abs(purity(s) - 0.25) < 1e-15

    @given(st.integers(min_value=1, max_value=20), st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=40, deadline=None)
    def test_purity_in_range(self, n, seed):
        rng = np.random.default_rng(seed)
        v = rng.random(n) + 1e-3
        v /= v.sum()
        # renormalize exactly enough for the 1e-12 gate
        v[-1] += 1.0 - v.sum()
        s = Spectrum.from_values(v)
        assert 1.0 / n - 1e-12 <= purity(s) <= 1.0 + 1e-12


class TestHistogram:
    def test_from_samples_counts(self):
        h = Histogram.from_samples([0.1, 0.2, 0.9], bins=2, range_=(0.0, 1.0))
        assert h.total == 3
        assert list(h.counts) == [2, 1]

    def test_edges_length(self):
        h = Histogram.from_samples(np.linspace(0, 1, 11), bins=5, range_=(0.0, 1.0))
        assert len(h.edges) == len(h.counts) + 1


def test_branch_kind_has_seven_members():
    assert len(BranchKind) == 7


def test_exceptions_share_base():
    for exc in (NoSignChange, DomainError):
        assert issubclass(exc, EntrogasError)
