import math

import pytest
from hypothesis import given, settings, strategies as st

from bosonlab.classical_epi import (
    GaussianVectorSpec,
    entropy_power,
    epi_gaussian_slacks,
    gaussian_diff_entropy,
)
from bosonlab.errors import DimensionMismatchError, DomainError

CONVEX_SLACK = 0.11157177565710487788  # mpmath: ln(2.5)/2 - ln(4)/4


def test_entropy_power_examples():
    s2 = 2.7
    assert abs(entropy_power(math.log(2 * math.pi * math.e * s2), 1) - s2) <= 1e-12
    assert abs(entropy_power(0.0, 1) - 1 / (2 * math.pi * math.e)) <= 1e-15
    with pytest.raises(DomainError):
        entropy_power(0.0, 0)


@pytest.mark.parametrize("convention", ["doubled", "standard"])
def test_round_trip(convention):
    for n in (1, 3):
        spec = GaussianVectorSpec(n, 1.7)
        assert abs(entropy_power(gaussian_diff_entropy(spec, convention), n, convention) - 1.7) <= 1e-12


def test_standard_convention_examples():
    s = epi_gaussian_slacks(GaussianVectorSpec(1, 1.0), GaussianVectorSpec(1, 1.0), 0.3, "standard")
    assert abs(s.slack_power) <= 1e-12
    s = epi_gaussian_slacks(GaussianVectorSpec(1, 1.0), GaussianVectorSpec(1, 4.0), 0.5, "standard")
    assert abs(s.slack_power) <= 1e-12
    assert abs(s.slack_entropy) <= 1e-12
    assert abs(s.slack_convex - CONVEX_SLACK) <= 1e-12


def test_eta_one_all_zero():
    for conv in ("doubled", "standard"):
        s = epi_gaussian_slacks(GaussianVectorSpec(2, 1.0), GaussianVectorSpec(2, 4.0), 1.0, conv)
        assert abs(s.slack_power) <= 1e-12
        assert abs(s.slack_entropy) <= 1e-12
        assert abs(s.slack_convex) <= 1e-12


def test_errors():
    with pytest.raises(DomainError):
        epi_gaussian_slacks(GaussianVectorSpec(1, 1.0), GaussianVectorSpec(1, 1.0), 1.5)
    with pytest.raises(DimensionMismatchError):
        epi_gaussian_slacks(GaussianVectorSpec(1, 1.0), GaussianVectorSpec(2, 1.0), 0.5)
    with pytest.raises(Exception):
        GaussianVectorSpec(1, 0.0)


def _sign(x, tol=1e-12):
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 4), vx=st.floats(0.01, 100), vy=st.floats(0.01, 100), eta=st.floats(0, 1))
def test_slack_signs(n, vx, vy, eta):
    doubled = epi_gaussian_slacks(GaussianVectorSpec(n, vx), GaussianVectorSpec(n, vy), eta, "doubled")
    std = epi_gaussian_slacks(GaussianVectorSpec(n, vx), GaussianVectorSpec(n, vy), eta, "standard")
    assert std.slack_convex >= -1e-12
    assert doubled.slack_convex >= -1e-12
    assert _sign(doubled.slack_convex) == _sign(std.slack_convex)
