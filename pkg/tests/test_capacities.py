import math

import numpy as np
import pytest

from bosonlab.capacities import (
    CAPACITY_FUNCTIONS,
    ChannelParams,
    c_heterodyne,
    c_homodyne,
    c_privacy,
    c_privacy_asymptotic,
    c_pure_loss,
    c_shannon,
    c_thermal_lower,
    privacy_inner_objective,
)
from bosonlab.entropy import g
from bosonlab.errors import DivergenceError, DomainError

# mpmath, 40 digits
G6_MINUS_G4 = 0.3688021103279237332
G6_MINUS_G1 = 1.484519866898972512
HALF_LN21 = 1.5222612188617114983
LN6 = 1.7917594692280550008

ETAS = [0.1 * k for k in range(1, 10)]
NBARS = [0.1, 1, 10, 100]


def P(eta, n_bar, n_noise=0.0):
    return ChannelParams(eta=eta, n_bar=n_bar, n_noise=n_noise)


def test_params_validation():
    with pytest.raises(DomainError):
        P(1.1, 1)
    with pytest.raises(DomainError):
        P(0.5, -1)
    with pytest.raises(DomainError):
        P(0.5, 1, -1)


def test_closed_form_values():
    assert abs(c_homodyne(P(0.5, 10)) - HALF_LN21) <= 1e-12
    assert abs(c_heterodyne(P(0.5, 10)) - LN6) <= 1e-12
    assert abs(c_pure_loss(P(0.6, 10)) - g(6)) <= 1e-12
    assert abs(c_thermal_lower(P(0.6, 10, 0)) - g(6)) <= 1e-12
    # (1-eta) N = 1
    assert abs(c_thermal_lower(P(0.5, 10, 2)) - G6_MINUS_G1) <= 1e-12
    assert abs(c_shannon(P(0.5, 10, 2)) - math.log(6)) <= 1e-12
    assert c_shannon(P(0.5, 0, 0)) == 0


def test_shannon_diverges_without_noise():
    with pytest.raises(DivergenceError):
        c_shannon(P(0.5, 1, 0))
    with pytest.raises(DivergenceError):
        c_shannon(P(1.0, 1, 3))


def test_privacy_values():
    assert abs(c_privacy(P(0.6, 10)) - G6_MINUS_G4) <= 1e-10
    assert c_privacy(P(0.5, 10)) == 0
    assert c_privacy(P(0.3, 10)) == 0
    assert abs(c_privacy(P(0.75, 1e4)) - math.log(3)) <= 1e-3
    assert c_privacy(P(0.6, 10, 5)) == c_privacy(P(0.6, 10))


def test_privacy_asymptote():
    assert c_privacy_asymptotic(0.4) == 0
    assert abs(c_privacy_asymptotic(0.75) - math.log(3)) <= 1e-15
    assert c_privacy_asymptotic(1.0) == math.inf
    for eta in (0.6, 0.8, 0.95):
        vals = [c_privacy(P(eta, n)) for n in (1, 10, 100, 1e4)]
        assert all(np.diff(vals) > 0)
        assert vals[-1] < c_privacy_asymptotic(eta)


def test_capacity_ordering_grid():
    for eta in ETAS:
        for nb in NBARS:
            p = P(eta, nb)
            assert c_pure_loss(p) > c_heterodyne(p)
            assert c_pure_loss(p) > c_homodyne(p)
            for N in (1, 4):
                q = P(eta, nb, N)
                assert c_thermal_lower(q) > c_heterodyne(q)
                assert c_thermal_lower(q) > c_homodyne(q)


def test_privacy_inner_objective():
    for eta in (0.6, 0.75, 0.9):
        nb = 10.0
        K = np.linspace(0, g(eta * nb), 100)
        vals = [privacy_inner_objective(k, eta) for k in K]
        assert int(np.argmax(vals)) == 99
        assert abs(vals[-1] - c_privacy(P(eta, nb))) <= 1e-9
    K = np.linspace(0, 5, 100)
    assert np.all(np.diff([privacy_inner_objective(k, 0.7) for k in K]) > 0)
    with pytest.raises(DomainError):
        privacy_inner_objective(-1, 0.7)


def test_registry():
    assert set(CAPACITY_FUNCTIONS) == {"shannon", "homodyne", "heterodyne", "pure_loss", "thermal_lower", "privacy"}
