import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bosonlab.entropy import (
    EpniVerdict,
    entropy_photon_number,
    epni_evaluate,
    epni_slacks,
    g,
    g_inv,
    g_prime,
)
from bosonlab.errors import DomainError
from bosonlab.fock import (
    make_coherent_state,
    make_number_state,
    make_random_density,
    make_thermal_state,
    tensor,
)

# mpmath, 40 digits
G1 = 1.3862943611198906188
G3 = 2.2493405784752334012
G4 = 2.5020121176909393977
G_INV_10 = 8102.583932717459179

GRID = np.geomspace(1e-6, 1e4, 60)


def test_g_closed_forms():
    assert g(0) == 0
    assert abs(g(1) - 2 * math.log(2)) <= 1e-14
    assert abs(g(1) - G1) <= 1e-14
    assert abs(g(3) - G3) <= 1e-14
    assert abs(g(4) - G4) <= 1e-14
    assert abs(g(4) - (5 * math.log(5) - 4 * math.log(4))) <= 1e-14


def test_g_vectorized_and_domain():
    out = g(np.array([0.0, 1.0, 4.0]))
    assert np.allclose(out, [0, G1, G4], rtol=0, atol=1e-14)
    with pytest.raises(DomainError):
        g(-0.1)
    with pytest.raises(DomainError):
        g_inv(-0.1)


def test_g_inv_examples():
    assert g_inv(0) == 0
    assert abs(g_inv(2 * math.log(2)) - 1) <= 1e-12
    assert abs(g_inv(10) - G_INV_10) <= 1e-10 * G_INV_10


def test_g_round_trip_grid():
    for x in GRID:
        assert abs(g_inv(g(x)) - x) <= 1e-10 * max(1.0, x)


def test_g_monotone_and_concave():
    vals = g(GRID)
    assert np.all(np.diff(vals) > 0)
    lin = np.linspace(1e-3, 50, 500)
    assert np.all(np.diff(g(lin), 2) < 0)


@pytest.mark.parametrize("c", [0.1, 0.5, 0.9])
def test_g_difference_increasing(c):
    lin = np.linspace(1e-3, 100, 500)
    assert np.all(np.diff(g(lin) - g(c * lin)) > 0)


def test_g_prime_matches_finite_difference():
    for x in (0.01, 0.5, 3.0, 200.0):
        h = 1e-6 * max(1.0, x)
        fd = (g(x + h) - g(x - h)) / (2 * h)
        assert abs(g_prime(x) - fd) <= 1e-6 * abs(fd)


@settings(max_examples=50, deadline=None)
@given(S=st.floats(0, 50))
def test_g_inv_is_inverse(S):
    assert abs(g(g_inv(S)) - S) <= 1e-10 * max(1.0, S)


def test_entropy_photon_number():
    assert entropy_photon_number(make_number_state(0, 5)) == 0
    assert abs(entropy_photon_number(make_thermal_state(1, 60)) - 1) <= 1e-8
    assert entropy_photon_number(make_coherent_state(1.0, 30)) <= 1e-8
    # two thermal modes share the per-mode entropy photon number
    two = tensor(make_thermal_state(0.5, 30), make_thermal_state(0.5, 30))
    assert abs(entropy_photon_number(two) - 0.5) <= 1e-8
    assert abs(entropy_photon_number(two, n_modes=2) - 0.5) <= 1e-8


def test_epni_slacks_thermal_equality():
    # thermal inputs give thermal output with N_c = eta N_a + (1-eta) N_b
    v = epni_slacks(g(2.0), g(0.5), g(0.7 * 2 + 0.3 * 0.5), eta=0.7)
    assert abs(v.n_form_slack) <= 1e-12
    assert abs(v.s_form_slack) <= 1e-12
    assert v.sign_consistent()


def test_epni_evaluate_thermal_thermal():
    v = epni_evaluate(make_thermal_state(1.0, 60), make_thermal_state(0.3, 40), 0.4)
    assert abs(v.n_form_slack) <= 1e-8
    assert abs(v.s_form_slack) <= 1e-8


def test_epni_evaluate_vacuum_number():
    v = epni_evaluate(make_number_state(0, 4), make_number_state(1, 4), 0.5)
    # output is (|0><0| + |1><1|)/2, N_a = N_b = 0
    assert abs(v.entropies[2] - math.log(2)) <= 1e-12
    assert v.n_form_slack > 0 and v.s_form_slack > 0


def test_epni_evaluate_domain():
    with pytest.raises(DomainError):
        epni_evaluate(make_number_state(0, 3), make_number_state(0, 3), 1.5)


def test_verdict_helpers():
    v = EpniVerdict(n_form_slack=0.1, s_form_slack=-0.2, third_form_slack=0.0, eta=0.5)
    assert not v.sign_consistent()
    v = EpniVerdict(n_form_slack=1e-12, s_form_slack=-0.2, third_form_slack=0.0, eta=0.5)
    assert v.sign_consistent()
    v = EpniVerdict(n_form_slack=0.1, s_form_slack=0.1, third_form_slack=-0.1, eta=0.5)
    assert not v.third_form_implied()


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), eta=st.floats(0.05, 0.95), D=st.integers(2, 6))
def test_ginibre_epni_forms_agree(seed, eta, D):
    rng = np.random.default_rng(seed)
    v = epni_evaluate(make_random_density(rng, D), make_random_density(rng, D), eta)
    assert v.sign_consistent()
    assert v.third_form_implied()
