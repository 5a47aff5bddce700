import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from chlab import mollifier
from oracles import mp_phi_normalization, mp_Phi, mp_Phi_inverse

# frozen from the mpmath oracle (30 digits)
PHI_INV_QUARTER = -0.3121684080325331


def test_normalization_matches_high_precision_quadrature():
    assert mollifier.PHI_NORMALIZATION == pytest.approx(float(mp_phi_normalization()), rel=1e-15)
    assert mollifier.PHI_NORMALIZATION == pytest.approx(2.252283621, abs=1e-9)


def test_phi_support_symmetry_and_peak():
    assert mollifier.phi(1.0) == 0.0 and mollifier.phi(-1.0) == 0.0 and mollifier.phi(3.0) == 0.0
    x = np.linspace(-0.99, 0.99, 41)
    assert np.array_equal(mollifier.phi(x), mollifier.phi(-x))
    assert mollifier.phi(0.0) == pytest.approx(mollifier.PHI_NORMALIZATION / np.e, rel=1e-15)
    assert mollifier.phi(0.0) == pytest.approx(0.828569, abs=1e-6)


def test_phi_increasing_on_left_half():
    x = np.linspace(-0.999, -1e-3, 200)
    assert np.all(mollifier.phi_prime(x) > 0)
    assert np.all(np.diff(mollifier.phi(x)) > 0)


def test_phi_prime_matches_finite_difference():
    x = np.linspace(-0.9, 0.9, 19)
    eps = 1e-6
    fd = (mollifier.phi(x + eps) - mollifier.phi(x - eps)) / (2 * eps)
    assert np.allclose(mollifier.phi_prime(x), fd, atol=1e-8)


def test_Phi_endpoints_and_midpoint():
    assert mollifier.Phi(-1.0) == 0.0 and mollifier.Phi(1.0) == 1.0
    assert mollifier.Phi(-5.0) == 0.0 and mollifier.Phi(5.0) == 1.0
    assert mollifier.Phi(0.0) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("t", [-0.9, -0.5, -0.1, 0.3, 0.77])
def test_Phi_matches_mpmath(t):
    assert mollifier.Phi(t) == pytest.approx(float(mp_Phi(t)), abs=1e-14)


def test_Psi_is_even_and_vanishes_outside():
    x = np.linspace(-0.95, 0.95, 21)
    assert np.allclose(mollifier.Psi(x), mollifier.Psi(-x), atol=1e-16)
    assert mollifier.Psi(1.0) == 0.0 and mollifier.Psi(-2.0) == 0.0
    assert mollifier.Psi(0.0) < 0


def test_Phi_inverse_values():
    assert mollifier.Phi_inverse(0.5) == 0.0
    assert mollifier.Phi_inverse(0.25) == pytest.approx(PHI_INV_QUARTER, abs=1e-13)
    assert mollifier.Phi_inverse(0.75) == pytest.approx(-PHI_INV_QUARTER, abs=1e-13)


@pytest.mark.slow
def test_Phi_inverse_quarter_oracle():
    assert mp_Phi_inverse(0.25) == pytest.approx(PHI_INV_QUARTER, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6))
def test_Phi_of_inverse_round_trip(p):
    assert mollifier.Phi(mollifier.Phi_inverse(p)) == pytest.approx(p, abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_Phi_inverse_rejects_outside_unit_interval(p):
    with pytest.raises(ValueError):
        mollifier.Phi_inverse(p)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(0.0, 1.0))
def test_interval_integrals_match_Phi_differences(a, length):
    b = a + length
    got = mollifier.interval_integrals(np.array([a]), np.array([b]))[0]
    assert got == pytest.approx(mollifier.Phi(b) - mollifier.Phi(a), abs=1e-14)


def test_ramp_correction_is_local_and_matches_quadrature():
    n = 4
    s = np.array([-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3])
    got = mollifier.ramp_correction(s, n)
    assert got[0] == 0.0 and got[-1] == 0.0
    # (n phi(n .)) * s_+ by adaptive quadrature, split at the kink z = n s
    for si, gi in zip(s[1:-1], got[1:-1]):
        conv = quad(lambda z: mollifier.phi(z) * max(si - z / n, 0.0), -1, 1,
                    points=[n * si], epsabs=1e-15, limit=200)[0]
        assert gi == pytest.approx(conv - max(si, 0.0), abs=1e-13)
