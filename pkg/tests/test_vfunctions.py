import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from eplab.vfunctions import (
    adaptive_simpson, v_minus, v_minus_inverse, v_plus, v_plus_inverse, well,
)


def speed(t):
    return math.sqrt(2.0 * max((t - 1.0) * math.exp(t) + 1.0, 0.0))


def test_well_nonnegative_and_small():
    for t in np.linspace(-40, 5, 301):
        assert well(t) >= 0.0
    assert well(0.0) == 0.0
    assert well(1e-4) == pytest.approx(0.5e-8, rel=1e-4)


def test_simpson_on_polynomial_and_exp():
    assert adaptive_simpson(lambda x: x**3, 0.0, 2.0) == pytest.approx(4.0, abs=1e-12)
    assert adaptive_simpson(math.exp, 0.0, 1.0) == pytest.approx(math.e - 1, abs=1e-10)


def test_v_minus_zero():
    assert v_minus(0.0) == 0.0
    assert v_plus(0.0) == 0.0


def test_v_minus_against_quad():
    # scipy.integrate.quad oracle, frozen: 0.4043887766041156
    assert v_minus(-1.0) == pytest.approx(0.4043887766041156, abs=1e-9)
    for z in (-0.3, -2.5, -12.0):
        ref = quad(speed, z, 0.0, epsabs=1e-13, limit=200)[0]
        assert v_minus(z) == pytest.approx(ref, abs=1e-9)
    for z in (0.2, 1.5, 4.0):
        ref = quad(speed, 0.0, z, epsabs=1e-13, limit=200)[0]
        assert v_plus(z) == pytest.approx(ref, abs=1e-9)


def test_v_minus_far_tail():
    # beyond the cutoff the integrand is sqrt(2) to within 1e-12
    assert v_minus(-50.0) - v_minus(-40.0) == pytest.approx(10 * math.sqrt(2), abs=1e-9)


def test_table_pairs():
    assert v_minus(math.log(0.5390)) == pytest.approx(0.1671, abs=5e-4)
    assert math.exp(v_minus_inverse(0.0875)) == pytest.approx(0.6448, abs=5e-4)
    assert math.exp(v_minus_inverse(0.1671)) == pytest.approx(0.5390, abs=5e-4)


def test_wrong_sign():
    with pytest.raises(ValueError):
        v_minus(0.5)
    with pytest.raises(ValueError):
        v_plus(-0.5)
    with pytest.raises(ValueError):
        v_minus_inverse(-1.0)


def test_small_h_asymptotics():
    h = 1e-6
    assert v_minus_inverse(h) == pytest.approx(-math.sqrt(2 * h), rel=0.01)
    assert v_plus_inverse(h) == pytest.approx(math.sqrt(2 * h), rel=0.01)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 10.0))
def test_round_trip(h):
    assert v_minus(v_minus_inverse(h)) == pytest.approx(h, abs=1e-9)
    assert v_plus(v_plus_inverse(h)) == pytest.approx(h, abs=1e-9)


def test_inverse_monotone():
    hs = np.linspace(0.0, 5.0, 21)
    zm = [v_minus_inverse(h) for h in hs]
    zp = [v_plus_inverse(h) for h in hs]
    assert np.all(np.diff(zm) < 0)
    assert np.all(np.diff(zp) > 0)
    assert all(0 < math.exp(z) <= 1 for z in zm)
