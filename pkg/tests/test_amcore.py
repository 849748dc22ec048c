import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.physics.wigner import wigner_3j as sympy_3j

from darkstab.amcore import (MAGIC_ANGLE, AngularMomentumError, SphericalField,
                             dipole_tensor, linear_polarization_at_angle, m_values,
                             rabi_matrix, rms_rabi, spherical_components, wigner3j)


def racah(j1, j2, j3, m1, m2, m3):
    """Racah's closed sum, evaluated in exact rationals (float result)."""
    F = math.factorial
    tj = [round(2 * x) for x in (j1, j2, j3, m1, m2, m3)]
    j1, j2, j3, m1, m2, m3 = (Fraction(x, 2) for x in tj)
    if m1 + m2 + m3 != 0 or j3 < abs(j1 - j2) or j3 > j1 + j2:
        return 0.0
    if any(abs(m) > j for j, m in ((j1, m1), (j2, m2), (j3, m3))):
        return 0.0
    ints = [j1 + j2 - j3, j1 - j2 + j3, -j1 + j2 + j3, j1 + m1, j1 - m1, j2 + m2,
            j2 - m2, j3 + m3, j3 - m3]
    if any(x.denominator != 1 for x in ints):
        return 0.0
    ints = [int(x) for x in ints]
    tri = Fraction(F(ints[0]) * F(ints[1]) * F(ints[2]), F(int(j1 + j2 + j3 + 1)))
    pre = F(ints[3]) * F(ints[4]) * F(ints[5]) * F(ints[6]) * F(ints[7]) * F(ints[8])
    s = Fraction(0)
    for k in range(0, 100):
        den = [k, int(j1 + j2 - j3) - k, int(j1 - m1) - k, int(j2 + m2) - k,
               int(j3 - j2 + m1) + k, int(j3 - j1 - m2) + k]
        if min(den) < 0:
            continue
        s += Fraction((-1) ** k, math.prod(F(d) for d in den))
    sign = (-1) ** int(j1 - j2 - m3)
    return sign * math.sqrt(tri * pre) * float(s) if s else 0.0


HALF = [Fraction(k, 2) for k in range(0, 9)]  # j <= 4


def _triples():
    for j1, j2, j3 in itertools.product(HALF, repeat=3):
        if (j1 + j2 + j3).denominator != 1:
            continue
        if not abs(j1 - j2) <= j3 <= j1 + j2:
            continue
        yield j1, j2, j3


def test_wigner3j_examples():
    assert wigner3j(0, 0, 0, 0, 0, 0) == pytest.approx(1.0, abs=1e-15)
    assert wigner3j(1, 1, 0, 1, -1, 0) == pytest.approx(1 / math.sqrt(3), rel=1e-14)
    assert wigner3j(1, 1, 1, 0, 0, 0) == 0.0


def test_wigner3j_matches_racah_all_j_up_to_4():
    worst = 0.0
    count = 0
    for j1, j2, j3 in _triples():
        for m1 in (-j1 + k for k in range(int(2 * j1) + 1)):
            for m2 in (-j2 + k for k in range(int(2 * j2) + 1)):
                m3 = -m1 - m2
                if abs(m3) > j3:
                    continue
                got = wigner3j(j1, j2, j3, m1, m2, m3)
                worst = max(worst, abs(got - racah(j1, j2, j3, m1, m2, m3)))
                count += 1
    assert count > 4000
    assert worst < 1e-13


@pytest.mark.parametrize("args", [
    (Fraction(3, 2), 1, Fraction(1, 2), Fraction(1, 2), 0, Fraction(-1, 2)),
    (2, 1, 1, -1, 1, 0),
    (Fraction(7, 2), 3, Fraction(5, 2), Fraction(3, 2), -2, Fraction(1, 2)),
    (4, 4, 4, 2, -3, 1),
])
def test_wigner3j_matches_sympy(args):
    assert wigner3j(*args) == pytest.approx(float(sympy_3j(*args)), abs=1e-15)


def test_wigner3j_zero_when_rules_fail():
    assert wigner3j(1, 1, 3, 0, 0, 0) == 0.0  # triangle
    assert wigner3j(1, 1, 1, 1, 0, 0) == 0.0  # m sum
    assert wigner3j(1, 1, 1, 2, -2, 0) == 0.0  # |m| > j


@pytest.mark.parametrize("bad", [
    (1, 1, 1, Fraction(1, 2), 0, Fraction(-1, 2)),  # j, m mismatch
    (0.3, 1, 1, 0, 0, 0),                           # not a half-integer
])
def test_wigner3j_domain_errors(bad):
    with pytest.raises(AngularMomentumError):
        wigner3j(*bad)


def test_wigner3j_symmetries():
    for j1, j2, j3 in _triples():
        if j1 > 2 or j2 > 2 or j3 > 2:
            continue
        for m1 in (-j1 + k for k in range(int(2 * j1) + 1)):
            for m2 in (-j2 + k for k in range(int(2 * j2) + 1)):
                m3 = -m1 - m2
                if abs(m3) > j3:
                    continue
                v = wigner3j(j1, j2, j3, m1, m2, m3)
                ph = (-1) ** int(j1 + j2 + j3)
                assert wigner3j(j2, j3, j1, m2, m3, m1) == pytest.approx(v, abs=1e-14)
                assert wigner3j(j2, j1, j3, m2, m1, m3) == pytest.approx(ph * v, abs=1e-14)
                assert wigner3j(j1, j2, j3, -m1, -m2, -m3) == pytest.approx(ph * v, abs=1e-14)


def test_wigner3j_orthogonality():
    js = [Fraction(k, 2) for k in range(0, 7)]
    for j1, j2 in itertools.product(js, repeat=2):
        allowed = [j for j in js if abs(j1 - j2) <= j <= j1 + j2
                   and (j1 + j2 + j).denominator == 1]
        for j3, j3p in itertools.product(allowed, repeat=2):
            for m3 in (-j3 + k for k in range(int(2 * j3) + 1)):
                if abs(m3) > j3p:
                    continue
                s = 0.0
                for m1 in (-j1 + k for k in range(int(2 * j1) + 1)):
                    m2 = -m1 - m3
                    if abs(m2) > j2:
                        continue
                    s += (2 * j3 + 1) * wigner3j(j1, j2, j3, m1, m2, m3) \
                        * wigner3j(j1, j2, j3p, m1, m2, m3)
                assert s == pytest.approx(1.0 if j3 == j3p else 0.0, abs=1e-12)


def test_spherical_components_examples():
    assert np.allclose(spherical_components(0, 0, 1).as_array(), [0, 1, 0])
    s = 1 / math.sqrt(2)
    assert np.allclose(spherical_components(1, 0, 0).as_array(), [s, 0, -s])
    assert np.allclose(spherical_components(s, 1j * s, 0).as_array(), [1, 0, 0])


complexes = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


@given(complexes, complexes, complexes)
def test_spherical_components_preserve_norm(ex, ey, ez):
    f = spherical_components(ex, ey, ez)
    want = abs(ex) ** 2 + abs(ey) ** 2 + abs(ez) ** 2
    assert f.norm ** 2 == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_linear_polarization_examples():
    assert np.allclose(linear_polarization_at_angle(0, 1).as_array(), [0, 1, 0])
    s = 1 / math.sqrt(2)
    assert np.allclose(linear_polarization_at_angle(math.pi / 2, 1).as_array(), [s, 0, -s])
    m = rabi_matrix(1, 0, linear_polarization_at_angle(MAGIC_ANGLE, math.sqrt(3)))
    mags = np.abs(m.omega[:, 0])
    assert np.allclose(mags, mags[0], rtol=1e-14)


def test_rabi_matrix_selection_rules_and_shape():
    for ji, jf in [(1, 0), (Fraction(3, 2), Fraction(1, 2)), (2, 2), (Fraction(5, 2), Fraction(7, 2))]:
        m = rabi_matrix(ji, jf, SphericalField(0.3, -0.2j, 0.7 + 0.1j))
        assert m.omega.shape == (round(2 * ji) + 1, round(2 * jf) + 1)
        for a, mi in enumerate(m_values(ji)):
            for b, mf in enumerate(m_values(jf)):
                if abs(mi - mf) > 1:
                    assert m.omega[a, b] == 0


def test_rabi_matrix_pi_only_couples_m0():
    m = rabi_matrix(1, 0, linear_polarization_at_angle(0.0))
    assert np.count_nonzero(np.abs(m.omega) > 1e-15) == 1
    assert abs(m.omega[1, 0]) > 0


def test_rabi_matrix_plus_component_drives_delta_m_minus_one():
    # E_{+1} couples m_i to m_f = m_i + 1 (m_i - m_f = -1)
    m = rabi_matrix(1, 1, SphericalField(0, 0, 1.0))
    rows, cols = np.nonzero(np.abs(m.omega) > 1e-14)
    mi, mf = m_values(1)[rows], m_values(1)[cols]
    assert np.all(mi - mf == -1)


def test_rabi_matrix_fig4_rms():
    # equal magnitude entries of 1/5 give rms sqrt(3)/5
    field = linear_polarization_at_angle(MAGIC_ANGLE)
    m = rabi_matrix(1, 0, field, reduced_coupling=math.sqrt(3) / 5)
    assert np.allclose(np.abs(m.omega[:, 0]), 0.2, rtol=1e-14)
    assert rms_rabi(m) == pytest.approx(math.sqrt(3) / 5, rel=1e-14)


def test_rms_rabi_examples():
    assert rms_rabi(np.array([[0.0, -0.4]])) == pytest.approx(0.4)
    assert rms_rabi(np.full((3, 1), 0.2)) == pytest.approx(math.sqrt(3) / 5)
    assert rms_rabi(np.zeros((3, 3))) == 0.0


def test_rabi_matrix_errors():
    with pytest.raises(AngularMomentumError):
        rabi_matrix(2, 0, SphericalField(0, 1, 0))
    with pytest.raises(AngularMomentumError):
        rabi_matrix(0, 0, SphericalField(0, 1, 0))
    with pytest.raises(AngularMomentumError):
        rabi_matrix(1, Fraction(1, 2), SphericalField(0, 1, 0))


js = st.sampled_from([(1, 0), (1, 1), (Fraction(1, 2), Fraction(1, 2)), (Fraction(3, 2), Fraction(1, 2)),
                      (2, 1), (2, 3), (Fraction(5, 2), Fraction(5, 2)), (3, 2)])


@settings(max_examples=60)
@given(js, complexes, complexes, complexes, st.floats(0.01, 10))
def test_rabi_rms_equals_coupling_times_norm(pair, a, b, c, red):
    f = SphericalField(a, b, c)
    m = rabi_matrix(*pair, f, reduced_coupling=red)
    assert rms_rabi(m) == pytest.approx(red * f.norm, rel=1e-12, abs=1e-12)


@settings(max_examples=40)
@given(js, complexes, complexes, complexes, complexes, complexes, complexes)
def test_rabi_matrix_linear_in_field(pair, a, b, c, d, e, f):
    f1, f2 = SphericalField(a, b, c), SphericalField(d, e, f)
    total = SphericalField(a + d, b + e, c + f)
    lhs = rabi_matrix(*pair, total).omega
    rhs = rabi_matrix(*pair, f1).omega + rabi_matrix(*pair, f2).omega
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-9)


def test_dipole_tensor_sum_rule():
    for ji, jf in [(1, 0), (2, 1), (Fraction(3, 2), Fraction(5, 2))]:
        d = dipole_tensor(ji, jf)
        # every upper sublevel decays with unit total strength / (2 Jf + 1)
        per_upper = sum(np.sum(x ** 2, axis=0) for x in d)
        assert np.allclose(per_upper, 1 / (round(2 * jf) + 1))
