import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinmat import (
    Direction,
    ParameterPoint,
    amplitude_table,
    chi,
    closed_form_amplitude,
    spin_operator,
    xi,
)
from spinmat.amplitudes import M_VALUES, chi_basis, xi_matrix, xi_matrix_batch
from spinmat.sampling import random_direction, random_point

angle = st.floats(-20.0, 20.0, allow_nan=False)


def ladder_spin_operator(theta, phi):
    """n.J for j=2 built from the ladder operators, basis ordered m = 2..-2."""
    m = np.array(M_VALUES, dtype=float)
    jz = np.diag(m)
    jp = np.zeros((5, 5))
    for k in range(1, 5):
        jp[k - 1, k] = math.sqrt(6 - m[k] * (m[k] + 1))
    jx = (jp + jp.T) / 2
    jy = (jp - jp.T) / 2j
    n = Direction(theta, phi).unit_vector
    return n[0] * jx + n[1] * jy + n[2] * jz


def test_direction_normalizes_into_range():
    d = Direction(5.0, -1.0)
    assert 0 <= d.theta <= math.pi
    assert 0 <= d.phi < 2 * math.pi
    assert np.allclose(d.unit_vector, [math.sin(5) * math.cos(-1), math.sin(5) * math.sin(-1), math.cos(5)])


@given(angle, angle)
def test_direction_keeps_unit_vector(theta, phi):
    d = Direction(theta, phi)
    raw = [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    assert np.allclose(d.unit_vector, raw, atol=1e-12)


def test_direction_rejects_nan():
    with pytest.raises(ValueError):
        Direction(float("nan"), 0.0)


def test_with_angle_replaces_one():
    p = ParameterPoint.from_angles(0.1, 0.2, 0.3, 0.4)
    assert p.with_angle("phi_p", 1.5).angles == (0.1, 0.2, 0.3, 1.5)
    with pytest.raises(ValueError):
        p.with_angle("psi", 1.0)


def test_chi_along_z_is_standard_basis_up_to_sign():
    signs = [chi(m, Direction(0.0, 0.0))[k] for k, m in enumerate(M_VALUES)]
    assert np.allclose(signs, [1, -1, 1, -1, 1])
    for k, m in enumerate(M_VALUES):
        assert np.allclose(np.abs(chi(m, Direction(0.0, 0.0))), np.eye(5)[k])


def test_chi_rejects_bad_projection():
    with pytest.raises(ValueError):
        chi(3, Direction(0.0, 0.0))


def test_chi_along_x_middle_vector():
    v = chi(0, Direction(math.pi / 2, 0.0))
    assert np.allclose(v, [math.sqrt(6) / 4, 0, -0.5, 0, math.sqrt(6) / 4])


def test_spin_operator_matches_ladder_construction(rng):
    for _ in range(50):
        d = random_direction(rng)
        assert np.max(np.abs(spin_operator(d) - ladder_spin_operator(d.theta, d.phi))) < 1e-14


@given(angle, angle)
@settings(max_examples=50)
def test_chi_are_eigenvectors(theta, phi):
    d = Direction(theta, phi)
    S = spin_operator(d)
    for m in M_VALUES:
        v = chi(m, d)
        assert np.linalg.norm(S @ v - m * v) < 1e-12


def test_chi_basis_broadcasts():
    theta = np.linspace(0, math.pi, 7)
    out = chi_basis(theta[:, None], np.array([0.0, 1.0, 2.0]))
    assert out.shape == (7, 3, 5, 5)
    assert np.allclose(out[4, 1], chi_basis(theta[4], 1.0))


@given(angle, angle, angle, angle)
@settings(max_examples=100)
def test_table_is_unitary(t, p, tp, pp):
    T = amplitude_table(ParameterPoint.from_angles(t, p, tp, pp)).entries
    assert np.max(np.abs(T.T @ T.conj() - np.eye(5))) < 1e-12


def test_table_is_identity_for_same_axes(rng):
    d = random_direction(rng)
    assert np.allclose(amplitude_table(ParameterPoint(d, d)).entries, np.eye(5), atol=1e-14)


def test_table_entries_are_inner_products(rng):
    p = random_point(rng)
    table = amplitude_table(p)
    for i in range(1, 6):
        for j in range(1, 6):
            expected = np.vdot(chi(M_VALUES[j - 1], p.c_axis), chi(M_VALUES[i - 1], p.b_axis))
            assert abs(table.entry(i, j) - expected) < 1e-14


def test_table_is_read_only(reference_point):
    T = amplitude_table(reference_point).entries
    with pytest.raises(ValueError):
        T[0, 0] = 1.0


@pytest.mark.parametrize("bad", [0, 6, 1.0])
def test_entry_index_checked(reference_point, bad):
    with pytest.raises(ValueError):
        amplitude_table(reference_point).entry(bad, 1)


def test_xi_is_conjugated_table(reference_point):
    T = amplitude_table(reference_point).entries
    X = xi_matrix(reference_point)
    assert xi(2, 4, reference_point) == pytest.approx(np.conj(T[3, 1]))
    assert np.allclose(X, T.conj())


def test_xi_batch_matches_single(rng):
    angles = rng.uniform(0, 3, size=(6, 4))
    batch = xi_matrix_batch(angles)
    for a, X in zip(angles, batch):
        assert np.allclose(X, xi_matrix(ParameterPoint.from_angles(*a)), atol=1e-13)


def test_inverse_table_is_conjugate_transpose(rng):
    c, b = random_direction(rng), random_direction(rng)
    forward = amplitude_table(ParameterPoint(c, b)).entries
    backward = amplitude_table(ParameterPoint(b, c)).entries
    assert np.allclose(backward, forward.conj().T, atol=1e-14)


@pytest.mark.parametrize("which", [(1, 1), (1, 2), (5, 5)])
def test_closed_forms_match_table(rng, which):
    for _ in range(100):
        p = random_point(rng)
        assert abs(closed_form_amplitude(which, p) - amplitude_table(p).entry(*which)) < 1e-12


def test_printed_55_expansion_differs(reference_point):
    exact = amplitude_table(reference_point).entry(5, 5)
    printed = closed_form_amplitude((5, 5), reference_point, printed=True)
    assert abs(printed - exact) > 1e-3


def test_closed_form_unknown_entry(reference_point):
    with pytest.raises(ValueError):
        closed_form_amplitude((2, 3), reference_point)


def test_composition_through_third_axis(rng):
    for _ in range(50):
        b, c, d = (random_direction(rng) for _ in range(3))
        bc = amplitude_table(ParameterPoint(c, b)).entries
        bd = amplitude_table(ParameterPoint(d, b)).entries
        dc = amplitude_table(ParameterPoint(c, d)).entries
        assert np.max(np.abs(bc - bd @ dc)) < 1e-12


def test_composition_with_conjugated_second_factor_fails(rng):
    b, c, d = (random_direction(rng) for _ in range(3))
    bc = amplitude_table(ParameterPoint(c, b)).entries
    bd = amplitude_table(ParameterPoint(d, b)).entries
    dc = amplitude_table(ParameterPoint(c, d)).entries
    assert np.max(np.abs(bc - bd @ dc.conj())) > 1e-3
