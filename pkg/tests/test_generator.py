import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinmat import (
    Direction,
    ParameterPoint,
    Spectrum,
    classify,
    eigenvectors,
    generate,
    predict_family,
    spin_operator,
)
from spinmat.amplitudes import M_VALUES
from spinmat.sampling import random_direction, random_point, random_spectrum

angle = st.floats(0.0, 2 * math.pi)
value = st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False)


def test_spectrum_validation():
    with pytest.raises(ValueError):
        Spectrum((1, 2, 3))
    with pytest.raises(ValueError):
        Spectrum((1, 2, 3, 4, float("inf")))
    assert np.asarray(Spectrum((1, 2, 3, 4, 5))).dtype == complex


@given(angle, angle, angle, angle, st.lists(value, min_size=5, max_size=5))
@settings(max_examples=100, deadline=None)
def test_eigen_equation(t, p, tp, pp, lam):
    point = ParameterPoint.from_angles(t, p, tp, pp)
    M = generate(point, lam).entries
    for value_, pair in zip(lam, eigenvectors(point)):
        assert np.linalg.norm(M @ pair.vector - value_ * pair.vector) < 1e-10


def test_trace_and_determinant(rng):
    for _ in range(20):
        p, lam = random_point(rng), np.asarray(random_spectrum(rng))
        M = generate(p, lam).entries
        assert abs(np.trace(M) - lam.sum()) < 1e-11
        assert abs(np.linalg.det(M) - lam.prod()) < 1e-8 * max(1.0, abs(lam.prod()))


def test_eigenvectors_orthonormal(reference_point):
    V = np.column_stack([p.vector for p in eigenvectors(reference_point)])
    assert np.allclose(V.conj().T @ V, np.eye(5), atol=1e-14)


def test_identity_point_gives_diagonal():
    lam = (1, 2j, -3, 4 + 1j, 0.5)
    M = generate(ParameterPoint.from_angles(0, 0, 0, 0), lam).entries
    assert np.allclose(M, np.diag(lam), atol=1e-15)


def test_matrices_at_same_point_commute(rng):
    p = random_point(rng)
    A = generate(p, random_spectrum(rng)).entries
    B = generate(p, random_spectrum(rng)).entries
    assert np.max(np.abs(A @ B - B @ A)) < 1e-10


def test_linear_in_spectrum(rng):
    p = random_point(rng)
    lam, mu = np.asarray(random_spectrum(rng)), np.asarray(random_spectrum(rng))
    lhs = generate(p, 2 * lam - 1j * mu).entries
    rhs = 2 * generate(p, lam).entries - 1j * generate(p, mu).entries
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_depends_only_on_azimuth_difference(rng):
    p = random_point(rng)
    lam = random_spectrum(rng)
    t, ph, tp, php = p.angles
    shifted = ParameterPoint.from_angles(t, ph + 0.9, tp, php + 0.9)
    assert np.allclose(generate(p, lam).entries, generate(shifted, lam).entries, atol=1e-12)


def test_spin_operator_from_b_axis_at_pole(rng):
    # with these phase conventions the pole at phi' = pi reproduces the operator
    for _ in range(20):
        d = random_direction(rng)
        M = generate(ParameterPoint(d, Direction(0.0, math.pi)), M_VALUES).entries
        assert np.max(np.abs(M - spin_operator(d))) < 1e-12


def test_b_axis_at_phi_zero_flips_off_diagonal(rng):
    d = random_direction(rng)
    M = generate(ParameterPoint(d, Direction(0.0, 0.0)), M_VALUES).entries
    S = spin_operator(d)
    assert np.allclose(np.diag(M), np.diag(S), atol=1e-12)
    off = ~np.eye(5, dtype=bool)
    assert np.allclose(M[off], -S[off], atol=1e-12)
    assert np.allclose(M, spin_operator(Direction(d.theta, d.phi + math.pi)), atol=1e-12)


def test_provenance(reference_point):
    gm = generate(reference_point, (1, 2, 3, 4, 5))
    assert gm.provenance[0] == reference_point
    assert gm.provenance[1].values[2] == 3


def test_classify_needs_positive_tol():
    with pytest.raises(ValueError):
        classify(np.eye(5), 0.0)


def test_classify_real_eigenvectors_needs_vectors(rng):
    p = random_point(rng, equal_phi=True)
    M = generate(p, random_spectrum(rng)).entries
    assert not classify(M).real_eigenvectors
    assert classify(M, vectors=eigenvectors(p)).real_eigenvectors


FAMILIES = [
    ("same", "complex", "diagonal"),
    ("random", "real", "hermitian"),
    ("equal_phi", "complex", "symmetric"),
    ("equal_phi", "complex", "real_eigenvectors"),
    ("random", "imaginary", "anti_hermitian"),
    ("equal_phi", "imaginary", "imaginary_symmetric"),
]


def _point(rng, kind):
    if kind == "same":
        d = random_direction(rng)
        return ParameterPoint(d, d)
    return random_point(rng, equal_phi=kind == "equal_phi")


@pytest.mark.parametrize("kind, spectrum_kind, flag", FAMILIES)
def test_family_rules(rng, kind, spectrum_kind, flag):
    for _ in range(30):
        p = _point(rng, kind)
        lam = random_spectrum(rng, spectrum_kind)
        flags = classify(generate(p, lam).entries, vectors=eigenvectors(p))
        assert getattr(flags, flag)
        assert flags == predict_family(p, lam)


def test_general_instance_has_no_flags(rng):
    for _ in range(30):
        p, lam = random_point(rng), random_spectrum(rng)
        flags = classify(generate(p, lam).entries, vectors=eigenvectors(p))
        assert flags.general
        assert predict_family(p, lam).general


def test_predict_scalar_spectrum_is_diagonal(rng):
    p = random_point(rng)
    flags = predict_family(p, (2, 2, 2, 2, 2))
    assert flags.diagonal and flags.hermitian and flags.symmetric
    assert flags == classify(generate(p, (2,) * 5).entries, vectors=eigenvectors(p))


def test_predict_poles_with_different_azimuth():
    p = ParameterPoint.from_angles(0.0, 0.3, 0.0, 2.0)
    lam = (1, 2, 3, 4, 5)
    assert predict_family(p, lam).diagonal
    assert classify(generate(p, lam).entries).diagonal
