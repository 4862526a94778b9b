import math

import numpy as np
import pytest

from spinmat import eig5, eigenvectors, generate, match_spectra
from spinmat.oracle import OracleFailure, SpectrumMismatch, charpoly, polynomial_roots
from spinmat.sampling import random_point, random_spectrum


def test_charpoly_matches_numpy(rng):
    A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert np.allclose(charpoly(A), np.poly(A), atol=1e-10)


def test_charpoly_trace_and_determinant(rng):
    A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    c = charpoly(A)
    assert abs(c[1] + np.trace(A)) < 1e-12
    assert abs(c[5] + np.linalg.det(A)) < 1e-10


def test_polynomial_roots_known():
    roots = polynomial_roots(np.poly([1, -2, 3j, 4, -5 - 1j]))
    assert sorted(roots, key=lambda z: (round(z.real, 6), round(z.imag, 6))) == pytest.approx(
        sorted([1, -2, 3j, 4, -5 - 1j], key=lambda z: (z.real, z.imag)), abs=1e-10
    )


def test_eig5_generated(rng):
    for _ in range(20):
        p, lam = random_point(rng), random_spectrum(rng)
        pairs = eig5(generate(p, lam).entries)
        match = match_spectra(pairs, lam, eigenvectors(p), tol=1e-6)
        assert match.max_value_error < 1e-8


def test_eig5_repeated_eigenvalues(rng):
    p = random_point(rng)
    lam = (2, 2, 2, -1, 5j)
    M = generate(p, lam).entries
    pairs = eig5(M)
    assert match_spectra(pairs, lam, tol=1e-8).max_value_error < 1e-8
    V = np.column_stack([q.vector for q in pairs])
    assert np.linalg.matrix_rank(V) == 5


def test_eig5_zero_and_diagonal():
    assert [p.value for p in eig5(np.zeros((5, 5)))] == [0] * 5
    pairs = eig5(np.diag([1.0, 2, 3, 4, 5]))
    assert sorted(p.value.real for p in pairs) == pytest.approx([1, 2, 3, 4, 5], abs=1e-12)


def test_eig5_rejects_nonfinite():
    A = np.eye(5)
    A[0, 0] = np.nan
    with pytest.raises(ValueError):
        eig5(A)


def test_eig5_unreachable_tolerance_fails_loudly(rng):
    A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    with pytest.raises(OracleFailure) as info:
        eig5(A, tol=1e-30)
    assert len(info.value.residuals) == 5


def test_match_spectra_permutation():
    m = match_spectra([3, 1, 2, 5, 4], [1, 2, 3, 4, 5], tol=1e-12)
    assert m.permutation == (2, 0, 1, 4, 3)
    assert m.max_value_error == 0


def test_match_spectra_vector_phase_ignored(rng):
    p = random_point(rng)
    ref = eigenvectors(p)
    found = [type(q)(float(k), q.vector * np.exp(1j * k)) for k, q in enumerate(ref)]
    m = match_spectra(found, range(5), ref, tol=1e-12)
    assert m.max_vector_angle_error < 1e-12


def test_match_spectra_mismatch():
    with pytest.raises(SpectrumMismatch) as info:
        match_spectra([1, 2, 3, 4, 5], [1, 2, 3, 4, 6], tol=1e-3)
    assert info.value.match.max_value_error == pytest.approx(1.0)
    with pytest.raises(ValueError):
        match_spectra([1, 2], [1, 2, 3], tol=math.inf)
