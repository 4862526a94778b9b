"""Matrices with a prescribed spectrum and analytically known eigenvectors."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from spinmat.amplitudes import ParameterPoint, amplitude_table, xi_matrix

__all__ = [
    "Spectrum",
    "EigenPair",
    "GeneratedMatrix",
    "FamilyFlags",
    "generate",
    "eigenvectors",
    "classify",
    "predict_family",
]

ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Ordered eigenvalues; ``values[i-1]`` is bound to C_i and hence to xi_i."""

    values: tuple

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        if len(vals) != 5:
            raise ValueError(f"a spectrum needs exactly 5 values, got {len(vals)}")
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vals):
            raise ValueError("spectrum values must be finite")
        object.__setattr__(self, "values", vals)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.values, dtype=dtype or complex)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return 5


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: Optional[complex]
    vector: np.ndarray


@dataclass(frozen=True, eq=False)
class GeneratedMatrix:
    entries: np.ndarray
    point: Optional[ParameterPoint] = None
    spectrum: Optional[Spectrum] = None

    @property
    def provenance(self):
        if self.point is None:
            return None
        return self.point, self.spectrum


@dataclass(frozen=True)
class FamilyFlags:
    diagonal: bool = False
    hermitian: bool = False
    anti_hermitian: bool = False
    symmetric: bool = False
    imaginary_symmetric: bool = False
    real_eigenvectors: bool = False

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def general(self) -> bool:
        return not any(self.as_dict().values())


def _as_spectrum(spectrum) -> Spectrum:
    return spectrum if isinstance(spectrum, Spectrum) else Spectrum(tuple(spectrum))


def generate(point: ParameterPoint, spectrum) -> GeneratedMatrix:
    """Build M_ij = sum_n conj(phi(B_i;C_n)) phi(B_j;C_n) lambda_n."""
    spectrum = _as_spectrum(spectrum)
    table = amplitude_table(point).entries
    lam = np.asarray(spectrum)
    entries = (table.conj() * lam) @ table.T
    entries.setflags(write=False)
    return GeneratedMatrix(entries, point, spectrum)


def eigenvectors(point: ParameterPoint) -> list[EigenPair]:
    """The five orthonormal eigenvectors shared by every matrix generated at ``point``.

    Component ``k`` of vector ``i`` is conj(phi(B_k; C_i)).
    """
    X = xi_matrix(point)
    return [EigenPair(None, X[:, i].copy()) for i in range(5)]


def classify(matrix, tol: float = 1e-10, vectors: Optional[Sequence] = None) -> FamilyFlags:
    """Structural flags of ``matrix`` judged entrywise against ``tol``.

    ``real_eigenvectors`` can only be decided from an eigenvector set, so it
    is False unless ``vectors`` is given and every component has an imaginary
    part below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = np.asarray(matrix, dtype=complex)
    off = M - np.diag(np.diag(M))
    symmetric = bool(np.max(np.abs(M - M.T)) < tol)
    real_vectors = False
    if vectors is not None:
        V = np.array([getattr(v, "vector", v) for v in vectors], dtype=complex)
        real_vectors = bool(np.max(np.abs(V.imag)) < tol)
    return FamilyFlags(
        diagonal=bool(np.max(np.abs(off)) < tol),
        hermitian=bool(np.max(np.abs(M - M.conj().T)) < tol),
        anti_hermitian=bool(np.max(np.abs(M + M.conj().T)) < tol),
        symmetric=symmetric,
        imaginary_symmetric=symmetric and bool(np.max(np.abs(M.real)) < tol),
        real_eigenvectors=real_vectors,
    )


def _angle_equal(a: float, b: float, period: float) -> bool:
    d = abs(a - b) % period
    return min(d, period - d) <= ANGLE_SLACK


def predict_family(point: ParameterPoint, spectrum) -> FamilyFlags:
    """Family expected from the angles and the character of the eigenvalues alone.

    Rules: coincident axes give a diagonal matrix; real eigenvalues give a
    Hermitian one; equal azimuths give a symmetric matrix with real
    eigenvectors; pure-imaginary eigenvalues give an anti-Hermitian one, which
    is imaginary-symmetric when the azimuths also agree.
    """
    lam = np.asarray(_as_spectrum(spectrum))
    c, b = point.c_axis, point.b_axis
    same_theta = _angle_equal(c.theta, b.theta, 2 * math.pi)
    same_phi = _angle_equal(c.phi, b.phi, 2 * math.pi)
    # a pole fixes the direction whatever the azimuth says
    at_pole = same_theta and (c.theta <= ANGLE_SLACK or math.pi - c.theta <= ANGLE_SLACK)
    diagonal = same_theta and (same_phi or at_pole)
    real = bool(np.all(lam.imag == 0))
    imaginary = bool(np.all(lam.real == 0))
    # a scalar spectrum yields lambda * I at any angles
    scalar = bool(np.all(lam == lam[0]))
    diagonal = diagonal or scalar
    symmetric = same_phi or diagonal
    return FamilyFlags(
        diagonal=diagonal,
        hermitian=real,
        anti_hermitian=imaginary,
        symmetric=symmetric,
        imaginary_symmetric=imaginary and symmetric,
        real_eigenvectors=same_phi,
    )
