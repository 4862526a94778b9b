"""Independent eigendecomposition for small dense complex matrices.

Nothing here touches the amplitude machinery: eigenvalues come from the
characteristic polynomial (Faddeev-LeVerrier coefficients, Aberth-Ehrlich
roots), are polished with a two-sided Rayleigh quotient, and vectors are
taken from the null space of ``M - lambda I``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from spinmat.generator import EigenPair

__all__ = [
    "OracleFailure",
    "SpectrumMismatch",
    "SpectrumMatch",
    "charpoly",
    "polynomial_roots",
    "eig5",
    "match_spectra",
]


class OracleFailure(ArithmeticError):
    """Raised when no eigenpair set meets the residual bound."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class SpectrumMismatch(ValueError):
    def __init__(self, message, match: "SpectrumMatch"):
        super().__init__(message)
        self.match = match


@dataclass(frozen=True)
class SpectrumMatch:
    """``permutation[k]`` is the reference index assigned to found pair ``k``."""

    permutation: tuple
    max_value_error: float
    max_vector_angle_error: float


def charpoly(M) -> np.ndarray:
    """Monic characteristic polynomial coefficients, highest degree first."""
    A = np.asarray(M, dtype=complex)
    n = A.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    Mk = np.zeros_like(A)
    eye = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(A @ Mk) / k
    return coeffs


def polynomial_roots(coeffs, maxiter: int = 500, tol: float = 1e-15) -> np.ndarray:
    """All roots of a polynomial by simultaneous Aberth-Ehrlich iteration."""
    coeffs = np.asarray(coeffs, dtype=complex)
    coeffs = coeffs / coeffs[0]
    n = len(coeffs) - 1
    deriv = coeffs[:-1] * np.arange(n, 0, -1)
    # Fujiwara bound on root moduli
    radius = 2 * max(abs(coeffs[k]) ** (1.0 / k) for k in range(1, n + 1)) or 1.0
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for _ in range(maxiter):
        p = np.polyval(coeffs, z)
        dp = np.polyval(deriv, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            repulsion = np.sum(1.0 / diff, axis=1)
            step = ratio / (1.0 - ratio * repulsion)
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
            break
    return z


def _null_vectors(A: np.ndarray, k: int):
    u, _, vh = np.linalg.svd(A)
    return vh[-k:].conj().T, u[:, -k:]


def _group(values: np.ndarray, radius: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for idx in np.argsort(values.real):
        for g in groups:
            if any(abs(values[idx] - values[j]) <= radius for j in g):
                g.append(int(idx))
                break
        else:
            groups.append([int(idx)])
    return groups


def eig5(M, tol: float = 1e-8, cluster: float = 1e-6) -> list:
    """Eigenpairs of a small dense complex matrix.

    Every returned pair satisfies ``|M v - lambda v| < tol * max|M_ij|``;
    otherwise ``OracleFailure`` is raised carrying the residuals. Roots closer
    than ``cluster`` (relative) are treated as one repeated eigenvalue and get
    an orthonormal basis of the corresponding null space.
    """
    A = np.asarray(M, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    n = A.shape[0]
    scale = float(np.max(np.abs(A)))
    if scale == 0.0:
        return [EigenPair(0j, np.eye(n, dtype=complex)[:, k]) for k in range(n)]

    B = A / scale
    roots = polynomial_roots(charpoly(B))
    pairs = []
    for group in _group(roots, cluster):
        mult = len(group)
        lam = complex(np.mean(roots[group]))
        for _ in range(4):
            V, U = _null_vectors(B - lam * np.eye(n), mult)
            if mult > 1:
                break
            v, u = V[:, 0], U[:, 0]
            denom = np.vdot(u, v)
            if abs(denom) < 1e-14:
                break
            lam = complex(np.vdot(u, B @ v) / denom)
        V, _ = _null_vectors(B - lam * np.eye(n), mult)
        for k in range(mult):
            v = V[:, k]
            value = lam if mult == 1 else complex(np.vdot(v, B @ v))
            pairs.append(EigenPair(value * scale, v / np.linalg.norm(v)))

    residuals = [float(np.linalg.norm(A @ p.vector - p.value * p.vector)) for p in pairs]
    if max(residuals) >= tol * scale:
        raise OracleFailure(
            f"eigenpair residual {max(residuals):.3e} exceeds {tol * scale:.3e}", residuals
        )
    return pairs


def _phase_distance(v: np.ndarray, w: np.ndarray) -> float:
    overlap = np.vdot(w, v)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(v - phase * w))


def match_spectra(
    found: Sequence,
    reference_values,
    reference_vectors: Optional[Sequence] = None,
    tol: float = 1e-6,
) -> SpectrumMatch:
    """Pair ``found`` eigenpairs with reference eigenvalues (and optionally vectors).

    All 5! assignments are tried; the one with the smallest maximum eigenvalue
    error wins, ties broken by vector error. Vectors are compared after the
    best unit-phase alignment. Raises ``SpectrumMismatch`` when the winning
    assignment exceeds ``tol`` on either measure.
    """
    values = np.array([complex(getattr(f, "value", f)) for f in found])
    ref = np.array([complex(r) for r in reference_values])
    if len(values) != len(ref):
        raise ValueError("found and reference spectra differ in length")
    vecs = None
    if reference_vectors is not None:
        vecs = [np.asarray(getattr(r, "vector", r), dtype=complex) for r in reference_vectors]

    best = None
    for perm in itertools.permutations(range(len(ref))):
        value_err = float(np.max(np.abs(values - ref[list(perm)])))
        if best is not None and value_err > best[0]:
            continue
        vec_err = 0.0
        if vecs is not None:
            vec_err = max(
                _phase_distance(np.asarray(f.vector), vecs[p]) for f, p in zip(found, perm)
            )
        key = (value_err, vec_err)
        if best is None or key < best[:2]:
            best = (value_err, vec_err, perm)

    match = SpectrumMatch(tuple(best[2]), best[0], best[1])
    if match.max_value_error > tol or match.max_vector_angle_error > tol:
        raise SpectrumMismatch(
            f"best assignment has value error {match.max_value_error:.3e} and "
            f"vector error {match.max_vector_angle_error:.3e} (tol {tol:.1e})",
            match,
        )
    return match
