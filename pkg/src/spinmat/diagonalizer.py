"""Recover the generating angles of a matrix and read off its eigen-data.

For a trial point x the eigenvectors xi_i(x) are fixed analytically, so each
row r of M xi_i = lambda_i xi_i yields its own estimate of lambda_i. The rows
only agree when x is (equivalent to) the generating point; the cross-multiplied
sum of their pairwise differences, S(x), is driven to zero to find it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import least_squares, minimize

from spinmat.amplitudes import ANGLE_NAMES, ParameterPoint, xi_matrix, xi_matrix_batch
from spinmat.generator import EigenPair

__all__ = [
    "ResidualReport",
    "RecoveryResult",
    "ConsistencyReport",
    "RecoveryError",
    "NoRootInBracket",
    "SpuriousRoot",
    "RecoveryFailed",
    "IndeterminateEigenvalue",
    "row_eigenvalue",
    "row_eigenvalue_table",
    "residual",
    "quotient_residual",
    "residual_terms",
    "residual_sum",
    "strict_residual",
    "recover_spectrum",
    "verify_recovery",
    "bisect_recover",
    "multistart_recover",
]

DENOM_THRESHOLD = 1e-10
ANGLE_RANGES = {
    "theta": (0.0, math.pi),
    "phi": (0.0, 2 * math.pi),
    "theta_p": (0.0, math.pi),
    "phi_p": (0.0, 2 * math.pi),
}
_UPPER = np.triu(np.ones((5, 5), dtype=bool), 1)


class RecoveryError(RuntimeError):
    """Base for failed recoveries; ``diagnostics`` holds whatever was learned."""

    def __init__(self, message, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoRootInBracket(RecoveryError):
    pass


class SpuriousRoot(RecoveryError):
    pass


class RecoveryFailed(RecoveryError):
    pass


class IndeterminateEigenvalue(RecoveryError):
    pass


@dataclass(frozen=True)
class ResidualReport:
    value: complex
    point: ParameterPoint
    skipped_rows: tuple = ()


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    """Eigen-data read off at ``point``.

    ``consistency[i-1, r-1]`` is the estimate of lambda_i from row r, NaN where
    that row was skipped.
    """

    point: ParameterPoint
    pairs: list
    consistency: np.ndarray
    max_spread: float
    skipped_rows: tuple = ()

    @property
    def spectrum(self) -> tuple:
        return tuple(p.value for p in self.pairs)


@dataclass(frozen=True, eq=False)
class ConsistencyReport:
    passed: bool
    max_spread: float
    max_eigen_residual: float
    tol: float
    result: Optional[RecoveryResult] = None
    reason: str = ""

    def __bool__(self):
        return self.passed


def _matrix(M) -> np.ndarray:
    A = np.asarray(getattr(M, "entries", M), dtype=complex)
    if A.shape != (5, 5):
        raise ValueError(f"expected a 5x5 matrix, got shape {A.shape}")
    return A


def _scale(A: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(A))))


def _skip_mask(X: np.ndarray, threshold: float) -> np.ndarray:
    # mask[i, r]: component r of eigenvector i is too small to divide by
    mags = np.abs(X).T
    return mags < threshold * np.max(mags, axis=1, keepdims=True)


def row_eigenvalue_table(M, point: ParameterPoint, threshold: float = DENOM_THRESHOLD):
    """All 25 per-row estimates (lambda_i)_r and the list of skipped (i, r) pairs."""
    A = _matrix(M)
    X = xi_matrix(point)
    Y = A @ X
    skip = _skip_mask(X, threshold)
    with np.errstate(divide="ignore", invalid="ignore"):
        table = (Y / X).T
    table[skip] = np.nan
    skipped = tuple((int(i) + 1, int(r) + 1) for i, r in zip(*np.nonzero(skip)))
    return table, skipped


def row_eigenvalue(
    M, i: int, r: int, point: ParameterPoint, threshold: float = DENOM_THRESHOLD
) -> Optional[complex]:
    """Estimate of lambda_i from row ``r``: sum_l M_rl xi(C_i,B_l) / xi(C_i,B_r).

    Returns None when the denominator is below ``threshold`` relative to the
    largest component of xi_i.
    """
    for k in (i, r):
        if not isinstance(k, (int, np.integer)) or not 1 <= k <= 5:
            raise ValueError(f"indices must be integers in 1..5, got {k!r}")
    table, _ = row_eigenvalue_table(M, point, threshold)
    value = table[i - 1, r - 1]
    return None if np.isnan(value) else complex(value)


def _brackets(A: np.ndarray, X: np.ndarray) -> np.ndarray:
    # B[..., i, r, s] = xi_s (M xi)_r - xi_r (M xi)_s for eigenvector i
    Y = A @ X
    Xt = np.swapaxes(X, -1, -2)
    Yt = np.swapaxes(Y, -1, -2)
    outer = Yt[..., :, :, None] * Xt[..., :, None, :]
    return outer - np.swapaxes(outer, -1, -2)


def residual_terms(A: np.ndarray, angles) -> np.ndarray:
    """Per-eigenvalue parts S_i of the cross-multiplied residual, shape ``(..., 5)``.

    Raw angle arrays of shape ``(..., 4)`` are accepted without normalization.
    """
    X = xi_matrix_batch(angles)
    return np.sum(_brackets(A, X)[..., _UPPER], axis=-1)


def residual_sum(A: np.ndarray, angles) -> np.ndarray:
    """Cross-multiplied residual S = sum_i S_i for raw angle arrays of shape ``(..., 4)``.

    Note the sum over i only sees the eigenvector matrix X through X X^T,
    which does not depend on theta; S alone cannot locate theta.
    """
    return np.sum(residual_terms(A, angles), axis=-1)


def strict_residual(A: np.ndarray, angles) -> np.ndarray:
    """Sum of squared moduli of the individual brackets of S, without cancellation.

    By Lagrange's identity this equals sum_i |M xi_i - (xi_i^H M xi_i) xi_i|^2,
    so it vanishes exactly where every xi_i is an eigenvector of M.
    """
    X = xi_matrix_batch(angles)
    Y = A @ X
    rq = np.sum(X.conj() * Y, axis=-2, keepdims=True)
    return np.sum(np.abs(Y - X * rq) ** 2, axis=(-1, -2))


def residual(M, point: ParameterPoint) -> ResidualReport:
    """S(x) = sum_i sum_{r<s} [xi_is (M xi_i)_r - xi_ir (M xi_i)_s] at ``point``."""
    A = _matrix(M)
    S = np.sum(_brackets(A, xi_matrix(point))[:, _UPPER])
    return ResidualReport(complex(S), point)


def quotient_residual(M, point: ParameterPoint, threshold: float = DENOM_THRESHOLD):
    """The undivided-out form: sum of pairwise differences of per-row estimates.

    Rows whose denominator falls below ``threshold`` are left out and listed
    in ``skipped_rows``.
    """
    table, skipped = row_eigenvalue_table(M, point, threshold)
    total = 0j
    for row in table:
        valid = row[~np.isnan(row)]
        for r in range(len(valid) - 1):
            total += np.sum(valid[r] - valid[r + 1 :])
    return ResidualReport(complex(total), point, skipped)


def recover_spectrum(M, point: ParameterPoint, threshold: float = DENOM_THRESHOLD) -> RecoveryResult:
    """Eigenvalues as the mean of the valid per-row estimates, eigenvectors from ``point``."""
    table, skipped = row_eigenvalue_table(M, point, threshold)
    X = xi_matrix(point)
    pairs = []
    spread = 0.0
    for i, row in enumerate(table):
        valid = row[~np.isnan(row)]
        if valid.size == 0:
            raise IndeterminateEigenvalue(
                f"every row was skipped for eigenvalue {i + 1}", {"point": point.angles}
            )
        if valid.size > 1:
            spread = max(spread, float(np.max(np.abs(valid[:, None] - valid[None, :]))))
        pairs.append(EigenPair(complex(np.mean(valid)), X[:, i].copy()))
    return RecoveryResult(point, pairs, table, spread, skipped)


def verify_recovery(
    M, point: ParameterPoint, tol: float = 1e-8, threshold: float = DENOM_THRESHOLD
) -> ConsistencyReport:
    """Put ``point`` back into the eigen-equation and check it is not spurious.

    Passes when, for every eigenvalue, the per-row estimates agree to within
    ``tol * max(1, max|M_ij|)`` and |M xi_i - lambda_i xi_i| is below the same bound.
    """
    A = _matrix(M)
    bound = tol * _scale(A)
    try:
        result = recover_spectrum(A, point, threshold)
    except IndeterminateEigenvalue as exc:
        return ConsistencyReport(False, math.inf, math.inf, tol, None, str(exc))
    eig_res = max(float(np.linalg.norm(A @ p.vector - p.value * p.vector)) for p in result.pairs)
    passed = result.max_spread <= bound and eig_res < bound
    reason = "" if passed else (
        f"row spread {result.max_spread:.3e}, eigen-residual {eig_res:.3e}, bound {bound:.3e}"
    )
    return ConsistencyReport(passed, result.max_spread, eig_res, tol, result, reason)


@dataclass
class _Candidate:
    lo: float
    hi: float
    term: Optional[int]  # None: the sample itself is a root; 0 = S, 1..5 = S_i
    part: str = "re"
    priority: float = field(default=0.0)


def _bisect(g, lo: float, hi: float, tol: float) -> float:
    glo = g(lo)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        gmid = g(mid)
        if gmid == 0.0:
            return mid
        if (gmid > 0) == (glo > 0):
            lo, glo = mid, gmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_recover(
    M,
    point: ParameterPoint,
    free: str,
    bracket=None,
    tol: float = 1e-12,
    samples: int = 64,
    root_tol: float = 1e-9,
    verify_tol: float = 1e-8,
    threshold: float = DENOM_THRESHOLD,
) -> ParameterPoint:
    """Solve the residual equation for one angle with the other three held at ``point``.

    The bracket is scanned at ``samples`` uniform points for sign changes in
    the real and imaginary parts of S and of each per-eigenvalue part S_i
    (S by itself is blind to theta). Every sign-change interval is bisected,
    most promising first, and a zero is accepted when
    |S| < root_tol * max(1, max|M_ij|) and ``verify_recovery`` passes.

    Raises ``NoRootInBracket`` when no candidate drives the residual to zero
    and ``SpuriousRoot`` when the zeros found all fail verification.
    """
    A = _matrix(M)
    if free not in ANGLE_RANGES:
        raise ValueError(f"free must be one of {ANGLE_NAMES}, got {free!r}")
    lo, hi = ANGLE_RANGES[free] if bracket is None else map(float, bracket)
    if not lo < hi:
        raise ValueError(f"empty bracket [{lo}, {hi}]")
    k = ANGLE_NAMES.index(free)
    base = np.array(point.angles)
    scale = _scale(A)
    bound = root_tol * scale

    def at(t):
        x = base.copy()
        x[k] = t
        return x

    def terms(t):
        parts = residual_terms(A, at(t))
        return np.concatenate([[parts.sum()], parts])

    grid = base[None, :].repeat(samples, axis=0)
    ts = np.linspace(lo, hi, samples)
    grid[:, k] = ts
    parts = residual_terms(A, grid)
    vals = np.concatenate([parts.sum(axis=1, keepdims=True), parts], axis=1)
    strict = strict_residual(A, grid) / scale**2

    candidates = [
        _Candidate(t, t, None, priority=float(q))
        for t, v, q in zip(ts, vals[:, 0], strict)
        if abs(v) <= bound and q <= root_tol
    ]
    for term in range(vals.shape[1]):
        for part, comp in (("re", vals[:, term].real), ("im", vals[:, term].imag)):
            a, b = comp[:-1], comp[1:]
            crossing = (a * b < 0) | ((a == 0) != (b == 0))
            for j in np.nonzero(crossing)[0]:
                priority = float(min(strict[j], strict[j + 1]))
                candidates.append(_Candidate(ts[j], ts[j + 1], term, part, priority))
    candidates.sort(key=lambda c: c.priority)

    def is_zero(t):
        s = complex(residual_sum(A, at(t)))
        return abs(s) <= bound and float(strict_residual(A, at(t))) / scale**2 <= root_tol, s

    spurious = []
    tried = set()
    for cand in candidates:
        if cand.term is None:
            widths = [0.0]
        else:
            # a coarse tol may leave the angle too rough to verify; retry at full resolution
            widths = [tol, 0.0] if tol > 0 else [0.0]
        for width in widths:
            if cand.term is None:
                t0 = cand.lo
            else:
                pick = np.real if cand.part == "re" else np.imag
                t0 = _bisect(lambda t: float(pick(terms(t)[cand.term])), cand.lo, cand.hi, width)
            if t0 in tried:
                break
            tried.add(t0)
            ok, s0 = is_zero(t0)
            if not ok:
                continue
            found = point.with_angle(free, t0)
            report = verify_recovery(A, found, verify_tol, threshold)
            if report.passed:
                return found
            if width == 0.0:
                spurious.append({"angle": t0, "residual": abs(s0), "reason": report.reason})

    diagnostics = {
        "free": free,
        "bracket": [lo, hi],
        "sign_changes": sum(c.term is not None for c in candidates),
        "min_abs_residual": float(np.min(np.abs(vals[:, 0]))),
        "spurious": spurious,
    }
    if spurious:
        raise SpuriousRoot(f"all {len(spurious)} zeros in bracket failed verification", diagnostics)
    raise NoRootInBracket(f"no zero of the residual found for {free} in [{lo}, {hi}]", diagnostics)


def _grid(density: int) -> np.ndarray:
    theta = np.linspace(0.0, math.pi, density)
    phi = np.linspace(0.0, 2 * math.pi, density, endpoint=False)
    mesh = np.meshgrid(theta, phi, theta, phi, indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, 4)


def _split_residual(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    X = xi_matrix_batch(x)
    Y = A @ X
    rq = np.sum(X.conj() * Y, axis=0, keepdims=True)
    r = (Y - X * rq).ravel()
    return np.concatenate([r.real, r.imag])


def multistart_recover(
    M,
    grid_density: int = 12,
    refine_tol: float = 1e-8,
    max_starts: int = 16,
    maxiter: int = 500,
    verify_tol: float = 1e-8,
    threshold: float = DENOM_THRESHOLD,
) -> ParameterPoint:
    """Search all four angles at once: coarse grid, then simplex refinement.

    The grid is ranked by the strict (cancellation-free) residual; the best
    ``max_starts`` cells seed a Nelder-Mead descent of at most ``maxiter``
    iterations, followed by a least-squares polish. The first refined point
    with sqrt(strict residual) / max(1, max|M_ij|) < ``refine_tol`` that also
    passes ``verify_recovery`` is returned; otherwise ``RecoveryFailed``.
    """
    if grid_density < 2:
        raise ValueError("grid_density must be at least 2")
    A = _matrix(M)
    scale = _scale(A)
    pts = _grid(grid_density)
    objective = np.concatenate(
        [strict_residual(A, chunk) for chunk in np.array_split(pts, max(1, len(pts) // 4096))]
    ) / scale**2
    order = np.argsort(objective, kind="stable")[:max_starts]
    step = math.pi / (grid_density - 1)

    def f(x):
        return float(strict_residual(A, x)) / scale**2

    best = None
    for idx in order:
        x0 = pts[idx]
        simplex = np.vstack([x0, x0 + 0.5 * step * np.eye(4)])
        res = minimize(
            f,
            x0,
            method="Nelder-Mead",
            options={"maxiter": maxiter, "initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-30},
        )
        x = res.x
        if math.sqrt(max(res.fun, 0.0)) >= refine_tol:
            polished = least_squares(
                lambda y: _split_residual(A, y) / scale,
                x,
                method="lm",
                xtol=1e-15,
                ftol=1e-15,
                gtol=1e-15,
            )
            if f(polished.x) < res.fun:
                x = polished.x
        value = math.sqrt(max(f(x), 0.0))
        if best is None or value < best[0]:
            best = (value, x)
        if value >= refine_tol:
            continue
        found = ParameterPoint.from_angles(*x)
        if verify_recovery(A, found, verify_tol, threshold).passed:
            return found

    value, x = best
    point = ParameterPoint.from_angles(*x)
    raise RecoveryFailed(
        "no refined candidate passed verification",
        {
            "best_point": list(point.angles),
            "best_strict_residual": value,
            "best_abs_residual": abs(residual(A, point).value),
            "starts": int(len(order)),
        },
    )
