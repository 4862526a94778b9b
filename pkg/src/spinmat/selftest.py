"""Seeded property checks over random instances, reported one line per invariant."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from spinmat import diagonalizer as dz
from spinmat.amplitudes import (
    Direction,
    ParameterPoint,
    amplitude_table,
    chi,
    closed_form_amplitude,
    M_VALUES,
    spin_operator,
    xi_matrix,
)
from spinmat.generator import Spectrum, classify, eigenvectors, generate, predict_family
from spinmat.oracle import SpectrumMismatch, eig5, match_spectra
from spinmat.sampling import random_direction, random_point, random_spectrum, rng_for

DEFAULT_TOLERANCES = {
    "unitarity": 1e-12,
    "identity": 1e-12,
    "hermiticity": 0.0,
    "spin_eigen": 1e-10,
    "interdependence": 1e-12,
    "closed_form": 1e-12,
    "eigen": 1e-10,
    "spectral": 1e-8,
    "vectors": 1e-6,
    "classify": 1e-10,
    "commute": 1e-9,
    "linearity": 1e-12,
    "spin_reproduction": 1e-12,
    "root": 1e-9,
    "quotient": 1e-9,
    "verify": 1e-8,
    "bisect": 1e-12,
    "recovery": 1e-6,
}


@dataclass
class Check:
    name: str
    passed: bool
    worst: float
    tol: float
    trials: int

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "worst": self.worst if math.isfinite(self.worst) else None,
            "tol": self.tol,
            "trials": self.trials,
        }


def _max_err(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _unitarity(rng, n):
    worst = 0.0
    for _ in range(n):
        T = amplitude_table(random_point(rng)).entries
        worst = max(worst, _max_err(T.T @ T.conj(), np.eye(5)))
    return worst


def _identity(rng, n):
    worst = 0.0
    for _ in range(n):
        d = random_direction(rng)
        worst = max(worst, _max_err(amplitude_table(ParameterPoint(d, d)).entries, np.eye(5)))
    return worst


def _hermiticity(rng, n):
    worst = 0.0
    for _ in range(n):
        S = spin_operator(random_direction(rng))
        worst = max(worst, _max_err(S, S.conj().T))
    return worst


def _spin_eigen(rng, n):
    worst = 0.0
    for _ in range(n):
        d = random_direction(rng)
        S = spin_operator(d)
        for m in M_VALUES:
            v = chi(m, d)
            worst = max(worst, float(np.linalg.norm(S @ v - m * v)))
    return worst


def _interdependence(rng, n):
    # phi(B_i;C_j) = sum_l phi(B_i;D_l) phi(D_l;C_j): completeness of the d-basis
    worst = 0.0
    for _ in range(n):
        b, c, d = (random_direction(rng) for _ in range(3))
        bc = amplitude_table(ParameterPoint(c, b)).entries
        bd = amplitude_table(ParameterPoint(d, b)).entries
        dc = amplitude_table(ParameterPoint(c, d)).entries
        worst = max(worst, _max_err(bc, bd @ dc))
    return worst


def _closed_form(rng, n):
    worst = 0.0
    for _ in range(n):
        p = random_point(rng)
        T = amplitude_table(p)
        for which in ((1, 1), (1, 2), (5, 5)):
            worst = max(worst, abs(closed_form_amplitude(which, p) - T.entry(*which)))
    return worst


def _eigen(rng, n):
    worst = 0.0
    for _ in range(n):
        p, lam = random_point(rng), random_spectrum(rng)
        M = generate(p, lam).entries
        for value, pair in zip(lam, eigenvectors(p)):
            worst = max(worst, float(np.linalg.norm(M @ pair.vector - value * pair.vector)))
    return worst


def _spectral(rng, n):
    worst = 0.0
    for _ in range(n):
        p, lam = random_point(rng), random_spectrum(rng)
        try:
            match = match_spectra(eig5(generate(p, lam).entries), lam, tol=math.inf)
        except (ArithmeticError, SpectrumMismatch):
            return math.inf
        worst = max(worst, match.max_value_error)
    return worst


def _commute(rng, n):
    worst = 0.0
    for _ in range(n):
        p = random_point(rng)
        A = generate(p, random_spectrum(rng)).entries
        B = generate(p, random_spectrum(rng)).entries
        worst = max(worst, _max_err(A @ B, B @ A))
    return worst


def _linearity(rng, n):
    worst = 0.0
    for _ in range(n):
        p = random_point(rng)
        lam, mu = np.asarray(random_spectrum(rng)), np.asarray(random_spectrum(rng))
        a, b = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        lhs = generate(p, a * lam + b * mu).entries
        rhs = a * generate(p, lam).entries + b * generate(p, mu).entries
        worst = max(worst, _max_err(lhs, rhs))
    return worst


def _spin_reproduction(rng, n):
    # with these chi phases, b-axis (theta'=0, phi'=pi) is the one that
    # returns the spin operator itself; (0, 0) returns it at phi + pi
    worst = 0.0
    spin = Spectrum(M_VALUES)
    for _ in range(n):
        d = random_direction(rng)
        at_pi = generate(ParameterPoint(d, Direction(0.0, math.pi)), spin).entries
        at_zero = generate(ParameterPoint(d, Direction(0.0, 0.0)), spin).entries
        worst = max(
            worst,
            _max_err(at_pi, spin_operator(d)),
            _max_err(at_zero, spin_operator(Direction(d.theta, d.phi + math.pi))),
        )
    return worst


def _family_check(point_kind: str, spectrum_kind: str, flag: str, expect: bool, tol: float):
    def run(rng, n):
        failures = 0
        for _ in range(n):
            if point_kind == "zero":
                p = ParameterPoint.from_angles(0, 0, 0, 0)
            elif point_kind == "same":
                d = random_direction(rng)
                p = ParameterPoint(d, d)
            else:
                p = random_point(rng, equal_phi=point_kind == "equal_phi")
            lam = random_spectrum(rng, spectrum_kind)
            flags = classify(generate(p, lam).entries, tol, vectors=eigenvectors(p))
            if flag == "general":
                ok = flags.general == expect
            else:
                ok = getattr(flags, flag) == expect
            failures += not ok
        return float(failures)

    return run


def _predict_agrees(tol):
    def run(rng, n):
        failures = 0
        for k in range(n):
            p = random_point(rng, equal_phi=k % 2 == 0)
            lam = random_spectrum(rng, ("complex", "real", "imaginary")[k % 3])
            measured = classify(generate(p, lam).entries, tol, vectors=eigenvectors(p))
            failures += measured != predict_family(p, lam)
        return float(failures)

    return run


def _root(rng, n):
    worst = 0.0
    for _ in range(n):
        p, lam = random_point(rng), random_spectrum(rng)
        M = generate(p, lam).entries
        worst = max(worst, abs(dz.residual(M, p).value) / max(1.0, float(np.max(np.abs(M)))))
    return worst


def _quotient(rng, n):
    worst = 0.0
    for _ in range(n):
        p, lam = random_point(rng), random_spectrum(rng)
        M = generate(p, lam).entries
        q = random_point(rng)
        table, skipped = dz.row_eigenvalue_table(M, q)
        if skipped:
            continue
        X = xi_matrix(q)
        rebuilt = sum(
            X[r, i] * X[s, i] * (table[i, r] - table[i, s])
            for i in range(5)
            for r in range(4)
            for s in range(r + 1, 5)
        )
        worst = max(worst, abs(rebuilt - dz.residual(M, q).value))
    return worst


def _bisection(tol_verify, tol_bisect):
    def run(rng, n):
        worst = 0.0
        for _ in range(n):
            p, lam = random_point(rng), random_spectrum(rng)
            M = generate(p, lam).entries
            for free in dz.ANGLE_NAMES:
                try:
                    found = dz.bisect_recover(M, p, free, tol=tol_bisect, verify_tol=tol_verify)
                    pairs = dz.recover_spectrum(M, found).pairs
                    err = match_spectra(pairs, lam, tol=math.inf).max_value_error
                except dz.RecoveryError:
                    return math.inf
                worst = max(worst, err)
        return worst

    return run


def run_selftest(seed: int = 0, trials: int = 100, tolerances=None) -> dict:
    """Run every check on ``trials`` random instances drawn from ``seed``.

    Each check reports the worst observed deviation (for family checks, the
    number of misclassified instances) and passes when it is within its
    tolerance. Family checks always use tolerance 0 failures.
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    checks: list[tuple[str, Callable, float, int]] = [
        ("unitarity", _unitarity, tol["unitarity"], trials),
        ("identity_degeneration", _identity, tol["identity"], trials),
        ("spin_operator_hermitian", _hermiticity, tol["hermiticity"], trials),
        ("spin_eigen_equation", _spin_eigen, tol["spin_eigen"], trials),
        ("interdependence_law", _interdependence, tol["interdependence"], trials),
        ("closed_form_amplitudes", _closed_form, tol["closed_form"], trials),
        ("generated_eigen_equation", _eigen, tol["eigen"], trials),
        ("oracle_spectrum", _spectral, tol["spectral"], trials),
        ("shared_eigenbasis_commute", _commute, tol["commute"], trials),
        ("spectrum_linearity", _linearity, tol["linearity"], trials),
        ("spin_operator_from_polar_b_axis", _spin_reproduction, tol["spin_reproduction"], trials),
    ]
    c = tol["classify"]
    families = [
        ("family_diagonal_all_zero", "zero", "complex", "diagonal", True),
        ("family_diagonal_same_axes", "same", "complex", "diagonal", True),
        ("family_hermitian", "random", "real", "hermitian", True),
        ("family_symmetric", "equal_phi", "complex", "symmetric", True),
        ("family_real_eigenvectors", "equal_phi", "complex", "real_eigenvectors", True),
        ("family_anti_hermitian", "random", "imaginary", "anti_hermitian", True),
        ("family_imaginary_symmetric", "equal_phi", "imaginary", "imaginary_symmetric", True),
        ("family_general", "random", "complex", "general", True),
    ]
    for name, pk, sk, flag, expect in families:
        checks.append((name, _family_check(pk, sk, flag, expect, c), 0.0, trials))
    checks += [
        ("predict_matches_classify", _predict_agrees(c), 0.0, trials),
        ("root_property", _root, tol["root"], trials),
        ("quotient_cross_multiplied_agree", _quotient, tol["quotient"], trials),
        (
            "bisection_round_trip",
            _bisection(tol["verify"], tol["bisect"]),
            tol["recovery"],
            max(1, trials // 10),
        ),
    ]

    results = []
    for index, (name, fn, limit, n) in enumerate(checks):
        rng = rng_for([seed, index])
        worst = float(fn(rng, n))
        results.append(Check(name, worst <= limit, worst, limit, n))
    return {
        "seed": seed,
        "trials": trials,
        "passed": all(r.passed for r in results),
        "checks": [r.as_dict() for r in results],
    }
