"""Seeded random draws of parameter points and spectra."""

from __future__ import annotations

import math

import numpy as np

from spinmat.amplitudes import Direction, ParameterPoint
from spinmat.generator import Spectrum

SPECTRUM_KINDS = ("complex", "real", "imaginary")


def rng_for(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_direction(rng: np.random.Generator) -> Direction:
    return Direction(rng.uniform(0.0, math.pi), rng.uniform(0.0, 2 * math.pi))


def random_point(rng: np.random.Generator, equal_phi: bool = False) -> ParameterPoint:
    c = random_direction(rng)
    b = random_direction(rng)
    if equal_phi:
        b = Direction(b.theta, c.phi)
    return ParameterPoint(c, b)


def random_spectrum(rng: np.random.Generator, kind: str = "complex", bound: float = 10.0) -> Spectrum:
    """Five eigenvalues with modulus at most ``bound``.

    ``complex`` draws uniformly from the disc, ``real`` and ``imaginary``
    uniformly from the corresponding segment.
    """
    if kind == "real":
        return Spectrum(tuple(rng.uniform(-bound, bound, 5)))
    if kind == "imaginary":
        return Spectrum(tuple(1j * rng.uniform(-bound, bound, 5)))
    if kind == "complex":
        radius = bound * np.sqrt(rng.uniform(0.0, 1.0, 5))
        angle = rng.uniform(0.0, 2 * math.pi, 5)
        return Spectrum(tuple(radius * np.exp(1j * angle)))
    raise ValueError(f"unknown spectrum kind {kind!r}; expected one of {SPECTRUM_KINDS}")
