"""Spin-2 eigenbasis and the probability amplitudes built from it.

Index convention, fixed throughout the package: position ``k`` (1-based) of
every 5-vector, and of either axis of an amplitude table, carries the spin
projection ``m = 3 - k``, i.e. positions 1..5 hold m = 2, 1, 0, -1, -2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "M_VALUES",
    "Direction",
    "ParameterPoint",
    "AmplitudeTable",
    "chi",
    "chi_basis",
    "spin_operator",
    "amplitude_table",
    "xi",
    "xi_matrix",
    "xi_matrix_batch",
    "closed_form_amplitude",
]

M_VALUES = (2, 1, 0, -1, -2)
TWO_PI = 2.0 * math.pi
SQRT6 = math.sqrt(6.0)


def _normalize_angles(theta: float, phi: float) -> tuple[float, float]:
    theta = math.fmod(float(theta), TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    phi = float(phi)
    if theta > math.pi:
        # (theta, phi) and (2pi - theta, phi + pi) name the same unit vector
        theta = TWO_PI - theta
        phi += math.pi
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    if phi >= TWO_PI:
        phi = 0.0
    return theta, phi


@dataclass(frozen=True)
class Direction:
    """A point on the unit sphere, stored as polar angle ``theta`` and azimuth ``phi``.

    Angles are reduced on construction to ``theta`` in [0, pi] and ``phi`` in
    [0, 2 pi) using the usual spherical-coordinate identities.
    """

    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError(f"non-finite direction angles ({self.theta}, {self.phi})")
        theta, phi = _normalize_angles(self.theta, self.phi)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )


@dataclass(frozen=True)
class ParameterPoint:
    """The four generating angles: ``c_axis`` = (theta, phi), ``b_axis`` = (theta', phi')."""

    c_axis: Direction
    b_axis: Direction

    @classmethod
    def from_angles(cls, theta, phi, theta_p, phi_p) -> "ParameterPoint":
        return cls(Direction(theta, phi), Direction(theta_p, phi_p))

    @property
    def angles(self) -> tuple[float, float, float, float]:
        return (self.c_axis.theta, self.c_axis.phi, self.b_axis.theta, self.b_axis.phi)

    def with_angle(self, name: str, value: float) -> "ParameterPoint":
        """Return a copy with one named angle (theta, phi, theta_p, phi_p) replaced."""
        angles = dict(zip(ANGLE_NAMES, self.angles))
        if name not in angles:
            raise ValueError(f"unknown angle {name!r}; expected one of {ANGLE_NAMES}")
        angles[name] = value
        return ParameterPoint.from_angles(*(angles[n] for n in ANGLE_NAMES))


ANGLE_NAMES = ("theta", "phi", "theta_p", "phi_p")


@dataclass(frozen=True, eq=False)
class AmplitudeTable:
    """``entries[i-1, j-1]`` holds phi(B_i; C_j) evaluated at ``point``."""

    entries: np.ndarray
    point: ParameterPoint

    def entry(self, i: int, j: int) -> complex:
        _check_index(i)
        _check_index(j)
        return complex(self.entries[i - 1, j - 1])


def _check_index(i) -> None:
    if not isinstance(i, (int, np.integer)) or not 1 <= i <= 5:
        raise ValueError(f"index must be an integer in 1..5, got {i!r}")


def chi_basis(theta, phi) -> np.ndarray:
    """Closed-form spin-2 eigenvectors along (theta, phi), as matrix columns.

    Broadcasts over array-valued angles. The result has shape ``(..., 5, 5)``;
    column ``k`` is the eigenvector for m = ``M_VALUES[k]``.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    st = np.sin(theta)
    ct = np.cos(theta)
    c2, s2 = c * c, s * s
    e1 = np.exp(1j * phi)
    e2 = e1 * e1
    em1 = e1.conj()
    em2 = e2.conj()

    # columns are the five vectors exactly as printed; rows are positions 1..5
    cols = [
        [c2 * c2 * em2, st * c2 * em1, SQRT6 / 4 * st**2 + 0j, st * s2 * e1, s2 * s2 * e2],
        [
            st * c2 * em2,
            (3 * s2 - c2) * c2 * em1,
            -SQRT6 / 2 * st * ct + 0j,
            -(3 * c2 - s2) * s2 * e1,
            -st * s2 * e2,
        ],
        [
            SQRT6 / 4 * st**2 * em2,
            -SQRT6 / 2 * st * ct * em1,
            0.5 * (2 * ct**2 - st**2) + 0j,
            SQRT6 / 2 * st * ct * e1,
            SQRT6 / 4 * st**2 * e2,
        ],
        [
            st * s2 * em2,
            -(3 * c2 - s2) * s2 * em1,
            SQRT6 / 2 * st * ct + 0j,
            (3 * s2 - c2) * c2 * e1,
            -st * c2 * e2,
        ],
        [s2 * s2 * em2, -st * s2 * em1, SQRT6 / 4 * st**2 + 0j, -st * c2 * e1, c2 * c2 * e2],
    ]
    shape = np.broadcast(theta, phi).shape
    out = np.empty(shape + (5, 5), dtype=complex)
    for k, col in enumerate(cols):
        for row, value in enumerate(col):
            out[..., row, k] = value
    return out


def chi(m: int, direction: Direction) -> np.ndarray:
    """Normalized eigenvector of the spin-2 operator along ``direction`` for projection ``m``."""
    if m not in M_VALUES:
        raise ValueError(f"spin projection must be one of {M_VALUES}, got {m!r}")
    return chi_basis(direction.theta, direction.phi)[:, M_VALUES.index(m)]


def spin_operator(direction: Direction) -> np.ndarray:
    """The 5x5 spin-2 operator along ``direction``.

    Row 3, column 4 is taken as the conjugate of row 4, column 3 so that the
    matrix is Hermitian; with that choice its eigenvectors are ``chi``.
    """
    st = math.sin(direction.theta)
    ct = math.cos(direction.theta)
    a = st * np.exp(-1j * direction.phi)
    b = SQRT6 / 2 * a
    op = np.zeros((5, 5), dtype=complex)
    op[np.diag_indices(5)] = [2 * ct, ct, 0.0, -ct, -2 * ct]
    op[0, 1] = op[3, 4] = a
    op[1, 2] = op[2, 3] = b
    op[1, 0] = op[4, 3] = np.conj(a)
    op[2, 1] = op[3, 2] = np.conj(b)
    return op


def amplitude_table(point: ParameterPoint) -> AmplitudeTable:
    """All 25 amplitudes phi(B_i; C_j) = chi_c(m_j)^dagger chi_b(m_i)."""
    cb = chi_basis(point.c_axis.theta, point.c_axis.phi)
    bb = chi_basis(point.b_axis.theta, point.b_axis.phi)
    entries = bb.T @ cb.conj()
    entries.setflags(write=False)
    return AmplitudeTable(entries, point)


def xi(i: int, j: int, point: ParameterPoint) -> complex:
    """xi(C_i, B_j) = conj(phi(B_j; C_i)): component ``j`` of eigenvector ``i``."""
    _check_index(i)
    _check_index(j)
    return complex(np.conj(amplitude_table(point).entries[j - 1, i - 1]))


def xi_matrix(point: ParameterPoint) -> np.ndarray:
    """Matrix whose column ``i-1`` is the eigenvector xi_i, i.e. ``X[k-1, i-1] = xi(i, k)``."""
    cb = chi_basis(point.c_axis.theta, point.c_axis.phi)
    bb = chi_basis(point.b_axis.theta, point.b_axis.phi)
    return bb.conj().T @ cb


def xi_matrix_batch(angles) -> np.ndarray:
    """Vectorized ``xi_matrix`` over raw angle arrays of shape ``(..., 4)``.

    No angle normalization is applied; the closed forms are periodic so the
    result is the same eigenbasis up to column phases.
    """
    angles = np.asarray(angles, dtype=float)
    cb = chi_basis(angles[..., 0], angles[..., 1])
    bb = chi_basis(angles[..., 2], angles[..., 3])
    return np.swapaxes(bb.conj(), -1, -2) @ cb


def closed_form_amplitude(which, point: ParameterPoint, printed: bool = False) -> complex:
    """Expanded trigonometric forms of phi(B_1;C_1), phi(B_1;C_2) and phi(B_5;C_5).

    Used only as an independent check on ``amplitude_table``. For (5, 5),
    ``printed=True`` evaluates a variant with cos^4 cos^4 on the
    e^{+2i(phi-phi')} term, which does not match the table; the default uses
    sin^4 sin^4, which is what the inner product gives.
    """
    which = tuple(which)
    if which not in ((1, 1), (1, 2), (5, 5)):
        raise ValueError(f"no closed form available for amplitude {which}")
    t, p = point.c_axis.theta, point.c_axis.phi
    tp, pp = point.b_axis.theta, point.b_axis.phi
    c, s = math.cos(t / 2), math.sin(t / 2)
    cp, sp = math.cos(tp / 2), math.sin(tp / 2)
    st, ct, stp = math.sin(t), math.cos(t), math.sin(tp)
    e1 = complex(math.cos(p - pp), math.sin(p - pp))
    e2 = e1 * e1

    if which == (1, 1):
        return (
            c**4 * cp**4 * e2
            + stp * st * cp**2 * c**2 * e1
            + 3 / 8 * stp**2 * st**2
            + stp * st * sp**2 * s**2 / e1
            + s**4 * sp**4 / e2
        )
    if which == (1, 2):
        return (
            st * cp**4 * c**2 * e2
            + (3 * s**2 - c**2) * stp * cp**2 * c**2 * e1
            - 3 / 4 * stp**2 * st * ct
            - (3 * c**2 - s**2) * stp * sp**2 * s**2 / e1
            - st * sp**4 * s**2 / e2
        )
    first = c**4 * cp**4 if printed else s**4 * sp**4
    return (
        first * e2
        + stp * st * sp**2 * s**2 * e1
        + 3 / 8 * stp**2 * st**2
        + stp * st * cp**2 * c**2 / e1
        + c**4 * cp**4 / e2
    )
