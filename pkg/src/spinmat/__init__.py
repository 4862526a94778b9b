"""Spin-2 generated 5x5 matrices with prescribed spectra, and their diagonalization."""

from spinmat.amplitudes import (
    AmplitudeTable,
    Direction,
    ParameterPoint,
    amplitude_table,
    chi,
    closed_form_amplitude,
    spin_operator,
    xi,
)
from spinmat.generator import (
    EigenPair,
    FamilyFlags,
    GeneratedMatrix,
    Spectrum,
    classify,
    eigenvectors,
    generate,
    predict_family,
)
from spinmat.diagonalizer import (
    bisect_recover,
    multistart_recover,
    recover_spectrum,
    residual,
    row_eigenvalue,
    verify_recovery,
)
from spinmat.oracle import eig5, match_spectra

__version__ = "0.1.0"

__all__ = [
    "AmplitudeTable",
    "Direction",
    "EigenPair",
    "FamilyFlags",
    "GeneratedMatrix",
    "ParameterPoint",
    "Spectrum",
    "amplitude_table",
    "bisect_recover",
    "chi",
    "classify",
    "closed_form_amplitude",
    "eig5",
    "eigenvectors",
    "generate",
    "match_spectra",
    "multistart_recover",
    "predict_family",
    "recover_spectrum",
    "residual",
    "row_eigenvalue",
    "spin_operator",
    "verify_recovery",
    "xi",
]
