"""Spectra, asymptotic convergence rates and convergence times.

The rate of a linear iteration ``x <- T x`` whose fixed points are the
consensus vectors is the largest eigenvalue modulus strictly below one; the
unit eigenvalues are the consensus modes and are excluded. For defective or
complex subdominant eigenvalues the modulus still sets the asymptotic rate,
though finite-time transients may grow polynomially before decaying.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DegenerateSpectrum, InvalidInput, NotConvergent, NumericalFailure

__all__ = [
    "SpectrumReport",
    "ConvergenceTime",
    "spectrum",
    "convergence_rate",
    "convergence_time",
    "spectrum_report",
]

UNIT_TOL = 1e-9


class ConvergenceTime(NamedTuple):
    exact: float   # C / log(1/tau)
    approx: float  # C / (1 - tau)
    R: float       # 1 / (1 - tau)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    unit_count: int
    tau: float
    spectral_radius: float
    diverged: bool
    convergence_time: float

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "tau": self.tau,
            "unit_count": self.unit_count,
            "spectral_radius": self.spectral_radius,
            "diverged": self.diverged,
            "R": self.convergence_time,
        }


def spectrum(M) -> np.ndarray:
    """All eigenvalues of a square matrix, sorted by descending modulus."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInput(f"spectrum needs a square matrix, got shape {M.shape}")
    try:
        ev = scipy.linalg.eigvals(M, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(str(exc)) from exc
    order = np.lexsort((-ev.real, -np.abs(ev)))
    return ev[order]


def _rate_from_moduli(mod: np.ndarray, unit_tol: float) -> float:
    if mod.max() > 1.0 + unit_tol:
        return math.inf
    below = mod[mod < 1.0 - unit_tol]
    if below.size == 0:
        raise DegenerateSpectrum("every eigenvalue has unit modulus")
    return float(below.max())


def convergence_rate(M, unit_tol: float = UNIT_TOL) -> float:
    """Largest eigenvalue modulus below ``1 - unit_tol``.

    Returns ``inf`` when some modulus exceeds ``1 + unit_tol`` (the iteration
    diverges), so callers can minimize the rate without special-casing.
    """
    return _rate_from_moduli(np.abs(spectrum(M)), unit_tol)


def convergence_time(tau: float, C: float = 1.0) -> ConvergenceTime:
    """Convergence time of a linear rate ``tau``: exact, first-order and ``R``."""
    if not 0.0 <= tau < 1.0:
        raise NotConvergent(f"rate must lie in [0, 1), got {tau}")
    exact = 0.0 if tau == 0.0 else C / math.log(1.0 / tau)
    return ConvergenceTime(exact, C / (1.0 - tau), 1.0 / (1.0 - tau))


def spectrum_report(M, unit_tol: float = UNIT_TOL, consensus_dim: int = 1) -> SpectrumReport:
    ev = spectrum(M)
    mod = np.abs(ev)
    unit_count = int(np.sum(np.abs(mod - 1.0) <= unit_tol))
    if unit_count > consensus_dim:
        warnings.warn(
            f"{unit_count} unit-modulus eigenvalues exceed the consensus dimension {consensus_dim}",
            RuntimeWarning,
            stacklevel=2,
        )
    tau = _rate_from_moduli(mod, unit_tol)
    diverged = math.isinf(tau)
    R = math.inf if diverged else convergence_time(tau).R
    return SpectrumReport(ev, unit_count, tau, float(mod.max()), diverged, R)
