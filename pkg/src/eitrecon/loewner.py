"""Loewner-order decisions between ND matrices.

``A >= B`` in the Loewner sense means the symmetrized difference is
positive semidefinite.  The decision is made on the smallest eigenvalue
with a tolerance relative to the spectral norm of the larger operand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DataError

DEFAULT_TOL = 1e-8


def default_tolerance(noise_level=0.0):
    """Tolerance policy: 1e-8 noiseless, else 2x the declared noise level."""
    return max(DEFAULT_TOL, 2.0 * float(noise_level))


@dataclass(frozen=True)
class LoewnerVerdict:
    """Outcome of one semidefiniteness test."""

    holds: bool
    lambda_min: float
    margin: float
    tolerance_used: float
    scale: float


def _spectral_norm(a):
    return float(np.abs(scipy.linalg.eigvalsh(a)).max())


def loewner_geq(a, b, tol=DEFAULT_TOL):
    """Decide A >= B (Loewner) for ND matrices or plain symmetric arrays.

    ``holds`` iff the smallest eigenvalue of the symmetrized difference
    is at least ``-tol * max(||A||_2, ||B||_2)``.  ``margin`` is that
    eigenvalue normalized by the spectral norm of the difference.
    """
    if tol <= 0:
        raise DataError("tolerance must be positive")
    am = getattr(a, "entries", a)
    bm = getattr(b, "entries", b)
    am = np.asarray(am, dtype=np.float64)
    bm = np.asarray(bm, dtype=np.float64)
    if am.shape != bm.shape or am.ndim != 2 or am.shape[0] != am.shape[1]:
        raise DataError(f"operand shapes {am.shape} and {bm.shape} do not match")
    diff = am - bm
    diff = 0.5 * (diff + diff.T)
    lam = float(scipy.linalg.eigvalsh(diff)[0])
    scale = max(_spectral_norm(am), _spectral_norm(bm))
    norm_diff = _spectral_norm(diff)
    margin = lam / norm_diff if norm_diff > 0.0 else 0.0
    return LoewnerVerdict(
        holds=lam >= -tol * scale,
        lambda_min=lam,
        margin=margin,
        tolerance_used=tol,
        scale=scale,
    )
