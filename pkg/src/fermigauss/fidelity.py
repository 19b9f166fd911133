"""Fidelity and overlap of fermionic Gaussian states from covariance matrices."""

from __future__ import annotations

import math

import numpy as np

from .channel import GaussianChannel, apply
from .errors import InvalidInputError, NumericalConsistencyError
from .linalg import SINGULAR_TOL, williamson_values
from .state import as_covariance

NEGATIVE_TOL = 1e-10


def _pair(rho, sigma):
    a, b = as_covariance(rho), as_covariance(sigma)
    if a.n != b.n:
        raise InvalidInputError(f"mode counts differ: {a.n} vs {b.n}")
    return a, b


def _log_det_gram(Gr: np.ndarray, Gs: np.ndarray):
    """``log det(I - G_r G_s)``, or ``None`` when the matrix is singular."""
    M = np.eye(Gr.shape[0]) - Gr @ Gs
    if M.size == 0:
        return M, 0.0
    smin = np.linalg.svd(M, compute_uv=False)[-1]
    if smin <= SINGULAR_TOL:
        return M, None
    sign, logabs = np.linalg.slogdet(M)
    if sign < 0:
        if logabs > math.log(NEGATIVE_TOL):
            raise NumericalConsistencyError(
                f"det(I - G_rho G_sigma) = {-math.exp(logabs):.3e} < 0 for valid states"
            )
        return M, None
    return M, logabs


def overlap(rho, sigma) -> float:
    """``tr(rho sigma) = 2^-n det(I - G_rho G_sigma)^{1/2}``."""
    a, b = _pair(rho, sigma)
    _, logdet = _log_det_gram(a.G, b.G)
    if logdet is None:
        return 0.0
    return math.exp(0.5 * logdet - a.n * math.log(2.0))


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``tr sqrt(sigma^{1/2} rho sigma^{1/2})``.

    With ``S = sqrt(I + G_s^2)`` the normalized operator
    ``sigma^{1/2} rho sigma^{1/2} / tr(rho sigma)`` is Gaussian with covariance
    ``G_s + S (I - G_r G_s)^{-1} G_r S``.  Its Williamson values ``mu`` give::

        F = 2^{-n/2} det(I - G_r G_s)^{1/4} prod_i (1 + sqrt(1 - mu_i^2))^{1/2}

    A singular ``I - G_r G_s`` means orthogonal supports and returns 0.
    """
    a, b = _pair(rho, sigma)
    Gr, Gs = a.G, b.G
    M, logdet = _log_det_gram(Gr, Gs)
    if logdet is None:
        return 0.0
    S = np.sqrt(np.maximum(1.0 - b.williamson**2, 0.0))
    O = b.form.O
    root = (O.T * np.repeat(S, 2)) @ O
    inner = Gs + root @ np.linalg.solve(M, Gr) @ root
    mu = np.minimum(williamson_values(0.5 * (inner - inner.T)), 1.0)
    log_f = (
        -0.5 * a.n * math.log(2.0)
        + 0.25 * logdet
        + 0.5 * float(np.sum(np.log1p(np.sqrt(1.0 - mu * mu))))
    )
    return math.exp(log_f)


def monotonicity_margin(rho, sigma, ch: GaussianChannel) -> float:
    """``F(N(rho), N(sigma)) - F(rho, sigma)``; nonnegative for every channel."""
    return fidelity(apply(ch, rho), apply(ch, sigma)) - fidelity(rho, sigma)
