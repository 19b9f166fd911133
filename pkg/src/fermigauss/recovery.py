"""Petz and rotated recovery channels at the covariance level.

For a reference state ``sigma`` and a channel ``N`` with data ``(A, B)``::

    B_P = sqrt(I + G_s^2) B^T sqrt(I + G_N^2)^{-1}
    A_P = G_s - B_P G_N B_P^T

with ``G_s`` the covariance of ``sigma`` and ``G_N`` that of ``N(sigma)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    GaussianChannel,
    adjoint,
    apply,
    compose,
    sandwich_inv_sqrt,
    sandwich_sqrt,
    validate_tp,
)
from .errors import FaithfulnessError, InvalidInputError, NumericalConsistencyError, StrictPositivityError
from .linalg import block_diag_j, sqrt_one_plus_square
from .state import PURITY_TOL, as_covariance, power_rotation

MAX_ABS_T = 50.0
CP_SQUARED_TOL = 1e-6


def _check_channel(ch: GaussianChannel, cov):
    if not validate_tp(ch):
        raise InvalidInputError("recovery maps are defined for trace-preserving channels")
    if ch.n_in != cov.n:
        raise InvalidInputError(f"state has {cov.n} modes, channel expects {ch.n_in}")


@dataclass(frozen=True, eq=False)
class SupportPetz:
    """Petz map built on the support of ``N(sigma)``.

    Attributes:
        channel: full channel, discarding the pure modes of ``N(sigma)`` first.
        restricted: channel from the mixed modes of ``N(sigma)`` (in its
            canonical basis) to the system.
        basis: canonical basis ``O`` of ``G_N``; mode ``k`` spans rows ``2k, 2k+1``.
        mixed_modes: indices of modes with Williamson value below ``1 - tol``.
        pure_modes: the remaining modes, on which ``N(sigma)`` is pure.
    """

    channel: GaussianChannel
    restricted: GaussianChannel
    basis: np.ndarray
    mixed_modes: tuple
    pure_modes: tuple


def petz_on_support(sigma, ch: GaussianChannel, tol: float = PURITY_TOL) -> SupportPetz:
    """Petz map restricted to the mixed modes of ``N(sigma)``.

    On states supported inside ``supp N(sigma)`` the pure modes carry no
    information, so they are traced out and the closed form is applied to
    the rest.
    """
    cov = as_covariance(sigma)
    _check_channel(ch, cov)
    out = apply(ch, cov)
    form = out.form
    lam = form.signed
    mixed = np.flatnonzero(np.abs(lam) < 1.0 - tol)
    pure = np.flatnonzero(np.abs(lam) >= 1.0 - tol)
    rows = np.ravel([[2 * k, 2 * k + 1] for k in mixed]).astype(int)
    P = form.O[rows, :]
    lam_A = lam[mixed]
    G_A = block_diag_j(lam_A)
    inv_root = np.repeat(1.0 / np.sqrt(1.0 - lam_A * lam_A), 2)
    B_A = (sqrt_one_plus_square(cov.G, cov.form) @ ch.B.T @ P.T) * inv_root
    A_P = cov.G - B_A @ G_A @ B_A.T
    A_P = 0.5 * (A_P - A_P.T)
    return SupportPetz(
        channel=GaussianChannel(A_P, B_A @ P),
        restricted=GaussianChannel(A_P, B_A),
        basis=form.O,
        mixed_modes=tuple(int(k) for k in mixed),
        pure_modes=tuple(int(k) for k in pure),
    )


def petz(sigma, ch: GaussianChannel, *, support: bool = False) -> GaussianChannel:
    """Petz recovery channel of ``ch`` with respect to ``sigma``.

    Args:
        sigma: reference state.
        ch: trace-preserving Gaussian channel.
        support: when ``N(sigma)`` has pure modes, build the map on its
            support (see :func:`petz_on_support`) instead of raising.

    Raises:
        FaithfulnessError: ``N(sigma)`` has pure modes and ``support`` is off.
    """
    cov = as_covariance(sigma)
    _check_channel(ch, cov)
    out = apply(ch, cov)
    pure = np.flatnonzero(out.williamson >= 1.0 - PURITY_TOL)
    if pure.size:
        if support:
            return petz_on_support(cov, ch).channel
        raise FaithfulnessError(
            f"N(sigma) is not faithful: {pure.size} pure mode(s); request support mode",
            pure_modes=pure.tolist(),
        )
    lam = out.form.signed
    inv_root = 1.0 / np.sqrt(1.0 - lam * lam)
    O = out.form.O
    # sqrt(I + G_N^2)^{-1} = O^T diag(inv_root (x) I2) O
    inv_sqrt_N = (O.T * np.repeat(inv_root, 2)) @ O
    B_P = sqrt_one_plus_square(cov.G, cov.form) @ ch.B.T @ inv_sqrt_N
    A_P = cov.G - B_P @ out.G @ B_P.T
    return GaussianChannel(0.5 * (A_P - A_P.T), B_P)


def petz_via_composition(sigma, ch: GaussianChannel) -> GaussianChannel:
    """Petz map assembled as ``N3 o (N* o N1)`` with :func:`compose`.

    ``N1`` is ``X -> N(sigma)^{-1/2} X N(sigma)^{-1/2}`` and ``N3`` is
    ``X -> sigma^{1/2} X sigma^{1/2}``.  The composite constant satisfies
    ``C^2 = 1``; complete positivity fixes ``C = +1``.

    Raises:
        NumericalConsistencyError: ``C^2`` deviates from 1.
    """
    cov = as_covariance(sigma)
    _check_channel(ch, cov)
    out = apply(ch, cov)
    inner = compose(adjoint(ch), sandwich_inv_sqrt(out))
    full = compose(sandwich_sqrt(cov), inner)
    if abs(full.C**2 - 1.0) > CP_SQUARED_TOL:
        raise NumericalConsistencyError(f"composite constant C = {full.C} does not square to 1")
    return GaussianChannel(full.A, full.B, 1.0, full.D)


def rotated_petz(sigma, ch: GaussianChannel, t: float, *, angle=np.arctanh) -> GaussianChannel:
    """Rotated recovery channel ``U_{sigma,t} o P o U_{N(sigma),-t}``.

    ``A_R = B_{s,t} A_P B_{s,t}^T`` and ``B_R = B_{s,t} B_P B_{N,-t}`` with
    ``B_{s,t} = exp(-2t arctanh G_s)``.

    Args:
        sigma: reference state, strictly mixed.
        ch: trace-preserving channel with ``N(sigma)`` strictly mixed.
        t: rotation parameter, ``|t| <= 50``.
        angle: odd function replacing arctanh, for comparison purposes only.

    Raises:
        StrictPositivityError: ``sigma`` or ``N(sigma)`` has a pure mode.
    """
    if not abs(t) <= MAX_ABS_T:
        raise InvalidInputError(f"|t| must not exceed {MAX_ABS_T}, got {t!r}")
    cov = as_covariance(sigma)
    _check_channel(ch, cov)
    out = apply(ch, cov)
    for name, c in (("sigma", cov), ("N(sigma)", out)):
        if np.any(c.williamson >= 1.0 - PURITY_TOL):
            raise StrictPositivityError(f"{name} has a pure mode; sigma^(it) is undefined")
    P = petz(cov, ch)
    B_s = power_rotation(cov, t, angle)
    B_N = power_rotation(out, -t, angle)
    A_R = B_s @ P.A @ B_s.T
    return GaussianChannel(0.5 * (A_R - A_R.T), B_s @ P.B @ B_N)
