"""Fermionic Gaussian states at the covariance-matrix level.

A Gaussian state on ``n`` modes is fixed by its real antisymmetric
covariance matrix ``G_ij = (i/2) tr(rho [g_i, g_j])`` (Majorana operators
``g_i``).  In the canonical basis of ``G`` the state factorizes as
``2^-n prod_i (1 - i lam_i g~_{2i-1} g~_{2i})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import InvalidInputError, InvalidStateError, StrictPositivityError
from .linalg import (
    CanonicalForm,
    _assemble_even,
    _assemble_odd,
    as_antisymmetric,
    canonical_decompose,
    odd_function,
    pfaffian,
)

STATE_TOL = 1e-10
PURITY_TOL = 1e-10

#: inverse temperature marker for the ground state (beta -> infinity)
GROUND_STATE = math.inf


@dataclass(frozen=True)
class CovarianceMatrix:
    """Validated covariance matrix of a Gaussian state.

    Build instances through :func:`validate_covariance`; the canonical form
    is computed once and reused by downstream operations.
    """

    G: np.ndarray
    form: CanonicalForm = field(repr=False)

    @property
    def n(self) -> int:
        return self.G.shape[0] // 2

    @property
    def williamson(self) -> np.ndarray:
        return self.form.williamson


CovarianceLike = Union[CovarianceMatrix, np.ndarray, Sequence]


def validate_covariance(G, tol: float = STATE_TOL) -> CovarianceMatrix:
    """Check ``G^T G <= I`` and return a typed covariance matrix.

    Williamson values up to ``1 + tol`` are accepted and clipped to 1.

    Raises:
        InvalidInputError: ``G`` is not an even-sized antisymmetric matrix.
        InvalidStateError: some Williamson value exceeds ``1 + tol``.
    """
    if isinstance(G, CovarianceMatrix):
        return G
    G = as_antisymmetric(G)
    form = canonical_decompose(G)
    over = form.williamson[form.williamson > 1.0 + tol]
    if over.size:
        raise InvalidStateError(
            "covariance matrix violates G^T G <= I; Williamson values "
            + ", ".join(f"{v:.12g}" for v in over),
            offending=over.tolist(),
        )
    if np.any(form.williamson > 1.0):
        form = CanonicalForm(form.O, np.minimum(form.williamson, 1.0), form.orientation)
        G = form.reconstruct()
    G.setflags(write=False)
    return CovarianceMatrix(G, form)


def as_covariance(G) -> CovarianceMatrix:
    return G if isinstance(G, CovarianceMatrix) else validate_covariance(G)


def maximally_mixed(n: int) -> CovarianceMatrix:
    return validate_covariance(np.zeros((2 * n, 2 * n)))


def from_williamson(values, O=None) -> CovarianceMatrix:
    """State with signed Williamson values ``values`` in the basis ``O`` (identity by default)."""
    values = np.asarray(values, dtype=float)
    O = np.eye(2 * len(values)) if O is None else np.asarray(O, dtype=float)
    return validate_covariance(_assemble_odd(O, values))


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """``H = (i/2) sum_ij g_i M_ij g_j`` at inverse temperature ``beta``.

    ``beta = GROUND_STATE`` selects the zero-temperature limit.
    """

    M: np.ndarray
    beta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "M", as_antisymmetric(self.M))
        if not (self.beta >= 0):
            raise InvalidInputError(f"beta must be nonnegative, got {self.beta!r}")


def state_from_hamiltonian(h: QuadraticHamiltonian) -> CovarianceMatrix:
    """Thermal covariance ``G = i tanh(i beta M)``.

    Blockwise the signed Williamson values are ``-tanh(beta * b_i)``; at
    ``beta = GROUND_STATE`` they become ``-sign(b_i)`` (zero modes stay 0).
    """
    beta = h.beta
    if math.isinf(beta):
        G = odd_function(h.M, lambda x: -np.sign(x))
    else:
        G = odd_function(h.M, lambda x: -np.tanh(beta * x))
    return validate_covariance(G)


class PuritySpectrum(NamedTuple):
    williamson: np.ndarray
    pure_modes: np.ndarray
    is_pure: bool


def purity_spectrum(G: CovarianceLike, tol: float = PURITY_TOL) -> PuritySpectrum:
    """Williamson values with a per-mode purity flag (``|lam - 1| <= tol``)."""
    cov = as_covariance(G)
    lam = cov.williamson.copy()
    pure = np.abs(lam - 1.0) <= tol
    return PuritySpectrum(lam, pure, bool(np.all(pure)))


def wick_expectation(G: CovarianceLike, indices: Sequence[int]) -> complex:
    """``tr(rho g_{a1} ... g_{ak})`` for distinct 0-based Majorana indices.

    Odd monomials vanish.  For an even count the value is the Pfaffian of the
    pair-expectation matrix ``K_pq = <g_ap g_aq> = -i G_{ap aq}``.
    """
    cov = as_covariance(G)
    idx = [int(i) for i in indices]
    if len(set(idx)) != len(idx):
        raise InvalidInputError(f"Majorana indices must be distinct, got {idx}")
    dim = cov.G.shape[0]
    if any(i < 0 or i >= dim for i in idx):
        raise InvalidInputError(f"Majorana index out of range for {dim} operators")
    if not idx:
        return 1.0 + 0j
    if len(idx) % 2:
        return 0j
    k = len(idx) // 2
    sub = cov.G[np.ix_(idx, idx)]
    return complex((-1j) ** k * pfaffian(sub))


def sqrt_state_spectrum(lam: float) -> float:
    """Williamson value of the normalized square root of a single-mode state.

    ``(1 - sqrt(1 - lam^2)) / lam``, evaluated as ``lam / (1 + sqrt(1 - lam^2))``
    which carries the ``lam -> 0`` limit without special-casing.
    """
    lam = float(lam)
    if not -1.0 <= lam <= 1.0:
        raise InvalidInputError(f"Williamson value must lie in [-1, 1], got {lam!r}")
    return lam / (1.0 + math.sqrt(max(0.0, 1.0 - lam * lam)))


def power_rotation(G: CovarianceLike, t: float, angle=np.arctanh) -> np.ndarray:
    """Covariance action ``B_{sigma,t} = exp(-2t arctanh G)`` of ``X -> sigma^{it} X sigma^{-it}``.

    The result is orthogonal and commutes with ``G``.  ``angle`` replaces
    arctanh by another odd function; it exists so that alternatives can be
    compared against the dense construction.

    Raises:
        StrictPositivityError: the state has a pure mode.
    """
    cov = as_covariance(G)
    lam = cov.form.signed
    if np.any(np.abs(lam) >= 1.0 - PURITY_TOL):
        raise StrictPositivityError(
            "sigma^{it} needs a strictly positive state; pure Williamson values present"
        )
    phi = -2.0 * t * angle(lam)
    O = cov.form.O
    return _assemble_even(O, np.cos(phi)) + _assemble_odd(O, np.sin(phi))
