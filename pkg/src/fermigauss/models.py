"""Constructors for physically meaningful CPTP Gaussian channels.

Dilations put the system modes first and the environment modes last, the
same ordering the dense oracle uses for its tensor factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import GaussianChannel, validate_cp
from .errors import InvalidInputError
from .linalg import check_special_orthogonal
from .state import CovarianceMatrix, as_covariance, from_williamson


@dataclass(frozen=True, eq=False)
class Dilation:
    """System-environment rotation ``R`` with environment state ``G_E``.

    ``R`` acts on ``2(n + m)`` Majoranas, system first.
    """

    R: np.ndarray
    G_E: CovarianceMatrix
    n: int
    m: int

    def __post_init__(self):
        R = check_special_orthogonal(self.R)
        G_E = as_covariance(self.G_E)
        if R.shape[0] != 2 * (self.n + self.m):
            raise InvalidInputError(f"R is {R.shape}, expected 2(n+m) = {2 * (self.n + self.m)}")
        if G_E.n != self.m:
            raise InvalidInputError(f"environment has {G_E.n} modes, expected m = {self.m}")
        R = R.copy()
        R.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "G_E", G_E)


def unitary_channel(R) -> GaussianChannel:
    """Channel ``G -> R G R^T`` of a quadratic-Hamiltonian evolution."""
    R = check_special_orthogonal(R)
    return GaussianChannel(np.zeros_like(R), R)


def dilation_channel(d: Dilation) -> GaussianChannel:
    """``B = R_SS``, ``A = R_SE G_E R_SE^T``."""
    s = 2 * d.n
    R_SS, R_SE = d.R[:s, :s], d.R[:s, s:]
    ch = GaussianChannel(R_SE @ d.G_E.G @ R_SE.T, R_SS)
    verdict = validate_cp(ch)
    if not verdict:
        raise InvalidInputError(f"dilation produced a non-CP channel: {verdict.reason}")
    return ch


def beam_splitter(theta: float) -> np.ndarray:
    """Two-mode rotation mixing each system Majorana with its environment partner."""
    c, s = np.cos(theta), np.sin(theta)
    R = np.zeros((4, 4))
    R[np.ix_([0, 2], [0, 2])] = [[c, s], [-s, c]]
    R[np.ix_([1, 3], [1, 3])] = [[c, s], [-s, c]]
    return R


def swap_rotation(n: int) -> np.ndarray:
    """Special-orthogonal exchange of ``n`` system and ``n`` environment modes."""
    eye, zero = np.eye(2 * n), np.zeros((2 * n, 2 * n))
    return np.block([[zero, eye], [eye, zero]])


def attenuator_dilation(eta: float, lam_E: float) -> Dilation:
    if not 0.0 <= eta <= 1.0:
        raise InvalidInputError(f"eta must lie in [0, 1], got {eta!r}")
    if not 0.0 <= lam_E <= 1.0:
        raise InvalidInputError(f"lambda_E must lie in [0, 1], got {lam_E!r}")
    return Dilation(beam_splitter(np.arccos(np.sqrt(eta))), from_williamson([lam_E]), 1, 1)


def attenuator(eta: float, lam_E: float) -> GaussianChannel:
    """Single-mode attenuator: ``B = sqrt(eta) I``, ``A = (1 - eta) lam_E J``."""
    return dilation_channel(attenuator_dilation(eta, lam_E))


def erasure(G_fix) -> GaussianChannel:
    """Constant channel preparing ``G_fix``."""
    G = as_covariance(G_fix).G
    return GaussianChannel(G, np.zeros_like(G))


def random_special_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed element of SO(dim) via sign-fixed QR."""
    Q, Rq = np.linalg.qr(rng.standard_normal((dim, dim)))
    Q = Q * np.sign(np.diag(Rq))
    if np.linalg.det(Q) < 0:
        Q[:, [0, 1]] = Q[:, [1, 0]]
    return Q


def random_state(seed, n: int, *, low: float = 0.0, high: float = 0.95) -> CovarianceMatrix:
    """Mixed Gaussian state with Williamson values uniform in ``[low, high]``."""
    rng = np.random.default_rng(seed)
    lam = rng.uniform(low, high, size=n)
    return from_williamson(lam, random_special_orthogonal(rng, 2 * n))


def random_dilation(seed, n: int, m: int) -> Dilation:
    rng = np.random.default_rng(seed)
    if n < 1 or m < 1:
        raise InvalidInputError("random_dilation needs n, m >= 1")
    R = random_special_orthogonal(rng, 2 * (n + m))
    lam = rng.uniform(0.0, 0.95, size=m)
    G_E = from_williamson(lam, random_special_orthogonal(rng, 2 * m))
    return Dilation(R, G_E, n, m)


def random_channel(seed, n: int, m: int) -> GaussianChannel:
    """CPTP channel from a Haar-random dilation with a random mixed environment."""
    return dilation_channel(random_dilation(seed, n, m))

