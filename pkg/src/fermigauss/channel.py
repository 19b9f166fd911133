"""Gaussian linear maps in the Grassmann-integral representation.

A map is described by ``(A, B, C, D)``: the exponent
``(i/2) theta^T A theta + (i/2) eta^T D eta + i theta^T B eta`` and the
prefactor ``C``.  Quantum channels (CPTP) have ``C = 1``, ``D = 0`` and act on
covariance matrices as ``G -> B G B^T + A``.

``B`` may be rectangular (``2 n_out x 2 n_in``) so that dilations and
erasures can change the mode count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import FaithfulnessError, InvalidInputError, InvalidStateError, SingularityError
from .linalg import as_antisymmetric, canonical_decompose, pfaffian_slog, regularize, sqrt_one_plus_square
from .state import PURITY_TOL, CovarianceMatrix, as_covariance, validate_covariance

CP_TOL = 1e-10
TP_TOL = 1e-12

# Williamson values of the inner A-block at or below this are regularized in compose()
REGULARIZE_THRESHOLD = 1e-6
REGULARIZE_EPS = (1e-4, 1e-5, 1e-6)
STABILITY_TOL = 1e-7


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    """Data ``(A, B, C, D)`` of a Gaussian linear map.

    ``C`` defaults to 1 and ``D`` to the zero matrix, which is the CPTP case.
    """

    A: np.ndarray
    B: np.ndarray
    C: complex = 1.0
    D: np.ndarray | None = None

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        if B.ndim != 2 or B.shape[0] % 2 or B.shape[1] % 2:
            raise InvalidInputError(f"B must be 2n_out x 2n_in, got shape {B.shape}")
        A = as_antisymmetric(self.A)
        if A.shape[0] != B.shape[0]:
            raise InvalidInputError(f"A is {A.shape} but B has {B.shape[0]} rows")
        D = np.zeros((B.shape[1], B.shape[1])) if self.D is None else as_antisymmetric(self.D)
        if D.shape[0] != B.shape[1]:
            raise InvalidInputError(f"D is {D.shape} but B has {B.shape[1]} columns")
        C = complex(self.C)
        if not np.isfinite(C):
            raise InvalidInputError("C must be finite")
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "B", _frozen(B))
        object.__setattr__(self, "D", _frozen(D))
        object.__setattr__(self, "C", C)

    @property
    def n_out(self) -> int:
        return self.B.shape[0] // 2

    @property
    def n_in(self) -> int:
        return self.B.shape[1] // 2

    @property
    def N(self) -> np.ndarray:
        """Block matrix ``[[A, B], [-B^T, D]]``."""
        return np.block([[self.A, self.B], [-self.B.T, self.D]])

    def __repr__(self):
        return f"GaussianChannel(n_in={self.n_in}, n_out={self.n_out}, C={self.C:.6g})"


def identity_channel(n: int) -> GaussianChannel:
    return GaussianChannel(np.zeros((2 * n, 2 * n)), np.eye(2 * n))


class Verdict(NamedTuple):
    ok: bool
    max_singular_value: float
    reason: str

    def __bool__(self):
        return self.ok


def validate_cp(ch: GaussianChannel, tol: float = CP_TOL) -> Verdict:
    """Complete positivity: ``C >= 0`` and ``N`` a real contraction."""
    smax = float(np.linalg.norm(ch.N, 2)) if ch.N.size else 0.0
    if abs(ch.C.imag) > TP_TOL or ch.C.real < -TP_TOL:
        return Verdict(False, smax, f"C = {ch.C} is not a nonnegative real")
    if smax > 1.0 + tol:
        return Verdict(False, smax, f"largest singular value of N is {smax:.12g} > 1")
    return Verdict(True, smax, "")


def validate_tp(ch: GaussianChannel, tol: float = TP_TOL) -> bool:
    """Trace preservation: ``C = 1`` and ``D = 0``."""
    return abs(ch.C - 1.0) <= tol and float(np.max(np.abs(ch.D), initial=0.0)) <= tol


def validate_unital(ch: GaussianChannel, tol: float = TP_TOL) -> bool:
    """Unitality: ``C = 1`` and ``A = 0``."""
    return abs(ch.C - 1.0) <= tol and float(np.max(np.abs(ch.A), initial=0.0)) <= tol


def is_cptp(ch: GaussianChannel) -> bool:
    return bool(validate_cp(ch)) and validate_tp(ch)


def apply(ch: GaussianChannel, G) -> CovarianceMatrix:
    """Output covariance ``B G B^T + A`` of a trace-preserving Gaussian channel.

    Raises:
        InvalidInputError: the map is not TP or dimensions do not match.
        InvalidStateError: the output is not a valid state (non-CP data).
    """
    if not validate_tp(ch):
        raise InvalidInputError("apply() needs a trace-preserving channel (C = 1, D = 0)")
    G = as_covariance(G).G
    if G.shape[0] != ch.B.shape[1]:
        raise InvalidInputError(f"state has {G.shape[0] // 2} modes, channel expects {ch.n_in}")
    out = ch.B @ G @ ch.B.T + ch.A
    try:
        return validate_covariance(0.5 * (out - out.T))
    except InvalidStateError as exc:
        raise InvalidStateError(
            "channel output violates G^T G <= I; channel data is not CP", exc.offending
        ) from exc


def apply_map(ch: GaussianChannel, G):
    """Action of a general Gaussian map on a Gaussian state.

    Returns ``(G_out, weight)`` where the output operator equals ``weight``
    times the Gaussian state with covariance ``G_out``::

        G_out  = A + B (I + G D)^{-1} G B^T
        weight = 2^(n_out - n_in) C (-1)^n_in Pf([[G, I], [-I, D]])

    The Pfaffian form is the continuous extension of ``Pf(G) Pf(D + G^{-1})``,
    so singular ``G`` needs no special handling.
    """
    G = as_covariance(G).G
    if G.shape[0] != ch.B.shape[1]:
        raise InvalidInputError(f"state has {G.shape[0] // 2} modes, map expects {ch.n_in}")
    dim = G.shape[0]
    I = np.eye(dim)
    K = np.linalg.solve(I + G @ ch.D, G)
    out = ch.A + ch.B @ K @ ch.B.T
    phase, logabs = pfaffian_slog(np.block([[G, I], [-I, ch.D]]))
    weight = 2.0 ** (ch.n_out - ch.n_in) * ch.C * (-1) ** ch.n_in * phase * np.exp(logabs)
    return 0.5 * (out - out.T), complex(weight)


def _compose_blocks(second: GaussianChannel, first: GaussianChannel, A1: np.ndarray):
    A1inv = np.linalg.inv(A1)
    A1inv = 0.5 * (A1inv - A1inv.T)
    K = second.D + A1inv
    if np.linalg.cond(K) > 1e13:
        raise SingularityError("D_2 + A_1^{-1} is singular; the composite has no finite limit")
    Kinv = np.linalg.inv(K)
    Kinv = 0.5 * (Kinv - Kinv.T)
    KA = Kinv @ A1inv @ first.B
    A = second.A + second.B @ Kinv @ second.B.T
    B = second.B @ KA
    D = first.D + first.B.T @ second.D @ KA
    return A, B, D


def _compose_constant(second: GaussianChannel, first: GaussianChannel) -> complex:
    # Pf(A1) Pf(D2 + A1^-1) = Pf([[A1, I], [-I, D2]]), which stays regular when A1 is singular
    dim = first.A.shape[0]
    I = np.eye(dim)
    phase, logabs = pfaffian_slog(np.block([[first.A, I], [-I, second.D]]))
    return complex(first.C * second.C * (-1) ** (dim // 2) * phase * np.exp(logabs))


def compose(second: GaussianChannel, first: GaussianChannel) -> GaussianChannel:
    """Composite ``second o first``.

    ::

        A = A2 + B2 (D2 + A1^-1)^-1 B2^T
        B = B2 (D2 + A1^-1)^-1 A1^-1 B1
        C = C1 C2 (-1)^n Pf(A1) Pf(D2 + A1^-1)
        D = D1 + B1^T D2 (D2 + A1^-1)^-1 A1^-1 B1

    ``C`` is evaluated as ``C1 C2 (-1)^n Pf([[A1, I], [-I, D2]])``.  When
    ``A1`` has Williamson values at or below ``REGULARIZE_THRESHOLD`` they
    are shifted by ``eps`` in ``A1``'s canonical basis, ``A, B, D`` are
    evaluated at ``eps = 1e-4, 1e-5, 1e-6`` and Richardson-extrapolated to
    ``eps = 0``.  The two extrapolants must agree within ``STABILITY_TOL``.

    Raises:
        InvalidInputError: inner dimensions do not match.
        SingularityError: ``D2 + A1^-1`` is singular or the limit is unstable.
    """
    if second.B.shape[1] != first.B.shape[0]:
        raise InvalidInputError(
            f"cannot compose: first outputs {first.n_out} modes, second expects {second.n_in}"
        )
    A1 = first.A
    C = _compose_constant(second, first)
    if A1.shape[0] == 0:
        return GaussianChannel(second.A, np.zeros((second.B.shape[0], first.B.shape[1])), C, first.D)
    form = canonical_decompose(A1)
    if form.williamson[-1] > REGULARIZE_THRESHOLD:
        A, B, D = _compose_blocks(second, first, A1)
    else:
        A, B, D = _richardson(
            [_compose_blocks(second, first, regularize(A1, e, REGULARIZE_THRESHOLD, form))
             for e in REGULARIZE_EPS],
            REGULARIZE_EPS,
        )
    return GaussianChannel(0.5 * (A - A.T), B, C, 0.5 * (D - D.T))


def _richardson(samples, eps):
    def extrapolate(f1, f2, e1, e2):
        return (e1 * f2 - e2 * f1) / (e1 - e2)

    coarse = [extrapolate(a, b, eps[0], eps[1]) for a, b in zip(samples[0], samples[1])]
    fine = [extrapolate(a, b, eps[1], eps[2]) for a, b in zip(samples[1], samples[2])]
    for c, f in zip(coarse, fine):
        scale = max(1.0, float(np.max(np.abs(f), initial=0.0)))
        drift = float(np.max(np.abs(c - f), initial=0.0))
        if drift > STABILITY_TOL * scale:
            raise SingularityError(f"regularized composition does not converge (drift {drift:.3e})")
    return fine


def adjoint(ch: GaussianChannel) -> GaussianChannel:
    """Hilbert-Schmidt adjoint: ``(A, B, C, D) -> (D^H, B^H, conj C, A^H)``.

    For a CPTP channel this is ``(0, B^T, 1, -A)``, a unital CP map.
    """
    return GaussianChannel(ch.D.conj().T, ch.B.conj().T, np.conj(ch.C), ch.A.conj().T)


def sandwich_sqrt(sigma) -> GaussianChannel:
    """The map ``X -> sigma^{1/2} X sigma^{1/2}``."""
    cov = as_covariance(sigma)
    G = cov.G
    return GaussianChannel(G, sqrt_one_plus_square(G, cov.form), 2.0 ** (-cov.n), -G)


def sandwich_inv_sqrt(tau) -> GaussianChannel:
    """The map ``X -> tau^{-1/2} X tau^{-1/2}`` for a faithful state ``tau``.

    Raises:
        FaithfulnessError: ``tau`` has a pure mode; restrict to its support instead.
    """
    cov = as_covariance(tau)
    lam = cov.williamson
    pure = np.flatnonzero(lam >= 1.0 - PURITY_TOL)
    if pure.size:
        raise FaithfulnessError(
            "tau^{-1/2} is undefined: pure modes present; use the support-projection path",
            pure_modes=pure.tolist(),
        )
    G = cov.G
    C = 2.0 ** cov.n * float(np.prod(1.0 / (1.0 - lam * lam)))
    return GaussianChannel(-G, sqrt_one_plus_square(G, cov.form), C, G)
