"""Brute-force operator representation on the 2^n-dimensional Fock space.

Everything here is exponential in the mode count and exists to check the
covariance-level formulas.  Majorana operators follow the Jordan-Wigner
chain ``g_{2i-1} = Z..Z X I..I``, ``g_{2i} = Z..Z Y I..I`` (0-based in code).

Superoperators are ``4^n x 4^n`` matrices acting on row-major ``vec(X)``, so
the map ``X -> L X R`` is ``kron(L, R.T)`` and the Hilbert-Schmidt adjoint
is the conjugate transpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import FaithfulnessError, InvalidInputError, SizeLimitError
from .linalg import check_special_orthogonal, so_log
from .state import as_covariance

MAX_MODES = 5
MAX_UNITARY_MODES = 10
SUPPORT_TOL = 1e-10
# eigenvalues of PSD operators below this are treated as zero before square roots
PSD_CUTOFF = 1e-14

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0 + 0j, -1.0])


def _check_size(n: int, cap: int = MAX_MODES):
    if not 1 <= n <= cap:
        raise SizeLimitError(f"dense representation supports 1 <= n <= {cap} modes, got {n}")


@lru_cache(maxsize=None)
def _sparse_majoranas(n: int):
    ops = []
    zs = sp.csr_matrix(np.array([[1.0 + 0j]]))
    for i in range(n):
        right = sp.identity(2 ** (n - i - 1), format="csr")
        for p in (_X, _Y):
            ops.append(sp.kron(sp.kron(zs, sp.csr_matrix(p)), right, format="csr"))
        zs = sp.kron(zs, sp.csr_matrix(_Z), format="csr")
    return tuple(ops)


@lru_cache(maxsize=None)
def _dense_majoranas(n: int):
    ops = []
    for m in _sparse_majoranas(n):
        a = m.toarray()
        a.setflags(write=False)
        ops.append(a)
    return tuple(ops)


def majorana_operators(n: int) -> list[np.ndarray]:
    """The ``2n`` Jordan-Wigner Majorana matrices for ``1 <= n <= 5``."""
    _check_size(n)
    return list(_dense_majoranas(n))


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """A ``2^n x 2^n`` complex matrix tagged with its mode count."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1) or m.shape[0] < 2:
            raise InvalidInputError(f"dense operator must be 2^n x 2^n, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    def is_density(self, tol: float = 1e-10) -> bool:
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol or abs(np.trace(m) - 1) > tol:
            return False
        return bool(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() >= -tol)


def _mat(x) -> np.ndarray:
    return x.matrix if isinstance(x, DenseOperator) else np.asarray(x, dtype=complex)


def _modes(dim: int) -> int:
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise InvalidInputError(f"dimension {dim} is not a power of two")
    return n


def psd_function(rho, f, cutoff: float = PSD_CUTOFF) -> np.ndarray:
    """``f`` applied to the eigenvalues of a Hermitian PSD matrix; eigenvalues <= cutoff map to ``f(0)``."""
    rho = _mat(rho)
    w, V = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = np.where(w > cutoff, w, 0.0)
    return (V * f(w)) @ V.conj().T


def psd_sqrt(rho, cutoff: float = PSD_CUTOFF) -> np.ndarray:
    return psd_function(rho, np.sqrt, cutoff)


def dense_state_from_covariance(G) -> np.ndarray:
    """Density matrix ``2^-n prod_i (1 - i lam_i g~_{2i-1} g~_{2i})`` of a Gaussian state."""
    cov = as_covariance(G)
    _check_size(cov.n)
    gam = _dense_majoranas(cov.n)
    O = cov.form.O
    lam = cov.form.signed
    dim = 2**cov.n
    rho = np.eye(dim, dtype=complex)
    for i, l in enumerate(lam):
        g1 = sum(O[2 * i, j] * gam[j] for j in range(2 * cov.n))
        g2 = sum(O[2 * i + 1, j] * gam[j] for j in range(2 * cov.n))
        rho = rho @ (np.eye(dim) - 1j * l * (g1 @ g2))
    return rho / dim


def dense_covariance_of(rho) -> np.ndarray:
    """``G_ij = (i/2) tr(rho [g_i, g_j])``; no Gaussianity check."""
    rho = _mat(rho)
    n = _modes(rho.shape[0])
    _check_size(n)
    gam = _dense_majoranas(n)
    G = np.zeros((2 * n, 2 * n))
    for i in range(2 * n):
        for j in range(i + 1, 2 * n):
            comm = gam[i] @ gam[j] - gam[j] @ gam[i]
            G[i, j] = np.real(0.5j * np.trace(rho @ comm))
            G[j, i] = -G[i, j]
    return G


def dense_hamiltonian(M) -> np.ndarray:
    """``H = (i/2) sum_ij g_i M_ij g_j``."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0] // 2
    _check_size(n)
    gam = _dense_majoranas(n)
    H = sum(M[i, j] * (gam[i] @ gam[j]) for i in range(2 * n) for j in range(2 * n) if i != j)
    return 0.5j * H


def dense_thermal_state(M, beta: float) -> np.ndarray:
    H = dense_hamiltonian(M)
    w, V = np.linalg.eigh(H)
    p = np.exp(-beta * (w - w.min()))
    return (V * (p / p.sum())) @ V.conj().T


def _generator(h: np.ndarray, n: int):
    gam = _sparse_majoranas(n)
    out = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for i in range(2 * n):
        for j in range(2 * n):
            if i != j and h[i, j] != 0.0:
                out = out + h[i, j] * (gam[i] @ gam[j])
    return out


def _unitary_with_constant(R: np.ndarray, c: float) -> np.ndarray:
    n = R.shape[0] // 2
    h = so_log(R)
    return scipy.linalg.expm(c * _generator(h, n).toarray())


def _induced_rotation(U: np.ndarray, n: int) -> np.ndarray:
    """``R`` with ``U^dag g_k U = sum_l R_kl g_l``."""
    gam = _dense_majoranas(n)
    dim = 2**n
    return np.array(
        [[np.real(np.trace(gam[l] @ U.conj().T @ gam[k] @ U)) / dim for l in range(2 * n)]
         for k in range(2 * n)]
    )


@lru_cache(maxsize=1)
def calibrate_generator_constant() -> float:
    """Constant ``c`` with ``U = exp(c sum_ij h_ij g_i g_j)`` realizing ``U^dag g U = e^h g``.

    Fixed numerically from a single-mode rotation by a small angle, where the
    induced angle is linear in ``c``.
    """
    theta = 0.1
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    induced = _induced_rotation(_unitary_with_constant(R, 1.0), 1)
    psi = np.arctan2(induced[1, 0], induced[0, 0])
    return float(theta / psi)


def gaussian_unitary(R) -> np.ndarray:
    """Dense unitary with covariance action ``G -> R G R^T`` (up to 10 modes)."""
    R = check_special_orthogonal(R)
    n = R.shape[0] // 2
    _check_size(n, MAX_UNITARY_MODES)
    return _unitary_with_constant(R, calibrate_generator_constant())


def partial_trace_env(X: np.ndarray, n: int, m: int) -> np.ndarray:
    """Trace out the last ``m`` modes of an ``(n + m)``-mode operator."""
    dS, dE = 2**n, 2**m
    return np.einsum("aebe->ab", X.reshape(dS, dE, dS, dE))


@dataclass(frozen=True, eq=False)
class DenseSuperoperator:
    """Linear map on ``2^n x 2^n`` operators as a ``4^n_out x 4^n_in`` matrix."""

    matrix: np.ndarray
    n_in: int
    n_out: int

    def __call__(self, X) -> np.ndarray:
        X = _mat(X)
        d = 2**self.n_out
        return (self.matrix @ X.reshape(-1)).reshape(d, d)

    def __matmul__(self, other: "DenseSuperoperator") -> "DenseSuperoperator":
        if other.n_out != self.n_in:
            raise InvalidInputError("superoperator dimensions do not match")
        return DenseSuperoperator(self.matrix @ other.matrix, other.n_in, self.n_out)

    def adjoint(self) -> "DenseSuperoperator":
        return DenseSuperoperator(self.matrix.conj().T, self.n_out, self.n_in)


def sandwich(L, R) -> DenseSuperoperator:
    """The map ``X -> L X R``."""
    L, R = _mat(L), _mat(R)
    n = _modes(L.shape[0])
    return DenseSuperoperator(np.kron(L, R.T), n, n)


def identity_superoperator(n: int) -> DenseSuperoperator:
    return DenseSuperoperator(np.eye(4**n, dtype=complex), n, n)


def dense_unitary_channel(R) -> DenseSuperoperator:
    U = gaussian_unitary(R)
    return sandwich(U, U.conj().T)


def dense_channel(dilation) -> DenseSuperoperator:
    """``X -> Tr_E[U (X (x) rho_E) U^dag]`` for a :class:`~fermigauss.models.Dilation`.

    Raises:
        SizeLimitError: the dilated system has more than 5 modes.
    """
    n, m = dilation.n, dilation.m
    _check_size(n + m)
    U = gaussian_unitary(dilation.R)
    rho_E = dense_state_from_covariance(dilation.G_E)
    dS, dE = 2**n, 2**m
    U4 = U.reshape(dS, dE, dS, dE)
    S = np.einsum("aecf,fg,bedg->abcd", U4, rho_E, U4.conj(), optimize=True)
    return DenseSuperoperator(S.reshape(dS * dS, dS * dS), n, n)


def dense_channel_data(channel: DenseSuperoperator):
    """Read ``(A, B)`` off a dense Gaussian channel.

    ``A`` is the output covariance of the maximally mixed input and
    ``B_lk = tr(g_l N(g_k)) / 2^n`` is the action on single Majoranas.
    """
    n = channel.n_in
    _check_size(n)
    gam = _dense_majoranas(n)
    dim = 2**n
    A = dense_covariance_of(channel(np.eye(dim) / dim))
    B = np.array([[np.real(np.trace(gam[l] @ channel(gam[k]))) / dim for k in range(2 * n)]
                  for l in range(2 * n)])
    return A, B


def _support_inv_sqrt(rho: np.ndarray, tol: float, support: bool) -> np.ndarray:
    w, V = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = w > tol
    if not support and not np.all(keep):
        raise FaithfulnessError(
            f"N(sigma) is rank deficient ({int(np.sum(~keep))} null directions); enable support mode"
        )
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (V * inv) @ V.conj().T


def dense_petz(sigma, channel: DenseSuperoperator, *, support: bool = False,
               tol: float = SUPPORT_TOL) -> DenseSuperoperator:
    """``X -> sigma^{1/2} N*(N(sigma)^{-1/2} X N(sigma)^{-1/2}) sigma^{1/2}``.

    Args:
        sigma: reference density matrix.
        channel: the dense channel ``N``.
        support: restrict the inverse square root to the support of
            ``N(sigma)`` instead of raising on rank deficiency.
        tol: eigenvalue cutoff defining the support.

    Raises:
        FaithfulnessError: ``N(sigma)`` is rank deficient and ``support`` is off.
    """
    sigma = _mat(sigma)
    m = _support_inv_sqrt(channel(sigma), tol, support)
    root = psd_sqrt(sigma)
    return sandwich(root, root) @ channel.adjoint() @ sandwich(m, m)


def unitary_power(rho, t: float) -> np.ndarray:
    """``rho^{it}`` for a full-rank density matrix."""
    rho = _mat(rho)
    w, V = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if w.min() <= SUPPORT_TOL:
        raise FaithfulnessError("rho^{it} needs a full-rank operator")
    return (V * np.exp(1j * t * np.log(w))) @ V.conj().T


def dense_rotated_petz(sigma, channel: DenseSuperoperator, t: float) -> DenseSuperoperator:
    """``X -> sigma^{it} P(N(sigma)^{-it} X N(sigma)^{it}) sigma^{-it}``."""
    sigma = _mat(sigma)
    out = channel(sigma)
    petz = dense_petz(sigma, channel)
    return (
        sandwich(unitary_power(sigma, t), unitary_power(sigma, -t))
        @ petz
        @ sandwich(unitary_power(out, -t), unitary_power(out, t))
    )


def dense_fidelity(rho, sigma) -> float:
    """``tr sqrt(sigma^{1/2} rho sigma^{1/2})``, computed as the nuclear norm of ``rho^{1/2} sigma^{1/2}``."""
    a = psd_sqrt(_mat(rho))
    b = psd_sqrt(_mat(sigma))
    return float(np.sum(np.linalg.svd(a @ b, compute_uv=False)))


def dense_overlap(rho, sigma) -> float:
    return float(np.real(np.trace(_mat(rho) @ _mat(sigma))))


def dense_relative_entropy(rho, sigma, tol: float = SUPPORT_TOL) -> float:
    """``tr(rho log rho) - tr(rho log sigma)``; ``inf`` when supp(rho) is not inside supp(sigma)."""
    rho, sigma = _mat(rho), _mat(sigma)
    wr, Vr = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    ws, Vs = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    null = Vs[:, ws <= tol]
    if null.size and np.real(np.trace(null.conj().T @ rho @ null)) > tol:
        return np.inf
    pr = wr[wr > tol]
    s_rho = float(np.sum(pr * np.log(pr)))
    keep = ws > tol
    log_sigma = (Vs[:, keep] * np.log(ws[keep])) @ Vs[:, keep].conj().T
    return s_rho - float(np.real(np.trace(rho @ log_sigma)))


def von_neumann_entropy(rho, tol: float = SUPPORT_TOL) -> float:
    w = np.linalg.eigvalsh(_mat(rho))
    w = w[w > tol]
    return float(-np.sum(w * np.log(w)))
