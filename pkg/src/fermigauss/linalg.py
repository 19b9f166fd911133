"""Antisymmetric-matrix kernels.

Every real antisymmetric ``2n x 2n`` matrix can be brought to the form::

    M = O^T (diag(b_1, ..., b_n) (x) J) O,      J = [[0, -1], [1, 0]]

with ``O`` special orthogonal.  The ``b_i`` are the Williamson values.  This
module computes that decomposition, Pfaffians, and the induced odd/even
matrix functions

    f_*(M) = O^T (f(b) (x) J) O = -i f(iM)       (f odd)
    g_*(M) = O^T (g(b) (x) I) O =  g(iM)         (g even)

Rows ``2i`` and ``2i+1`` of ``O`` span the i-th invariant plane.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import DomainError, InvalidInputError, SingularityError

ANTISYMMETRY_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-10
SINGULAR_TOL = 1e-10
DEGENERACY_TOL = 1e-10

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def as_antisymmetric(M, tol: float = ANTISYMMETRY_TOL) -> np.ndarray:
    """Validate ``M`` as a real antisymmetric matrix of even size.

    The check is relative to ``max(1, max|M|)``.  The returned array is the
    exactly antisymmetric part ``(M - M^T) / 2`` as a fresh float64 array.
    """
    M = np.asarray(M)
    if np.iscomplexobj(M):
        if np.max(np.abs(M.imag), initial=0.0) > tol:
            raise InvalidInputError("antisymmetric matrix must be real")
        M = M.real
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2:
        raise InvalidInputError(f"dimension must be even, got {M.shape[0]}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    asym = float(np.max(np.abs(M + M.T), initial=0.0))
    if asym > tol * scale:
        raise InvalidInputError(f"matrix is not antisymmetric (max |M + M^T| = {asym:.3e})")
    return 0.5 * (M - M.T)


def block_diag_j(values) -> np.ndarray:
    """``diag(values) (x) J`` as a dense matrix."""
    values = np.asarray(values, dtype=float)
    return np.kron(np.diag(values), J2)


@dataclass(frozen=True)
class CanonicalForm:
    """Special-orthogonal block decomposition of an antisymmetric matrix.

    ``williamson`` holds magnitudes sorted in descending order.  The
    signed block value is ``orientation[i] * williamson[i]``; orientation is
    ``+1`` except possibly for the last (smallest) block, which absorbs the
    sign needed to keep ``det(O) = +1``.
    """

    O: np.ndarray
    williamson: np.ndarray
    orientation: np.ndarray

    @property
    def n(self) -> int:
        return len(self.williamson)

    @property
    def signed(self) -> np.ndarray:
        return self.orientation * self.williamson

    def reconstruct(self) -> np.ndarray:
        return _assemble_odd(self.O, self.signed)


def reconstruct(O, williamson, orientation=None) -> np.ndarray:
    """Rebuild ``O^T (diag(orientation * williamson) (x) J) O``."""
    williamson = np.asarray(williamson, dtype=float)
    if orientation is None:
        orientation = np.ones_like(williamson)
    return _assemble_odd(np.asarray(O, dtype=float), orientation * williamson)


def _assemble_odd(O: np.ndarray, values: np.ndarray) -> np.ndarray:
    u1, u2 = O[0::2], O[1::2]
    left = (u2.T * values) @ u1
    return left - left.T


def _assemble_even(O: np.ndarray, values: np.ndarray) -> np.ndarray:
    u1, u2 = O[0::2], O[1::2]
    out = (u1.T * values) @ u1 + (u2.T * values) @ u2
    return 0.5 * (out + out.T)


def _first_component_key(u: np.ndarray):
    idx = int(np.argmax(np.abs(u) > 1e-8))
    return (idx, -abs(float(u[idx])))


def canonical_decompose(M) -> CanonicalForm:
    """Block-diagonalize a real antisymmetric matrix.

    Uses the real Schur form, which for a normal matrix is block diagonal
    with 2x2 rotation-generator blocks and 1x1 zero blocks.

    Raises:
        InvalidInputError: if ``M`` has odd size or is not antisymmetric.
    """
    M = as_antisymmetric(M)
    dim = M.shape[0]
    n = dim // 2
    if n == 0:
        return CanonicalForm(np.eye(0), np.zeros(0), np.zeros(0))

    T, Z = scipy.linalg.schur(M, output="real")
    planes = []
    zeros = []
    k = 0
    while k < dim:
        if k + 1 < dim and T[k + 1, k] != 0.0:
            b = 0.5 * (T[k, k + 1] - T[k + 1, k])
            u1, u2 = Z[:, k], Z[:, k + 1]
            if b > 0:
                u1, u2 = u2, u1
            planes.append((abs(b), u1, u2))
            k += 2
        else:
            zeros.append(Z[:, k])
            k += 1
    for a, b in zip(zeros[0::2], zeros[1::2]):
        planes.append((0.0, a, b))

    planes.sort(key=lambda p: -p[0])
    # fixed tie-breaking inside runs of equal values
    ordered = []
    start = 0
    while start < len(planes):
        stop = start + 1
        while stop < len(planes) and planes[stop - 1][0] - planes[stop][0] <= DEGENERACY_TOL:
            stop += 1
        run = planes[start:stop]
        if len(run) > 1:
            run = sorted(run, key=lambda p: _first_component_key(p[1]))
        ordered.extend(run)
        start = stop

    values = np.array([p[0] for p in ordered])
    O = np.empty((dim, dim))
    O[0::2] = [p[1] for p in ordered]
    O[1::2] = [p[2] for p in ordered]
    orientation = np.ones(n)
    if np.linalg.slogdet(O)[0] < 0:
        O[-1] = -O[-1]
        if values[-1] > 0.0:
            orientation[-1] = -1.0
    return CanonicalForm(O, values, orientation)


def williamson_values(M) -> np.ndarray:
    """Williamson magnitudes in descending order (Hermitian eigensolve of iM)."""
    M = as_antisymmetric(M)
    n = M.shape[0] // 2
    if n == 0:
        return np.zeros(0)
    ev = scipy.linalg.eigvalsh(1j * M)
    return np.clip(ev[::-1][:n], 0.0, None)


# ---------------------------------------------------------------- Pfaffians


def _householder(x: np.ndarray):
    """Reflector ``v`` (unit norm), ``tau`` and ``alpha`` with ``(I - tau v v^H) x = alpha e_1``."""
    sigma = np.vdot(x[1:], x[1:]).real
    if sigma == 0.0:
        return np.zeros_like(x), 0.0, x[0]
    norm_x = np.sqrt(abs(x[0]) ** 2 + sigma)
    v = x.copy()
    if np.iscomplexobj(x):
        phase = np.exp(1j * np.angle(x[0]))
        v[0] += phase * norm_x
        alpha = -phase * norm_x
    elif x[0] <= 0:
        v[0] -= norm_x
        alpha = norm_x
    else:
        v[0] += norm_x
        alpha = -norm_x
    v /= np.linalg.norm(v)
    return v, 2.0, alpha


def pfaffian_slog(M):
    """Pfaffian as ``(phase, log|Pf|)`` so that ``Pf = phase * exp(log|Pf|)``.

    Householder reduction to antisymmetric tridiagonal form, O(n^3).  The
    phase is ``+-1`` for real input, a unit complex number otherwise, and
    ``0`` (with ``-inf`` log) for a singular matrix.
    """
    A = np.array(M, dtype=complex if np.iscomplexobj(M) else float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    dim = A.shape[0]
    if dim % 2:
        return 0.0, -np.inf
    if dim == 0:
        return 1.0, 0.0

    phase = 1.0
    logabs = 0.0

    def absorb(factor):
        nonlocal phase, logabs
        mag = abs(factor)
        if mag == 0.0:
            return False
        phase *= factor / mag
        logabs += np.log(mag)
        return True

    for i in range(dim - 2):
        v, tau, alpha = _householder(A[i + 1:, i])
        A[i + 1, i] = alpha
        A[i, i + 1] = -alpha
        A[i + 2:, i] = 0
        A[i, i + 2:] = 0
        if tau != 0.0:
            w = tau * (A[i + 1:, i + 1:] @ v.conj())
            A[i + 1:, i + 1:] += np.outer(v, w) - np.outer(w, v)
            phase *= 1.0 - tau
        if i % 2 == 0 and not absorb(-alpha):
            return 0.0, -np.inf
    if not absorb(A[dim - 2, dim - 1]):
        return 0.0, -np.inf
    if not np.iscomplexobj(A):
        phase = float(np.sign(phase))
    return phase, logabs


def pfaffian(M):
    """Pfaffian of an antisymmetric matrix; ``Pf([[0, a], [-a, 0]]) = a``."""
    phase, logabs = pfaffian_slog(M)
    if phase == 0:
        return 0.0 * phase
    return phase * np.exp(logabs)


# ------------------------------------------------------- matrix functions


def _evaluate(f, values, what):
    with np.errstate(all="ignore"):
        out = np.asarray(f(values), dtype=float)
    out = np.broadcast_to(out, values.shape).astype(float)
    bad = ~np.isfinite(out)
    if np.any(bad):
        v = float(values[np.argmax(bad)])
        raise DomainError(f"{what} is not finite at Williamson value {v!r}", value=v)
    return out


def odd_function(M, f: Callable, form: CanonicalForm | None = None) -> np.ndarray:
    """Induced odd matrix function ``f_*(M) = O^T (f(b) (x) J) O``.

    Args:
        M: antisymmetric matrix.
        f: odd scalar function, vectorized over numpy arrays.
        form: precomputed canonical form of ``M`` (optional).

    Raises:
        DomainError: if ``f`` is not finite at some signed Williamson value.
    """
    form = canonical_decompose(M) if form is None else form
    return _assemble_odd(form.O, _evaluate(f, form.signed, "odd function"))


def even_function(M, g: Callable, form: CanonicalForm | None = None) -> np.ndarray:
    """Induced even matrix function ``g_*(M) = O^T (g(b) (x) I) O``; symmetric."""
    form = canonical_decompose(M) if form is None else form
    return _assemble_even(form.O, _evaluate(g, form.williamson, "even function"))


def support_pseudo_apply(
    M,
    f: Callable,
    *,
    parity: str = "odd",
    singular=(0.0,),
    limit=None,
    tol: float = SINGULAR_TOL,
    form: CanonicalForm | None = None,
) -> np.ndarray:
    """Apply ``f`` spectrally, substituting a limit value at singular points.

    Williamson magnitudes within ``tol`` of any point in ``singular`` take the
    value ``limit`` (for odd parity the block orientation is applied to it).
    This realizes the perturb-then-limit rule for functions such as ``-1/x``
    whose singular blocks contribute their continuous extension.

    Raises:
        SingularityError: a singular value is present and ``limit`` is None.
        DomainError: ``f`` is not finite away from the declared singular set.
    """
    if parity not in ("odd", "even"):
        raise InvalidInputError(f"parity must be 'odd' or 'even', got {parity!r}")
    form = canonical_decompose(M) if form is None else form
    mags = form.williamson
    mask = np.zeros(mags.shape, dtype=bool)
    for s in np.atleast_1d(singular):
        mask |= np.abs(mags - abs(s)) <= tol
    if np.any(mask) and limit is None:
        v = float(mags[np.argmax(mask)])
        raise SingularityError(f"no finite limit declared at Williamson value {v!r}", value=v)
    args = form.signed if parity == "odd" else mags
    out = np.empty_like(mags)
    if np.any(~mask):
        out[~mask] = _evaluate(f, args[~mask], "function")
    if parity == "odd":
        out[mask] = limit * form.orientation[mask]
        return _assemble_odd(form.O, out)
    out[mask] = limit
    return _assemble_even(form.O, out)


def pseudo_inverse(M, tol: float = SINGULAR_TOL) -> np.ndarray:
    """Moore-Penrose inverse of an antisymmetric matrix via its blocks."""
    return support_pseudo_apply(M, lambda x: -1.0 / x, limit=0.0, tol=tol)


def regularize(M, eps: float, threshold: float = SINGULAR_TOL, form: CanonicalForm | None = None):
    """Shift every Williamson value at or below ``threshold`` by ``+eps``.

    The shift is applied in the matrix's own canonical basis, so the result
    depends analytically on ``eps`` and reduces to ``M`` at ``eps = 0``.
    """
    form = canonical_decompose(M) if form is None else form
    values = form.signed.copy()
    values[form.williamson <= threshold] += eps
    return _assemble_odd(form.O, values)


def sqrt_one_plus_square(G, form: CanonicalForm | None = None) -> np.ndarray:
    """``sqrt(I + G^2)`` for antisymmetric ``G``; blockwise ``sqrt(1 - b^2)``."""
    return even_function(G, lambda x: np.sqrt(np.clip(1.0 - x * x, 0.0, None)), form=form)


def so_log(R) -> np.ndarray:
    """Real antisymmetric ``h`` with ``expm(h) = R`` for ``R`` in SO(2n).

    Built from the real Schur form, so eigenvalue ``-1`` pairs (e.g. mode
    swaps) are handled as rotations by pi.
    """
    R = np.asarray(R, dtype=float)
    dim = R.shape[0]
    T, Z = scipy.linalg.schur(R, output="real")
    H = np.zeros_like(T)
    minus = []
    k = 0
    while k < dim:
        if k + 1 < dim and T[k + 1, k] != 0.0:
            c = 0.5 * (T[k, k] + T[k + 1, k + 1])
            s = 0.5 * (T[k + 1, k] - T[k, k + 1])
            phi = np.arctan2(s, c)
            H[k + 1, k] = phi
            H[k, k + 1] = -phi
            k += 2
        else:
            if T[k, k] < 0:
                minus.append(k)
            k += 1
    if len(minus) % 2:
        raise InvalidInputError("matrix is not in SO(2n) (odd number of -1 eigenvalues)")
    for a, b in zip(minus[0::2], minus[1::2]):
        H[b, a] = np.pi
        H[a, b] = -np.pi
    h = Z @ H @ Z.T
    return 0.5 * (h - h.T)


def check_special_orthogonal(R, tol: float = ORTHOGONALITY_TOL) -> np.ndarray:
    """Return ``R`` as float array after checking ``R^T R = I`` and ``det R = +1``."""
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {R.shape}")
    err = float(np.max(np.abs(R.T @ R - np.eye(R.shape[0])), initial=0.0))
    if err > tol:
        raise InvalidInputError(f"matrix is not orthogonal (max |R^T R - I| = {err:.3e})")
    if R.shape[0] and np.linalg.det(R) < 0:
        raise InvalidInputError("orthogonal matrix has determinant -1")
    return R
