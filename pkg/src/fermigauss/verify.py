"""Seeded randomized property suite behind the ``verify`` command.

Each property maps a trial RNG to a residual; the property passes when the
worst residual over all trials is within its tolerance.  Trial generators are
seeded from ``SeedSequence([seed, property_index, trial])`` so results do not
depend on execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dense
from .channel import adjoint, apply, compose, validate_cp, validate_unital
from .fidelity import fidelity, monotonicity_margin, overlap
from .linalg import canonical_decompose, pfaffian, williamson_values
from .models import dilation_channel, random_channel, random_dilation, random_special_orthogonal, random_state
from .recovery import petz, petz_via_composition, rotated_petz
from .state import QuadraticHamiltonian, power_rotation, sqrt_state_spectrum, state_from_hamiltonian


@dataclass(frozen=True)
class Property:
    name: str
    check: Callable[[np.random.Generator, int], float]
    tol: float
    dense: bool = False


@dataclass(frozen=True)
class Outcome:
    name: str
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict}  {self.name:<34} worst={self.worst:.3e}  tol={self.tol:.1e}"


def _seed(rng) -> int:
    return int(rng.integers(2**63))


def _antisym(rng, dim):
    M = rng.standard_normal((dim, dim))
    return M - M.T


def _cptp_excess(ch) -> float:
    excess = max(0.0, validate_cp(ch).max_singular_value - 1.0)
    return excess + abs(ch.C - 1.0) + float(np.max(np.abs(ch.D), initial=0.0))


def _reconstruction(rng, n):
    M = _antisym(rng, 2 * n)
    return float(np.max(np.abs(canonical_decompose(M).reconstruct() - M)))


def _pfaffian_det(rng, n):
    M = _antisym(rng, 2 * n)
    det = np.linalg.det(M)
    return abs(pfaffian(M) ** 2 - det) / max(abs(det), 1e-300)


def _thermal_spectrum(rng, n):
    M = _antisym(rng, 2 * n)
    beta = rng.uniform(0.1, 2.0)
    lam = state_from_hamiltonian(QuadraticHamiltonian(M, beta)).williamson
    return float(np.max(np.abs(lam - np.sort(np.tanh(beta * williamson_values(M)))[::-1])))


def _rotation_group(rng, n):
    G = random_state(_seed(rng), n)
    s, t = rng.uniform(-2, 2, size=2)
    return float(np.max(np.abs(power_rotation(G, s) @ power_rotation(G, t) - power_rotation(G, s + t))))


def _sqrt_roundtrip(rng, n):
    lam = rng.uniform(0, 1)
    r = sqrt_state_spectrum(lam)
    return abs(2 * r / (1 + r * r) - lam)


def _compose_closure(rng, n):
    c1, c2 = random_channel(_seed(rng), n, 1), random_channel(_seed(rng), n, 2)
    return _cptp_excess(compose(c2, c1))


def _compose_assoc(rng, n):
    c1, c2, c3 = (random_channel(_seed(rng), n, 1) for _ in range(3))
    G = random_state(_seed(rng), n)
    left = apply(compose(c3, compose(c2, c1)), G).G
    right = apply(compose(compose(c3, c2), c1), G).G
    return float(np.max(np.abs(left - right)))


def _adjoint_unital(rng, n):
    ch = adjoint(random_channel(_seed(rng), n, 1))
    return 0.0 if validate_unital(ch) else float(np.max(np.abs(ch.A)))


def _petz_recovery(rng, n):
    sigma = random_state(_seed(rng), n)
    ch = random_channel(_seed(rng), n, int(rng.integers(1, 3)))
    return float(np.max(np.abs(apply(petz(sigma, ch), apply(ch, sigma)).G - sigma.G)))


def _petz_cptp(rng, n):
    sigma = random_state(_seed(rng), n)
    return _cptp_excess(petz(sigma, random_channel(_seed(rng), n, 1)))


def _two_path(rng, n):
    sigma = random_state(_seed(rng), n)
    ch = random_channel(_seed(rng), n, 1)
    a, b = petz(sigma, ch), petz_via_composition(sigma, ch)
    return float(max(np.max(np.abs(a.A - b.A)), np.max(np.abs(a.B - b.B)), np.max(np.abs(b.D))))


def _rotated(rng, n):
    sigma = random_state(_seed(rng), n)
    ch = random_channel(_seed(rng), n, 1)
    R = rotated_petz(sigma, ch, rng.uniform(-3, 3))
    rec = float(np.max(np.abs(apply(R, apply(ch, sigma)).G - sigma.G)))
    return rec + _cptp_excess(R)


def _fidelity_symmetry(rng, n):
    a, b = random_state(_seed(rng), n), random_state(_seed(rng), n)
    return abs(fidelity(a, b) - fidelity(b, a))


def _fidelity_range(rng, n):
    a, b = random_state(_seed(rng), n), random_state(_seed(rng), n)
    f = fidelity(a, b)
    return max(0.0, -f, f - 1.0)


def _fidelity_unitary(rng, n):
    a, b = random_state(_seed(rng), n), random_state(_seed(rng), n)
    R = random_special_orthogonal(rng, 2 * n)
    return abs(fidelity(R @ a.G @ R.T, R @ b.G @ R.T) - fidelity(a, b))


def _fidelity_monotone(rng, n):
    a, b = random_state(_seed(rng), n), random_state(_seed(rng), n)
    return max(0.0, -monotonicity_margin(a, b, random_channel(_seed(rng), n, 1)))


def _dense_roundtrip(rng, n):
    G = random_state(_seed(rng), n)
    return float(np.max(np.abs(dense.dense_covariance_of(dense.dense_state_from_covariance(G)) - G.G)))


def _dense_channel(rng, n):
    d = random_dilation(_seed(rng), n, 1)
    G = random_state(_seed(rng), n)
    out = dense.dense_channel(d)(dense.dense_state_from_covariance(G))
    return float(np.max(np.abs(dense.dense_covariance_of(out) - apply(dilation_channel(d), G).G)))


def _dense_petz(rng, n):
    d = random_dilation(_seed(rng), n, 1)
    ch, S = dilation_channel(d), dense.dense_channel(d)
    sigma, rho = random_state(_seed(rng), n), random_state(_seed(rng), n)
    P = dense.dense_petz(dense.dense_state_from_covariance(sigma), S)
    out = dense.dense_covariance_of(P(S(dense.dense_state_from_covariance(rho))))
    return float(np.max(np.abs(out - apply(petz(sigma, ch), apply(ch, rho)).G)))


def _dense_fidelity(rng, n):
    a, b = random_state(_seed(rng), n), random_state(_seed(rng), n)
    da, db = dense.dense_state_from_covariance(a), dense.dense_state_from_covariance(b)
    return abs(fidelity(a, b) - dense.dense_fidelity(da, db))


def _dense_overlap(rng, n):
    a, b = random_state(_seed(rng), n), random_state(_seed(rng), n)
    da, db = dense.dense_state_from_covariance(a), dense.dense_state_from_covariance(b)
    return abs(overlap(a, b) - dense.dense_overlap(da, db))


def _overlap_bound(rng, n):
    a, b = random_state(_seed(rng), n), random_state(_seed(rng), n)
    return max(0.0, overlap(a, b) - fidelity(a, b) ** 2)


def _dense_adjoint(rng, n):
    S = dense.dense_channel(random_dilation(_seed(rng), n, 1))
    d = 2**n
    X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Y = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    lhs = np.vdot(X, S(Y))
    rhs = np.vdot(S.adjoint()(X), Y)
    return float(abs(lhs - rhs))


def _dense_entropy(rng, n):
    S = dense.dense_channel(random_dilation(_seed(rng), n, 1))
    a = dense.dense_state_from_covariance(random_state(_seed(rng), n))
    b = dense.dense_state_from_covariance(random_state(_seed(rng), n))
    margin = dense.dense_relative_entropy(a, b) - dense.dense_relative_entropy(S(a), S(b))
    return max(0.0, -margin)


PROPERTIES = (
    Property("canonical reconstruction", _reconstruction, 1e-9),
    Property("pfaffian^2 = det (relative)", _pfaffian_det, 1e-8),
    Property("thermal Williamson values", _thermal_spectrum, 1e-10),
    Property("power rotation group law", _rotation_group, 1e-9),
    Property("sqrt spectrum roundtrip", _sqrt_roundtrip, 1e-12),
    Property("CPTP closure under compose", _compose_closure, 1e-10),
    Property("compose associativity", _compose_assoc, 1e-8),
    Property("adjoint is unital", _adjoint_unital, 1e-12),
    Property("petz recovers sigma", _petz_recovery, 1e-11),
    Property("petz is CPTP", _petz_cptp, 1e-10),
    Property("petz two-path agreement", _two_path, 1e-7),
    Property("rotated petz recovers, CPTP", _rotated, 1e-9),
    Property("fidelity symmetry", _fidelity_symmetry, 1e-10),
    Property("fidelity range", _fidelity_range, 1e-10),
    Property("fidelity unitary invariance", _fidelity_unitary, 1e-9),
    Property("fidelity monotonicity", _fidelity_monotone, 1e-9),
    Property("overlap <= fidelity^2", _overlap_bound, 1e-9),
    Property("dense covariance roundtrip", _dense_roundtrip, 1e-9, dense=True),
    Property("dense channel vs covariance", _dense_channel, 1e-9, dense=True),
    Property("dense petz vs covariance", _dense_petz, 1e-8, dense=True),
    Property("dense fidelity", _dense_fidelity, 1e-9, dense=True),
    Property("dense overlap", _dense_overlap, 1e-10, dense=True),
    Property("dense adjoint pairing", _dense_adjoint, 1e-9, dense=True),
    Property("dense relative-entropy monotone", _dense_entropy, 1e-8, dense=True),
)


def trial_rng(seed: int, index: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index, trial]))


def run_suite(seed: int, n: int, trials: int, *, use_dense: bool = False,
              tol: float | None = None) -> list[Outcome]:
    """Run every property ``trials`` times at ``n`` modes.

    Args:
        seed: master seed.
        n: mode count; dense properties need ``n + 1 <= 5``.
        trials: repetitions per property.
        use_dense: include the exponential-cost dense-oracle properties.
        tol: if given, replaces every property's own tolerance.
    """
    outcomes = []
    for index, prop in enumerate(PROPERTIES):
        if prop.dense and not use_dense:
            continue
        worst = 0.0
        for trial in range(trials):
            r = prop.check(trial_rng(seed, index, trial), n)
            worst = max(worst, r) if not math.isnan(r) else math.inf
        outcomes.append(Outcome(prop.name, worst, prop.tol if tol is None else tol))
    return outcomes

