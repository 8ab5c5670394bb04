"""See-saw maximization of <S_N> over measurement directions.

The expectation is linear in each party's pair of directions:
<S> = a0 . g0 + a1 . g1, with g0, g1 the contraction of the correlation
tensor with every other party's signed Kronecker sums. Each update picks
a_x = g_x / |g_x|, which is the exact maximizer over the unit sphere, so the
objective never decreases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import gs_upper_bound
from .correlation import CorrelationTensor, correlation_tensor, matrix_from_tensor
from .svetlichny import (
    MeasurementSetting,
    SettingsProfile,
    _check_variant,
    expectation_from_tensor,
    signed_kron_sums,
)

STALL_NORM = 1e-14
DEFAULT_RESTARTS = 32
DEFAULT_TOL = 1e-10
MAX_SWEEPS = 500


@dataclass(frozen=True)
class PartyUpdate:
    setting: MeasurementSetting
    value: float
    stalled: bool


@dataclass(frozen=True)
class OptimizationResult:
    best_value: float
    best_settings: SettingsProfile
    restarts_used: int
    iterations_total: int
    converged: bool
    bound: float

    @property
    def gap_to_bound(self) -> float:
        return self.bound - self.best_value

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "bound": self.bound,
            "gap_to_bound": self.gap_to_bound,
            "restarts_used": self.restarts_used,
            "iterations_total": self.iterations_total,
            "converged": self.converged,
            "best_settings": self.best_settings.to_dict(),
        }


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    # Philox is counter-based; (seed, stream) pins every restart independently
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def _random_unit_vectors(rng: np.random.Generator, count: int) -> np.ndarray:
    v = rng.standard_normal((count, 3))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    # a zero draw has probability zero; redraw defensively anyway
    while np.any(norms == 0):
        bad = norms[:, 0] == 0
        v[bad] = rng.standard_normal((int(bad.sum()), 3))
        norms = np.linalg.norm(v, axis=1, keepdims=True)
    return v / norms


def random_settings(n: int, seed: int, stream: int = 0) -> SettingsProfile:
    """2n independent uniformly distributed directions, reproducible from ``seed``."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    v = _random_unit_vectors(_rng(seed, stream), 2 * n)
    return SettingsProfile.from_arrays(v[0::2], v[1::2])


def _gradients(values: np.ndarray, A0: np.ndarray, A1: np.ndarray, party: int,
               variant: str) -> tuple[np.ndarray, np.ndarray]:
    n = values.ndim
    others = [(A0[i], A1[i]) for i in range(n) if i != party]
    V0, V1 = signed_kron_sums(others)
    T = np.moveaxis(values, party, -1).reshape(3 ** (n - 1), 3)
    t0, t1 = V0 @ T, V1 @ T
    if variant == "minus":
        return t0, t1
    return t1, -t0


def party_gradients(tensor: CorrelationTensor, settings: SettingsProfile, party: int,
                    variant: str = "minus") -> tuple[np.ndarray, np.ndarray]:
    """(g0, g1) with <S> = a0 . g0 + a1 . g1 for the 0-based ``party``.

    With the other parties' floor/ceiling sums V0, V1 (in party order, the
    updated party removed): minus gives g0 = T.V0, g1 = T.V1 and plus gives
    g0 = T.V1, g1 = -T.V0.
    """
    A0 = np.array([p.a0 for p in settings])
    A1 = np.array([p.a1 for p in settings])
    return _gradients(tensor.values, A0, A1, party, variant)


def seesaw_update(tensor: CorrelationTensor, settings: SettingsProfile, party: int,
                  variant: str = "minus") -> PartyUpdate:
    """Optimal directions for one party with all others held fixed.

    ``party`` is 1-based. A vanishing gradient keeps the previous direction
    and flags the step as stalled.
    """
    _check_variant(variant)
    n = tensor.n_qubits
    if settings.n != n:
        raise ValueError(f"settings have {settings.n} parties, tensor has {n} qubits")
    if not 1 <= party <= n:
        raise ValueError(f"party must be in 1..{n}, got {party}")
    idx = party - 1
    g0, g1 = party_gradients(tensor, settings, idx, variant)
    old = settings[idx]
    n0, n1 = float(np.linalg.norm(g0)), float(np.linalg.norm(g1))
    stalled = False
    if n0 < STALL_NORM:
        a0, stalled = old.a0, True
    else:
        a0 = g0 / n0
    if n1 < STALL_NORM:
        a1, stalled = old.a1, True
    else:
        a1 = g1 / n1
    setting = MeasurementSetting.normalized(a0, a1)
    value = float(setting.a0 @ g0 + setting.a1 @ g1)
    return PartyUpdate(setting, value, stalled)


def _run_restart(tensor, settings, variant, tol):
    # plain arrays in the inner loop; unit norms are re-checked on the way out
    values = tensor.values
    n = tensor.n_qubits
    A0 = np.array([p.a0 for p in settings])
    A1 = np.array([p.a1 for p in settings])
    value = expectation_from_tensor(tensor, settings, variant)
    done, sweep = False, 0
    for sweep in range(1, MAX_SWEEPS + 1):
        before = value
        for i in range(n):
            g0, g1 = _gradients(values, A0, A1, i, variant)
            n0, n1 = np.linalg.norm(g0), np.linalg.norm(g1)
            if n0 >= STALL_NORM:
                A0[i] = g0 / n0
            if n1 >= STALL_NORM:
                A1[i] = g1 / n1
            value = float(A0[i] @ g0 + A1[i] @ g1)
        if value - before < tol:
            done = True
            break
    best = SettingsProfile(tuple(MeasurementSetting.normalized(a, b) for a, b in zip(A0, A1)))
    return value, best, sweep, done


def maximize_expectation(state, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                         tol: float = DEFAULT_TOL, variant: str = "minus",
                         initial: SettingsProfile | None = None) -> OptimizationResult:
    """Best |<S>| found by see-saw over ``restarts`` random starts.

    ``state`` may also be a precomputed :class:`CorrelationTensor`. An
    ``initial`` profile, when given, is tried as an extra first restart.
    """
    _check_variant(variant)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    tensor = state if isinstance(state, CorrelationTensor) else correlation_tensor(state)
    n = tensor.n_qubits
    bound = gs_upper_bound(matrix_from_tensor(tensor)).bound

    starts = [] if initial is None else [initial]
    starts += [random_settings(n, seed, r) for r in range(restarts)]

    best_value, best_settings = -math.inf, starts[0]
    total = 0
    converged = False
    for start in starts:
        value, settings, sweeps, ok = _run_restart(tensor, start, variant, tol)
        total += sweeps
        converged = converged or ok
        # strict '>' keeps the lowest restart index on ties
        if value > best_value:
            best_value, best_settings = value, settings
    return OptimizationResult(float(best_value), best_settings, len(starts), total, converged, bound)
