"""Upper bounds on max |<S_N^->| from the correlation matrix, tightness
certificates for given settings, and closed forms for the noisy GHZ family.

Odd N:  bound = 2^((N+1)/2) * s1
Even N: bound = 2^(N/2) * sqrt(s1^2 + s2^2)

where s1 >= s2 are the largest singular values of the 3^(N-2) x 9
correlation matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .correlation import CorrelationMatrix, correlation_matrix
from .pauli_algebra import jacobi_svd_9
from .svetlichny import SettingsProfile, MeasurementSetting, decomposition_vectors

DEGENERACY_TOL = 1e-8
CERT_TOL = 1e-7
ZERO_NORM = 1e-12
VIOLATION_MARGIN = 1e-8
CLASSICAL_SLACK = 1e-9


def classical_bound(n: int) -> float:
    """Largest |<S_N>| reachable by hybrid local/non-local models."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return float(2 ** (n - 1))


def quantum_maximum(n: int) -> float:
    return 2 ** (n - 1) * math.sqrt(2)


@dataclass(frozen=True)
class BoundReport:
    n_qubits: int
    singular_values: np.ndarray = field(repr=False)
    bound: float
    classical_bound: float

    @property
    def parity(self) -> str:
        return "odd" if self.n_qubits % 2 else "even"

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0])

    @property
    def lambda1(self) -> float:
        return float(self.singular_values[0] ** 2)

    @property
    def lambda2(self) -> float:
        return float(self.singular_values[1] ** 2)

    @property
    def violation_possible(self) -> bool:
        return self.bound > self.classical_bound + CLASSICAL_SLACK

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "parity": self.parity,
            "sigma": [float(s) for s in self.singular_values],
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "bound": self.bound,
            "classical_bound": self.classical_bound,
            "violation_possible": self.violation_possible,
        }


def bound_from_singular_values(n: int, s) -> float:
    if n % 2:
        return 2 ** ((n + 1) / 2) * float(s[0])
    return 2 ** (n / 2) * math.sqrt(float(s[0]) ** 2 + float(s[1]) ** 2)


def gs_upper_bound(m: CorrelationMatrix) -> BoundReport:
    n = m.n_qubits
    if n < 3:
        raise ValueError("bound needs N >= 3")
    s = jacobi_svd_9(m.entries)[0]
    return BoundReport(n, s, bound_from_singular_values(n, s), classical_bound(n))


def state_bound(state) -> BoundReport:
    return gs_upper_bound(correlation_matrix(state))


# -- tightness certificates --------------------------------------------------


@dataclass
class TightnessCertificate:
    parity: str
    conditions: list[tuple[str, float, bool]]
    achieved_value: float
    bound: float
    notes: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return all(ok for _, _, ok in self.conditions)

    @property
    def residuals(self) -> dict[str, float]:
        return {name: r for name, r, _ in self.conditions}

    def to_dict(self) -> dict:
        return {
            "parity": self.parity,
            "certified": self.certified,
            "achieved": self.achieved_value,
            "bound": self.bound,
            "residuals": self.residuals,
            "passed": {name: ok for name, _, ok in self.conditions},
            "notes": list(self.notes),
        }


def _unit_or_none(v: np.ndarray):
    nv = float(np.linalg.norm(v))
    return (v / nv, nv) if nv > ZERO_NORM else (None, nv)


def _check(name: str, residual: float, tol: float = CERT_TOL) -> tuple[str, float, bool]:
    return (name, float(residual), bool(residual <= tol))


def _zero_matrix_certificate(parity: str) -> TightnessCertificate:
    return TightnessCertificate(
        parity, [("zero_matrix", 0.0, True)], 0.0, 0.0,
        ["correlation matrix vanishes; every setting attains the bound 0"],
    )


def tightness_certificate_odd(m: CorrelationMatrix, settings: SettingsProfile) -> TightnessCertificate:
    """Check the odd-N saturation conditions for a concrete settings profile.

    Conditions: the top singular value is degenerate, (v_k, u_k) are singular
    pairs of M for it (up to one common sign), and the two norm angles agree.
    """
    n = m.n_qubits
    if n % 2 == 0:
        raise ValueError("odd-N certificate requested for even N")
    if settings.n != n:
        raise ValueError(f"settings have {settings.n} parties, matrix is for {n} qubits")
    M = m.entries
    s = jacobi_svd_9(M)[0]
    sigma = float(s[0])
    bound = bound_from_singular_values(n, s)
    if sigma == 0.0:
        return _zero_matrix_certificate("odd")

    dv = decomposition_vectors(settings)
    achieved = float(dv.v0 @ M @ dv.u0 + dv.v1 @ M @ dv.u1)
    sign = 1.0 if achieved >= 0 else -1.0
    conditions = [_check("degeneracy", (s[0] - s[1]) / sigma, DEGENERACY_TOL)]
    notes = []
    for k, (v, u) in enumerate(((dv.v0, dv.u0), (dv.v1, dv.u1))):
        vh, _ = _unit_or_none(v)
        uh, _ = _unit_or_none(u)
        if vh is None or uh is None:
            notes.append(f"pair {k} has a zero vector; its term vanishes")
            conditions.append(_check(f"singular_pair_{k}", 0.0))
            continue
        r = max(
            float(np.linalg.norm(M @ uh - sign * sigma * vh)),
            float(np.linalg.norm(M.T @ vh - sign * sigma * uh)),
        )
        conditions.append(_check(f"singular_pair_{k}", r))
    conditions.append(_check("angle_gamma_beta", abs(dv.gamma - dv.beta)))
    conditions.append(_check("bound_attained", abs(bound - abs(achieved))))
    return TightnessCertificate("odd", conditions, achieved, bound, notes)


def tightness_certificate_even(m: CorrelationMatrix, settings: SettingsProfile) -> TightnessCertificate:
    """Check the even-N saturation conditions for a concrete settings profile.

    v_k must point along M u_k, the u-angle must satisfy
    tan(alpha) = |M u1| / |M u0|, and u_0, u_1 must span the top two
    eigendirections of M^T M.
    """
    n = m.n_qubits
    if n % 2:
        raise ValueError("even-N certificate requested for odd N")
    if settings.n != n:
        raise ValueError(f"settings have {settings.n} parties, matrix is for {n} qubits")
    M = m.entries
    s = jacobi_svd_9(M)[0]
    bound = bound_from_singular_values(n, s)
    if s[0] == 0.0:
        return _zero_matrix_certificate("even")

    dv = decomposition_vectors(settings)
    achieved = float(dv.v0 @ M @ dv.u0 + dv.v1 @ M @ dv.u1)
    sign = 1.0 if achieved >= 0 else -1.0
    G = M.T @ M
    lam = s[:2] ** 2
    conditions = []
    notes = []
    images = []
    units = []
    for k, (v, u) in enumerate(((dv.v0, dv.u0), (dv.v1, dv.u1))):
        uh, _ = _unit_or_none(u)
        vh, _ = _unit_or_none(v)
        units.append(uh)
        if uh is None:
            notes.append(f"u{k} vanishes; direction not certifiable")
            conditions.append((f"parallel_v{k}", math.inf, False))
            images.append(0.0)
            continue
        w = M @ uh
        wh, wn = _unit_or_none(w)
        images.append(wn)
        if wh is None or vh is None:
            notes.append(f"M u{k} vanishes; direction not certifiable")
            conditions.append((f"parallel_v{k}", math.inf, False))
            continue
        conditions.append(_check(f"parallel_v{k}", float(np.linalg.norm(vh - sign * wh))))

    conditions.append(_check("angle_alpha", abs(dv.alpha - math.atan2(images[1], images[0]))))

    if units[0] is not None and units[1] is not None:
        for k, uh in enumerate(units):
            rq = float(uh @ G @ uh)
            conditions.append(_check(f"eigvec_u{k}", float(np.linalg.norm(G @ uh - rq * uh))))
        top = float(units[0] @ G @ units[0] + units[1] @ G @ units[1])
        conditions.append(_check("top_two_eigenvalues", abs(top - float(lam.sum()))))
    conditions.append(_check("bound_attained", abs(bound - abs(achieved))))
    return TightnessCertificate("even", conditions, achieved, bound, notes)


def tightness_certificate(m: CorrelationMatrix, settings: SettingsProfile) -> TightnessCertificate:
    if m.n_qubits % 2:
        return tightness_certificate_odd(m, settings)
    return tightness_certificate_even(m, settings)


# -- noisy generalized GHZ closed forms --------------------------------------


def corollary_optimal_settings(n: int) -> SettingsProfile:
    """x-y plane settings saturating the bound on the noisy GHZ family."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    r = 1 / math.sqrt(2)
    first = MeasurementSetting([-r, -r, 0.0], [r, -r, 0.0])
    middle = MeasurementSetting([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    last = MeasurementSetting([0.0, 1.0, 0.0], [-1.0, 0.0, 0.0])
    return SettingsProfile((first,) + (middle,) * (n - 2) + (last,))


def corollary_singular_values(n: int, theta: float, p: float) -> np.ndarray:
    """Closed-form descending singular values (all nine) of the noisy GHZ matrix."""
    s2 = math.sin(2 * theta)
    pair = 2 ** ((n - 2) / 2) * p * abs(s2)
    third = p * math.sqrt(max(0.0, 1.0 - s2 * s2)) if n % 2 else p
    vals = np.zeros(9)
    vals[:3] = (pair, pair, third)
    return np.sort(vals)[::-1]


def corollary_ghz_report(n: int, theta: float, p: float) -> dict:
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    s2 = math.sin(2 * theta)
    sv = corollary_singular_values(n, theta, p)
    pair = 2 ** ((n - 2) / 2) * p * abs(s2)
    third = p * math.sqrt(max(0.0, 1.0 - s2 * s2)) if n % 2 else p
    tight = pair >= third - 1e-12 * max(pair, third, 1.0)
    threshold = 1.0 / 2 ** (n - 2)
    if n % 2:
        doubled = s2**2 >= threshold * math.cos(2 * theta) ** 2
        printed = math.tan(theta) ** 2 >= threshold
        doubled_form, printed_form = "tan^2(2 theta) >= 1/2^(N-2)", "tan^2(theta) >= 1/2^(N-2)"
    else:
        doubled = s2**2 >= threshold
        printed = math.sin(theta) ** 2 >= threshold
        doubled_form, printed_form = "sin^2(2 theta) >= 1/2^(N-2)", "sin^2(theta) >= 1/2^(N-2)"
    return {
        "n": n,
        "theta": theta,
        "p": p,
        "singular_values": [float(x) for x in sv],
        "bound": bound_from_singular_values(n, sv),
        "classical_bound": classical_bound(n),
        "tight_region": bool(tight),
        "max_value_if_tight": 2 ** (n - 1) * math.sqrt(2) * p * abs(s2),
        "violation_threshold_met": bool(math.sqrt(2) * p * abs(s2) > 1.0),
        "region_doubled_angle": {"condition": doubled_form, "holds": bool(doubled)},
        "region_as_printed": {"condition": printed_form, "holds": bool(printed)},
    }


# -- verdicts ----------------------------------------------------------------


def violation_verdict(state, restarts: int = 16, seed: int = 0, settings: SettingsProfile | None = None) -> dict:
    """Decide whether the state can violate the classical GS limit.

    ``cannot_violate`` comes from the bound alone; ``violates`` needs an
    explicit settings profile beating 2^(N-1). Candidates are the given
    settings, the x-y plane GHZ settings and the see-saw optimum.
    """
    from .optimizer import maximize_expectation
    from .svetlichny import expectation_via_decomposition

    m = correlation_matrix(state)
    report = gs_upper_bound(m)
    evidence = {"bound": report.bound, "classical_bound": report.classical_bound}
    if not report.violation_possible:
        return {"verdict": "cannot_violate", "evidence": evidence}

    candidates = []
    if settings is not None:
        candidates.append(("given", settings))
    candidates.append(("ghz_xy_plane", corollary_optimal_settings(m.n_qubits)))
    best_src, best_val, best_settings = None, -math.inf, None
    for src, st in candidates:
        val = abs(expectation_via_decomposition(m, st))
        if val > best_val:
            best_src, best_val, best_settings = src, val, st
    if best_val <= report.classical_bound + VIOLATION_MARGIN:
        opt = maximize_expectation(state, restarts=restarts, seed=seed)
        if opt.best_value > best_val:
            best_src, best_val, best_settings = "seesaw", opt.best_value, opt.best_settings

    evidence.update({"best_value": best_val, "source": best_src, "settings": best_settings.to_dict()})
    if best_val > report.classical_bound + VIOLATION_MARGIN:
        return {"verdict": "violates", "evidence": evidence}
    return {"verdict": "inconclusive", "evidence": evidence}
