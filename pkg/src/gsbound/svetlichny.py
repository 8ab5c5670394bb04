"""Generalized Svetlichny (GS) operators and the vector decomposition of
their expectation value.

For settings ``a_x^i`` (party ``i``, input ``x``) the minus operator is

    S^- = sum_x (-1)^floor(w(x)/2) A_{x_1} (x) ... (x) A_{x_N}

and its expectation splits as ``v0 . M u0 + v1 . M u1`` with ``M`` the
correlation matrix, ``v0``/``v1`` signed Kronecker sums over parties
1..N-2 and ``u0``/``u1`` the two-party combinations of the last pair.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import nu_sign
from .correlation import CorrelationMatrix, CorrelationTensor
from .pauli_algebra import kron, observable
from .states import DensityMatrix, StateError, dense_cap

UNIT_TOL = 1e-12
LOAD_UNIT_TOL = 1e-6
VARIANTS = ("minus", "plus")


class DimensionError(ValueError):
    """Settings, state and matrix sizes do not agree."""


def _unit(v, name: str) -> np.ndarray:
    a = np.array(v, dtype=float).reshape(-1)
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must be a finite 3-vector")
    norm = float(np.linalg.norm(a))
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} is not a unit vector (norm={norm!r})")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MeasurementSetting:
    a0: np.ndarray
    a1: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a0", _unit(self.a0, "a0"))
        object.__setattr__(self, "a1", _unit(self.a1, "a1"))

    @classmethod
    def normalized(cls, a0, a1) -> "MeasurementSetting":
        a0 = np.asarray(a0, dtype=float)
        a1 = np.asarray(a1, dtype=float)
        return cls(a0 / np.linalg.norm(a0), a1 / np.linalg.norm(a1))


@dataclass(frozen=True)
class SettingsProfile:
    parties: tuple[MeasurementSetting, ...] = field()

    def __post_init__(self):
        parties = tuple(self.parties)
        if len(parties) < 3:
            raise ValueError(f"need at least 3 parties, got {len(parties)}")
        object.__setattr__(self, "parties", parties)

    @property
    def n(self) -> int:
        return len(self.parties)

    def __len__(self):
        return len(self.parties)

    def __iter__(self):
        return iter(self.parties)

    def __getitem__(self, i) -> MeasurementSetting:
        return self.parties[i]

    @classmethod
    def from_arrays(cls, a0s, a1s) -> "SettingsProfile":
        return cls(tuple(MeasurementSetting(x, y) for x, y in zip(a0s, a1s)))

    def replace(self, index: int, setting: MeasurementSetting) -> "SettingsProfile":
        parties = list(self.parties)
        parties[index] = setting
        return SettingsProfile(tuple(parties))

    def to_dict(self) -> dict:
        return {"parties": [{"a0": p.a0.tolist(), "a1": p.a1.tolist()} for p in self.parties]}


SETTINGS_SCHEMA = {
    "type": "object",
    "properties": {
        "parties": {
            "type": "array",
            "minItems": 3,
            "items": {
                "type": "object",
                "properties": {
                    "a0": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
                    "a1": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
                },
                "required": ["a0", "a1"],
            },
        }
    },
    "required": ["parties"],
}


def settings_from_dict(doc: dict) -> SettingsProfile:
    """Load settings; vectors within 1e-6 of unit norm are renormalized."""
    import jsonschema

    from .states import SchemaError

    try:
        jsonschema.validate(doc, SETTINGS_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"settings description invalid: {exc.message}") from None
    parties = []
    for i, p in enumerate(doc["parties"], start=1):
        vecs = []
        for key in ("a0", "a1"):
            v = np.asarray(p[key], dtype=float)
            norm = float(np.linalg.norm(v))
            if abs(norm - 1.0) > LOAD_UNIT_TOL:
                raise SchemaError(f"party {i} {key} has norm {norm!r}, expected 1")
            vecs.append(v / norm)
        parties.append(MeasurementSetting(*vecs))
    return SettingsProfile(tuple(parties))


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be 'plus' or 'minus', got {variant!r}")


# -- operators ---------------------------------------------------------------


def _check_dense(n: int) -> None:
    if n > dense_cap():
        raise StateError(f"{n}-party operator exceeds dense cap {dense_cap()}")


def gs_operator_sum(settings: SettingsProfile, variant: str = "minus") -> np.ndarray:
    """Literal 2^N-term signed sum of tensor products of observables."""
    _check_variant(variant)
    n = settings.n
    _check_dense(n)
    obs = [(observable(p.a0), observable(p.a1)) for p in settings]
    d = 2**n
    S = np.zeros((d, d), dtype=complex)
    for x in itertools.product((0, 1), repeat=n):
        term = np.ones((1, 1), dtype=complex)
        for i, xi in enumerate(x):
            term = kron(term, obs[i][xi])
        S += nu_sign(sum(x), variant) * term
    return S


def gs_operator_pair(settings: SettingsProfile) -> tuple[np.ndarray, np.ndarray]:
    """(S^-, S^+) by the party-by-party recursion

    S_k^- = S_{k-1}^- A_0 + S_{k-1}^+ A_1,   S_k^+ = S_{k-1}^+ A_0 - S_{k-1}^- A_1.
    """
    n = settings.n
    _check_dense(n)
    minus = np.ones((1, 1), dtype=complex)
    plus = np.ones((1, 1), dtype=complex)
    for p in settings:
        A0, A1 = observable(p.a0), observable(p.a1)
        minus, plus = kron(minus, A0) + kron(plus, A1), kron(plus, A0) - kron(minus, A1)
    return minus, plus


def gs_operator(settings: SettingsProfile, variant: str = "minus", method: str = "recursion") -> np.ndarray:
    _check_variant(variant)
    if method == "sum":
        return gs_operator_sum(settings, variant)
    if method != "recursion":
        raise ValueError(f"method must be 'sum' or 'recursion', got {method!r}")
    minus, plus = gs_operator_pair(settings)
    return minus if variant == "minus" else plus


def map_minus_to_plus(settings: SettingsProfile) -> SettingsProfile:
    """Rewrite the last party so that <S^-> of the result equals <S^+> of the input.

    The last pair (a0, a1) becomes (-a1, a0); applying it four times is the
    identity.
    """
    last = settings[-1]
    return settings.replace(settings.n - 1, MeasurementSetting(-last.a1, last.a0))


def expectation_direct(state: DensityMatrix, settings: SettingsProfile, variant: str = "minus") -> float:
    """Tr(rho S) with the full 2^N x 2^N operator."""
    _check_variant(variant)
    if not isinstance(state, DensityMatrix):
        raise TypeError("expectation_direct needs a DensityMatrix")
    if state.n_qubits != settings.n:
        raise DimensionError(f"state has {state.n_qubits} qubits but settings have {settings.n} parties")
    if variant == "plus":
        settings = map_minus_to_plus(settings)
    S = gs_operator(settings, "minus")
    # Tr(rho S) = sum_ij rho_ij S_ji
    val = np.sum(state.matrix * S.T)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise StateError("expectation has an imaginary part; state is not Hermitian",
                         [("imaginary_residual", abs(val.imag))])
    return float(val.real)


# -- decomposition -----------------------------------------------------------


def signed_kron_sums(pairs) -> tuple[np.ndarray, np.ndarray]:
    """Floor- and ceiling-signed Kronecker sums over a sequence of direction pairs.

    Built with v0' = v0 (x) a0 + v1 (x) a1 and v1' = v1 (x) a0 - v0 (x) a1,
    starting from v0 = v1 = [1] for the empty product.
    """
    v0 = np.ones(1)
    v1 = np.ones(1)
    # np.outer(...).ravel() is the vector Kronecker product without np.kron's overhead
    for a0, a1 in pairs:
        v0, v1 = (np.outer(v0, a0) + np.outer(v1, a1)).ravel(), (np.outer(v1, a0) - np.outer(v0, a1)).ravel()
    return v0, v1


def signed_kron_sums_bruteforce(pairs) -> tuple[np.ndarray, np.ndarray]:
    """Same vectors by explicit enumeration of all 2^L input strings."""
    pairs = list(pairs)
    L = len(pairs)
    v0 = np.zeros(3**L)
    v1 = np.zeros(3**L)
    for x in itertools.product((0, 1), repeat=L):
        t = np.ones(1)
        for (a0, a1), xi in zip(pairs, x):
            t = np.kron(t, a1 if xi else a0)
        w = sum(x)
        v0 += (-1) ** (w // 2) * t
        v1 += (-1) ** (-(-w // 2)) * t
    return v0, v1


@dataclass(frozen=True)
class DecompositionVectors:
    v0: np.ndarray = field(repr=False)
    v1: np.ndarray = field(repr=False)
    u0: np.ndarray = field(repr=False)
    u1: np.ndarray = field(repr=False)
    gamma: float
    beta: float
    n_qubits: int

    @property
    def parity(self) -> str:
        return "odd" if self.n_qubits % 2 else "even"

    @property
    def alpha(self) -> float:
        """Angle between the u-norms; the even-N parametrization uses this name."""
        return self.beta

    def property_residuals(self) -> dict[str, float]:
        n = self.n_qubits
        v0, v1, u0, u1 = self.v0, self.v1, self.u0, self.u1
        res = {
            "v_norm_sum": abs(v0 @ v0 + v1 @ v1 - 2.0 ** (n - 1)),
            "u_norm_sum": abs(u0 @ u0 + u1 @ u1 - 4.0),
            "v_orthogonal": abs(v0 @ v1),
            "u_orthogonal": abs(u0 @ u1),
        }
        if n % 2 == 0:
            res["v0_norm_even"] = abs(v0 @ v0 - 2.0 ** (n - 2))
            res["v1_norm_even"] = abs(v1 @ v1 - 2.0 ** (n - 2))
        return res


def decomposition_vectors(settings: SettingsProfile, variant: str = "minus") -> DecompositionVectors:
    """v0, v1, u0, u1 and their norm angles for the minus operator.

    ``variant="plus"`` decomposes the mapped settings, whose minus
    expectation equals the plus expectation of the input.
    """
    _check_variant(variant)
    if variant == "plus":
        settings = map_minus_to_plus(settings)
    n = settings.n
    v0, v1 = signed_kron_sums((p.a0, p.a1) for p in settings.parties[:-2])
    c, d = settings[-2], settings[-1]
    u0 = np.kron(c.a0, d.a0) - np.kron(c.a1, d.a1)
    u1 = np.kron(c.a0, d.a1) + np.kron(c.a1, d.a0)
    gamma = math.atan2(float(np.linalg.norm(v1)), float(np.linalg.norm(v0)))
    beta = math.atan2(float(np.linalg.norm(u1)), float(np.linalg.norm(u0)))
    return DecompositionVectors(v0, v1, u0, u1, gamma, beta, n)


def v_overlap_closed_form(settings: SettingsProfile) -> float:
    """Exact v0 . v1 for the first N-2 parties.

    Only complementary input strings survive the pair sum, and each carries
    the sign (-1)^(L/2) when L = N-2 is even, so
    v0 . v1 = (-1)^(L/2) 2^L prod_i (a0^i . a1^i). For odd L the two
    parity classes cancel and the overlap is zero. It therefore vanishes
    for even N only when some party measures orthogonal directions.
    """
    L = settings.n - 2
    if L % 2:
        return 0.0
    c = math.prod(float(p.a0 @ p.a1) for p in settings.parties[:L])
    return (-1) ** (L // 2) * 2.0**L * c


def expectation_via_decomposition(m: CorrelationMatrix, settings: SettingsProfile, variant: str = "minus") -> float:
    """<S> as v0 . M u0 + v1 . M u1."""
    if m.n_qubits != settings.n:
        raise DimensionError(f"matrix is for {m.n_qubits} qubits but settings have {settings.n} parties")
    dv = decomposition_vectors(settings, variant)
    M = m.entries
    return float(dv.v0 @ M @ dv.u0 + dv.v1 @ M @ dv.u1)


def expectation_from_tensor(tensor: CorrelationTensor, settings: SettingsProfile, variant: str = "minus") -> float:
    """<S> as the full contraction of the tensor with the N-party floor sum."""
    if tensor.n_qubits != settings.n:
        raise DimensionError(f"tensor is for {tensor.n_qubits} qubits but settings have {settings.n} parties")
    _check_variant(variant)
    v0, v1 = signed_kron_sums((p.a0, p.a1) for p in settings)
    return float(tensor.values.reshape(-1) @ (v0 if variant == "minus" else v1))


def load_settings(path) -> SettingsProfile:
    with open(path) as fh:
        return settings_from_dict(json.load(fh))
