"""N-qubit states: GHZ family constructors, noisy mixtures and validation.

Qubit 1 is the most significant bit of a computational-basis index, so
``|1...1>`` sits at index ``2**n - 1`` and tensor factors are ordered
party 1 first.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

MIN_QUBITS = 3
DEFAULT_DENSE_CAP = 10
DEFAULT_PURE_CAP = 12

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9


def dense_cap() -> int:
    """Largest qubit count for 2^N x 2^N matrices (env ``GSBOUND_DENSE_CAP``)."""
    raw = os.environ.get("GSBOUND_DENSE_CAP")
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"GSBOUND_DENSE_CAP must be an integer, got {raw!r}") from None


def pure_cap() -> int:
    raw = os.environ.get("GSBOUND_PURE_CAP")
    return DEFAULT_PURE_CAP if raw is None else int(raw)


class StateError(ValueError):
    """Raised when a state fails a structural or physical invariant.

    ``failures`` is a list of ``(invariant, residual)`` pairs.
    """

    def __init__(self, message: str, failures: list[tuple[str, float]] | None = None):
        super().__init__(message)
        self.failures = list(failures or [])

    def report(self) -> dict:
        return {"error": str(self), "failures": {k: v for k, v in self.failures}}


def _check_n(n: int, cap: int, what: str) -> None:
    if not isinstance(n, (int, np.integer)) or n < MIN_QUBITS:
        raise StateError(f"{what} needs at least {MIN_QUBITS} qubits, got {n!r}")
    if n > cap:
        raise StateError(f"{what} with {n} qubits exceeds cap {cap}")


def _qubits_from_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise StateError(f"dimension {dim} is not a power of two", [("power_of_two", float(dim))])
    return n


@dataclass(frozen=True)
class PureState:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.n_qubits:
            raise StateError(
                f"{amps.size} amplitudes do not match {self.n_qubits} qubits"
            )
        if not np.all(np.isfinite(amps)):
            raise StateError("amplitudes contain non-finite values")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError("state is not normalized", [("norm", abs(norm - 1.0))])
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class DensityMatrix:
    n_qubits: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2**self.n_qubits, 2**self.n_qubits):
            raise StateError(f"matrix shape {m.shape} does not match {self.n_qubits} qubits")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def ghz(n: int) -> PureState:
    return generalized_ghz(n, math.pi / 4)


def generalized_ghz(n: int, theta: float) -> PureState:
    """cos(theta)|0...0> + sin(theta)|1...1>."""
    _check_n(n, pure_cap(), "pure state")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = math.cos(theta)
    amps[-1] = math.sin(theta)
    return PureState(n, amps)


def random_pure_state(n: int, rng: np.random.Generator) -> PureState:
    _check_n(n, pure_cap(), "pure state")
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return PureState(n, v / np.linalg.norm(v))


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed mixed state of the given rank (full rank by default)."""
    _check_n(n, dense_cap(), "density matrix")
    d = 2**n
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(n, rho / np.trace(rho).real)


def density_from_pure(psi: PureState) -> DensityMatrix:
    _check_n(psi.n_qubits, dense_cap(), "density matrix")
    a = psi.amplitudes
    return DensityMatrix(psi.n_qubits, np.outer(a, a.conj()))


def noisy_mixture(psi: PureState, p: float) -> DensityMatrix:
    """p |psi><psi| + (1 - p) I / 2^N."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"mixing probability must lie in [0, 1], got {p!r}", [("p", float(p))])
    _check_n(psi.n_qubits, dense_cap(), "density matrix")
    d = 2**psi.n_qubits
    a = psi.amplitudes
    rho = p * np.outer(a, a.conj()) + (1.0 - p) / d * np.eye(d)
    return validate(rho)


def noisy_ghz(n: int, theta: float, p: float) -> DensityMatrix:
    return noisy_mixture(generalized_ghz(n, theta), p)


def maximally_mixed(n: int) -> DensityMatrix:
    _check_n(n, dense_cap(), "density matrix")
    d = 2**n
    return DensityMatrix(n, np.eye(d, dtype=complex) / d)


def validate(rho) -> DensityMatrix:
    """Check a candidate matrix and wrap it as a :class:`DensityMatrix`.

    Every violated invariant is collected before raising, so the error lists
    all residuals at once.
    """
    m = np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StateError(f"density matrix must be square, got shape {m.shape}")
    n = _qubits_from_dim(m.shape[0])
    _check_n(n, dense_cap(), "density matrix")
    if not np.all(np.isfinite(m)):
        raise StateError("matrix has non-finite entries")

    failures = []
    herm = float(np.max(np.abs(m - m.conj().T)))
    if herm > HERMITIAN_TOL:
        failures.append(("hermitian", herm))
    tr = abs(complex(np.trace(m)) - 1.0)
    if tr > TRACE_TOL:
        failures.append(("trace", tr))
    min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    if min_eig < PSD_TOL:
        failures.append(("positive_semidefinite", min_eig))
    if failures:
        names = ", ".join(k for k, _ in failures)
        raise StateError(f"not a valid density matrix ({names})", failures)
    return DensityMatrix(n, m)


# -- JSON state descriptions -------------------------------------------------

STATE_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "type": {"const": "noisy_ghz"},
                "n": {"type": "integer"},
                "theta": {"type": "number"},
                "p": {"type": "number"},
            },
            "required": ["type", "n", "theta", "p"],
        },
        {
            "type": "object",
            "properties": {"type": {"const": "ghz"}, "n": {"type": "integer"}},
            "required": ["type", "n"],
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "pure"},
                "amplitudes": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                },
            },
            "required": ["type", "amplitudes"],
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "dense"},
                "matrix": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                    },
                },
            },
            "required": ["type", "matrix"],
        },
    ]
}


class SchemaError(ValueError):
    """Input document does not match the expected JSON layout."""


def _complex_array(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_dict(doc: dict) -> PureState | DensityMatrix:
    """Build a state from its JSON description.

    Raises :class:`SchemaError` for layout problems and :class:`StateError`
    when the described object is not a valid state.
    """
    import jsonschema

    try:
        jsonschema.validate(doc, STATE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"state description invalid: {exc.message}") from None

    kind = doc["type"]
    if kind == "ghz":
        return ghz(doc["n"])
    if kind == "noisy_ghz":
        return noisy_ghz(doc["n"], float(doc["theta"]), float(doc["p"]))
    if kind == "pure":
        amps = _complex_array(doc["amplitudes"])
        n = _qubits_from_dim(amps.size)
        _check_n(n, pure_cap(), "pure state")
        return PureState(n, amps)
    rows = doc["matrix"]
    if any(len(r) != len(rows) for r in rows):
        raise SchemaError("dense matrix must be square")
    return validate(_complex_array(rows))


def state_to_dict(state: PureState | DensityMatrix) -> dict:
    if isinstance(state, PureState):
        a = state.amplitudes
        return {"type": "pure", "amplitudes": [[z.real, z.imag] for z in a]}
    m = state.matrix
    return {"type": "dense", "matrix": [[[z.real, z.imag] for z in row] for row in m]}
