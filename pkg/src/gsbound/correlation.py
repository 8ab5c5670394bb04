"""Full-weight Pauli correlation tensor and its (3^(N-2) x 9) matrix layout.

Entry ``(j1, ..., jN)`` with every ``j`` in {1, 2, 3} is
``Tr[rho sigma_j1 (x) ... (x) sigma_jN]``. Internally indices are 0-based
(0 = X, 1 = Y, 2 = Z) and the tensor is a numpy array of shape ``(3,) * N``
in lexicographic order, so the correlation matrix is a plain reshape.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field

import numpy as np

from .pauli_algebra import PAULI_XYZ
from .states import DensityMatrix, PureState, StateError, dense_cap, pure_cap

IMAG_TOL = 1e-8
RANGE_TOL = 1e-9


@dataclass(frozen=True)
class CorrelationTensor:
    n_qubits: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape((3,) * self.n_qubits)
        if np.any(np.abs(v) > 1.0 + RANGE_TOL):
            raise ValueError("correlation values must lie in [-1, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, js):
        """Look up a value by 1-based Pauli indices, e.g. ``t[1, 1, 1]``."""
        return float(self.values[tuple(j - 1 for j in js)])


@dataclass(frozen=True)
class CorrelationMatrix:
    n_qubits: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        rows = 3 ** (self.n_qubits - 2)
        if e.shape != (rows, 9):
            raise ValueError(f"correlation matrix must be {rows}x9, got {e.shape}")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def shape(self):
        return self.entries.shape


def _check_indices(js, count: int | None = None) -> None:
    if count is not None and len(js) != count:
        raise ValueError(f"expected {count} indices, got {len(js)}")
    for j in js:
        if j not in (1, 2, 3):
            raise ValueError(f"Pauli index must be 1, 2 or 3, got {j!r}")


def row_index(js) -> int:
    """1-based row of M for the leading N-2 indices."""
    js = tuple(js)
    _check_indices(js)
    r = 1
    L = len(js)
    for i, j in enumerate(js, start=1):
        r += 3 ** (L - i) * (j - 1)
    return r


def col_index(j_prev: int, j_last: int) -> int:
    """1-based column of M for the last two indices."""
    _check_indices((j_prev, j_last))
    return 3 * (j_prev - 1) + j_last


def _pauli_transform(op: np.ndarray, n: int) -> np.ndarray:
    """Complex ``Tr[op P]`` for every full-weight Pauli string P.

    Contracts one qubit at a time: the (row, col) index pair of the current
    leading qubit is traded for a Pauli index, shrinking the work by 3/4 per
    step. Output shape is ``(3**n,)`` in lexicographic order.
    """
    t = np.asarray(op, dtype=complex).reshape(1, 2**n, 2**n)
    for k in range(n):
        rest = 2 ** (n - k - 1)
        t = t.reshape(t.shape[0], 2, rest, 2, rest)
        # Tr[op P] = sum_{r,c} op[r, c] P[c, r]
        t = np.einsum("jcr,arxcy->ajxy", PAULI_XYZ, t, optimize=True)
        t = t.reshape(-1, rest, rest)
    return t.reshape(-1)


def _pure_transform(psi: np.ndarray, n: int) -> np.ndarray:
    """``<psi|P|psi>`` for all full-weight strings without forming |psi><psi|.

    The first ``k`` qubits are enumerated explicitly (each prefix string is
    applied to the state as a 2^k x 2^k matrix); the trailing ``n - k`` qubits
    are handled by the dense transform of the small reduced operator
    ``C = Psi^dagger P_prefix Psi``.
    """
    k = (n + 1) // 2
    m = n - k
    Psi = psi.reshape(2**k, 2**m)
    out = np.empty((3**k, 3**m), dtype=complex)
    prefix_ops = _prefix_operators(k)
    for idx, P in enumerate(prefix_ops):
        C = Psi.conj().T @ (P @ Psi)
        # sum_{b',b} C[b', b] P_suf[b', b] == Tr[C^T P_suf]
        out[idx] = _pauli_transform(C.T, m) if m > 0 else C.reshape(1)
    return out.reshape(-1)


def _prefix_operators(k: int):
    ops = [np.ones((1, 1), dtype=complex)]
    for _ in range(k):
        ops = [np.kron(o, s) for o in ops for s in PAULI_XYZ]
    return ops


def correlation_tensor(state: PureState | DensityMatrix) -> CorrelationTensor:
    n = state.n_qubits
    if isinstance(state, PureState):
        if n > pure_cap():
            raise StateError(f"pure state with {n} qubits exceeds cap {pure_cap()}")
        raw = _pure_transform(state.amplitudes, n)
    elif isinstance(state, DensityMatrix):
        if n > dense_cap():
            raise StateError(f"density matrix with {n} qubits exceeds cap {dense_cap()}")
        raw = _pauli_transform(state.matrix, n)
    else:
        raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")
    imag = float(np.max(np.abs(raw.imag))) if raw.size else 0.0
    if imag > IMAG_TOL:
        raise StateError(
            "correlations have an imaginary part; input is not Hermitian",
            [("imaginary_residual", imag)],
        )
    return CorrelationTensor(n, raw.real.reshape((3,) * n))


def direct_correlation(state: PureState | DensityMatrix, js) -> float:
    """Single entry by explicit trace against the full Pauli string (slow oracle)."""
    from .pauli_algebra import kron_all, pauli

    P = kron_all([pauli(j) for j in js])
    if isinstance(state, PureState):
        a = state.amplitudes
        return float(np.real(a.conj() @ P @ a))
    return float(np.real(np.trace(state.matrix @ P)))


def matrix_from_tensor(tensor: CorrelationTensor) -> CorrelationMatrix:
    n = tensor.n_qubits
    return CorrelationMatrix(n, tensor.values.reshape(3 ** (n - 2), 9))


def correlation_matrix(state: PureState | DensityMatrix) -> CorrelationMatrix:
    if state.n_qubits < 3:
        raise ValueError("correlation matrix needs N >= 3")
    return matrix_from_tensor(correlation_tensor(state))


CSV_HEADER = [f"c{a}{b}" for a, b in itertools.product((1, 2, 3), repeat=2)]


def matrix_to_csv(m: CorrelationMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in m.entries:
        w.writerow([format(float(x) + 0.0, ".17g") for x in row])
    return buf.getvalue()
