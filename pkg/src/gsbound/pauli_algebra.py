"""Small dense linear algebra: Pauli matrices, Kronecker products, observables
and a one-sided Jacobi SVD for matrices with nine columns.

Matrices are plain ``numpy`` arrays; the helpers here only add the validation
the rest of the package relies on.
"""
from __future__ import annotations

import numpy as np

# largest Kronecker product dimension (rows or cols) we are willing to build
MAX_KRON_DIM = 2**14

UNIT_TOL = 1e-12
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

_PAULIS = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _p in _PAULIS:
    _p.setflags(write=False)

#: X, Y, Z stacked, shape (3, 2, 2)
PAULI_XYZ = np.stack(_PAULIS[1:])
PAULI_XYZ.setflags(write=False)


class SizeLimitError(ValueError):
    """A requested product would exceed the dense dimension cap."""


def pauli(mu: int) -> np.ndarray:
    """Return sigma_mu for mu in {0, 1, 2, 3} (I, X, Y, Z)."""
    if not isinstance(mu, (int, np.integer)) or not 0 <= mu <= 3:
        raise ValueError(f"Pauli index must be 0..3, got {mu!r}")
    return _PAULIS[mu].copy()


def _check_finite(m: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")


def kron(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    _check_finite(a, "left factor")
    _check_finite(b, "right factor")
    a2 = a.reshape(a.shape[0], -1) if a.ndim == 2 else a.reshape(1, -1)
    b2 = b.reshape(b.shape[0], -1) if b.ndim == 2 else b.reshape(1, -1)
    rows = a2.shape[0] * b2.shape[0]
    cols = a2.shape[1] * b2.shape[1]
    if rows > MAX_KRON_DIM or cols > MAX_KRON_DIM:
        raise SizeLimitError(
            f"Kronecker product of shape ({rows}, {cols}) exceeds cap {MAX_KRON_DIM}"
        )
    return np.kron(a, b)


def kron_all(factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = kron(out, f)
    return out


def observable(a) -> np.ndarray:
    """Spin observable a . sigma for a unit Bloch vector ``a``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"direction must be a 3-vector, got shape {a.shape}")
    norm = float(np.linalg.norm(a))
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"direction is not a unit vector (norm={norm!r})")
    return np.tensordot(a, PAULI_XYZ, axes=1)


def jacobi_svd_9(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD of a real matrix with exactly nine columns.

    One-sided (Hestenes) cyclic Jacobi: column pairs of ``m`` are rotated until
    mutually orthogonal, which is the two-sided Jacobi method applied
    implicitly to the 9x9 Gram matrix ``m.T @ m``. Working on the columns keeps
    tiny singular values accurate instead of taking square roots of roundoff.

    Returns ``(s, U, V)`` with ``s`` descending, ``m ~= U @ diag(s) @ V.T``.
    Columns of ``U`` belonging to zero singular values are left as zeros.
    """
    a = np.array(m, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[1] != 9:
        raise ValueError(f"expected a matrix with 9 columns, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("matrix must have at least one row")
    _check_finite(a, "matrix")

    n = 9
    v = np.eye(n)
    gram_norm = np.linalg.norm(a.T @ a)
    for _ in range(JACOBI_MAX_SWEEPS):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                ci, cj = a[:, i], a[:, j]
                alpha = ci @ ci
                beta = cj @ cj
                gamma = ci @ cj
                if gamma == 0.0 or abs(gamma) <= JACOBI_TOL * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                new_i = c * ci - s * cj
                new_j = s * ci + c * cj
                a[:, i], a[:, j] = new_i, new_j
                vi, vj = v[:, i].copy(), v[:, j].copy()
                v[:, i] = c * vi - s * vj
                v[:, j] = s * vi + c * vj
        if not rotated:
            break
        g = a.T @ a
        off = np.linalg.norm(g - np.diag(np.diag(g)))
        if off < JACOBI_TOL * max(gram_norm, np.finfo(float).tiny):
            break

    s = np.linalg.norm(a, axis=0)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    a = a[:, order]
    v = v[:, order]
    u = np.zeros_like(a)
    nz = s > 0
    u[:, nz] = a[:, nz] / s[nz]
    return s, u, v


def singular_values_9(m) -> np.ndarray:
    """Descending singular values of a real matrix with nine columns."""
    return jacobi_svd_9(m)[0]
