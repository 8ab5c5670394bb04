from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsbound import states
from gsbound.states import SchemaError, StateError


def test_ghz_amplitudes():
    psi = states.ghz(3)
    expected = np.zeros(8)
    expected[[0, 7]] = 1 / math.sqrt(2)
    assert np.allclose(psi.amplitudes, expected)
    assert np.flatnonzero(states.ghz(4).amplitudes).tolist() == [0, 15]
    assert abs(np.linalg.norm(states.ghz(8).amplitudes) - 1) < 1e-15


def test_generalized_ghz():
    assert np.allclose(states.generalized_ghz(4, math.pi / 4).amplitudes, states.ghz(4).amplitudes)
    zero = states.generalized_ghz(3, 0.0).amplitudes
    assert zero[0] == 1 and np.count_nonzero(zero) == 1
    a = states.generalized_ghz(5, math.pi / 6).amplitudes
    assert np.allclose([a[0], a[31]], [math.sqrt(3) / 2, 0.5])
    assert np.count_nonzero(a) == 2


def test_too_few_qubits():
    with pytest.raises(StateError):
        states.ghz(2)


def test_noisy_mixture_endpoints():
    psi = states.generalized_ghz(3, 0.3)
    assert np.allclose(states.noisy_mixture(psi, 0.0).matrix, np.eye(8) / 8)
    rho = states.noisy_mixture(psi, 1.0).matrix
    assert np.allclose(rho @ rho, rho)
    assert np.linalg.matrix_rank(rho) == 1


def test_noisy_ghz_spectrum():
    rho = states.noisy_ghz(4, math.pi / 4, 0.9)
    ev = np.linalg.eigvalsh(rho.matrix)
    assert abs(np.trace(rho.matrix) - 1) < 1e-12
    assert abs(ev[0] - 0.1 / 16) < 1e-12
    assert abs(ev[-1] - (0.9 + 0.1 / 16)) < 1e-12


def test_noisy_mixture_rejects_p():
    with pytest.raises(StateError):
        states.noisy_mixture(states.ghz(3), 1.5)


def test_density_from_pure():
    basis = np.zeros(8)
    basis[0] = 1
    rho = states.density_from_pure(states.PureState(3, basis)).matrix
    assert rho[0, 0] == 1 and np.count_nonzero(rho) == 1
    g = states.density_from_pure(states.ghz(3)).matrix
    assert np.allclose(g[np.ix_([0, 7], [0, 7])], 0.5)
    assert np.count_nonzero(np.abs(g) > 1e-15) == 4


def test_random_pure_trace(rng):
    rho = states.density_from_pure(states.random_pure_state(4, rng))
    assert abs(np.trace(rho.matrix) - 1) < 1e-12


def test_validate_accepts_and_rejects():
    assert states.validate(np.eye(8) / 8).n_qubits == 3
    bad = np.zeros((8, 8))
    bad[0, 0] = 2
    with pytest.raises(StateError) as exc:
        states.validate(bad)
    failures = dict(exc.value.failures)
    assert failures["trace"] == pytest.approx(1.0)
    states.noisy_ghz(5, math.pi / 8, 0.5)


def test_validate_collects_every_failure():
    m = np.diag([1.5, -0.5, 0, 0, 0, 0, 0, 0]).astype(complex)
    m[0, 1] = 0.3
    with pytest.raises(StateError) as exc:
        states.validate(m)
    names = {k for k, _ in exc.value.failures}
    assert names == {"hermitian", "positive_semidefinite"}
    assert "failures" in exc.value.report()


def test_validate_shape_errors():
    with pytest.raises(StateError):
        states.validate(np.eye(6) / 6)
    with pytest.raises(StateError):
        states.validate(np.ones((4, 8)))


def test_pure_state_normalization():
    with pytest.raises(StateError):
        states.PureState(3, np.ones(8))
    with pytest.raises(StateError):
        states.PureState(3, np.ones(4) / 2)


def test_dense_cap_from_environment(monkeypatch):
    monkeypatch.setenv("GSBOUND_DENSE_CAP", "3")
    with pytest.raises(StateError, match="cap"):
        states.maximally_mixed(4)
    monkeypatch.setenv("GSBOUND_DENSE_CAP", "lots")
    with pytest.raises(ValueError):
        states.dense_cap()


def test_state_from_dict_kinds():
    g = states.state_from_dict({"type": "ghz", "n": 3})
    assert isinstance(g, states.PureState)
    rho = states.state_from_dict({"type": "noisy_ghz", "n": 3, "theta": 0.2, "p": 0.4})
    assert np.allclose(rho.matrix, states.noisy_ghz(3, 0.2, 0.4).matrix)
    pure = states.state_from_dict(states.state_to_dict(g))
    assert np.allclose(pure.amplitudes, g.amplitudes)
    dense = states.state_from_dict(states.state_to_dict(rho))
    assert np.allclose(dense.matrix, rho.matrix)


@pytest.mark.parametrize("doc", [
    {"type": "ghz"},
    {"type": "sphere", "n": 3},
    {"type": "noisy_ghz", "n": 3, "theta": "x", "p": 1},
    {"type": "dense", "matrix": [[[1, 0]], [[0, 0], [0, 0]]]},
    [],
])
def test_state_from_dict_schema_errors(doc):
    with pytest.raises(SchemaError):
        states.state_from_dict(doc)


def test_state_from_dict_state_error():
    with pytest.raises(StateError):
        states.state_from_dict({"type": "pure", "amplitudes": [[1, 0]] * 8})


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 5), st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_random_density_is_valid(n, seed, rank):
    rho = states.random_density_matrix(n, np.random.default_rng(seed), rank=rank)
    m = rho.matrix
    assert np.allclose(m, m.conj().T, atol=1e-12)
    assert abs(np.trace(m) - 1) < 1e-12
    assert np.linalg.eigvalsh(m)[0] > -1e-12
    states.validate(m)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 6), st.floats(0, math.pi), st.floats(0, 1))
def test_noisy_ghz_always_valid(n, theta, p):
    rho = states.noisy_ghz(n, theta, p)
    assert np.linalg.eigvalsh(rho.matrix)[0] >= (1 - p) / 2**n - 1e-12
