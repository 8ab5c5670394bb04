from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import four_party_xy_settings, five_party_xy_settings, random_profile
from gsbound import bounds, correlation, states, svetlichny
from gsbound.pauli_algebra import kron_all, pauli
from gsbound.states import SchemaError
from gsbound.svetlichny import (
    DimensionError,
    MeasurementSetting,
    SettingsProfile,
    decomposition_vectors,
    expectation_direct,
    expectation_from_tensor,
    expectation_via_decomposition,
    gs_operator,
    map_minus_to_plus,
    signed_kron_sums,
    signed_kron_sums_bruteforce,
    v_overlap_closed_form,
)

X, Y, Z = [1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0]


def xy_profile(n):
    return SettingsProfile((MeasurementSetting(X, Y),) * n)


def test_three_party_operator_by_hand():
    sx, sy = pauli(1), pauli(2)
    words = {"XXX": 1, "XXY": 1, "XYX": 1, "YXX": 1, "XYY": -1, "YXY": -1, "YYX": -1, "YYY": -1}
    oracle = sum(c * kron_all([sx if ch == "X" else sy for ch in w]) for w, c in words.items())
    S = gs_operator(xy_profile(3))
    assert np.allclose(S, oracle)
    assert np.allclose(S, S.conj().T)


def test_plus_operator_sign_table():
    sx, sy = pauli(1), pauli(2)
    oracle = 0
    for bits in itertools.product((0, 1), repeat=3):
        w = sum(bits)
        oracle = oracle + (-1) ** ((w + 1) // 2) * kron_all([sy if b else sx for b in bits])
    assert np.allclose(gs_operator(xy_profile(3), "plus"), oracle)


def test_sum_and_recursion_agree(rng):
    for n in (3, 4, 5):
        s = random_profile(n, rng)
        for variant in svetlichny.VARIANTS:
            a = gs_operator(s, variant, method="sum")
            b = gs_operator(s, variant, method="recursion")
            assert np.allclose(a, b, atol=1e-12)


def test_optimal_three_party_operator_norm():
    S = gs_operator(bounds.corollary_optimal_settings(3))
    assert np.max(np.abs(np.linalg.eigvalsh(S))) == pytest.approx(4 * math.sqrt(2), abs=1e-12)


def test_operator_rejects_bad_variant():
    with pytest.raises(ValueError):
        gs_operator(xy_profile(3), "neither")


def test_measurement_setting_validation():
    with pytest.raises(ValueError, match="norm"):
        MeasurementSetting([1, 1, 0], Y)
    s = MeasurementSetting.normalized([3, 0, 4], [0, 2, 0])
    assert np.allclose(s.a0, [0.6, 0, 0.8])
    with pytest.raises(ValueError):
        SettingsProfile((MeasurementSetting(X, Y),) * 2)


def test_settings_from_dict():
    doc = {"parties": [{"a0": [1, 0, 0], "a1": [0, 1.0000001, 0]}] * 3}
    s = svetlichny.settings_from_dict(doc)
    assert s.n == 3 and np.linalg.norm(s[0].a1) == pytest.approx(1, abs=1e-15)
    with pytest.raises(SchemaError):
        svetlichny.settings_from_dict({"parties": [{"a0": [1, 0, 0], "a1": [0, 2, 0]}] * 3})
    with pytest.raises(SchemaError):
        svetlichny.settings_from_dict({"parties": [{"a0": [1, 0], "a1": [0, 1, 0]}] * 3})
    prof = five_party_xy_settings()
    back = svetlichny.settings_from_dict(prof.to_dict())
    for p, q in zip(back, prof):
        assert np.allclose(p.a0, q.a0, atol=1e-15) and np.allclose(p.a1, q.a1, atol=1e-15)


def test_maximally_mixed_gives_zero(rng):
    for n in (3, 4):
        s = random_profile(n, rng)
        assert abs(expectation_direct(states.maximally_mixed(n), s)) < 1e-12
        m = correlation.correlation_matrix(states.maximally_mixed(n))
        assert expectation_via_decomposition(m, s) == 0.0


def test_ghz3_optimal_value():
    s = bounds.corollary_optimal_settings(3)
    rho = states.density_from_pure(states.ghz(3))
    assert expectation_direct(rho, s) == pytest.approx(4 * math.sqrt(2), abs=1e-12)
    m = correlation.correlation_matrix(states.ghz(3))
    assert expectation_via_decomposition(m, s) == pytest.approx(4 * math.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("theta, p", [(math.pi / 4, 1.0), (0.5, 0.8), (1.0, 0.6)])
def test_five_party_example_value(theta, p):
    rho = states.noisy_ghz(5, theta, p)
    expected = 16 * math.sqrt(2) * p * abs(math.sin(2 * theta))
    assert abs(expectation_direct(rho, five_party_xy_settings())) == pytest.approx(expected, abs=1e-9)


def test_three_party_decomposition_vectors():
    dv = decomposition_vectors(xy_profile(3))
    assert np.allclose(dv.v0, np.add(X, Y))
    assert np.allclose(dv.v1, np.subtract(X, Y))
    assert dv.gamma == pytest.approx(math.pi / 4)


def test_four_party_u_vectors():
    s = four_party_xy_settings()
    dv = decomposition_vectors(s)
    c, d = s[2], s[3]
    assert np.allclose(dv.u0, np.kron(c.a0, d.a0) - np.kron(c.a1, d.a1))
    assert np.allclose(dv.u1, np.kron(c.a0, d.a1) + np.kron(c.a1, d.a0))
    a, b = s[0], s[1]
    assert np.allclose(dv.v0, np.kron(a.a0, b.a0 + b.a1) + np.kron(a.a1, b.a0 - b.a1))
    assert np.allclose(dv.v1, np.kron(a.a0, b.a0 - b.a1) - np.kron(a.a1, b.a0 + b.a1))


def test_signed_kron_sums_match_enumeration(rng):
    for L in range(0, 6):
        pairs = [(p.a0, p.a1) for p in random_profile(max(L, 3), rng)][:L]
        fast = signed_kron_sums(pairs)
        slow = signed_kron_sums_bruteforce(pairs)
        assert np.allclose(fast[0], slow[0], atol=1e-12)
        assert np.allclose(fast[1], slow[1], atol=1e-12)


def test_properties_five_parties(rng):
    for _ in range(50):
        res = decomposition_vectors(random_profile(5, rng)).property_residuals()
        assert max(res.values()) < 1e-10


def test_decomposition_against_direct_trace(rng):
    for n in (3, 4, 5):
        for _ in range(40):
            rho = states.random_density_matrix(n, rng, rank=int(rng.integers(1, 2**n + 1)))
            s = random_profile(n, rng)
            m = correlation.correlation_matrix(rho)
            t = correlation.correlation_tensor(rho)
            for variant in svetlichny.VARIANTS:
                d = expectation_direct(rho, s, variant)
                assert abs(d - expectation_via_decomposition(m, s, variant)) < 1e-9
                assert abs(d - expectation_from_tensor(t, s, variant)) < 1e-9


def test_map_last_pair():
    mapped = map_minus_to_plus(xy_profile(3))
    assert np.allclose(mapped[-1].a0, [0, -1, 0])
    assert np.allclose(mapped[-1].a1, X)
    assert np.array_equal(mapped[0].a0, X)


def test_map_has_order_four(rng):
    s = random_profile(4, rng)
    t = s
    for _ in range(4):
        t = map_minus_to_plus(t)
    for p, q in zip(s, t):
        assert np.array_equal(p.a0, q.a0) and np.array_equal(p.a1, q.a1)


def test_map_turns_minus_into_plus(rng):
    for n in (3, 4, 5):
        rho = states.random_density_matrix(n, rng)
        s = random_profile(n, rng)
        plus = np.trace(rho.matrix @ gs_operator(s, "plus")).real
        minus_mapped = np.trace(rho.matrix @ gs_operator(map_minus_to_plus(s), "minus")).real
        assert abs(plus - minus_mapped) < 1e-10


def test_dimension_mismatch():
    m = correlation.correlation_matrix(states.ghz(4))
    with pytest.raises(DimensionError):
        expectation_via_decomposition(m, xy_profile(3))
    with pytest.raises(DimensionError):
        expectation_direct(states.maximally_mixed(3), xy_profile(4))


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 11), st.integers(0, 2**32 - 1))
def test_norm_and_u_properties_hold_for_random_settings(n, seed):
    res = decomposition_vectors(random_profile(n, np.random.default_rng(seed))).property_residuals()
    checked = {k: v for k, v in res.items() if k != "v_orthogonal"}
    assert max(checked.values()) <= 1e-9
    assert ("v0_norm_even" in res) == (n % 2 == 0)
    if n % 2:
        assert res["v_orthogonal"] <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 11), st.integers(0, 2**32 - 1))
def test_v_overlap_matches_closed_form(n, seed):
    s = random_profile(n, np.random.default_rng(seed))
    dv = decomposition_vectors(s)
    assert abs(dv.v0 @ dv.v1 - v_overlap_closed_form(s)) <= 1e-9


def test_v_overlap_by_enumeration(rng):
    for n in (4, 6, 8):
        s = random_profile(n, rng)
        v0, v1 = signed_kron_sums_bruteforce([(p.a0, p.a1) for p in s.parties[: n - 2]])
        assert abs(v0 @ v1 - v_overlap_closed_form(s)) < 1e-12
        # generic directions: the overlap really is nonzero for even N
        assert abs(v0 @ v1) > 0


def test_v_overlap_vanishes_for_orthogonal_pairs():
    for n in (4, 6):
        dv = decomposition_vectors(xy_profile(n))
        assert dv.v0 @ dv.v1 == 0.0
        assert v_overlap_closed_form(xy_profile(n)) == 0.0


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 5), st.integers(0, 2**32 - 1))
def test_expectation_within_quantum_maximum(n, seed):
    r = np.random.default_rng(seed)
    psi = states.random_pure_state(n, r)
    val = expectation_via_decomposition(correlation.correlation_matrix(psi), random_profile(n, r))
    assert abs(val) <= 2 ** (n - 1) * math.sqrt(2) + 1e-9
