import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellud import (BellLikeFamily, TwoPhotonState, ValidationError, bell_like_states,
                    coefficient_matrix, concurrence, inner_product)

angles = st.floats(0.0, math.pi / 2)


def test_bell_point_states():
    r = 1 / math.sqrt(2)
    states = BellLikeFamily.bell().states()
    np.testing.assert_allclose(states[0].coeffs, [[r, 0], [0, r]], atol=1e-15)
    np.testing.assert_allclose(states[1].coeffs, [[r, 0], [0, -r]], atol=1e-15)
    np.testing.assert_allclose(states[2].coeffs, [[0, r], [r, 0]], atol=1e-15)
    np.testing.assert_allclose(states[3].coeffs, [[0, r], [-r, 0]], atol=1e-15)


def test_separable_point_is_computational_basis():
    states = BellLikeFamily.from_angles(0, 0).states()
    got = sorted(tuple(np.round(np.abs(s.coeffs).ravel(), 12)) for s in states)
    assert got == sorted([(1, 0, 0, 0), (0, 0, 0, 1), (0, 1, 0, 0), (0, 0, 1, 0)])


@given(angles, angles)
def test_family_is_orthonormal(t1, t2):
    states = BellLikeFamily.from_angles(t1, t2).states()
    gram = np.array([[inner_product(a, b) for b in states] for a in states])
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-12)


@given(angles, angles)
def test_concurrence_matches_sin_2theta(t1, t2):
    fam = BellLikeFamily.from_angles(t1, t2)
    c = [concurrence(s) for s in fam.states()]
    assert c[0] == pytest.approx(math.sin(2 * t1), abs=1e-12)
    assert c[1] == pytest.approx(c[0], abs=1e-12)
    assert c[2] == pytest.approx(math.sin(2 * t2), abs=1e-12)
    assert c[3] == pytest.approx(c[2], abs=1e-12)
    np.testing.assert_allclose(fam.concurrences, [c[0], c[2]], atol=1e-12)


def test_complex_family_is_orthonormal():
    a1, b1 = 0.6j, 0.8
    a2, b2 = 0.28 * np.exp(0.3j), 0.96 * np.exp(-1.1j)
    states = bell_like_states(BellLikeFamily(a1, b1, a2, b2))
    gram = np.array([[inner_product(a, b) for b in states] for a in states])
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-12)


def test_unnormalized_inputs_rejected():
    with pytest.raises(ValidationError):
        BellLikeFamily(0.5, 0.5, 0.6, 0.8)
    with pytest.raises(ValidationError):
        concurrence(TwoPhotonState.from_amplitudes(a13=1, a24=1))


@pytest.mark.parametrize("t", [-0.1, math.pi / 2 + 1e-6, float("nan")])
def test_angle_range(t):
    with pytest.raises(ValidationError):
        BellLikeFamily.from_angles(t, 0.3)


def test_state_json_roundtrip():
    s = TwoPhotonState.from_amplitudes(0.5, 0.5j, -0.5, 0.5)
    back = TwoPhotonState.from_json(json.loads(json.dumps(s.to_json())))
    np.testing.assert_array_equal(back.coeffs, s.coeffs)
    np.testing.assert_array_equal(coefficient_matrix(s), [[0.5, 0.5j], [-0.5, 0.5]])


def test_family_json_roundtrip():
    fam = BellLikeFamily.from_angles(0.3, 1.1)
    assert BellLikeFamily.from_json(fam.to_json()) == fam
    cplx = BellLikeFamily(0.6j, 0.8, 0.8, -0.6j)
    assert BellLikeFamily.from_json(json.loads(json.dumps(cplx.to_json()))) == cplx
    assert not cplx.is_real and fam.is_real


def test_coeffs_read_only():
    s = TwoPhotonState.from_amplitudes(a13=1)
    with pytest.raises(ValueError):
        s.coeffs[0, 0] = 2
