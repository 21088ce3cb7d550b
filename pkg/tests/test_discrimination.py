import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellud import BellLikeFamily, ModeUnitary, ValidationError, optimal_discrimination_unitary
from bellud import two_splitter_network
from bellud.detection import DetectionEvent, events
from bellud.discrimination import (D1_EVENTS, D2_EVENTS, D3_EVENTS, check_unambiguous_constraints,
                                   closed_form_confidences, column_decomposition,
                                   compare_reference_table, confidence, confidence_report,
                                   reference_table, probability_table, success_probability,
                                   unambiguous_events)

from conftest import random_unitary

r = 1 / math.sqrt(2)


def table_at(theta1, theta2, phi, priors=(0.25,) * 4):
    return probability_table(BellLikeFamily.from_angles(theta1, theta2),
                             two_splitter_network(r, phi), priors)


def test_two_splitter_table_values():
    # worked out by hand for theta1 = pi/6, theta2 = phi = pi/8
    t = table_at(math.pi / 6, math.pi / 8, math.pi / 8)
    expected = {
        (1, 1): [1 / 8, 3 / 8, 0, 0], (3, 3): [1 / 8, 3 / 8, 0, 0],
        (2, 2): [3 / 16, 1 / 16, 0, 0], (4, 4): [3 / 16, 1 / 16, 0, 0],
        (2, 4): [3 / 8, 1 / 8, 0, 0],
        (1, 2): [0, 0, 1 / 2, 0], (1, 4): [0, 0, 0, 1 / 2],
        (2, 3): [0, 0, 1 / 4, 1 / 4], (3, 4): [0, 0, 1 / 4, 1 / 4],
        (1, 3): [0, 0, 0, 0],
    }
    for ev, col in expected.items():
        np.testing.assert_allclose(t.column(ev), col, atol=1e-15, err_msg=str(ev))
    t.validate()


def test_confidence_example():
    # C2 = sin(pi/3), phi = pi/6
    d1, d2, d3 = closed_form_confidences(0.0, math.sin(math.pi / 3), math.pi / 6)
    assert d1 == pytest.approx(1.0, abs=1e-15)
    assert d2 == pytest.approx(1.0, abs=1e-15)
    assert d3 == pytest.approx(0.75, abs=1e-15)


def test_closed_form_range():
    with pytest.raises(ValidationError):
        closed_form_confidences(1.2, 0.5, 0.1)


@given(st.integers(0, 8), st.floats(0, math.pi / 2), st.floats(0, math.pi / 2))
def test_closed_forms_match_simulation(j, theta1, phi):
    theta2 = j * math.pi / 32
    theta1 = min(theta1, math.pi / 4)
    t = table_at(theta1, theta2, phi)
    closed = closed_form_confidences(math.sin(2 * theta1), math.sin(2 * theta2), phi)
    for group, d in zip((D1_EVENTS, D2_EVENTS, D3_EVENTS), closed):
        for ev in group:
            val, _ = confidence(t, ev)
            if val is not None:
                assert val == pytest.approx(d, abs=1e-10), ev


def test_closed_forms_swap_beyond_quarter_pi():
    # sqrt(1 - C2^2) = |cos 2 theta2| loses the sign, so D2 and D3 trade places
    theta2, phi = 3 * math.pi / 8 - 0.1, 0.3
    t = table_at(math.pi / 6, theta2, phi)
    _, d2, d3 = closed_form_confidences(math.sin(math.pi / 3), math.sin(2 * theta2), phi)
    assert confidence(t, (1, 2))[0] == pytest.approx(d3, abs=1e-12)
    assert confidence(t, (2, 3))[0] == pytest.approx(d2, abs=1e-12)


def test_undefined_confidence():
    t = table_at(math.pi / 6, math.pi / 8, 0.0)
    assert confidence(t, (1, 3)) == (None, None)
    assert confidence(t, (2, 2)) == (None, None)


@pytest.mark.parametrize("theta1", [math.pi / 16, math.pi / 6, math.pi / 4])
@pytest.mark.parametrize("theta2", [math.pi / 16, math.pi / 8, math.pi / 6, 0.7])
def test_optimal_unitary_success(theta1, theta2):
    fam = BellLikeFamily.from_angles(theta1, theta2)
    t = probability_table(fam, optimal_discrimination_unitary(fam))
    assert success_probability(t) == pytest.approx(0.25, abs=1e-10)
    found = unambiguous_events(t)
    assert [(str(ev), i) for ev, i in found] == [("(1,2)", 2), ("(1,4)", 3)]


def test_bell_and_separable():
    bell = table_at(math.pi / 4, math.pi / 4, math.pi / 4)
    assert success_probability(bell) == pytest.approx(0.5, abs=1e-10)
    sep = table_at(0, 0, 0)
    assert success_probability(sep) == pytest.approx(1.0, abs=1e-10)


def test_success_under_priors():
    priors = (0.1, 0.2, 0.3, 0.4)
    t = table_at(math.pi / 6, math.pi / 8, math.pi / 8, priors)
    assert success_probability(t) == pytest.approx(0.3 / 2 + 0.4 / 2, abs=1e-12)
    with pytest.raises(ValidationError):
        table_at(0.1, 0.1, 0.1, (0.5, 0.5, 0.5, 0.5))


def test_epsilon_range():
    t = table_at(0.3, 0.3, 0.3)
    with pytest.raises(ValidationError):
        success_probability(t, 0.0)
    with pytest.raises(ValidationError):
        success_probability(t, 0.2)


@pytest.mark.parametrize("perm", list(itertools.permutations(range(4)))[::5])
def test_detector_relabeling_keeps_success(perm):
    fam = BellLikeFamily.from_angles(0.4, 0.3)
    u = optimal_discrimination_unitary(fam)
    permuted = ModeUnitary(u.matrix[list(perm), :])
    assert success_probability(probability_table(fam, permuted)) == pytest.approx(0.25, abs=1e-12)


def test_confidence_report_marks_unambiguous():
    rep = confidence_report(table_at(math.pi / 6, math.pi / 8, math.pi / 8))
    flagged = {str(row["event"]) for row in rep if row["unambiguous"]}
    assert flagged == {"(1,2)", "(1,4)"}


def test_column_decomposition_parts():
    u = random_unitary(6, 5)
    d = column_decomposition(u, 3)
    np.testing.assert_array_equal(d.column(), u.dagger[:, 2])
    assert d.w.shape == (2,)


@pytest.mark.parametrize("seed", range(20))
def test_constraints_agree_with_events(seed):
    fam = BellLikeFamily.from_angles(0.5, 0.35)
    u = random_unitary(4, seed)
    found = {ev: i for ev, i in unambiguous_events(probability_table(fam, u))}
    for ev in events(4):
        passes = [k for k in range(4)
                  if check_unambiguous_constraints(u, fam, ev.m, ev.n, k).passed]
        assert passes == ([found[ev]] if ev in found else [])


def test_constraint_report_optimal():
    fam = BellLikeFamily.from_angles(math.pi / 6, math.pi / 8)
    u = optimal_discrimination_unitary(fam)
    rep = check_unambiguous_constraints(u, fam, 1, 4, 3)
    assert rep.passed
    assert set(rep.conditions) == {"vanish_psi1", "vanish_psi2", "nonzero_psi4", "cross_psi3"}
    assert rep.target_amplitude == pytest.approx(r, abs=1e-12)
    assert not check_unambiguous_constraints(u, fam, 1, 4, 2).passed
    assert not check_unambiguous_constraints(u, fam, 2, 3, 2).passed


def test_reference_table_relabeling():
    cmp = compare_reference_table(math.pi / 6, math.pi / 8, math.pi / 8)
    assert cmp.relabeling == (2, 1, 4, 3)
    # only the second pair's cells at two coincidence events disagree
    assert {(s, str(ev)) for s, ev, _, _ in cmp.mismatches} == {
        (2, "(1,4)"), (2, "(2,3)"), (3, "(1,4)"), (3, "(2,3)")}
    assert cmp.matched_cells == 36
    np.testing.assert_allclose(cmp.reference_row_sums, [1, 1, 1.5, 0.5], atol=1e-12)


def test_reference_table_first_pair_rows_normalized():
    ref = reference_table(0.4, 0.2, 0.9)
    sums = np.sum(list(ref.values()), axis=0)
    np.testing.assert_allclose(sums[:2], [1, 1], atol=1e-12)
