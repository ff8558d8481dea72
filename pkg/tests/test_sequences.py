import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hankelpade.potentials import HARMONIC, QUARTIC
from hankelpade.sequences import (
    HANKEL,
    HILL,
    NO_ROOT,
    RootSequence,
    best_sequence,
    convergence_report,
    match_sequences,
    scan_width_parameter,
    select_nearest,
    tracking_target,
)

REF = F("1.0603620904841828996")


def test_two_synthetic_chains():
    seqs = match_sequences({1: ["1.0", "3.0"], 2: ["1.1", "2.9"], 3: ["1.05", "2.95"]}, "0.5")
    assert [len(s) for s in seqs] == [3, 3]
    assert [s.values[-1] for s in seqs] == [F("1.05"), F("2.95")]


def test_single_root_per_index():
    seqs = match_sequences({2: [1], 3: [F(11, 10)], 4: [F(21, 20)]})
    assert len(seqs) == 1 and seqs[0].indices == (2, 3, 4)


def test_window_splits_far_roots():
    seqs = match_sequences({1: [1, 2], 2: [5]}, window=1)
    assert len(seqs) == 3


def test_match_needs_two_orders():
    with pytest.raises(ValueError):
        match_sequences({1: [1]})


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.integers(1, 8), st.lists(st.fractions(0, 5, max_denominator=20), max_size=5), min_size=2, max_size=6))
def test_matching_partitions_input(per):
    seqs = match_sequences(per, window=1)
    got = sorted((k, v) for s in seqs for k, v in zip(s.indices, s.values))
    want = sorted((k, F(v)) for k, vs in per.items() for v in vs)
    assert got == want


def test_geometric_rate():
    seq = RootSequence(HANKEL, tuple(range(1, 15)), tuple(1 + F(1, 2**k) for k in range(1, 15)), 0)
    rep = convergence_report(seq, reference=1)
    assert abs(rep.rate_slope + math.log10(2)) < 1e-6
    assert rep.reference_error[-1] == pytest.approx(-14 * math.log10(2))
    assert abs(rep.stable_digits + rep.self_diffs[-1]) <= 1


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 9), st.integers(4, 12))
def test_geometric_rate_property(q, n):
    seq = RootSequence(HILL, tuple(range(n)), tuple(F(3) + F(1, q**k) for k in range(n)), 0)
    assert abs(convergence_report(seq).rate_slope + math.log10(q)) < 1e-6


def test_constant_sequence_flags_exact():
    seq = RootSequence(HANKEL, (2, 3, 4), (F(1), F(1), F(1)), 0)
    rep = convergence_report(seq)
    assert rep.converged_exactly
    assert all(d == -math.inf for d in rep.self_diffs)


def test_report_needs_three():
    with pytest.raises(ValueError):
        convergence_report(RootSequence(HILL, (1, 2), (F(1), F(2)), 0))


def test_root_sequence_validation():
    with pytest.raises(ValueError):
        RootSequence(HILL, (2, 2), (1, 1), 0)


def test_best_sequence():
    a = RootSequence(HANKEL, (1, 2, 3), (F(1), F(11, 10), F(105, 100)), 0)
    b = RootSequence(HANKEL, (1, 2, 3), (F(3), F(3), F(3) + F(1, 10**9)), 1)
    c = RootSequence(HANKEL, (2, 3), (F(5), F(5)), 2)
    assert best_sequence([a, b, c]) is b


def test_tracking_target_and_selection():
    per = {1: [F(1), F(2)], 2: [F(101, 100), F(3)], 3: [F(1001, 1000), F(4)]}
    t = tracking_target(per)
    assert t == F(1001, 1000)
    assert select_nearest(per, t) == {1: 1, 2: F(101, 100), 3: F(1001, 1000)}


def test_width_scan_harmonic_exact():
    scan = scan_width_parameter(HILL, HARMONIC, 4, [F(1, 2), F(1)], 1, 0, 2)
    assert scan.errors[0] == -math.inf
    assert scan.best_a == F(1, 2)


def test_width_scan_no_root_sentinel():
    scan = scan_width_parameter(HILL, QUARTIC, 3, [F(1), F(50)], REF, F(1, 2), F(3, 2))
    assert scan.errors[1] is NO_ROOT
    assert scan.best_a == 1


def test_width_scan_needs_grid():
    with pytest.raises(ValueError):
        scan_width_parameter(HILL, QUARTIC, 5, [], REF, 0, 2)
