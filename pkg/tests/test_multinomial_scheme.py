import itertools
import math
from fractions import Fraction

import pytest

from rovecover.combinatorics import binomial, falling_factorial
from rovecover.multinomial_scheme import (
    all_distinct_probability,
    markov_repetition_bound,
    multinomial_coverage_pmf,
    r_count,
    r_via_stirling,
    repetition_mean,
    theorem2_check,
)
from rovecover.subset_scheme import Params, coverage_pmf


def onto_sequence_count(length, t):
    """Independent oracle: length-`length` sequences over a t-alphabet using
    every symbol."""
    return sum(
        1
        for seq in itertools.product(range(t), repeat=length)
        if len(set(seq)) == t
    )


def brute_force_multinomial_pmf(n, m, k):
    counts = {}
    for seq in itertools.product(range(n), repeat=m * k):
        t = len(set(seq))
        counts[t] = counts.get(t, 0) + 1
    total = n ** (m * k)
    return {t: Fraction(c, total) for t, c in counts.items()}


class TestRCount:
    def test_two_letter_sequences(self):
        assert r_count(1, 2, 2) == 2

    def test_per_pair_count_formula(self):
        # Onto maps from m positions to 2 nodes: 2^m - 2.
        for m in range(1, 10):
            assert r_count(1, m, 2) == 2**m - 2

    def test_two_stage_single_draws(self):
        assert onto_sequence_count(2, 2) == 2
        assert r_count(2, 1, 2) == 2

    def test_zero_above_sequence_length(self):
        assert r_count(2, 2, 5) == 0
        assert r_via_stirling(2, 2, 5) == 0

    def test_oracle_grid(self):
        for length in range(1, 7):
            for t in range(1, length + 1):
                assert r_count(1, length, t) == onto_sequence_count(length, t)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            r_count(0, 1, 1)
        with pytest.raises(ValueError):
            r_via_stirling(1, 1, 0)


class TestRViaStirling:
    def test_trivial_values(self):
        assert r_via_stirling(1, 2, 2) == 2
        assert r_via_stirling(1, 3, 1) == 1

    def test_enumerated_2_2_3(self):
        # Oracle: 81 length-4 sequences over a 3-set, 36 are onto.
        assert onto_sequence_count(4, 3) == 36
        assert r_via_stirling(2, 2, 3) == 36
        assert r_via_stirling(2, 2, 3) == math.factorial(3) * 6

    def test_equals_r_count_up_to_20(self):
        for m in range(1, 21):
            for k in range(1, 20 // m + 1):
                for t in range(1, m * k + 1):
                    assert r_count(k, m, t) == r_via_stirling(k, m, t), (k, m, t)


class TestMultinomialCoveragePmf:
    def test_two_singleton_stages(self):
        dist = multinomial_coverage_pmf(Params(2, 1, 2))
        assert dict(dist.pmf) == {1: Fraction(1, 2), 2: Fraction(1, 2)}

    def test_one_stage_of_two(self):
        dist = multinomial_coverage_pmf(Params(4, 2, 1))
        assert dict(dist.pmf) == {1: Fraction(4, 16), 2: Fraction(12, 16)}

    def test_single_draw_point_mass(self):
        dist = multinomial_coverage_pmf(Params(7, 1, 1))
        assert dict(dist.pmf) == {1: Fraction(1)}

    def test_matches_brute_force(self):
        for n in range(1, 5):
            for m in range(1, min(n, 2) + 1):
                for k in (1, 2):
                    expected = brute_force_multinomial_pmf(n, m, k)
                    got = {
                        t: p
                        for t, p in multinomial_coverage_pmf(Params(n, m, k)).pmf.items()
                        if p
                    }
                    assert got == expected, (n, m, k)

    def test_sums_to_one_exactly(self):
        for n in (1, 5, 12):
            for m in range(1, min(n, 4) + 1):
                for k in range(1, 5):
                    assert multinomial_coverage_pmf(Params(n, m, k)).total() == 1

    def test_allocation_count_identity(self):
        # sum_t C(n,t) R(k,m,t) == n^(mk)
        for n in range(1, 13):
            for m in range(1, min(n, 4) + 1):
                for k in range(1, 12 // m + 1):
                    total = sum(
                        binomial(n, t) * r_count(k, m, t)
                        for t in range(1, min(m * k, n) + 1)
                    )
                    assert total == n ** (m * k), (n, m, k)


class TestRepetitionMean:
    def test_values(self):
        assert repetition_mean(100, 5) == Fraction(1, 10)
        assert repetition_mean(17, 1) == 0
        assert repetition_mean(9, 2) == Fraction(1, 9)

    def test_invalid(self):
        with pytest.raises(ValueError):
            repetition_mean(3, 4)


class TestMarkovRepetitionBound:
    def test_direct_substitution(self):
        report = markov_repetition_bound(Params(100, 5, 3))
        assert report.all_stages_markov_bound == Fraction(3, 10)
        assert not report.all_stages_clamped
        assert report.all_distinct_probability == Fraction(
            falling_factorial(100, 5), 100**5
        ) ** 3

    def test_single_node_stages(self):
        report = markov_repetition_bound(Params(5, 1, 4))
        assert report.repetition_mean == 0
        assert report.single_stage_markov_bound == 0
        assert report.all_stages_markov_bound == 0
        assert report.all_distinct_probability == 1

    def test_clamping_flagged(self):
        report = markov_repetition_bound(Params(10, 10, 1))
        assert report.single_stage_markov_bound == 1
        assert report.single_stage_clamped
        assert report.all_stages_clamped

    def test_bounds_within_unit_interval(self):
        for n in range(1, 9):
            for m in range(1, n + 1):
                for k in (1, 2, 3):
                    report = markov_repetition_bound(Params(n, m, k))
                    assert 0 <= report.single_stage_markov_bound <= 1
                    assert 0 <= report.all_stages_markov_bound <= 1
                    assert 0 <= report.all_distinct_probability <= 1

    def test_union_bound_consistency(self):
        # P(all distinct) >= 1 - k * C(m,2)/n whenever the right side is >= 0.
        for n in range(1, 9):
            for m in range(1, n + 1):
                for k in (1, 2, 3):
                    report = markov_repetition_bound(Params(n, m, k))
                    lower = 1 - k * repetition_mean(n, m)
                    if lower >= 0:
                        assert report.all_distinct_probability >= lower, (n, m, k)

    def test_epsilon_scales_bound(self):
        report = markov_repetition_bound(Params(10, 10, 1), epsilon=45)
        assert report.single_stage_markov_bound == Fraction(1, 10)
        assert not report.single_stage_clamped

    def test_epsilon_validation(self):
        with pytest.raises(ValueError):
            markov_repetition_bound(Params(5, 2, 1), epsilon=0)
        with pytest.raises(ValueError):
            markov_repetition_bound(Params(5, 2, 1), epsilon=1.5)


class TestTheorem2:
    def test_single_node_stages_equality(self):
        report = theorem2_check(Params(2, 1, 2))
        assert report.all_hold
        for row in report.rows:
            assert row.lhs == row.rhs

    def test_4_2_2_holds(self):
        report = theorem2_check(Params(4, 2, 2))
        assert report.all_hold
        # Right side independently verified by enumerating 4^4 sequences.
        expected_rhs = brute_force_multinomial_pmf(4, 2, 2)
        for row in report.rows:
            assert row.rhs == expected_rhs[row.t]

    def test_3_3_1_equality_from_sequences(self):
        # Oracle: of the 27 sequences over a 3-set, 6 are onto.
        assert onto_sequence_count(3, 3) == 6
        report = theorem2_check(Params(3, 3, 1))
        (row,) = report.rows
        assert row.t == 3
        assert row.lhs == Fraction(6, 27)
        assert row.rhs == Fraction(6, 27)

    def test_inequality_grid(self):
        for n in range(1, 9):
            for m in range(1, min(n, 3) + 1):
                for k in (1, 2, 3):
                    report = theorem2_check(Params(n, m, k))
                    assert report.all_hold, (n, m, k)
                    if m == 1:
                        assert all(row.lhs == row.rhs for row in report.rows)

    def test_condition_value(self):
        report = theorem2_check(Params(100, 5, 3))
        assert report.condition_value == Fraction(3, 10)

    def test_damped_decomposition(self):
        # The stage-wise pmf dominates P * subset pmf, and the total slack is 1 - P.
        for n in range(1, 9):
            for m in range(1, min(n, 3) + 1):
                for k in (1, 2, 3):
                    params = Params(n, m, k)
                    distinct_p = all_distinct_probability(params)
                    subset = coverage_pmf(params)
                    stage = multinomial_coverage_pmf(params)
                    gap = Fraction(0)
                    for t, p in stage.pmf.items():
                        damped = distinct_p * subset.probability(t)
                        assert p >= damped, (n, m, k, t)
                        gap += p - damped
                    assert gap == 1 - distinct_p, (n, m, k)
