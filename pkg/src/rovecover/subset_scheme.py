"""Exact coverage distribution for the subset allocation scheme.

k agents each select, independently and uniformly, one of the C(n, m)
m-element subsets of an n-node network. The quantity of interest is the
size t of the union of the selected subsets: how many distinct nodes got
visited at least once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

from .combinatorics import binomial, rational_to_json
from .errors import BudgetExceeded

SCHEME_SUBSET = "subset"
SCHEME_MULTINOMIAL = "multinomial"
_SCHEMES = (SCHEME_SUBSET, SCHEME_MULTINOMIAL)

DEFAULT_NESTED_TERM_BUDGET = 10**7


@dataclass(frozen=True)
class Params:
    """Experiment triple: n nodes, m nodes visited per agent, k agents."""

    n: int
    m: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.m <= self.n:
            raise ValueError(f"m must satisfy 1 <= m <= n, got m={self.m}, n={self.n}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


def support_bounds(params: Params, scheme_tag: str) -> tuple[int, int]:
    """Possible union sizes: [m, min(km, n)] for subset draws, [1, min(km, n)]
    when per-stage repetition is allowed."""
    lo = params.m if scheme_tag == SCHEME_SUBSET else 1
    return lo, min(params.k * params.m, params.n)


@dataclass(frozen=True)
class CoverageDistribution:
    """Exact PMF of the covered-node count t over its full support range."""

    params: Params
    scheme_tag: str
    support_lo: int
    support_hi: int
    pmf: Mapping[int, Fraction]

    def __post_init__(self):
        if self.scheme_tag not in _SCHEMES:
            raise ValueError(f"unknown scheme_tag {self.scheme_tag!r}")
        lo, hi = support_bounds(self.params, self.scheme_tag)
        if (self.support_lo, self.support_hi) != (lo, hi):
            raise ValueError(
                f"support [{self.support_lo}, {self.support_hi}] does not match "
                f"scheme {self.scheme_tag!r} bounds [{lo}, {hi}]"
            )
        if sorted(self.pmf) != list(range(lo, hi + 1)):
            raise ValueError("pmf keys must cover every t in the support range")
        if any(p < 0 for p in self.pmf.values()):
            raise ValueError("pmf values must be nonnegative")

    def probability(self, t: int) -> Fraction:
        """pmf(t), zero outside the support."""
        return self.pmf.get(t, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.pmf.values(), Fraction(0))

    def mean(self) -> Fraction:
        """Exact expectation sum_t t * pmf(t)."""
        return sum((t * p for t, p in self.pmf.items()), Fraction(0))

    def tail(self, tau: int) -> Fraction:
        """Pr(t >= tau); 1 below the support, 0 above it."""
        if tau <= self.support_lo:
            return Fraction(1)
        return sum(
            (p for t, p in self.pmf.items() if t >= tau), Fraction(0)
        )

    def to_json_dict(self) -> dict:
        return {
            "scheme": self.scheme_tag,
            "n": self.params.n,
            "m": self.params.m,
            "k": self.params.k,
            "pmf": [
                {"t": t, **rational_to_json(self.pmf[t])}
                for t in range(self.support_lo, self.support_hi + 1)
            ],
        }

    def to_csv_rows(self) -> tuple[list[str], list[list]]:
        header = ["t", "num", "den", "approx"]
        rows = [
            [t, str(p.numerator), str(p.denominator), float(p)]
            for t, p in sorted(self.pmf.items())
        ]
        return header, rows


def make_distribution(
    params: Params,
    scheme_tag: str,
    values: Mapping[int, Fraction],
    check_total: bool = True,
) -> CoverageDistribution:
    """Assemble a distribution, verifying exact normalization by default."""
    lo, hi = support_bounds(params, scheme_tag)
    pmf = {t: values[t] for t in range(lo, hi + 1)}
    if check_total:
        total = sum(pmf.values(), Fraction(0))
        if total != 1:
            raise ArithmeticError(
                f"pmf for {params} ({scheme_tag}) sums to {total}, expected 1"
            )
    # Distributions are cached and shared between callers; freeze the mapping.
    return CoverageDistribution(params, scheme_tag, lo, hi, MappingProxyType(pmf))


@lru_cache(maxsize=None)
def q_count(k: int, m: int, t: int) -> int:
    """Number of k x t binary matrices with exactly m ones per row and no
    all-zero column, by inclusion-exclusion over the empty columns."""
    if k < 1 or m < 1 or t < 1:
        raise ValueError(f"q_count requires k, m, t >= 1, got k={k}, m={m}, t={t}")
    if t < m or t > k * m:
        return 0
    total = 0
    for i in range(t - m + 1):
        term = binomial(t, i) * binomial(t - i, m) ** k
        total += -term if i & 1 else term
    return total


@lru_cache(maxsize=None)
def coverage_pmf(params: Params) -> CoverageDistribution:
    """Exact distribution of the union size under the subset scheme.

    For each t in [m, min(km, n)] the probability is the count of covering
    arrangements, C(n, t) * q_count(k, m, t), over the C(n, m)^k equally
    likely ordered subset collections. All arithmetic is exact; the shared
    denominator is computed once.
    """
    n, m, k = params.n, params.m, params.k
    denominator = binomial(n, m) ** k
    lo, hi = support_bounds(params, SCHEME_SUBSET)
    values = {
        t: Fraction(binomial(n, t) * q_count(k, m, t), denominator)
        for t in range(lo, hi + 1)
    }
    return make_distribution(params, SCHEME_SUBSET, values)


def mean_coverage(params: Params) -> Fraction:
    """Exact expected number of covered nodes, as the PMF-weighted sum."""
    return coverage_pmf(params).mean()


def tail_probability(params: Params, tau: int) -> Fraction:
    """Pr(covered count >= tau) under the subset scheme."""
    return coverage_pmf(params).tail(tau)


def _choose(a: int, b: int) -> int:
    # Permissive variant for chained products: impossible selections give a
    # zero term instead of an error.
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


def nested_term_count(params: Params) -> int:
    """Summand count of the legacy nested formula across the whole support."""
    if params.k < 4:
        raise ValueError(f"nested formula requires k >= 4, got k={params.k}")
    lo, hi = support_bounds(params, SCHEME_SUBSET)
    return (hi - lo + 1) * (params.m + 1) ** (params.k - 2)


def _nested_numerator(n: int, m: int, k: int, t: int) -> int:
    # Direct evaluation of the chained-binomial sum: agent 1 fixes m covered
    # nodes; each agent j = 2..k-1 revisits m_j covered nodes and adds
    # m - m_j new ones; the final agent is forced to land the total on
    # exactly t. A zero factor kills the term early.
    total = 0
    for overlaps in itertools.product(range(m + 1), repeat=k - 2):
        term = 1
        covered = m
        for m_j in overlaps:
            term *= _choose(covered, m_j) * _choose(n - covered, m - m_j)
            if term == 0:
                break
            covered += m - m_j
        if term == 0:
            continue
        shared = sum(overlaps)
        term *= _choose(covered, k * m - t - shared)
        term *= _choose(n - covered, t - covered)
        total += term
    return total


def nested_pmf_terms(
    params: Params, term_budget: int | None = None
) -> dict[int, Fraction]:
    """Per-t values of the legacy nested-sum formula, evaluated directly
    with no algebraic simplification.

    The formula chains conditional choices of the 2nd through k-th agents
    given the first agent's subset, hence the C(n, m)^(k-1) normalizer. It
    is defined only for k >= 4 and is exponential in k, so evaluation is
    refused beyond ``term_budget`` total summands. No normalization check
    is applied here: this is the raw cross-check quantity.
    """
    budget = DEFAULT_NESTED_TERM_BUDGET if term_budget is None else term_budget
    required = nested_term_count(params)
    if required > budget:
        raise BudgetExceeded(
            f"nested evaluation needs {required} summands, budget is {budget}",
            required=required,
            budget=budget,
        )
    n, m, k = params.n, params.m, params.k
    denominator = binomial(n, m) ** (k - 1)
    lo, hi = support_bounds(params, SCHEME_SUBSET)
    return {
        t: Fraction(_nested_numerator(n, m, k, t), denominator)
        for t in range(lo, hi + 1)
    }


def coverage_pmf_nested(
    params: Params, term_budget: int | None = None
) -> CoverageDistribution:
    """Coverage distribution via the nested formula; cross-check oracle only."""
    values = nested_pmf_terms(params, term_budget)
    return make_distribution(params, SCHEME_SUBSET, values)
