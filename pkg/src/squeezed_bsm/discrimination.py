"""Turning detection tables into discrimination performance figures.

Every detector pattern is classified by how many Bell states can produce
it: patterns occurring in exactly one state identify it with certainty
(zero-error operation counts only these); patterns shared with unequal
weights can be guessed at the cost of some error probability, and the
greedy budgeted selection picks the subset of shared patterns with the
best success-to-error ratios.  An exhaustive subset-search oracle is
provided to audit the greedy on small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import BELL_ORDER, BellLabel, DetectionTable
from .fock import Occupation

# Weighted probabilities below this count as zero when deciding whether a
# pattern is shared between states.  Interference residues at the singular
# squeezing values sit many orders below; probabilities a grid step away
# from them sit many orders above.
TAU_ZERO = 1e-10

UNIQUE = "unique"
DUPLICATE = "duplicate"
EXCLUDED = "excluded"


@dataclass(frozen=True)
class PatternClass:
    """One detector pattern with its prior-weighted per-state probabilities.

    ``dps`` is the success-probability gain from declaring ``guess`` on this
    pattern; ``dpe`` the accompanying error-probability cost.
    """

    pattern: Occupation
    q: tuple[float, float, float, float]  # weighted probs, BELL_ORDER
    kind: str
    guess: BellLabel
    dps: float
    dpe: float

    @property
    def ratio(self) -> float:
        return self.dps / self.dpe if self.dpe > 0.0 else math.inf

    @property
    def confidence(self) -> float:
        tot = self.dps + self.dpe
        return self.dps / tot if tot > 0.0 else 1.0


@dataclass(frozen=True)
class ErrorBudget:
    """Maximum allowable error probability for the budgeted selection."""

    pe_max: float

    def __post_init__(self):
        if math.isnan(self.pe_max) or self.pe_max < 0.0:
            raise ValueError(f"pe_max must be >= 0, got {self.pe_max}")


@dataclass(frozen=True)
class SelectedPattern:
    pattern: Occupation
    guess: BellLabel
    dps: float
    dpe: float

    @property
    def confidence(self) -> float:
        tot = self.dps + self.dpe
        return self.dps / tot if tot > 0.0 else 1.0


@dataclass(frozen=True)
class DiscriminationResult:
    """Aggregate discrimination performance for one table and budget.

    ``erasure`` is the in-table inconclusive mass (patterns not declared),
    so p_s + p_e + erasure equals the tabulated mass 1 - deficit; the
    truncation deficit is reported separately.
    """

    p_s: float
    p_e: float
    alpha: float | None
    erasure: float
    deficit: float
    pe_max: float
    selected: tuple[SelectedPattern, ...] = field(default=())

    @property
    def n_selected(self) -> int:
        return len(self.selected)

    def to_json_obj(self) -> dict:
        return {
            "p_s": self.p_s,
            "p_e": self.p_e,
            "alpha": self.alpha,
            "erasure": self.erasure,
            "deficit": self.deficit,
            "pe_max": "inf" if math.isinf(self.pe_max) else self.pe_max,
            "n_selected": self.n_selected,
            "selected": [
                {"pattern": list(s.pattern), "guess": s.guess.value,
                 "dps": s.dps, "dpe": s.dpe, "confidence": s.confidence}
                for s in self.selected
            ],
        }


def confidence(p_s: float, p_e: float) -> float | None:
    """Probability the declared state is correct, p_s/(p_s + p_e).

    Undefined (None) when nothing is ever declared.
    """
    tot = p_s + p_e
    if tot <= 0.0:
        return None
    return p_s / tot


def classify(table: DetectionTable, tau_zero: float = TAU_ZERO) -> list[PatternClass]:
    """Classify every tabulated pattern by its multiplicity across states.

    A pattern is unique when exactly one state produces it above tau_zero,
    excluded when all its producers have equal weight (no marginal
    distinguishability, including the vacuous all-below-threshold case),
    and duplicate otherwise.  Output is sorted by pattern; argmax ties are
    broken by Bell-state declaration order.
    """
    out: list[PatternClass] = []
    for pattern in table.patterns():
        qmap = table.weighted(pattern)
        q = tuple(qmap[label] for label in BELL_ORDER)
        support = [x for x in q if x > tau_zero]
        best = 0
        for i in range(1, 4):
            if q[i] > q[best]:
                best = i
        total = math.fsum(q)
        dps = q[best]
        dpe = total - dps
        if len(support) == 1:
            kind = UNIQUE
            dpe = 0.0
        elif not support or max(support) - min(support) <= tau_zero:
            kind = EXCLUDED
        else:
            kind = DUPLICATE
        out.append(PatternClass(pattern=pattern, q=q, kind=kind,
                                guess=BELL_ORDER[best], dps=dps, dpe=dpe))
    return out


def usd_success(classes: list[PatternClass]) -> float:
    """Zero-error success probability: total weight of unique patterns."""
    return math.fsum(c.dps for c in classes if c.kind == UNIQUE)


def _candidate_order(classes: list[PatternClass],
                     allow_coinflip: bool) -> list[PatternClass]:
    kinds = (DUPLICATE, EXCLUDED) if allow_coinflip else (DUPLICATE,)
    cands = [c for c in classes if c.kind in kinds]
    cands.sort(key=lambda c: (-c.ratio, -c.dps, c.pattern))
    return cands


def _result(classes: list[PatternClass], admitted: list[PatternClass],
            pe_max: float) -> DiscriminationResult:
    p_s = math.fsum(c.dps for c in classes if c.kind == UNIQUE) \
        + math.fsum(c.dps for c in admitted)
    p_e = math.fsum(c.dpe for c in admitted)
    table_mass = math.fsum(math.fsum(c.q) for c in classes)
    erasure = max(table_mass - p_s - p_e, 0.0)
    return DiscriminationResult(
        p_s=p_s, p_e=p_e, alpha=confidence(p_s, p_e), erasure=erasure,
        deficit=max(1.0 - table_mass, 0.0), pe_max=pe_max,
        selected=tuple(SelectedPattern(c.pattern, c.guess, c.dps, c.dpe)
                       for c in admitted))


def psd_select(classes: list[PatternClass], budget: ErrorBudget,
               allow_coinflip: bool = False) -> DiscriminationResult:
    """Greedy budgeted selection of shared patterns.

    Unique patterns always count.  Shared candidates are walked in order of
    decreasing success-to-error ratio (ties: larger gain first, then
    pattern order) and admitted whenever the running error stays within the
    budget.  Equal-weight (excluded) patterns are only considered when
    ``allow_coinflip`` is set.
    """
    admitted: list[PatternClass] = []
    running = 0.0
    for cand in _candidate_order(classes, allow_coinflip):
        if running + cand.dpe <= budget.pe_max:
            running += cand.dpe
            admitted.append(cand)
    return _result(classes, admitted, budget.pe_max)


# Exhaustive search is limited to instances this size (memory: two float
# arrays of 2^n entries).
ORACLE_MAX_DUPLICATES = 25


def psd_oracle(classes: list[PatternClass], budget: ErrorBudget,
               allow_coinflip: bool = False) -> DiscriminationResult:
    """True optimum over all shared-pattern subsets within the budget.

    Brute force over the 2^n subsets of candidates; rejects instances with
    more than ORACLE_MAX_DUPLICATES of them.  Used to audit the greedy.
    """
    # exact reduction: a pattern costing more than the whole budget can
    # never be part of a feasible subset
    cands = [c for c in _candidate_order(classes, allow_coinflip)
             if c.dpe <= budget.pe_max]
    n = len(cands)
    if n > ORACLE_MAX_DUPLICATES:
        raise ValueError(f"{n} candidate patterns exceed the oracle limit "
                         f"of {ORACLE_MAX_DUPLICATES}")
    if n == 0:
        return _result(classes, [], budget.pe_max)
    gains = np.array([c.dps for c in cands])
    costs = np.array([c.dpe for c in cands])
    size = 1 << n
    # bitmask subset sums by doubling: masks with highest bit i extend the
    # already-complete block of masks below 2^i
    total_gain = np.zeros(size)
    total_cost = np.zeros(size)
    for i in range(n):
        half = 1 << i
        total_gain[half:2 * half] = total_gain[:half] + gains[i]
        total_cost[half:2 * half] = total_cost[:half] + costs[i]
    feasible = total_cost <= budget.pe_max
    total_gain[~feasible] = -1.0
    best = int(np.argmax(total_gain))
    admitted = [cands[i] for i in range(n) if best >> i & 1]
    return _result(classes, admitted, budget.pe_max)
