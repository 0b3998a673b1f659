"""Bell scenarios, behaviors and deterministic strategies.

A scenario fixes the measurement structure (parties, settings, outcomes, and
which joint measurements exist); a behavior is the dense table of conditional
probabilities over that structure.  Binary outcomes are mapped to signs by
outcome 0 -> +1 and outcome 1 -> -1 throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np

NORM_TOL = 1e-12
STRATEGY_CAP = 10**6


class Framework(Enum):
    COMPLETE = "complete"
    FULL_CORRELATORS = "full"


@dataclass(frozen=True)
class Bipartite:
    """Two parties, m settings each, d outcomes per measurement."""

    m: int
    d: int = 2

    def __post_init__(self):
        if self.m < 2 or self.d < 2:
            raise ValueError(f"need m >= 2 and d >= 2, got m={self.m}, d={self.d}")


@dataclass(frozen=True)
class Multipartite:
    """N parties, two binary measurements each."""

    parties: int

    def __post_init__(self):
        if self.parties < 2:
            raise ValueError(f"need N >= 2 parties, got {self.parties}")


@dataclass(frozen=True)
class Cycle:
    """Ring of 2n binary measurements; only adjacent pairs are measured jointly."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need cycle length n >= 2, got {self.n}")


Family = Bipartite | Multipartite | Cycle


@dataclass(frozen=True)
class Scenario:
    family: Family
    framework: Framework = Framework.COMPLETE

    @property
    def n_parties(self) -> int:
        if isinstance(self.family, Multipartite):
            return self.family.parties
        return 2

    @property
    def n_outcomes(self) -> int:
        """Outcomes per single measurement."""
        if isinstance(self.family, Bipartite):
            return self.family.d
        return 2

    @property
    def settings_per_party(self) -> int:
        if isinstance(self.family, Bipartite):
            return self.family.m
        if isinstance(self.family, Multipartite):
            return 2
        return self.family.n

    @property
    def n_contexts(self) -> int:
        if isinstance(self.family, Bipartite):
            return self.family.m**2
        if isinstance(self.family, Multipartite):
            return 2**self.family.parties
        return 2 * self.family.n

    @property
    def outcomes_per_context(self) -> int:
        return self.n_outcomes**self.n_parties

    @property
    def table_size(self) -> int:
        return self.n_contexts * self.outcomes_per_context

    @property
    def n_strategies(self) -> int:
        return self.n_outcomes ** (self.settings_per_party * self.n_parties)

    def describe(self) -> str:
        f = self.family
        if isinstance(f, Bipartite):
            base = f"(2,{f.m},{f.d})"
        elif isinstance(f, Multipartite):
            base = f"({f.parties},2,2)"
        else:
            base = f"cycle-{f.n}"
        return f"{base}/{self.framework.value}"


Context = tuple[int, ...]


def enumerate_contexts(scenario: Scenario) -> list[Context]:
    """All joint-measurement contexts, in lexicographic order.

    A context is a tuple of setting indices, one per party.  For the cycle
    family the admissible pairs are (x_i, y_i) and (x_{i+1 mod n}, y_i).
    """
    fam = scenario.family
    if isinstance(fam, Bipartite):
        return list(itertools.product(range(fam.m), repeat=2))
    if isinstance(fam, Multipartite):
        return list(itertools.product(range(2), repeat=fam.parties))
    n = fam.n
    pairs = set()
    for i in range(n):
        pairs.add((i, i))
        pairs.add(((i + 1) % n, i))
    return sorted(pairs)


def enumerate_outcomes(scenario: Scenario) -> list[tuple[int, ...]]:
    """Outcome tuples for one context, in lexicographic order."""
    return list(itertools.product(range(scenario.n_outcomes), repeat=scenario.n_parties))


@dataclass(frozen=True)
class DeterministicStrategy:
    """Per-party deterministic response: assignments[i][x] is party i's outcome for setting x."""

    assignments: tuple[tuple[int, ...], ...]

    def outcome(self, party: int, setting: int) -> int:
        return self.assignments[party][setting]


def enumerate_strategies(scenario: Scenario) -> list[DeterministicStrategy]:
    """Exhaustive list of local deterministic strategies, lexicographic order."""
    count = scenario.n_strategies
    if count > STRATEGY_CAP:
        raise ValueError(
            f"scenario {scenario.describe()} has {count} deterministic strategies, "
            f"exceeding the cap of {STRATEGY_CAP}"
        )
    d = scenario.n_outcomes
    n_set = scenario.settings_per_party
    per_party = list(itertools.product(range(d), repeat=n_set))
    out = []
    for combo in itertools.product(per_party, repeat=scenario.n_parties):
        out.append(DeterministicStrategy(assignments=combo))
    return out


@dataclass(frozen=True)
class Behavior:
    """Dense conditional-probability table, indexed by (context rank, outcome rank)."""

    scenario: Scenario
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (self.scenario.table_size,):
            raise ValueError(
                f"table has shape {t.shape}, expected ({self.scenario.table_size},)"
            )
        object.__setattr__(self, "table", t)

    def context_block(self, context_rank: int) -> np.ndarray:
        k = self.scenario.outcomes_per_context
        return self.table[context_rank * k : (context_rank + 1) * k]


def uniform_behavior(scenario: Scenario) -> Behavior:
    k = scenario.outcomes_per_context
    return Behavior(scenario, np.full(scenario.table_size, 1.0 / k))


def strategy_behavior(strategy: DeterministicStrategy, scenario: Scenario) -> Behavior:
    """Point-mass behavior of a deterministic strategy (0/1 table)."""
    contexts = enumerate_contexts(scenario)
    d = scenario.n_outcomes
    npar = scenario.n_parties
    table = np.zeros(scenario.table_size)
    k = scenario.outcomes_per_context
    for c_rank, ctx in enumerate(contexts):
        rank = 0
        for party in range(npar):
            rank = rank * d + strategy.outcome(party, ctx[party])
        table[c_rank * k + rank] = 1.0
    return Behavior(scenario, table)


@dataclass(frozen=True)
class ValidationReport:
    normalization_violation: float
    negativity: float
    ns_violation: float
    tol: float

    @property
    def ok(self) -> bool:
        return (
            self.normalization_violation <= self.tol
            and self.negativity <= self.tol
            and self.ns_violation <= self.tol
        )

    @property
    def max_violation(self) -> float:
        return max(self.normalization_violation, self.negativity, self.ns_violation)


def _marginal(behavior: Behavior, c_rank: int, party: int) -> np.ndarray:
    """Single-party outcome marginal within one context."""
    sc = behavior.scenario
    d = sc.n_outcomes
    block = behavior.context_block(c_rank).reshape((d,) * sc.n_parties)
    axes = tuple(i for i in range(sc.n_parties) if i != party)
    return block.sum(axis=axes)


def validate_behavior(behavior: Behavior, tol: float = NORM_TOL) -> ValidationReport:
    """Check normalization, nonnegativity and the nonsignalling marginal equalities."""
    sc = behavior.scenario
    contexts = enumerate_contexts(sc)
    k = sc.outcomes_per_context
    blocks = behavior.table.reshape(len(contexts), k)
    norm_viol = float(np.max(np.abs(blocks.sum(axis=1) - 1.0)))
    neg = float(max(0.0, -behavior.table.min()))

    # Marginals p(a_i | setting) must agree across every context sharing that
    # party/setting combination.
    ns_viol = 0.0
    seen: dict[tuple[int, int], np.ndarray] = {}
    for c_rank, ctx in enumerate(contexts):
        for party in range(sc.n_parties):
            key = (party, ctx[party])
            marg = _marginal(behavior, c_rank, party)
            if key in seen:
                ns_viol = max(ns_viol, float(np.max(np.abs(marg - seen[key]))))
            else:
                seen[key] = marg
    return ValidationReport(norm_viol, neg, ns_viol, tol)


@dataclass(frozen=True)
class FullCorrObject:
    """Full correlators <prod of signs>, one per context, in context order."""

    scenario: Scenario
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.scenario.n_contexts,):
            raise ValueError(
                f"values have shape {v.shape}, expected ({self.scenario.n_contexts},)"
            )
        object.__setattr__(self, "values", v)

    def matrix(self) -> np.ndarray:
        """Correlators as an m x m matrix (bipartite families only)."""
        fam = self.scenario.family
        if not isinstance(fam, Bipartite):
            raise ValueError("matrix form only defined for bipartite scenarios")
        return self.values.reshape(fam.m, fam.m)


def outcome_signs(scenario: Scenario) -> np.ndarray:
    """Product of outcome signs for each outcome rank of one context (binary only)."""
    if scenario.n_outcomes != 2:
        raise ValueError("sign products require binary outcomes")
    signs = np.ones(scenario.outcomes_per_context)
    for rank, outs in enumerate(enumerate_outcomes(scenario)):
        signs[rank] = (-1.0) ** sum(outs)
    return signs


def full_correlators(behavior: Behavior) -> FullCorrObject:
    """Full correlation values <x.y...> per context; binary outcomes only."""
    sc = behavior.scenario
    if sc.n_outcomes != 2:
        raise ValueError(
            f"full correlators are defined for binary outcomes, got d={sc.n_outcomes}"
        )
    signs = outcome_signs(sc)
    blocks = behavior.table.reshape(sc.n_contexts, sc.outcomes_per_context)
    return FullCorrObject(sc, blocks @ signs)


def pr_box(m: int = 2) -> Behavior:
    """The PR box on the (2,m,2) scenario: a xor b = x.y with uniform marginals."""
    sc = Scenario(Bipartite(m=m, d=2))
    table = np.zeros(sc.table_size)
    # a xor b = x*y for the CHSH case; for m > 2 the embedding puts the
    # anticorrelated pair only on the (1,1) context.
    for c_rank, (x, y) in enumerate(enumerate_contexts(sc)):
        target = (x * y) % 2 if m == 2 else (1 if (x == 1 and y == 1) else 0)
        for o_rank, (a, b) in enumerate(enumerate_outcomes(sc)):
            if (a + b) % 2 == target:
                table[c_rank * 4 + o_rank] = 0.5
    return Behavior(sc, table)
