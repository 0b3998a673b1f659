import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellgeo.scenario import (
    Behavior,
    Bipartite,
    Cycle,
    Framework,
    Multipartite,
    Scenario,
    enumerate_contexts,
    enumerate_outcomes,
    enumerate_strategies,
    full_correlators,
    outcome_signs,
    pr_box,
    strategy_behavior,
    uniform_behavior,
    validate_behavior,
)


def test_scenario_counts_chsh():
    sc = Scenario(Bipartite(m=2, d=2))
    assert sc.n_parties == 2
    assert sc.n_contexts == 4
    assert sc.outcomes_per_context == 4
    assert sc.table_size == 16
    assert sc.n_strategies == 16
    assert sc.describe() == "(2,2,2)/complete"


def test_scenario_counts_families():
    assert Scenario(Bipartite(m=3, d=2)).n_contexts == 9
    assert Scenario(Bipartite(m=2, d=3)).outcomes_per_context == 9
    assert Scenario(Multipartite(parties=3)).n_contexts == 8
    assert Scenario(Multipartite(parties=3)).n_strategies == 64
    assert Scenario(Cycle(n=3)).n_contexts == 6
    assert Scenario(Cycle(n=2), Framework.FULL_CORRELATORS).describe() == "cycle-2/full"


def test_invalid_families_rejected():
    with pytest.raises(ValueError):
        Bipartite(m=0, d=2)
    with pytest.raises(ValueError):
        Bipartite(m=2, d=1)
    with pytest.raises(ValueError):
        Multipartite(parties=1)
    with pytest.raises(ValueError):
        Cycle(n=1)


def test_enumerate_contexts_cycle():
    # cycle pairs each y_i with x_i and x_{i+1 mod n}
    ctxs = enumerate_contexts(Scenario(Cycle(n=2)))
    assert len(ctxs) == 4
    assert all(len(c) == 2 for c in ctxs)


def test_strategy_behaviors_are_valid():
    for sc in (
        Scenario(Bipartite(2, 2)),
        Scenario(Bipartite(2, 3)),
        Scenario(Multipartite(3)),
        Scenario(Cycle(2)),
    ):
        for strat in enumerate_strategies(sc)[:6]:
            b = strategy_behavior(strat, sc)
            rep = validate_behavior(b)
            assert rep.ok, (sc.describe(), rep)
            assert set(np.unique(b.table)) <= {0.0, 1.0}


def test_uniform_behavior_valid():
    for sc in (Scenario(Bipartite(3, 2)), Scenario(Multipartite(4))):
        assert validate_behavior(uniform_behavior(sc)).ok


def test_pr_box_is_nonsignalling_and_extremal():
    b = pr_box()
    rep = validate_behavior(b)
    assert rep.ok
    # perfect correlation a xor b = x.y: correlators (+1,+1,+1,-1)
    corr = full_correlators(b).values
    np.testing.assert_allclose(corr, [1.0, 1.0, 1.0, -1.0])
    # CHSH value 4 (algebraic maximum)
    assert abs(corr[0] + corr[1] + corr[2] - corr[3] - 4.0) < 1e-12


def test_outcome_signs_chsh():
    sc = Scenario(Bipartite(2, 2))
    np.testing.assert_allclose(outcome_signs(sc), [1, -1, -1, 1])


def test_full_correlators_reject_nonbinary():
    sc = Scenario(Bipartite(2, 3))
    with pytest.raises(ValueError):
        full_correlators(uniform_behavior(sc))


def test_full_correlators_uniform_are_zero():
    for sc in (Scenario(Bipartite(3, 2)), Scenario(Cycle(3))):
        np.testing.assert_allclose(full_correlators(uniform_behavior(sc)).values, 0.0)


def test_behavior_shape_check():
    sc = Scenario(Bipartite(2, 2))
    with pytest.raises(ValueError):
        Behavior(sc, np.zeros(7))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 15), st.integers(0, 15))
def test_mixtures_of_strategies_validate(i, j):
    sc = Scenario(Bipartite(2, 2))
    strat = enumerate_strategies(sc)
    mix = 0.5 * (strategy_behavior(strat[i], sc).table + strategy_behavior(strat[j], sc).table)
    assert validate_behavior(Behavior(sc, mix)).ok


def test_enumerate_outcomes_order():
    sc = Scenario(Bipartite(2, 2))
    assert enumerate_outcomes(sc) == [(0, 0), (0, 1), (1, 0), (1, 1)]
