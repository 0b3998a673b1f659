"""Full-scale acceptance runs (minutes each; marked `acceptance`).

Monte-Carlo tolerances assume 1e5 samples (Gibbs) or 1e6 (i.i.d. hypercube).
Run with: pytest -m acceptance
"""

import math

import numpy as np
import pytest

from bellgeo.distance import local_vertex_basis, nl_distance
from bellgeo.experiments import ExperimentSpec, reproduce, run_22d, run_histogram
from bellgeo.norms import gamma2_norm, pi_norm, tau_pr
from bellgeo.params import to_coords
from bellgeo.scenario import (
    Bipartite,
    Scenario,
    enumerate_strategies,
    pr_box,
    strategy_behavior,
)

from conftest import evaluator_for

pytestmark = pytest.mark.acceptance

SEED = 2024


def _assert_rows(report):
    for row in report["rows"]:
        assert row["pass"], (
            f'{row["label"]}: computed {row["computed_percent"]:.4f}% vs paper '
            f'{row["paper_percent"]}% (tol ±{row["tolerance_pp"]}pp)'
        )


def test_table_I_complete_gibbs():
    # (2,m,2) complete local fractions {94.14, 62.11, 21.20, 3.73}% +- 1.5pp
    _assert_rows(reproduce("I", seed=SEED))


def test_table_II_full_iid():
    # (2,m,2) full-correlator {66.66, 14.01, 0.847}% +- 0.5pp; m=5 0.016% +- 0.02pp
    _assert_rows(reproduce("II", seed=SEED))


def test_table_III_cycle_analytic_mc_and_m1_m2():
    # analytic ratio exact; MC fractions {66.7, 95.6, 99.7}% +- 0.5pp;
    # rejection (M1) vs Gibbs (M2) within 2pp on the complete cycle-2 polytope
    _assert_rows(reproduce("III", seed=SEED))


def test_table_IV_multipartite_complete():
    # (3,2,2) complete 58.52% +- 1.5pp
    _assert_rows(reproduce("IV", seed=SEED))


def test_table_V_multipartite_full():
    # (3,2,2) full 10.23% +- 0.5pp; (4,2,2) full 0.0188% +- 0.01pp
    _assert_rows(reproduce("V", seed=SEED))


def test_quantifier_oracle():
    sc = Scenario(Bipartite(2, 2))
    basis = local_vertex_basis(sc)
    assert nl_distance(to_coords(pr_box()).coords, basis).nl == pytest.approx(
        0.25, abs=1e-9
    )
    ev = evaluator_for(sc)
    for strat in enumerate_strategies(sc):
        z = to_coords(strategy_behavior(strat, sc)).coords
        assert ev.distance(z).nl <= 1e-12
    rng = np.random.default_rng(SEED)
    lam = rng.dirichlet(np.ones(basis.columns.shape[1]), size=1000)
    Q = lam @ basis.columns.T
    assert np.all(ev.distances(Q) <= 1e-12)


def test_norm_suite():
    assert pi_norm(tau_pr()) == pytest.approx(2.0, abs=1e-9)
    assert gamma2_norm(tau_pr()) == pytest.approx(math.sqrt(2), abs=1e-5)
    rng = np.random.default_rng(SEED)
    for m in (2, 3, 4, 5, 6):
        for _ in range(1000):
            M = rng.uniform(-1, 1, (m, m))
            p = pi_norm(M)
            g = gamma2_norm(M)
            assert g <= p + 1e-6, (m, p, g)
            # is_classical => is_quantum by the same ordering
            if p <= 1 + 1e-6:
                assert g <= 1 + 2e-6


def test_concentration_mode_shift_full_correlators():
    # Fig. 3b analogue: the NL histogram peak moves right as m grows
    modes = {}
    for m in (3, 4, 5):
        spec = ExperimentSpec("2m2", "full", m=m, method="iid",
                              n_samples=6000, seed=SEED)
        modes[m] = run_histogram(spec).mode_bin
    assert modes[3] < modes[4] < modes[5], modes


def test_chsh_histogram_monotone_decreasing():
    spec = ExperimentSpec("2m2", "complete", m=2, method="gibbs",
                          n_samples=20_000, seed=SEED, bins=10,
                          hist_range=(0.0, 0.3))
    h = run_histogram(spec)
    assert np.all(np.diff(h.counts) <= 0), h.counts


def test_22d_d2_reduces_to_chsh():
    spec = ExperimentSpec("22d", "complete", d=2, method="gibbs",
                          n_samples=100_000, seed=SEED)
    rep, hist, nb = run_22d(spec)
    assert 100 * rep.local_fraction == pytest.approx(94.14, abs=1.5)
    assert hist.total == 100_000


@pytest.mark.parametrize(
    "d,locked_fraction",
    [
        # no published value exists for d=3,4; fractions locked from the
        # first oracle run at this seed (5k Gibbs samples) as regression
        # values. The local fraction grows with d at fixed sample size —
        # whether that reflects genuine volume growth or near-boundary
        # concentration is exactly what the nb diagnostics probe.
        (3, 0.941),
        (4, 0.9724),
    ],
)
def test_22d_higher_d_regression(d, locked_fraction):
    spec = ExperimentSpec("22d", "complete", d=d, method="gibbs",
                          n_samples=5_000, seed=SEED)
    rep, hist, nb = run_22d(spec)
    assert rep.local_fraction == pytest.approx(locked_fraction, abs=1e-12)
    assert set(nb) == {"frac_le_10eps", "frac_le_100eps"}
    assert 0.0 <= nb["frac_le_10eps"] <= nb["frac_le_100eps"] <= 1.0
    assert int(hist.counts.sum()) + hist.local_count == hist.total
