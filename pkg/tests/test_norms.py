import math

import numpy as np
import pytest

from bellgeo.norms import (
    NumericalFailure,
    classify,
    gamma2_norm,
    norm_experiment,
    pi_norm,
    tau_pr,
)
from bellgeo.sampler import SamplerConfig


def test_pi_norm_oracles():
    assert pi_norm(np.zeros((3, 3))) == 0.0
    u = np.array([1.0, -1.0, 1.0])
    v = np.array([-1.0, 1.0, 1.0])
    # a single sign dyad has gauge exactly 1
    assert pi_norm(np.outer(u, v)) == pytest.approx(1.0, abs=1e-9)
    # the PR correlation matrix needs two dyads: pi = 2
    assert pi_norm(tau_pr()) == pytest.approx(2.0, abs=1e-9)


def test_gamma2_norm_oracles():
    assert gamma2_norm(np.ones((3, 3))) == pytest.approx(1.0, abs=2e-6)
    assert gamma2_norm(tau_pr()) == pytest.approx(math.sqrt(2), abs=1e-5)
    assert gamma2_norm(np.eye(4)) == pytest.approx(1.0, abs=2e-6)
    assert gamma2_norm(np.diag([0.3, -1.7, 0.5])) == pytest.approx(1.7, abs=2e-6)


def test_gamma2_factors_certify_value():
    g, (X, Y) = gamma2_norm(tau_pr(), return_factors=True)
    assert np.abs(X @ Y - tau_pr()).max() < 1e-5
    assert (X**2).sum(axis=1).max() <= g + 1e-4
    assert (Y**2).sum(axis=0).max() <= g + 1e-4


def test_norm_properties_random_matrices():
    rng = np.random.default_rng(0)
    for m in (2, 3, 4):
        for _ in range(8):
            M = rng.uniform(-1, 1, (m, m))
            p, g = pi_norm(M), gamma2_norm(M)
            # gamma2 <= pi always (quantum set contains classical set)
            assert g <= p + 1e-6
            # absolute homogeneity
            assert pi_norm(2 * M) == pytest.approx(2 * p, rel=1e-6, abs=1e-9)
            assert gamma2_norm(0.5 * M) == pytest.approx(0.5 * g, abs=2e-6)
            # invariance under row/column permutations
            P = np.eye(m)[rng.permutation(m)]
            Q = np.eye(m)[rng.permutation(m)]
            assert pi_norm(P @ M @ Q) == pytest.approx(p, abs=1e-7)
            assert gamma2_norm(P @ M @ Q) == pytest.approx(g, abs=3e-6)
            if g > 0:
                assert gamma2_norm(M / g) == pytest.approx(1.0, abs=1e-5)


def test_norm_lower_bounds():
    rng = np.random.default_rng(4)
    for _ in range(10):
        M = rng.uniform(-1, 1, (3, 3))
        # both norms dominate the entrywise sup norm
        assert pi_norm(M) >= np.abs(M).max() - 1e-9
        assert gamma2_norm(M) >= np.abs(M).max() - 1e-5


def test_classify_oracles():
    r = classify(tau_pr())
    assert not r.is_classical and not r.is_quantum
    # Tsirelson point: quantum but not classical
    r = classify(tau_pr() / math.sqrt(2))
    assert r.is_quantum and not r.is_classical
    # sign dyad: classical (hence quantum)
    r = classify(np.outer([1.0, -1.0], [-1.0, 1.0]))
    assert r.is_classical and r.is_quantum


def test_classify_implication_classical_subset_quantum():
    rng = np.random.default_rng(2)
    for _ in range(30):
        M = rng.uniform(-1, 1, (3, 3)) * rng.uniform(0.2, 1.5)
        r = classify(M)
        if r.is_classical:
            assert r.is_quantum


def test_flatness_ratio():
    r = classify(tau_pr())
    # m^2 * sup / l1 = 4 * 1 / 4 = 1
    assert r.flatness_ratio == pytest.approx(1.0)
    assert r.entry_sup == pytest.approx(1.0)
    assert r.entry_l1 == pytest.approx(4.0)


def test_pi_norm_size_cap():
    with pytest.raises(ValueError):
        pi_norm(np.ones((10, 10)))


def test_norm_experiment_small():
    st = norm_experiment(2, 150, SamplerConfig(150, seed=9))
    # ~2/3 of uniform 2x2 matrices are classical (Table II m=2 analogue)
    assert st.frac_pi_le_1 == pytest.approx(0.6667, abs=0.12)
    assert st.frac_gamma2_le_1 >= st.frac_pi_le_1
    row = st.csv_row().split(",")
    assert row[0] == "2" and row[1] == "150"
    assert len(row) == 6
