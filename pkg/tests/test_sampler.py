import json

import numpy as np
import pytest

from bellgeo.params import PolytopeH, ns_inequalities
from bellgeo.sampler import (
    SamplerConfig,
    SamplingMethod,
    gibbs_sample,
    iid_box_sample,
    rejection_sample,
)
from bellgeo.scenario import Bipartite, Cycle, Framework, Scenario

from conftest import evaluator_for


def _box(dim):
    return PolytopeH(A=None, b=None, lo=np.full(dim, -1.0), hi=np.full(dim, 1.0),
                     )


def test_gibbs_box_moments():
    sb = gibbs_sample(_box(2), SamplerConfig(10_000, seed=5))
    assert np.abs(sb.samples.mean(0)).max() <= 0.05
    assert sb.samples.min() < -0.95 and sb.samples.max() > 0.95
    # Var of U(-1,1) is 1/3
    np.testing.assert_allclose(sb.samples.var(0), 1 / 3, atol=0.03)


def test_gibbs_deterministic_per_seed():
    a = gibbs_sample(_box(3), SamplerConfig(2_000, seed=5))
    b = gibbs_sample(_box(3), SamplerConfig(2_000, seed=5))
    c = gibbs_sample(_box(3), SamplerConfig(2_000, seed=6))
    np.testing.assert_array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


def test_gibbs_chains_independent():
    a = gibbs_sample(_box(3), SamplerConfig(500, seed=5), chain_id=0)
    b = gibbs_sample(_box(3), SamplerConfig(500, seed=5), chain_id=1)
    assert not np.array_equal(a.samples, b.samples)


def test_gibbs_stays_feasible_on_ns_polytope():
    sc = Scenario(Bipartite(2, 2))
    poly = ns_inequalities(sc)
    sb = gibbs_sample(poly, SamplerConfig(3_000, seed=12), scenario=sc)
    assert poly.contains(sb.samples).all()


def test_rejection_acceptance_rate_cycle2():
    # the complete cycle-2 polytope occupies ~2.69% of its bounding box
    sc = Scenario(Cycle(2))
    poly = ns_inequalities(sc)
    rb = rejection_sample(poly, SamplerConfig(10_000, seed=11), scenario=sc)
    assert poly.contains(rb.samples).all()
    assert rb.acceptance_rate == pytest.approx(0.0269, rel=0.15)


def test_rejection_matches_gibbs_fraction():
    sc = Scenario(Cycle(2))
    poly = ns_inequalities(sc)
    ev = evaluator_for(sc)
    rb = rejection_sample(poly, SamplerConfig(5_000, seed=1), scenario=sc)
    gb = gibbs_sample(poly, SamplerConfig(5_000, seed=1), scenario=sc)
    f1 = ev.classify_local(rb.samples).mean()
    f2 = ev.classify_local(gb.samples).mean()
    assert abs(f1 - f2) < 0.03


def test_iid_box_uniform():
    ib = iid_box_sample(4, SamplerConfig(50_000, seed=3))
    assert ib.samples.shape == (50_000, 4)
    assert np.abs(ib.samples.mean(0)).max() < 0.02
    assert ib.acceptance_rate is None
    ib2 = iid_box_sample(4, SamplerConfig(50_000, seed=3))
    np.testing.assert_array_equal(ib.samples, ib2.samples)


def test_config_resolution_defaults():
    cfg = SamplerConfig(100, seed=0).resolved(8)
    assert cfg.burn_in == 50 * 8
    assert cfg.thinning == 8


def test_sample_csv_roundtrip(tmp_path):
    sc = Scenario(Bipartite(2, 2), Framework.FULL_CORRELATORS)
    ib = iid_box_sample(4, SamplerConfig(50, seed=9), scenario=sc)
    path = tmp_path / "s.csv"
    ib.to_csv(path)
    lines = path.read_text().splitlines()
    meta = json.loads(lines[0].lstrip("# "))
    assert meta["seed"] == 9 and meta["n_samples"] == 50
    assert meta["scenario"] == "(2,2,2)/full"
    assert lines[1] == "sample_index,coord_0,coord_1,coord_2,coord_3"
    data = np.array([[float(v) for v in ln.split(",")[1:]] for ln in lines[2:]])
    np.testing.assert_array_equal(data, ib.samples)  # %.17g is lossless


def test_invalid_config_rejected():
    with pytest.raises(ValueError):
        SamplerConfig(0, seed=0)
    with pytest.raises(ValueError):
        iid_box_sample(0, SamplerConfig(10, seed=0))


def test_sampling_method_values():
    assert SamplingMethod("gibbs") == SamplingMethod.GIBBS
    assert SamplingMethod("reject") == SamplingMethod.REJECTION
    assert SamplingMethod("iid") == SamplingMethod.IID_BOX
