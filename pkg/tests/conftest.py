import numpy as np
import pytest

from bellgeo.distance import NlEvaluator, local_vertex_basis
from bellgeo.params import ns_inequalities


def sample_ns(sc, basis, n, seed):
    """Uniform-ish NS points: local Dirichlet mixture pushed a random distance
    along a random ray bisected against the NS polytope."""
    poly = ns_inequalities(sc)
    rng = np.random.default_rng(seed)
    V = basis.columns
    pts = []
    while len(pts) < n:
        lam = rng.dirichlet(np.ones(V.shape[1]) * 0.5)
        q = V @ lam
        d = rng.normal(size=poly.dim)
        d /= np.linalg.norm(d)
        lo_t, hi_t = 0.0, 4.0
        for _ in range(50):
            mid = (lo_t + hi_t) / 2
            if poly.contains(q + mid * d)[0]:
                lo_t = mid
            else:
                hi_t = mid
        pts.append(q + rng.uniform(0, lo_t) * d)
    return np.array(pts)


_EVALUATORS = {}


def evaluator_for(sc) -> NlEvaluator:
    """Session-cached evaluator (hull/certificate setup is the expensive part)."""
    key = sc.describe()
    if key not in _EVALUATORS:
        _EVALUATORS[key] = NlEvaluator(local_vertex_basis(sc))
    return _EVALUATORS[key]


def pytest_collection_modifyitems(config, items):
    if config.getoption("-m", default=""):
        return
    # acceptance runs are minutes each; keep them last so fast failures surface
    items.sort(key=lambda it: bool(it.get_closest_marker("acceptance")))
