"""Uniform sampling of nonsignalling polytopes.

Three methods:

  * ``gibbs_sample`` -- coordinate-Gibbs over an H-representation (method
    M2): round-robin over coordinates, each update drawing uniformly on the
    feasible segment with the remaining coordinates fixed;
  * ``rejection_sample`` -- i.i.d. draws from the bounding box filtered by
    feasibility (M1), exactly uniform;
  * ``iid_box_sample`` -- plain i.i.d. box draws, for the full-correlator
    hypercube experiments where the box *is* the nonsignalling set.

RNG contract: counter-based ``numpy`` Philox keyed by ``(seed, chain_id)``,
so parallel chains are reproducible independent of scheduling.  This
generator family is fixed; changing it changes every sampled table.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .params import PolytopeH
from .scenario import Scenario

REJECTION_CHUNK = 65536
REJECTION_WARN_RATE = 1e-6
REJECTION_MAX_DRAWS = 500_000_000


class SamplingMethod(Enum):
    GIBBS = "gibbs"
    REJECTION = "reject"
    IID_BOX = "iid"


class DegeneratePolytopeError(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    n_samples: int
    seed: int
    burn_in: int | None = None  # default 50*dim, resolved at run time
    thinning: int | None = None  # default dim
    method: SamplingMethod = SamplingMethod.GIBBS

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thinning is not None and self.thinning < 0:
            raise ValueError("thinning must be >= 0")

    def resolved(self, dim: int) -> "SamplerConfig":
        return SamplerConfig(
            n_samples=self.n_samples,
            seed=self.seed,
            burn_in=50 * dim if self.burn_in is None else self.burn_in,
            thinning=dim if self.thinning is None else self.thinning,
            method=self.method,
        )


@dataclass
class SampleBatch:
    scenario: Scenario | None
    config: SamplerConfig
    samples: np.ndarray  # (n_samples, dim)
    acceptance_rate: float | None = None
    chain_id: int = 0

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def config_json(self) -> str:
        cfg = self.config
        doc = {
            "scenario": self.scenario.describe() if self.scenario else None,
            "method": cfg.method.value,
            "seed": cfg.seed,
            "burn_in": cfg.burn_in,
            "thinning": cfg.thinning,
            "n_samples": cfg.n_samples,
            "chain_id": self.chain_id,
        }
        if self.acceptance_rate is not None:
            doc["acceptance_rate"] = self.acceptance_rate
        return json.dumps(doc, sort_keys=True)

    def to_csv(self, path) -> None:
        header = ["sample_index"] + [f"coord_{i}" for i in range(self.dim)]
        with open(path, "w") as f:
            f.write(f"# {self.config_json()}\n")
            f.write(",".join(header) + "\n")
            for i, row in enumerate(self.samples):
                f.write(f"{i}," + ",".join(f"{v:.17g}" for v in row) + "\n")


def _rng(seed: int, chain_id: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), chain_id]))


def gibbs_sample(
    poly: PolytopeH,
    cfg: SamplerConfig,
    start: np.ndarray | None = None,
    scenario: Scenario | None = None,
    chain_id: int = 0,
) -> SampleBatch:
    """Coordinate-Gibbs chain over the polytope; keeps every `thinning`-th
    state after `burn_in` coordinate updates."""
    dim = poly.dim
    cfg = cfg.resolved(dim)
    rng = _rng(cfg.seed, chain_id)
    if start is None:
        if scenario is not None:
            from .params import interior_point

            start = interior_point(scenario)
        else:
            start = 0.5 * (np.asarray(poly.lo) + np.asarray(poly.hi))
    z = np.array(start, dtype=float)
    if z.shape != (dim,):
        raise ValueError(f"start point has dimension {z.shape}, expected ({dim},)")
    if not poly.contains(z, tol=1e-9)[0]:
        raise DegeneratePolytopeError("starting point is not inside the polytope")

    A = poly.A
    b = poly.b
    has_rows = A is not None and A.shape[0] > 0
    if has_rows:
        r = A @ z  # maintained incrementally
        cols = [A[:, i] for i in range(dim)]
        pos_masks = [c > 1e-14 for c in cols]
        neg_masks = [c < -1e-14 for c in cols]

    out = np.empty((cfg.n_samples, dim))
    kept = 0
    step = 0
    total_updates = cfg.burn_in + max(cfg.thinning, 1) * cfg.n_samples
    i = 0
    while kept < cfg.n_samples:
        lo_i, hi_i = poly.lo[i], poly.hi[i]
        if has_rows:
            a = cols[i]
            slack = b - r + a * z[i]  # rhs with coordinate i removed
            pos, neg = pos_masks[i], neg_masks[i]
            if pos.any():
                hi_i = min(hi_i, np.min(slack[pos] / a[pos]))
            if neg.any():
                lo_i = max(lo_i, np.max(slack[neg] / a[neg]))
        if hi_i < lo_i - 1e-9:
            raise DegeneratePolytopeError(
                f"empty feasible segment for coordinate {i}: [{lo_i}, {hi_i}]"
            )
        lo_i, hi_i = min(lo_i, hi_i), max(lo_i, hi_i)
        z_new = rng.uniform(lo_i, hi_i)
        if has_rows:
            r = r + cols[i] * (z_new - z[i])
        z[i] = z_new
        step += 1
        i = (i + 1) % dim
        if step > cfg.burn_in and (step - cfg.burn_in) % max(cfg.thinning, 1) == 0:
            out[kept] = z
            kept += 1
        if step > total_updates + dim + 1:
            break
    return SampleBatch(scenario, cfg, out, acceptance_rate=None, chain_id=chain_id)


def rejection_sample(
    poly: PolytopeH,
    cfg: SamplerConfig,
    scenario: Scenario | None = None,
    chain_id: int = 0,
) -> SampleBatch:
    """Exactly uniform samples: i.i.d. box draws filtered by feasibility."""
    dim = poly.dim
    cfg = cfg.resolved(dim)
    rng = _rng(cfg.seed, chain_id)
    lo = np.asarray(poly.lo, dtype=float)
    hi = np.asarray(poly.hi, dtype=float)
    chunks = []
    accepted = 0
    drawn = 0
    warned = False
    while accepted < cfg.n_samples:
        Z = rng.uniform(lo, hi, size=(REJECTION_CHUNK, dim))
        keep = Z[poly.contains(Z)]
        chunks.append(keep)
        accepted += len(keep)
        drawn += REJECTION_CHUNK
        rate = accepted / drawn
        if not warned and drawn >= 2_000_000 and rate < REJECTION_WARN_RATE:
            warnings.warn(
                f"rejection acceptance rate {rate:.2e} below {REJECTION_WARN_RATE:.0e};"
                " consider Gibbs sampling",
                RuntimeWarning,
            )
            warned = True
        if drawn > REJECTION_MAX_DRAWS and accepted < cfg.n_samples:
            raise RuntimeError(
                f"rejection sampling exhausted {drawn} draws with only "
                f"{accepted} acceptances; use Gibbs sampling instead"
            )
    samples = np.vstack(chunks)[: cfg.n_samples]
    return SampleBatch(scenario, cfg, samples, acceptance_rate=accepted / drawn,
                       chain_id=chain_id)


def iid_box_sample(
    dim: int,
    cfg: SamplerConfig,
    lo: float = -1.0,
    hi: float = 1.0,
    scenario: Scenario | None = None,
    chain_id: int = 0,
) -> SampleBatch:
    """i.i.d. uniform draws on [lo, hi]^dim (default [-1, 1]^dim)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    cfg = cfg.resolved(dim)
    rng = _rng(cfg.seed, chain_id)
    samples = rng.uniform(lo, hi, size=(cfg.n_samples, dim))
    return SampleBatch(scenario, cfg, samples, acceptance_rate=None, chain_id=chain_id)
