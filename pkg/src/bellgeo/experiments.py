"""Reproducible experiment harness: volume estimates, NL histograms, and the
paper-table reproduction driver.

Every run is fully determined by an :class:`ExperimentSpec`; every output
file embeds the spec as canonical JSON, so re-running an embedded spec
reproduces identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .cycle import local_volume_ratio, pyramid_volume
from .distance import DEFAULT_EPS, NlEvaluator, local_vertex_basis
from .params import dimension, interior_point, ns_inequalities
from .sampler import (
    SampleBatch,
    SamplerConfig,
    SamplingMethod,
    gibbs_sample,
    iid_box_sample,
    rejection_sample,
)
from .scenario import Bipartite, Cycle, Framework, Multipartite, Scenario

HIST_BINS_DEFAULT = 100
HIST_RANGE_DEFAULT = (0.0, 0.5)


class InvalidSpecError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    scenario_kind: str  # 2m2 | N22 | 22d | cycle
    framework: str = "complete"
    m: int | None = None
    N: int | None = None
    d: int | None = None
    n: int | None = None
    method: str = "gibbs"
    n_samples: int = 100_000
    seed: int = 0
    eps: float = DEFAULT_EPS
    bins: int = HIST_BINS_DEFAULT
    hist_range: tuple[float, float] = HIST_RANGE_DEFAULT

    def __post_init__(self):
        if self.scenario_kind not in ("2m2", "N22", "22d", "cycle"):
            raise InvalidSpecError(f"unknown scenario kind {self.scenario_kind!r}")
        if self.framework not in ("complete", "full"):
            raise InvalidSpecError(f"unknown framework {self.framework!r}")
        if self.method not in ("gibbs", "reject", "iid"):
            raise InvalidSpecError(f"unknown method {self.method!r}")
        if self.n_samples < 1:
            raise InvalidSpecError("n_samples must be >= 1")
        if self.bins < 1:
            raise InvalidSpecError("bins must be >= 1")
        if not self.hist_range[0] < self.hist_range[1]:
            raise InvalidSpecError("histogram range must be increasing")

    def scenario(self) -> Scenario:
        fw = Framework(self.framework)
        if self.scenario_kind == "2m2":
            if self.m is None:
                raise InvalidSpecError("2m2 requires --m")
            return Scenario(Bipartite(m=self.m, d=2), fw)
        if self.scenario_kind == "N22":
            if self.N is None:
                raise InvalidSpecError("N22 requires --N")
            return Scenario(Multipartite(parties=self.N), fw)
        if self.scenario_kind == "22d":
            if self.d is None:
                raise InvalidSpecError("22d requires --d")
            if fw != Framework.COMPLETE:
                raise InvalidSpecError("22d is a complete-framework scenario")
            return Scenario(Bipartite(m=2, d=self.d), fw)
        if self.n is None:
            raise InvalidSpecError("cycle requires --n")
        return Scenario(Cycle(n=self.n), fw)

    def to_json(self) -> str:
        doc = asdict(self)
        doc["hist_range"] = list(self.hist_range)
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        doc = json.loads(text)
        if "hist_range" in doc:
            doc["hist_range"] = tuple(doc["hist_range"])
        return cls(**doc)


@dataclass
class Histogram:
    edges: np.ndarray  # bins + 1, strictly increasing
    counts: np.ndarray  # per-bin counts of nonlocal NL values
    total: int
    local_count: int
    spec: ExperimentSpec | None = None

    def __post_init__(self):
        if not np.all(np.diff(self.edges) > 0):
            raise ValueError("histogram edges must be strictly increasing")
        if int(self.counts.sum()) + self.local_count != self.total:
            raise ValueError("histogram counts do not conserve the sample total")

    @property
    def mode_bin(self) -> int:
        return int(np.argmax(self.counts))

    def to_csv(self, path) -> None:
        summary = {
            "total": self.total,
            "local_count": self.local_count,
            "mode_bin": self.mode_bin,
        }
        with open(path, "w") as f:
            if self.spec is not None:
                f.write(f"# spec: {self.spec.to_json()}\n")
            f.write(f"# summary: {json.dumps(summary, sort_keys=True)}\n")
            f.write("bin_index,bin_lo,bin_hi,count\n")
            for i, c in enumerate(self.counts):
                f.write(f"{i},{self.edges[i]:.10g},{self.edges[i+1]:.10g},{int(c)}\n")


@dataclass
class VolumeReport:
    scenario: str
    n_samples: int
    local_count: int
    local_fraction: float
    ns_acceptance: float | None = None
    spec: ExperimentSpec | None = None

    def json_doc(self) -> dict:
        doc = {
            "scenario": self.scenario,
            "n_samples": self.n_samples,
            "local_count": self.local_count,
            "local_fraction": self.local_fraction,
        }
        if self.ns_acceptance is not None:
            doc["ns_acceptance"] = self.ns_acceptance
        return doc

    def to_csv(self, path) -> None:
        with open(path, "w") as f:
            if self.spec is not None:
                f.write(f"# spec: {self.spec.to_json()}\n")
            f.write("scenario,n_samples,local_count,local_fraction,ns_acceptance\n")
            acc = "" if self.ns_acceptance is None else f"{self.ns_acceptance:.8g}"
            # scenario names contain commas, e.g. (2,3,2)/full
            f.write(
                f'"{self.scenario}",{self.n_samples},{self.local_count},'
                f"{self.local_fraction:.8g},{acc}\n"
            )


def draw_samples(spec: ExperimentSpec) -> SampleBatch:
    """Sample the scenario's coordinate polytope with the configured method."""
    sc = spec.scenario()
    poly = ns_inequalities(sc)
    cfg = SamplerConfig(n_samples=spec.n_samples, seed=spec.seed,
                        method=SamplingMethod(spec.method))
    if spec.method == "gibbs":
        return gibbs_sample(poly, cfg, start=interior_point(sc), scenario=sc)
    if spec.method == "reject":
        return rejection_sample(poly, cfg, scenario=sc)
    # iid is exact only when the polytope is the plain box (full frameworks)
    if poly.A is not None and poly.A.size:
        raise InvalidSpecError(
            "iid sampling is only uniform on pure-box (full-correlator) polytopes;"
            " use gibbs or reject"
        )
    return iid_box_sample(poly.dim, cfg, lo=float(poly.lo[0]), hi=float(poly.hi[0]),
                          scenario=sc)


def make_evaluator(sc: Scenario) -> NlEvaluator:
    return NlEvaluator(local_vertex_basis(sc))


def run_volume(spec: ExperimentSpec, evaluator: NlEvaluator | None = None) -> VolumeReport:
    sc = spec.scenario()
    batch = draw_samples(spec)
    ev = evaluator if evaluator is not None else make_evaluator(sc)
    local = ev.classify_local(batch.samples, eps=spec.eps)
    count = int(local.sum())
    return VolumeReport(
        scenario=sc.describe(),
        n_samples=spec.n_samples,
        local_count=count,
        local_fraction=count / spec.n_samples,
        ns_acceptance=batch.acceptance_rate,
        spec=spec,
    )


def nl_values(spec: ExperimentSpec, evaluator: NlEvaluator | None = None) -> np.ndarray:
    sc = spec.scenario()
    batch = draw_samples(spec)
    ev = evaluator if evaluator is not None else make_evaluator(sc)
    return ev.distances(batch.samples, eps=spec.eps)


def run_histogram(spec: ExperimentSpec,
                  evaluator: NlEvaluator | None = None) -> Histogram:
    values = nl_values(spec, evaluator)
    local = values <= spec.eps
    edges = np.linspace(spec.hist_range[0], spec.hist_range[1], spec.bins + 1)
    counts, _ = np.histogram(values[~local], bins=edges)
    # NL values beyond the range are folded into the last bin to conserve totals
    counts[-1] += int(np.sum(values[~local] >= spec.hist_range[1]))
    return Histogram(
        edges=edges,
        counts=counts,
        total=len(values),
        local_count=int(local.sum()),
        spec=spec,
    )


def run_22d(spec: ExperimentSpec):
    """(2,2,d) pipeline: volume + histogram + near-boundary mass diagnostics."""
    if spec.scenario_kind != "22d":
        raise InvalidSpecError("run_22d requires a 22d spec")
    if spec.d is None or not 2 <= spec.d <= 4:
        raise InvalidSpecError("run_22d supports d in {2,3,4}")
    sc = spec.scenario()
    ev = make_evaluator(sc)
    values = nl_values(spec, ev)
    local = values <= spec.eps
    count = int(local.sum())
    report = VolumeReport(
        scenario=sc.describe(),
        n_samples=spec.n_samples,
        local_count=count,
        local_fraction=count / spec.n_samples,
        spec=spec,
    )
    edges = np.linspace(spec.hist_range[0], spec.hist_range[1], spec.bins + 1)
    counts, _ = np.histogram(values[~local], bins=edges)
    counts[-1] += int(np.sum(values[~local] >= spec.hist_range[1]))
    hist = Histogram(edges=edges, counts=counts, total=len(values),
                     local_count=count, spec=spec)
    near_boundary = {
        "frac_le_10eps": float(np.mean(values <= 10 * spec.eps)),
        "frac_le_100eps": float(np.mean(values <= 100 * spec.eps)),
    }
    return report, hist, near_boundary


# -- paper-table reproduction ------------------------------------------------

TABLE_TARGETS = {
    "I": {"m": [2, 3, 4, 5], "percent": [94.14, 62.11, 21.20, 3.73], "tol_pp": 1.5},
    "II": {"m": [2, 3, 4, 5], "percent": [66.66, 14.01, 0.847, 0.016],
           "tol_pp": [0.5, 0.5, 0.5, 0.02]},
    "III": {"n": [2, 3, 4], "percent": [66.7, 95.6, 99.7], "tol_pp": 0.5,
            "m1_m2_pp": 2.0},
    "IV": {"percent": 58.52, "tol_pp": 1.5},
    "V": {"percent": [10.23, 0.0188], "tol_pp": [0.5, 0.01]},
}


def _row(label, paper_pct, computed_pct, tol_pp):
    ok = abs(computed_pct - paper_pct) <= tol_pp
    return {
        "label": label,
        "paper_percent": paper_pct,
        "computed_percent": computed_pct,
        "tolerance_pp": tol_pp,
        "pass": bool(ok),
    }


def reproduce(table_id: str, seed: int = 2024, scale: float = 1.0,
              progress=None) -> dict:
    """Scaled-down reproduction of one paper table.

    scale multiplies the default sample counts (1e5 Gibbs / 1e6 iid);
    progress, if given, is called with each completed row dict.
    """

    def emit(row):
        if progress is not None:
            progress(row)
        return row

    rows = []
    n_gibbs = max(1000, int(100_000 * scale))
    n_iid = max(1000, int(1_000_000 * scale))
    if table_id == "I":
        t = TABLE_TARGETS["I"]
        for m, pct in zip(t["m"], t["percent"]):
            spec = ExperimentSpec("2m2", "complete", m=m, method="gibbs",
                                  n_samples=n_gibbs, seed=seed)
            rep = run_volume(spec)
            rows.append(emit(_row(f"(2,{m},2) complete", pct,
                                  100 * rep.local_fraction, t["tol_pp"])))
    elif table_id == "II":
        t = TABLE_TARGETS["II"]
        for m, pct, tol in zip(t["m"], t["percent"], t["tol_pp"]):
            spec = ExperimentSpec("2m2", "full", m=m, method="iid",
                                  n_samples=n_iid, seed=seed)
            rep = run_volume(spec)
            rows.append(emit(_row(f"(2,{m},2) full", pct,
                                  100 * rep.local_fraction, tol)))
    elif table_id == "III":
        t = TABLE_TARGETS["III"]
        for n, pct in zip(t["n"], t["percent"]):
            spec = ExperimentSpec("cycle", "full", n=n, method="iid",
                                  n_samples=n_iid, seed=seed)
            rep = run_volume(spec)
            rows.append(emit(_row(f"cycle-{n} full (MC)", pct,
                                  100 * rep.local_fraction, t["tol_pp"])))
            rows.append(emit(_row(f"cycle-{n} full (analytic)", pct,
                                  100 * local_volume_ratio(n), 0.1)))
        # M1 vs M2 cross-check on the complete cycle-2 polytope
        ev = None
        fracs = {}
        for method in ("reject", "gibbs"):
            spec = ExperimentSpec("cycle", "complete", n=2, method=method,
                                  n_samples=n_gibbs, seed=seed)
            sc = spec.scenario()
            if ev is None:
                ev = make_evaluator(sc)
            rep = run_volume(spec, ev)
            fracs[method] = 100 * rep.local_fraction
            label = {"reject": "M1", "gibbs": "M2"}[method]
            rows.append(emit(_row(f"cycle-2 complete {label}",
                                  94.11 if method == "reject" else 93.98,
                                  fracs[method], 2.0)))
        rows.append(emit({
            "label": "M1 vs M2 agreement",
            "paper_percent": 0.13,
            "computed_percent": abs(fracs["reject"] - fracs["gibbs"]),
            "tolerance_pp": t["m1_m2_pp"],
            "pass": bool(abs(fracs["reject"] - fracs["gibbs"]) <= t["m1_m2_pp"]),
        }))
    elif table_id == "IV":
        t = TABLE_TARGETS["IV"]
        spec = ExperimentSpec("N22", "complete", N=3, method="gibbs",
                              n_samples=n_gibbs, seed=seed)
        rep = run_volume(spec)
        rows.append(emit(_row("(3,2,2) complete", t["percent"],
                              100 * rep.local_fraction, t["tol_pp"])))
    elif table_id == "V":
        t = TABLE_TARGETS["V"]
        for N, pct, tol in zip([3, 4], t["percent"], t["tol_pp"]):
            spec = ExperimentSpec("N22", "full", N=N, method="iid",
                                  n_samples=n_iid, seed=seed)
            rep = run_volume(spec)
            rows.append(emit(_row(f"({N},2,2) full", pct,
                                  100 * rep.local_fraction, tol)))
    elif table_id == "cycle-analytic":
        for n, pct in zip([2, 3, 4], [66.7, 95.6, 99.7]):
            rows.append(emit(_row(f"cycle-{n} analytic", pct,
                                  100 * local_volume_ratio(n), 0.1)))
    else:
        raise InvalidSpecError(
            f"unknown table {table_id!r}; expected I, II, III, IV, V,"
            " or cycle-analytic"
        )
    return {"table": table_id, "seed": seed, "scale": scale, "rows": rows,
            "pass": all(r["pass"] for r in rows)}
