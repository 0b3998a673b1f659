"""Full-dimensional coordinates for nonsignalling behaviors.

Each scenario family gets a bijective affine map between nonsignalling
behaviors and a coordinate vector; in coordinates the nonsignalling set is a
box intersected with finitely many linear inequalities (the reconstructed
probabilities being nonnegative), which is what the samplers walk over.

Coordinate conventions, fixed once:
  * (2,m,2) and cycle, complete: marginal correlators of party A, then party
    B, then the full correlators in context order.
  * (N,2,2) complete: probabilities p(-1..-1 | settings) for every nonempty
    party subset, ordered by (subset size, subset, settings), all
    lexicographic.
  * (2,2,d), d>2, complete: the kept table entries, contexts in order
    (0,0),(0,1),(1,0),(1,1); for contexts (0,0),(1,1) entries with
    a <= d-2 and all b; for (0,1),(1,0) all a and b <= d-2.
  * full-correlator framework: the correlator vector itself, in context
    order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .scenario import (
    Behavior,
    Bipartite,
    Cycle,
    Framework,
    Multipartite,
    Scenario,
    ValidationReport,
    enumerate_contexts,
    enumerate_outcomes,
    full_correlators,
    validate_behavior,
)

FEAS_TOL = 1e-12


class InvalidBehaviorError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(
            f"behavior fails validation (max violation {report.max_violation:.3e})"
        )


class InfeasibleCoordsError(ValueError):
    """Coordinate point lies outside the nonsignalling polytope."""

    def __init__(self, most_negative: float):
        self.most_negative = most_negative
        super().__init__(
            f"reconstructed probability is negative (most negative {most_negative:.3e})"
        )


@dataclass(frozen=True)
class CoordVector:
    scenario: Scenario
    coords: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.coords, dtype=float)
        expected = dimension(self.scenario)
        if z.shape != (expected,):
            raise ValueError(f"coords have shape {z.shape}, expected ({expected},)")
        object.__setattr__(self, "coords", z)


@dataclass(frozen=True)
class PolytopeH:
    """{z : A z <= b, lo <= z <= hi}; A may be empty (pure box)."""

    A: np.ndarray
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, z: np.ndarray, tol: float = FEAS_TOL) -> np.ndarray:
        """Vectorized membership for points stacked along the first axis."""
        z = np.atleast_2d(z)
        ok = np.all(z >= self.lo - tol, axis=1) & np.all(z <= self.hi + tol, axis=1)
        if self.A is not None and self.A.size:
            ok &= np.all(z @ self.A.T <= self.b + tol, axis=1)
        return ok


def _uses_22d_coords(sc: Scenario) -> bool:
    return (
        isinstance(sc.family, Bipartite)
        and sc.family.d > 2
        and sc.framework == Framework.COMPLETE
    )


def dimension(sc: Scenario) -> int:
    fam = sc.family
    if sc.framework == Framework.FULL_CORRELATORS:
        if sc.n_outcomes != 2:
            raise ValueError("full-correlator framework requires binary outcomes")
        return sc.n_contexts
    if isinstance(fam, Bipartite):
        if fam.d == 2:
            return fam.m**2 + 2 * fam.m
        if fam.m != 2:
            raise ValueError("d > 2 parametrization only available for m = 2")
        return 4 * fam.d * (fam.d - 1)
    if isinstance(fam, Multipartite):
        return 3**fam.parties - 1
    return 4 * fam.n


@lru_cache(maxsize=None)
def _multipartite_index(sc: Scenario) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Coordinate order for (N,2,2): (party subset, settings on that subset)."""
    n = sc.family.parties
    entries = []
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            for settings in itertools.product(range(2), repeat=size):
                entries.append((subset, settings))
    return entries


@lru_cache(maxsize=None)
def _22d_kept(sc: Scenario) -> list[tuple[int, int, int]]:
    """Kept entries (context_rank, a, b) for the (2,2,d) parametrization."""
    d = sc.family.d
    kept = []
    for c_rank, (x, y) in enumerate(enumerate_contexts(sc)):
        if x == y:
            pairs = [(a, b) for a in range(d - 1) for b in range(d)]
        else:
            pairs = [(a, b) for a in range(d) for b in range(d - 1)]
        for a, b in pairs:
            kept.append((c_rank, a, b))
    return kept


def _marginal_correlators(b: Behavior) -> tuple[np.ndarray, np.ndarray]:
    """<x> and <y> for the two-party binary families, one entry per setting."""
    sc = b.scenario
    n_set = sc.settings_per_party
    contexts = enumerate_contexts(sc)
    alpha = np.full(n_set, np.nan)
    beta = np.full(n_set, np.nan)
    for c_rank, (x, y) in enumerate(contexts):
        block = b.context_block(c_rank).reshape(2, 2)
        if np.isnan(alpha[x]):
            pa = block.sum(axis=1)
            alpha[x] = pa[0] - pa[1]
        if np.isnan(beta[y]):
            pb = block.sum(axis=0)
            beta[y] = pb[0] - pb[1]
    return alpha, beta


def to_coords(b: Behavior, tol: float = 1e-10) -> CoordVector:
    sc = b.scenario
    report = validate_behavior(b, tol)
    if not report.ok:
        raise InvalidBehaviorError(report)

    if sc.framework == Framework.FULL_CORRELATORS:
        return CoordVector(sc, full_correlators(b).values)

    fam = sc.family
    if isinstance(fam, (Cycle,)) or (isinstance(fam, Bipartite) and fam.d == 2):
        alpha, beta = _marginal_correlators(b)
        tau = full_correlators(b).values
        return CoordVector(sc, np.concatenate([alpha, beta, tau]))
    if isinstance(fam, Multipartite):
        contexts = enumerate_contexts(sc)
        outcomes = enumerate_outcomes(sc)
        ctx_rank = {c: i for i, c in enumerate(contexts)}
        coords = np.empty(dimension(sc))
        for i, (subset, settings) in enumerate(_multipartite_index(sc)):
            full_ctx = [0] * fam.parties
            for p, s in zip(subset, settings):
                full_ctx[p] = s
            c_rank = ctx_rank[tuple(full_ctx)]
            block = b.context_block(c_rank)
            total = 0.0
            for o_rank, outs in enumerate(outcomes):
                if all(outs[p] == 1 for p in subset):
                    total += block[o_rank]
            coords[i] = total
        return CoordVector(sc, coords)
    # (2,2,d), d > 2
    d = fam.d
    coords = np.array(
        [b.table[c * d * d + a * d + bb] for c, a, bb in _22d_kept(sc)]
    )
    return CoordVector(sc, coords)


def _reconstruct_table(sc: Scenario, z: np.ndarray) -> np.ndarray:
    """Linear reconstruction of the probability table from coordinates."""
    contexts = enumerate_contexts(sc)
    if sc.framework == Framework.FULL_CORRELATORS:
        # canonical preimage: unbiased marginals
        table = np.empty(sc.table_size)
        signs = _sign_products(sc)
        k = sc.outcomes_per_context
        for c_rank in range(len(contexts)):
            table[c_rank * k : (c_rank + 1) * k] = (1.0 + signs * z[c_rank]) / k
        return table

    fam = sc.family
    if isinstance(fam, Cycle) or (isinstance(fam, Bipartite) and fam.d == 2):
        n_set = sc.settings_per_party
        alpha, beta, tau = z[:n_set], z[n_set : 2 * n_set], z[2 * n_set :]
        table = np.empty(sc.table_size)
        for c_rank, (x, y) in enumerate(contexts):
            for o_rank, (a, b) in enumerate(enumerate_outcomes(sc)):
                sa, sb = (-1.0) ** a, (-1.0) ** b
                table[c_rank * 4 + o_rank] = (
                    1.0 + sa * alpha[x] + sb * beta[y] + sa * sb * tau[c_rank]
                ) / 4.0
        return table
    if isinstance(fam, Multipartite):
        n = fam.parties
        q = {(): 1.0}
        for i, key in enumerate(_multipartite_index(sc)):
            q[key] = z[i]
        table = np.empty(sc.table_size)
        outcomes = enumerate_outcomes(sc)
        for c_rank, ctx in enumerate(contexts):
            for o_rank, outs in enumerate(outcomes):
                minus = tuple(p for p in range(n) if outs[p] == 1)
                plus = [p for p in range(n) if outs[p] == 0]
                total = 0.0
                for k in range(len(plus) + 1):
                    for extra in itertools.combinations(plus, k):
                        subset = tuple(sorted(minus + extra))
                        if not subset:
                            total += 1.0
                            continue
                        settings = tuple(ctx[p] for p in subset)
                        total += (-1.0) ** len(extra) * q[(subset, settings)]
                table[c_rank * len(outcomes) + o_rank] = total
        return table
    # (2,2,d) recovery: fill the discarded row/column of each context from
    # single-party marginals, which are themselves sums of kept entries.
    d = fam.d
    blocks = {c: np.full((d, d), np.nan) for c in range(4)}
    for i, (c, a, b) in enumerate(_22d_kept(sc)):
        blocks[c][a, b] = z[i]
    # context ranks: 0=(0,0), 1=(0,1), 2=(1,0), 3=(1,1)
    pb0 = np.empty(d)  # p(b | y=0) from context (1,0), last entry by normalization
    pb0[: d - 1] = blocks[2][:, : d - 1].sum(axis=0)
    pb0[d - 1] = 1.0 - pb0[: d - 1].sum()
    pb1 = np.empty(d)  # p(b | y=1) from context (0,1)
    pb1[: d - 1] = blocks[1][:, : d - 1].sum(axis=0)
    pb1[d - 1] = 1.0 - pb1[: d - 1].sum()
    pa0 = np.empty(d)  # p(a | x=0) from context (0,0)
    pa0[: d - 1] = blocks[0][: d - 1, :].sum(axis=1)
    pa0[d - 1] = 1.0 - pa0[: d - 1].sum()
    pa1 = np.empty(d)  # p(a | x=1) from context (1,1)
    pa1[: d - 1] = blocks[3][: d - 1, :].sum(axis=1)
    pa1[d - 1] = 1.0 - pa1[: d - 1].sum()
    blocks[0][d - 1, :] = pb0 - blocks[0][: d - 1, :].sum(axis=0)
    blocks[3][d - 1, :] = pb1 - blocks[3][: d - 1, :].sum(axis=0)
    blocks[1][:, d - 1] = pa0 - blocks[1][:, : d - 1].sum(axis=1)
    blocks[2][:, d - 1] = pa1 - blocks[2][:, : d - 1].sum(axis=1)
    return np.concatenate([blocks[c].ravel() for c in range(4)])


@lru_cache(maxsize=None)
def _sign_products(sc: Scenario) -> np.ndarray:
    from .scenario import outcome_signs

    return outcome_signs(sc)


@lru_cache(maxsize=None)
def reconstruction_affine(sc: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """(M, t) with table(z) = M @ z + t; cached per scenario."""
    dim = dimension(sc)
    t = _reconstruct_table(sc, np.zeros(dim))
    M = np.empty((len(t), dim))
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = 1.0
        M[:, k] = _reconstruct_table(sc, e) - t
    return M, t


def from_coords(c: CoordVector, tol: float = FEAS_TOL) -> Behavior:
    """Rebuild the behavior; raises InfeasibleCoordsError outside the NS set."""
    table = _reconstruct_table(c.scenario, c.coords)
    low = float(table.min())
    if low < -tol:
        raise InfeasibleCoordsError(low)
    return Behavior(c.scenario, table)


@lru_cache(maxsize=None)
def ns_inequalities(sc: Scenario) -> PolytopeH:
    """H-representation of the nonsignalling set in coordinates."""
    dim = dimension(sc)
    if sc.framework == Framework.FULL_CORRELATORS:
        return PolytopeH(
            A=np.zeros((0, dim)),
            b=np.zeros(0),
            lo=-np.ones(dim),
            hi=np.ones(dim),
        )
    prob_style = isinstance(sc.family, Multipartite) or _uses_22d_coords(sc)
    lo = np.zeros(dim) if prob_style else -np.ones(dim)
    hi = np.ones(dim)
    M, t = reconstruction_affine(sc)
    rows = []
    bs = []
    for i in range(M.shape[0]):
        row = -M[i]
        rhs = t[i]
        nz = np.flatnonzero(np.abs(row) > 1e-13)
        if len(nz) == 0:
            continue
        if len(nz) == 1:
            # single-coordinate row: skip when the box already implies it
            j = nz[0]
            coef = row[j]
            if coef < 0 and rhs / coef <= lo[j] + 1e-13:
                continue
            if coef > 0 and rhs / coef >= hi[j] - 1e-13:
                continue
        rows.append(row)
        bs.append(rhs)
    if rows:
        A = np.array(rows)
        b = np.array(bs)
        # drop exact duplicates, keep first occurrences in order
        key = np.round(np.column_stack([A, b]), 12)
        _, idx = np.unique(key, axis=0, return_index=True)
        idx = np.sort(idx)
        A, b = A[idx], b[idx]
    else:
        A = np.zeros((0, dim))
        b = np.zeros(0)
    return PolytopeH(A=A, b=b, lo=lo, hi=hi)


def interior_point(sc: Scenario) -> np.ndarray:
    """Coordinates of the uniform behavior (strict interior of the NS set)."""
    from .scenario import uniform_behavior

    return to_coords(uniform_behavior(sc)).coords
