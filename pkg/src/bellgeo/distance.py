"""Trace-distance nonlocality quantifier.

NL(q) is the minimal normalized L1 distance from a behavior to the convex
hull of deterministic-strategy images.  The distance itself is one LP per
query; for the sampling experiments (1e5..1e6 queries) the evaluator layers
three exact shortcuts in front of the LP:

  * an H-representation of the local polytope (qhull) when the coordinate
    dimension is small: inside -> NL = 0, far outside -> certified nonlocal;
  * a pool of dual certificates (CHSH-type functionals plus duals harvested
    from previously solved LPs): a certificate value above the threshold
    proves nonlocality;
  * the LP itself for everything undecided, warm-started from a handcrafted
    feasible basis (nearest vertex plus absolute-residual split).

All three layers agree with the LP semantics; the shortcuts only ever
replace an LP whose outcome they certify.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .lp import (
    DEGEN_STREAK,
    FEAS_TOL,
    PIVOT_TOL,
    LinearProgram,
    LPSolution,
    LPStatus,
    SimplexSolver,
)
from .params import (
    CoordVector,
    dimension,
    ns_inequalities,
    reconstruction_affine,
)
from .scenario import (
    Bipartite,
    Cycle,
    Framework,
    Multipartite,
    Scenario,
    enumerate_contexts,
    enumerate_strategies,
    outcome_signs,
    strategy_behavior,
)

DEFAULT_EPS = 1e-10
HULL_MAX_DIM = 9
HULL_MAX_VERTICES = 600
CERT_POOL_CAP = 2048


class InfeasibleQueryError(ValueError):
    pass


class LPFailureError(RuntimeError):
    pass


@dataclass(frozen=True)
class VertexBasis:
    """Coordinate-space images of the deterministic strategies (columns)."""

    scenario: Scenario
    columns: np.ndarray  # (dim, n_vertices)

    @property
    def n_vertices(self) -> int:
        return self.columns.shape[1]


@dataclass
class DistanceResult:
    nl: float
    weights: np.ndarray
    closest_point: np.ndarray
    status: LPStatus


def local_vertex_basis(sc: Scenario) -> VertexBasis:
    """All strategy images; duplicates removed in the full-correlator framework."""
    from .params import to_coords

    strategies = enumerate_strategies(sc)
    cols = np.empty((dimension(sc), len(strategies)))
    for j, s in enumerate(strategies):
        cols[:, j] = to_coords(strategy_behavior(s, sc), tol=1e-9).coords
    if sc.framework == Framework.FULL_CORRELATORS:
        cols = np.unique(np.round(cols, 9).T, axis=0).T
    return VertexBasis(sc, np.ascontiguousarray(cols))


def _chsh_certificates(sc: Scenario) -> list[np.ndarray]:
    """CHSH-type functionals with +-1 coefficients, in metric space.

    For binary bipartite-like scenarios these are the facet classes known in
    closed form; they are only used as nonlocality certificates, so an
    incomplete list is always safe.
    """
    contexts = enumerate_contexts(sc)
    fam = sc.family
    certs: list[np.ndarray] = []

    def corr_to_metric(weights_per_context: np.ndarray) -> np.ndarray:
        if sc.framework == Framework.FULL_CORRELATORS:
            return weights_per_context
        signs = outcome_signs(sc)
        return np.kron(weights_per_context, signs)

    if isinstance(fam, Bipartite) and fam.d == 2:
        m = fam.m
        idx = {c: i for i, c in enumerate(contexts)}
        for x1, x2 in itertools.combinations(range(m), 2):
            for y1, y2 in itertools.combinations(range(m), 2):
                cells = [(x1, y1), (x1, y2), (x2, y1), (x2, y2)]
                for pattern in itertools.product([1.0, -1.0], repeat=4):
                    if np.prod(pattern) != -1.0:
                        continue
                    w = np.zeros(len(contexts))
                    for cell, s in zip(cells, pattern):
                        w[idx[cell]] = s
                    certs.append(corr_to_metric(w))
    elif isinstance(fam, Cycle) and fam.n <= 6:
        k = len(contexts)
        for pattern in itertools.product([1.0, -1.0], repeat=k):
            if np.prod(pattern) != -1.0:
                continue
            certs.append(corr_to_metric(np.array(pattern)))
    elif isinstance(fam, Multipartite):
        # CHSH between each party pair, the remaining settings held fixed
        N = fam.parties
        idx = {c: i for i, c in enumerate(contexts)}
        for pi, pj in itertools.combinations(range(N), 2):
            others = [k for k in range(N) if k not in (pi, pj)]
            for fixed in itertools.product(range(2), repeat=len(others)):
                cells = []
                for xi, xj in itertools.product(range(2), repeat=2):
                    ctx = [0] * N
                    ctx[pi], ctx[pj] = xi, xj
                    for k, xf in zip(others, fixed):
                        ctx[k] = xf
                    cells.append(idx[tuple(ctx)])
                for pattern in itertools.product([1.0, -1.0], repeat=4):
                    if np.prod(pattern) != -1.0:
                        continue
                    w = np.zeros(len(contexts))
                    for cell, s in zip(cells, pattern):
                        w[cell] = s
                    certs.append(corr_to_metric(w))
    return certs


class _MembershipOracle:
    """Fast `z in conv(V)` test: a phase-1 simplex specialized to the fixed
    system [V; 1] lam = [z; 1], lam >= 0.

    The constraint matrix never changes between queries, so the oracle keeps
    it (and the last optimal basis) around: when consecutive queries are close
    -- e.g. along a Gibbs chain -- the previous basis often certifies the new
    point feasible with a single back-substitution and no pivots at all.
    On infeasibility the final phase-1 duals are a separating hyperplane,
    returned for certificate harvesting.
    """

    def __init__(self, V: np.ndarray):
        d, nv = V.shape
        self.m = d + 1
        self.n = nv
        self.A = np.vstack([V, np.ones(nv)])
        self._basis: np.ndarray | None = None
        self._binv: np.ndarray | None = None

    def query(self, z: np.ndarray) -> tuple[bool | None, np.ndarray | None]:
        """Returns (is_member, separator). is_member None means undecided
        (numerical trouble); separator g satisfies g.[z;1] > 0 >= g.[V;1]."""
        m, n, A = self.m, self.n, self.A
        b = np.concatenate([z, [1.0]])
        # warm check: is the previous basis still feasible?
        if self._binv is not None:
            xb = self._binv @ b
            art = self._basis >= n
            if xb.min() >= -1e-11 and (not art.any() or xb[art].max() <= 1e-11):
                return True, None
        signs = np.where(b >= 0, 1.0, -1.0)
        binv = np.diag(signs)
        basis = np.arange(n, n + m)  # artificial columns
        xb = np.abs(b)
        in_basis = np.zeros(n, dtype=bool)
        degen = 0
        for _ in range(50 * (m + n)):
            obj = xb[basis >= n].sum()
            if obj <= 1e-10:
                break
            cb = (basis >= n).astype(float)
            y = cb @ binv
            rc = -(y @ A)
            rc[in_basis] = 0.0
            if degen <= DEGEN_STREAK:
                j = int(np.argmin(rc))
                if rc[j] >= -1e-11:
                    g = y / max(np.abs(y).max(), 1e-300)
                    return False, g
            else:  # Bland
                neg = np.flatnonzero(rc < -1e-11)
                if len(neg) == 0:
                    g = y / max(np.abs(y).max(), 1e-300)
                    return False, g
                j = int(neg[0])
            d_col = binv @ A[:, j]
            pos = d_col > PIVOT_TOL
            if not pos.any():
                return None, None  # should not happen in phase 1
            ratios = np.full(m, np.inf)
            ratios[pos] = xb[pos] / d_col[pos]
            # prefer kicking artificials out on ties
            r = int(np.argmin(ratios + 1e-14 * (basis < n)))
            step = ratios[r]
            degen = degen + 1 if step <= 1e-13 else 0
            xb = xb - step * d_col
            xb[r] = step
            if basis[r] < n:
                in_basis[basis[r]] = False
            in_basis[j] = True
            basis[r] = j
            piv = d_col[r]
            eta = -d_col / piv
            eta[r] = 1.0 / piv - 1.0
            binv = binv + np.outer(eta, binv[r])
        else:
            return None, None
        if (basis >= n).any() and xb[basis >= n].max() > 1e-9:
            return None, None
        self._basis = basis
        self._binv = binv
        return True, None


class NlEvaluator:
    """Batch-friendly NL(q) evaluation for a fixed scenario and vertex basis."""

    def __init__(self, basis: VertexBasis):
        self.basis = basis
        sc = basis.scenario
        self.scenario = sc
        self.poly = ns_inequalities(sc)
        self.k_norm = sc.n_contexts
        if sc.framework == Framework.COMPLETE:
            M, _ = reconstruction_affine(sc)
            self.metric_map = M
            self.W = np.ascontiguousarray(M @ basis.columns)  # (K, nv)
            # lifts a coordinate-space functional g to metric space: M^T w = g
            self._lift = np.linalg.pinv(M.T)
        else:
            self.metric_map = None
            self.W = np.ascontiguousarray(basis.columns)
            self._lift = None
        self._member = _MembershipOracle(basis.columns)
        self.K = self.W.shape[0]
        self.nv = self.W.shape[1]
        self._hull = self._build_hull()
        self._certs: list[tuple[np.ndarray, float]] = []
        for w in _chsh_certificates(sc):
            self._add_certificate(w)
        self._lp_calls = 0

    # -- metric helpers ----------------------------------------------------

    def to_metric(self, coords: np.ndarray) -> np.ndarray:
        coords = np.atleast_2d(coords)
        if self.metric_map is None:
            return coords
        return coords @ self.metric_map.T

    # -- exact facet representation (small dimensions) ---------------------

    def _build_hull(self):
        sc = self.scenario
        dim = dimension(sc)
        if dim > HULL_MAX_DIM or self.nv > HULL_MAX_VERTICES:
            return None
        try:
            from scipy.spatial import ConvexHull

            hull = ConvexHull(self.basis.columns.T)
        except Exception:
            return None
        F = hull.equations[:, :-1]
        c = -hull.equations[:, -1]
        # conversion factor facet margin -> NL lower bound
        if self.metric_map is None:
            Wf = F
        else:
            Wf = F @ np.linalg.pinv(self.metric_map)
        sigma = np.max(np.abs(Wf), axis=1)
        sigma[sigma < 1e-300] = 1.0
        return F, c, sigma

    # -- certificate pool --------------------------------------------------

    def _add_certificate(self, w: np.ndarray) -> None:
        if len(self._certs) >= CERT_POOL_CAP:
            return
        scale = np.max(np.abs(w))
        if scale <= 0:
            return
        w = w / scale
        h = float(np.max(w @ self.W))
        self._certs.append((w, h))

    def _cert_lower_bounds(self, Qm: np.ndarray) -> np.ndarray:
        """Best certificate lower bound on NL for each metric-space point."""
        if not self._certs:
            return np.full(Qm.shape[0], -np.inf)
        Wc = np.array([w for w, _ in self._certs])
        hc = np.array([h for _, h in self._certs])
        vals = Qm @ Wc.T - hc
        return vals.max(axis=1) / (2.0 * self.k_norm)

    # -- the LP itself -----------------------------------------------------

    def _solve_lp(self, qm: np.ndarray) -> tuple[float, np.ndarray, LPSolution]:
        """Exact NL LP for one metric-space point. Returns (nl, weights, sol)."""
        nv, K = self.nv, self.K
        W = self.W
        n = nv + K
        c = np.concatenate([np.zeros(nv), np.full(K, 1.0 / (2.0 * self.k_norm))])
        A_eq = np.concatenate([np.ones(nv), np.zeros(K)])[None, :]
        A_ub = np.block([[W, -np.eye(K)], [-W, -np.eye(K)]])
        b_ub = np.concatenate([qm, -qm])
        lb = np.concatenate([np.zeros(nv), np.zeros(K)])
        ub = np.full(n, np.inf)
        lp = LinearProgram(c, A_eq, np.array([1.0]), A_ub, b_ub, lb, ub)
        solver = SimplexSolver(lp)
        # handcrafted feasible start: nearest vertex + absolute residuals
        j0 = int(np.argmin(np.abs(W - qm[:, None]).sum(axis=0)))
        r = W[:, j0] - qm
        basis = [j0] + [nv + i for i in range(K)]
        for i in range(K):
            if r[i] < 0:
                basis.append(n + i)  # slack of row (W lam - s <= q)
            else:
                basis.append(n + K + i)
        sol = solver.solve_with_start(np.array(basis))
        if sol.status != LPStatus.OPTIMAL:
            sol = solver.solve()
        if sol.status != LPStatus.OPTIMAL:
            raise LPFailureError(f"NL LP failed with status {sol.status.value}")
        self._lp_calls += 1
        nl = float(sol.objective_value)
        lam = np.maximum(sol.x[:nv], 0.0)
        lam /= lam.sum()
        # harvest the dual certificate for the screening pool
        if sol.y_ub is not None and len(self._certs) < CERT_POOL_CAP:
            w = (sol.y_ub[K:] - sol.y_ub[:K]) * (2.0 * self.k_norm)
            if np.max(np.abs(w)) > 1e-6:
                self._add_certificate(w)
        return nl, lam, sol

    def _membership_local(self, z: np.ndarray, eps: float) -> bool:
        """Decide z in conv(V) via the specialized phase-1 oracle.

        Much cheaper than the metric-space distance LP (dim+1 rows instead of
        2*table_size+1).  A "not a member" answer is accepted only when the
        harvested separating hyperplane certifies NL > eps; anything
        ambiguous falls back to the exact LP, preserving the NL <= eps
        semantics.
        """
        member, sep = self._member.query(z)
        if member is True:
            return True
        if member is False and sep is not None:
            g = sep[:-1]
            w = g if self.metric_map is None else self._lift @ g
            scale = np.max(np.abs(w))
            if scale > 1e-12:
                w = w / scale
                h = float(np.max(w @ self.W))
                val = (float(w @ self.to_metric(z)[0]) - h) / (2.0 * self.k_norm)
                if val > eps:
                    if len(self._certs) < CERT_POOL_CAP:
                        self._certs.append((w, h))
                    return False
        qm = self.to_metric(z)[0]
        return self._solve_lp(qm)[0] <= eps

    # -- public API --------------------------------------------------------

    def distance(self, q, check_feasible: bool = True) -> DistanceResult:
        coords = q.coords if isinstance(q, CoordVector) else np.asarray(q, dtype=float)
        if check_feasible and not bool(self.poly.contains(coords, tol=1e-9)[0]):
            raise InfeasibleQueryError(
                f"query point is not a nonsignalling point of {self.scenario.describe()}"
            )
        qm = self.to_metric(coords)[0]
        nl, lam, sol = self._solve_lp(qm)
        closest = self.basis.columns @ lam
        return DistanceResult(nl=nl, weights=lam, closest_point=closest, status=sol.status)

    def distances(self, Q: np.ndarray, eps: float = DEFAULT_EPS) -> np.ndarray:
        """Exact NL values for a batch of coordinate points (rows)."""
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        Qm = self.to_metric(Q)
        out = np.empty(len(Q))
        # classification (hull/certificates/membership) is LP-equivalent and
        # far cheaper than the metric LP, so only nonlocal points get the LP
        local = self.classify_local(Q, eps=eps)
        for i in range(len(Q)):
            out[i] = 0.0 if local[i] else self._solve_lp(Qm[i])[0]
        return out

    def classify_local(self, Q: np.ndarray, eps: float = DEFAULT_EPS) -> np.ndarray:
        """Boolean mask: NL(q) <= eps, with LP semantics."""
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        n = len(Q)
        Qm = self.to_metric(Q)
        result = np.zeros(n, dtype=bool)
        undecided = np.arange(n)

        if self._hull is not None:
            F, c, sigma = self._hull
            # block over samples so margins stay within ~256 MB
            block = max(1, int(3.2e7 // max(1, len(F))))
            inside = np.empty(n, dtype=bool)
            lb = np.empty(n)
            for s in range(0, n, block):
                margins = Q[s : s + block] @ F.T - c
                inside[s : s + block] = margins.max(axis=1) <= 1e-12
                # margin -> NL lower bound, facet by facet
                lb[s : s + block] = (margins / (sigma * 2.0 * self.k_norm)).max(axis=1)
            result[inside] = True
            undecided = np.flatnonzero(~inside & (lb <= eps))
        if len(undecided) and self._certs:
            chunk = 4096
            keep = []
            for s in range(0, len(undecided), chunk):
                part = undecided[s : s + chunk]
                lb = self._cert_lower_bounds(Qm[part])
                keep.append(part[lb <= eps])
            undecided = np.concatenate(keep) if keep else undecided
        # LP on the remainder; re-screen periodically as the pool grows
        use_membership = self._hull is None
        n_certs_seen = len(self._certs)
        pending = list(undecided)
        while pending:
            batch, pending = pending[:256], pending[256:]
            for i in batch:
                if use_membership:
                    result[i] = self._membership_local(Q[i], eps)
                else:
                    result[i] = self._solve_lp(Qm[i])[0] <= eps
            if pending and len(self._certs) > n_certs_seen:
                n_certs_seen = len(self._certs)
                arr = np.array(pending)
                lb = self._cert_lower_bounds(Qm[arr])
                pending = list(arr[lb <= eps])
        return result

    @property
    def lp_calls(self) -> int:
        return self._lp_calls


def nl_distance(q, basis: VertexBasis) -> DistanceResult:
    """Trace-distance nonlocality of a single point (exact LP)."""
    return NlEvaluator(basis).distance(q)


def is_local(q, basis: VertexBasis, eps: float = DEFAULT_EPS) -> bool:
    return nl_distance(q, basis).nl <= eps
