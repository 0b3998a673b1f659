"""Deterministic dense LP solver.

Bounded-variable revised primal simplex with an explicit basis inverse,
two phases, Dantzig pricing with a Bland fallback on degenerate streaks,
and periodic refactorization.  Deterministic by construction: identical
inputs take identical pivot sequences.

A :class:`SimplexSolver` can be kept alive between solves; re-solving after
an objective change reuses the optimal basis of the previous solve, which
is what makes per-sample distance LPs cheap (the constraint matrix is
shared across samples and only the objective moves).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

FEAS_TOL = 1e-9
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-11
DEGEN_STREAK = 40
REFACTOR_EVERY = 100

AT_LOWER = 0
AT_UPPER = 1
BASIC = 2
FREE_ZERO = 3


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class LinearProgram:
    """min c @ x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lb <= x <= ub."""

    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    lb: np.ndarray | float = 0.0
    ub: np.ndarray | float = np.inf

    @property
    def n(self) -> int:
        return len(self.c)

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lb = np.broadcast_to(np.asarray(self.lb, dtype=float), (self.n,)).copy()
        ub = np.broadcast_to(np.asarray(self.ub, dtype=float), (self.n,)).copy()
        return lb, ub

    def validate(self) -> None:
        c = np.asarray(self.c, dtype=float)
        if not np.all(np.isfinite(c)):
            raise ValueError("objective coefficients must be finite")
        for A, b, name in ((self.A_eq, self.b_eq, "eq"), (self.A_ub, self.b_ub, "ub")):
            if (A is None) != (b is None):
                raise ValueError(f"A_{name} and b_{name} must be given together")
            if A is not None:
                A = np.asarray(A, dtype=float)
                b = np.asarray(b, dtype=float)
                if A.ndim != 2 or A.shape[0] != b.shape[0] or A.shape[1] != self.n:
                    raise ValueError(f"inconsistent {name}-constraint dimensions")
        lb, ub = self.bounds_arrays()
        if np.any(lb > ub):
            raise ValueError("lower bound exceeds upper bound")


@dataclass
class LPSolution:
    status: LPStatus
    x: np.ndarray | None
    objective_value: float
    max_constraint_violation: float
    duality_gap: float
    y_eq: np.ndarray | None = None
    y_ub: np.ndarray | None = None
    iterations: int = 0


class SimplexSolver:
    """Revised simplex over the computational form  min c@x, Ax=b, l<=x<=u.

    Inequality rows from the source program get slack variables; phase 1
    adds signed artificial columns.  The instance keeps its basis between
    solves so that `set_objective` + `solve` re-optimizes warm.
    """

    def __init__(self, lp: LinearProgram):
        lp.validate()
        self.lp = lp
        n = lp.n
        rows = []
        rhs = []
        if lp.A_eq is not None:
            rows.append(np.asarray(lp.A_eq, dtype=float))
            rhs.append(np.asarray(lp.b_eq, dtype=float))
        self.n_eq = 0 if lp.A_eq is None else len(rhs[-1])
        self.n_ub = 0 if lp.A_ub is None else np.asarray(lp.b_ub).shape[0]
        if lp.A_ub is not None:
            rows.append(np.asarray(lp.A_ub, dtype=float))
            rhs.append(np.asarray(lp.b_ub, dtype=float))
        if rows:
            A = np.vstack(rows)
            b = np.concatenate(rhs)
        else:
            A = np.zeros((0, n))
            b = np.zeros(0)
        m = A.shape[0]
        if self.n_ub:
            S = np.zeros((m, self.n_ub))
            S[m - self.n_ub :, :] = np.eye(self.n_ub)
            A = np.hstack([A, S])
        lb, ub = lp.bounds_arrays()
        self.n_orig = n
        self.m = m
        self.A = np.ascontiguousarray(A)
        self.b = b.astype(float).copy()
        self.lb = np.concatenate([lb, np.zeros(self.n_ub)])
        self.ub = np.concatenate([ub, np.full(self.n_ub, np.inf)])
        self.c = np.concatenate([np.asarray(lp.c, dtype=float), np.zeros(self.n_ub)])
        self.n_total = self.A.shape[1]
        self._basis: np.ndarray | None = None
        self._vstat: np.ndarray | None = None
        self._binv: np.ndarray | None = None
        self._xb: np.ndarray | None = None
        self._arts: np.ndarray | None = None  # artificial columns (m x m), kept for refactor
        self._art_lb = None
        self._art_ub = None
        self.iterations = 0

    # -- low-level helpers -------------------------------------------------

    def _nonbasic_value(self, j: int, vstat, lb, ub) -> float:
        s = vstat[j]
        if s == AT_LOWER:
            return lb[j]
        if s == AT_UPPER:
            return ub[j]
        return 0.0  # free at zero

    def _nonbasic_values(self, cols, vstat, lb, ub) -> np.ndarray:
        vals = np.where(vstat[cols] == AT_UPPER, ub[cols], lb[cols])
        vals = np.where(vstat[cols] == FREE_ZERO, 0.0, vals)
        return vals

    def _col(self, A_all, j):
        return A_all[:, j]

    def _refactor(self, A_all, lb, ub):
        basis = self._basis
        B = A_all[:, basis]
        try:
            self._binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            raise _Singular()
        nonbasic = np.flatnonzero(self._vstat != BASIC)
        xn = self._nonbasic_values(nonbasic, self._vstat, lb, ub)
        r = self.b - A_all[:, nonbasic] @ xn
        self._xb = self._binv @ r

    def _simplex_loop(self, A_all, c_all, lb, ub, max_iter) -> str:
        """Iterate until optimal/unbounded. Returns 'optimal'|'unbounded'|'maxiter'."""
        binv = self._binv
        basis = self._basis
        vstat = self._vstat
        degen = 0
        bland = False
        since_refactor = 0
        while True:
            if self.iterations >= max_iter:
                return "maxiter"
            y = c_all[basis] @ binv
            z = c_all - y @ A_all
            # entering candidates
            enter = -1
            direction = 0
            movable = ub - lb > PIVOT_TOL  # fixed variables can never enter
            if not bland:
                best = DUAL_TOL
                lower_mask = movable & ((vstat == AT_LOWER) | (vstat == FREE_ZERO))
                upper_mask = movable & ((vstat == AT_UPPER) | (vstat == FREE_ZERO))
                viol_low = np.where(lower_mask, -z, -np.inf)
                viol_up = np.where(upper_mask, z, -np.inf)
                jl = int(np.argmax(viol_low))
                ju = int(np.argmax(viol_up))
                if viol_low[jl] > best and viol_low[jl] >= viol_up[ju]:
                    enter, direction = jl, +1
                elif viol_up[ju] > best:
                    enter, direction = ju, -1
            else:
                for j in range(A_all.shape[1]):
                    s = vstat[j]
                    if s == BASIC or not movable[j]:
                        continue
                    if (s in (AT_LOWER, FREE_ZERO)) and z[j] < -DUAL_TOL:
                        enter, direction = j, +1
                        break
                    if (s in (AT_UPPER, FREE_ZERO)) and z[j] > DUAL_TOL:
                        enter, direction = j, -1
                        break
            if enter < 0:
                return "optimal"

            d = binv @ A_all[:, enter]
            step_limit = np.inf
            leave_row = -1
            leave_bound = AT_LOWER
            # entering variable's own span
            span = ub[enter] - lb[enter]
            if np.isfinite(span):
                step_limit = span
            dd = d * direction
            xb = self._xb
            bl = lb[basis]
            bu = ub[basis]
            with np.errstate(divide="ignore", invalid="ignore"):
                pos = dd > PIVOT_TOL
                neg = dd < -PIVOT_TOL
                ratios = np.full(self.m, np.inf)
                ratios[pos] = (xb[pos] - bl[pos]) / dd[pos]
                ratios[neg] = (xb[neg] - bu[neg]) / dd[neg]
            ratios = np.maximum(ratios, 0.0)
            rmin = ratios.min() if self.m else np.inf
            if rmin < step_limit:
                # deterministic tie-break: smallest basis variable index
                cand = np.flatnonzero(ratios <= rmin + 1e-12)
                leave_row = int(cand[np.argmin(basis[cand])])
                step = ratios[leave_row]
                leave_bound = AT_LOWER if dd[leave_row] > 0 else AT_UPPER
            else:
                step = step_limit
            if not np.isfinite(step):
                return "unbounded"

            if step <= 1e-12:
                degen += 1
                if degen >= DEGEN_STREAK:
                    bland = True
            else:
                degen = 0
                bland = False

            ev = self._nonbasic_value(enter, vstat, lb, ub)
            if leave_row < 0:
                # bound flip
                self._xb = xb - dd * step
                vstat[enter] = AT_UPPER if vstat[enter] == AT_LOWER else AT_LOWER
            else:
                out = basis[leave_row]
                self._xb = xb - dd * step
                self._xb[leave_row] = ev + direction * step
                vstat[out] = leave_bound
                if not np.isfinite(lb[out]) and not np.isfinite(ub[out]):
                    vstat[out] = FREE_ZERO
                vstat[enter] = BASIC
                basis[leave_row] = enter
                piv = d[leave_row]
                if abs(piv) < PIVOT_TOL:
                    raise _Singular()
                row = binv[leave_row] / piv
                binv -= np.outer(d, row)
                binv[leave_row] = row
                since_refactor += 1
                if since_refactor >= REFACTOR_EVERY:
                    self._refactor(A_all, lb, ub)
                    binv = self._binv
                    since_refactor = 0
            self.iterations += 1

    # -- public API --------------------------------------------------------

    def solve(self, max_iter: int | None = None) -> LPSolution:
        """Cold solve: phase 1 with artificials, then phase 2."""
        m, n_total = self.m, self.n_total
        if max_iter is None:
            max_iter = 200 * (m + n_total) + 20000
        self.iterations = 0
        if m == 0:
            return self._solve_unconstrained()
        # nonbasic start at the bound closest to zero
        vstat = np.full(n_total + m, AT_LOWER, dtype=np.int8)
        for j in range(n_total):
            ljf, ujf = np.isfinite(self.lb[j]), np.isfinite(self.ub[j])
            if ljf:
                vstat[j] = AT_LOWER if (not ujf or abs(self.lb[j]) <= abs(self.ub[j])) else AT_UPPER
            elif ujf:
                vstat[j] = AT_UPPER
            else:
                vstat[j] = FREE_ZERO
        xn = self._nonbasic_values(np.arange(n_total), vstat, self.lb, self.ub)
        r = self.b - self.A @ xn
        signs = np.where(r >= 0, 1.0, -1.0)
        arts = np.diag(signs)
        A_all = np.hstack([self.A, arts])
        lb = np.concatenate([self.lb, np.zeros(m)])
        ub = np.concatenate([self.ub, np.full(m, np.inf)])
        basis = np.arange(n_total, n_total + m)
        vstat[basis] = BASIC
        self._basis = basis
        self._vstat = vstat
        self._arts = arts
        self._binv = np.diag(signs)  # inverse of the artificial basis
        self._xb = np.abs(r)

        c1 = np.concatenate([np.zeros(n_total), np.ones(m)])
        try:
            res = self._simplex_loop(A_all, c1, lb, ub, max_iter)
        except _Singular:
            return self._failure()
        if res == "maxiter":
            return self._failure()
        phase1_obj = float(c1[self._basis] @ self._xb)
        if phase1_obj > 1e-7:
            # objective_value reports the phase-1 residual (total infeasibility)
            return LPSolution(LPStatus.INFEASIBLE, None, phase1_obj, np.nan, np.nan,
                              iterations=self.iterations)
        # pin artificials to zero and run phase 2
        lb[n_total:] = 0.0
        ub[n_total:] = 0.0
        for j in range(n_total, n_total + m):
            if self._vstat[j] != BASIC:
                self._vstat[j] = AT_LOWER
        c2 = np.concatenate([self.c, np.zeros(m)])
        try:
            res = self._simplex_loop(A_all, c2, lb, ub, max_iter)
        except _Singular:
            return self._failure()
        if res == "maxiter":
            return self._failure()
        if res == "unbounded":
            return LPSolution(LPStatus.UNBOUNDED, None, -np.inf, np.nan, np.nan,
                              iterations=self.iterations)
        self._A_all = A_all
        self._lb_all = lb
        self._ub_all = ub
        return self._extract()

    def solve_with_start(self, basis: np.ndarray, at_upper: np.ndarray | None = None,
                         max_iter: int | None = None) -> LPSolution:
        """Phase-2 solve from a caller-supplied primal feasible basis.

        `basis` lists the basic column indices in row order (slack column i of
        the j-th inequality row has index n + n_eq_slacks... i.e. n + j).
        Nonbasic variables sit at the bound closest to zero unless listed in
        `at_upper`.  Falls back to a cold two-phase solve if the start is
        singular or infeasible.
        """
        m, n_total = self.m, self.n_total
        if max_iter is None:
            max_iter = 200 * (m + n_total) + 20000
        basis = np.asarray(basis, dtype=int)
        if basis.shape != (m,):
            raise ValueError("basis must have one column index per row")
        self.iterations = 0
        vstat = np.full(n_total + m, AT_LOWER, dtype=np.int8)
        for j in range(n_total):
            ljf, ujf = np.isfinite(self.lb[j]), np.isfinite(self.ub[j])
            if ljf:
                vstat[j] = AT_LOWER if (not ujf or abs(self.lb[j]) <= abs(self.ub[j])) else AT_UPPER
            elif ujf:
                vstat[j] = AT_UPPER
            else:
                vstat[j] = FREE_ZERO
        if at_upper is not None:
            vstat[np.asarray(at_upper, dtype=int)] = AT_UPPER
        vstat[basis] = BASIC
        # dummy zero-width artificial block so the shared loop sees a square extension
        A_all = np.hstack([self.A, np.zeros((m, m))])
        lb = np.concatenate([self.lb, np.zeros(m)])
        ub = np.concatenate([self.ub, np.zeros(m)])
        self._basis = basis.copy()
        self._vstat = vstat
        self._arts = None
        try:
            self._refactor(A_all, lb, ub)
        except _Singular:
            return self.solve(max_iter)
        bl, bu = lb[self._basis], ub[self._basis]
        if np.any(self._xb < bl - 1e-7) or np.any(self._xb > bu + 1e-7):
            return self.solve(max_iter)
        c2 = np.concatenate([self.c, np.zeros(m)])
        try:
            res = self._simplex_loop(A_all, c2, lb, ub, max_iter)
        except _Singular:
            return self.solve(max_iter)
        if res == "maxiter":
            return self.solve(max_iter)
        if res == "unbounded":
            return LPSolution(LPStatus.UNBOUNDED, None, -np.inf, np.nan, np.nan,
                              iterations=self.iterations)
        self._A_all = A_all
        self._lb_all = lb
        self._ub_all = ub
        return self._extract()

    def set_objective(self, c_new: np.ndarray) -> None:
        c_new = np.asarray(c_new, dtype=float)
        if c_new.shape != (self.n_orig,):
            raise ValueError("objective dimension mismatch")
        self.c = np.concatenate([c_new, np.zeros(self.n_ub)])

    def resolve(self, max_iter: int | None = None) -> LPSolution:
        """Re-optimize after an objective change, reusing the current basis."""
        if self._basis is None or not hasattr(self, "_A_all"):
            return self.solve(max_iter)
        if max_iter is None:
            max_iter = 200 * (self.m + self.n_total) + 20000
        self.iterations = 0
        c2 = np.concatenate([self.c, np.zeros(self.m)])
        try:
            res = self._simplex_loop(self._A_all, c2, self._lb_all, self._ub_all, max_iter)
        except _Singular:
            return self.solve(max_iter)
        if res == "maxiter":
            return self.solve(max_iter)
        if res == "unbounded":
            return LPSolution(LPStatus.UNBOUNDED, None, -np.inf, np.nan, np.nan,
                              iterations=self.iterations)
        return self._extract()

    def _solve_unconstrained(self) -> LPSolution:
        """Box-only program: each coordinate optimizes independently."""
        lb, ub = self.lb[: self.n_orig], self.ub[: self.n_orig]
        c = self.c[: self.n_orig]
        x = np.zeros(self.n_orig)
        for j in range(self.n_orig):
            if c[j] > 0:
                if not np.isfinite(lb[j]):
                    return LPSolution(LPStatus.UNBOUNDED, None, -np.inf, np.nan, np.nan)
                x[j] = lb[j]
            elif c[j] < 0:
                if not np.isfinite(ub[j]):
                    return LPSolution(LPStatus.UNBOUNDED, None, -np.inf, np.nan, np.nan)
                x[j] = ub[j]
            else:
                x[j] = lb[j] if np.isfinite(lb[j]) else (ub[j] if np.isfinite(ub[j]) else 0.0)
        obj = float(c @ x)
        return LPSolution(LPStatus.OPTIMAL, x, obj, 0.0, 0.0)

    def _failure(self) -> LPSolution:
        return LPSolution(LPStatus.NUMERICAL_FAILURE, None, np.nan, np.nan, np.nan,
                          iterations=self.iterations)

    def _extract(self) -> LPSolution:
        n_total, m = self.n_total, self.m
        x_all = np.empty(n_total + m)
        nonbasic = np.flatnonzero(self._vstat != BASIC)
        x_all[nonbasic] = self._nonbasic_values(nonbasic, self._vstat, self._lb_all, self._ub_all)
        x_all[self._basis] = self._xb
        x = x_all[: self.n_orig]
        obj = float(self.c[:n_total] @ x_all[:n_total])
        c_all = np.concatenate([self.c, np.zeros(m)])
        y = c_all[self._basis] @ self._binv
        z = c_all - y @ self._A_all
        # dual objective: y'b plus reduced-cost terms at the active bounds
        dual = float(y @ self.b)
        for j in nonbasic:
            if j >= n_total:
                continue
            if z[j] > 0 and np.isfinite(self._lb_all[j]):
                dual += z[j] * self._lb_all[j]
            elif z[j] < 0 and np.isfinite(self._ub_all[j]):
                dual += z[j] * self._ub_all[j]
        gap = abs(obj - dual) / (1.0 + abs(obj))
        viol = self._constraint_violation(x)
        y_eq = y[: self.n_eq] if self.n_eq else None
        y_ub = y[self.n_eq : self.n_eq + self.n_ub] if self.n_ub else None
        return LPSolution(LPStatus.OPTIMAL, x, obj, viol, gap, y_eq=y_eq, y_ub=y_ub,
                          iterations=self.iterations)

    def _constraint_violation(self, x: np.ndarray) -> float:
        lp = self.lp
        viol = 0.0
        if lp.A_eq is not None:
            viol = max(viol, float(np.max(np.abs(np.asarray(lp.A_eq) @ x - np.asarray(lp.b_eq)), initial=0.0)))
        if lp.A_ub is not None:
            viol = max(viol, float(np.max(np.asarray(lp.A_ub) @ x - np.asarray(lp.b_ub), initial=0.0)))
        lb, ub = lp.bounds_arrays()
        viol = max(viol, float(np.max(lb - x, initial=0.0)), float(np.max(x - ub, initial=0.0)))
        return viol


class _Singular(Exception):
    pass


def solve(lp: LinearProgram) -> LPSolution:
    """One-shot deterministic solve of a linear program."""
    return SimplexSolver(lp).solve()
