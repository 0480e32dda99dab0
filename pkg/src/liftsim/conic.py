"""Uniform contract for linear and semidefinite feasibility/optimization.

All solver coupling lives here.  A :class:`ConicProblem` collects scalar
variables, symmetric PSD blocks, sparse linear equalities/inequalities and a
linear objective; :meth:`ConicProblem.solve` dispatches to one backend and
independently re-checks any solution the backend reports before calling it
"optimal".  Downstream modules treat feasibility as proof, so a failed
re-check is downgraded to ``inconclusive`` rather than silently accepted.

Backends: ``highs`` (scipy.optimize.linprog) for pure LPs and ``clarabel``
(via cvxpy) for anything with PSD blocks.  ``auto`` picks between them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import InputError

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
INCONCLUSIVE = "inconclusive"

_DEFAULT_BACKEND = "auto"


def set_default_backend(name: str) -> None:
    if name not in ("auto", "highs", "clarabel", "scs"):
        raise InputError(f"unknown solver backend {name!r}")
    global _DEFAULT_BACKEND
    _DEFAULT_BACKEND = name


def default_backend() -> str:
    return _DEFAULT_BACKEND


@dataclass
class PsdBlock:
    """Symmetric matrix variable; ``ids[i, j]`` is the scalar id of entry (i, j)."""

    name: str
    size: int
    ids: np.ndarray  # (size, size) int array, symmetric


@dataclass
class SolveResult:
    status: str
    values: np.ndarray | None = None
    objective: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def value(self, ids):
        if self.values is None:
            raise InputError(f"no values available for status {self.status!r}")
        return self.values[np.asarray(ids)]

    def psd_value(self, block: PsdBlock) -> np.ndarray:
        return self.value(block.ids)


class ConicProblem:
    """Sparse conic feasibility/optimization problem over scalar variables.

    PSD block entries are ordinary scalar variables tied into a symmetric
    index matrix, so rows and the re-check treat everything uniformly.
    """

    def __init__(self, name: str = ""):
        self.name = name
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._is_psd_entry: list[bool] = []
        self.psd_blocks: list[PsdBlock] = []
        self._eq: list[tuple[np.ndarray, np.ndarray, float]] = []
        self._le: list[tuple[np.ndarray, np.ndarray, float]] = []
        self._obj: dict[int, float] = {}

    # -- variables ----------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self._lb)

    def add_var(self, lb: float = -np.inf, ub: float = np.inf) -> int:
        self._lb.append(float(lb))
        self._ub.append(float(ub))
        self._is_psd_entry.append(False)
        return len(self._lb) - 1

    def add_vars(self, n: int, lb: float = -np.inf, ub: float = np.inf) -> np.ndarray:
        return np.array([self.add_var(lb, ub) for _ in range(n)], dtype=int)

    def add_psd_block(self, size: int, name: str = "") -> PsdBlock:
        if size < 1:
            raise InputError("PSD block size must be >= 1")
        ids = np.zeros((size, size), dtype=int)
        for i in range(size):
            for j in range(i, size):
                k = self.add_var()
                self._is_psd_entry[k] = True
                ids[i, j] = ids[j, i] = k
        block = PsdBlock(name or f"psd{len(self.psd_blocks)}", size, ids)
        self.psd_blocks.append(block)
        return block

    # -- rows ----------------------------------------------------------------

    @staticmethod
    def _row(coeffs) -> tuple[np.ndarray, np.ndarray]:
        if isinstance(coeffs, Mapping):
            ids = np.fromiter(coeffs.keys(), dtype=int, count=len(coeffs))
            vals = np.fromiter(coeffs.values(), dtype=float, count=len(coeffs))
        else:
            ids, vals = coeffs
            ids = np.asarray(ids, dtype=int)
            vals = np.asarray(vals, dtype=float)
        return ids, vals

    def add_eq(self, coeffs, rhs: float) -> None:
        ids, vals = self._row(coeffs)
        self._eq.append((ids, vals, float(rhs)))

    def add_le(self, coeffs, rhs: float) -> None:
        ids, vals = self._row(coeffs)
        self._le.append((ids, vals, float(rhs)))

    def minimize(self, coeffs) -> None:
        ids, vals = self._row(coeffs)
        self._obj = {int(i): float(v) for i, v in zip(ids, vals)}

    # -- assembly -------------------------------------------------------------

    def _stack(self, rows) -> tuple[sp.csr_matrix, np.ndarray]:
        n = self.num_vars
        if not rows:
            return sp.csr_matrix((0, n)), np.zeros(0)
        data, ri, ci, rhs = [], [], [], []
        for r, (ids, vals, b) in enumerate(rows):
            if ids.size and (ids.min() < 0 or ids.max() >= n):
                raise InputError("row references undeclared variable")
            data.append(vals)
            ci.append(ids)
            ri.append(np.full(ids.shape, r, dtype=int))
            rhs.append(b)
        mat = sp.csr_matrix(
            (np.concatenate(data), (np.concatenate(ri), np.concatenate(ci))),
            shape=(len(rows), n),
        )
        return mat, np.array(rhs)

    def _cost(self) -> np.ndarray:
        c = np.zeros(self.num_vars)
        for i, v in self._obj.items():
            c[i] = v
        return c

    # -- solving ----------------------------------------------------------------

    def solve(self, backend: str | None = None, recheck_tol: float = 1e-7) -> SolveResult:
        backend = backend or _DEFAULT_BACKEND
        if backend == "auto":
            backend = "highs" if not self.psd_blocks else "clarabel"
        if backend == "highs" and self.psd_blocks:
            raise InputError("highs backend cannot handle PSD blocks")
        if self.num_vars == 0:
            return SolveResult(OPTIMAL, np.zeros(0), 0.0, {"backend": backend})
        if backend == "highs":
            result = self._solve_highs()
        elif backend in ("clarabel", "scs"):
            result = self._solve_cvxpy(backend)
        else:
            raise InputError(f"unknown solver backend {backend!r}")
        if result.status == OPTIMAL:
            residuals = self.recheck(result.values, recheck_tol)
            result.diagnostics["recheck"] = residuals
            if residuals["max_violation"] > recheck_tol:
                logger.warning(
                    "%s: solver reported optimal but re-check failed (%.3e > %.1e)",
                    self.name or "conic problem", residuals["max_violation"], recheck_tol,
                )
                return SolveResult(INCONCLUSIVE, result.values, result.objective,
                                   result.diagnostics)
        return result

    def _solve_highs(self) -> SolveResult:
        from scipy.optimize import linprog

        A_ub, b_ub = self._stack(self._le)
        A_eq, b_eq = self._stack(self._eq)
        res = linprog(
            c=self._cost(),
            A_ub=A_ub if A_ub.shape[0] else None,
            b_ub=b_ub if b_ub.size else None,
            A_eq=A_eq if A_eq.shape[0] else None,
            b_eq=b_eq if b_eq.size else None,
            bounds=list(zip(self._lb, self._ub)),
            method="highs",
        )
        diag = {"backend": "highs", "solver_status": int(res.status), "message": res.message}
        if res.status == 0:
            return SolveResult(OPTIMAL, np.asarray(res.x, dtype=float), float(res.fun), diag)
        if res.status == 2:
            return SolveResult(INFEASIBLE, diagnostics=diag)
        if res.status == 3:
            return SolveResult(UNBOUNDED, diagnostics=diag)
        return SolveResult(INCONCLUSIVE, diagnostics=diag)

    def _solve_cvxpy(self, backend: str) -> SolveResult:
        import cvxpy as cp

        n = self.num_vars
        psd_entry = np.array(self._is_psd_entry)
        scalar_ids = np.flatnonzero(~psd_entry)
        x = cp.Variable(scalar_ids.size) if scalar_ids.size else None
        gs = [cp.Variable((b.size, b.size), symmetric=True) for b in self.psd_blocks]

        # position of each global id inside x / inside its block
        pos = np.full(n, -1, dtype=int)
        pos[scalar_ids] = np.arange(scalar_ids.size)
        entry_of: dict[int, tuple[int, int, int]] = {}
        for bi, b in enumerate(self.psd_blocks):
            for i in range(b.size):
                for j in range(i, b.size):
                    entry_of[int(b.ids[i, j])] = (bi, i, j)

        def split(mat: sp.csr_matrix):
            """Split row matrix into scalar part and per-block vec-coefficients."""
            coo = mat.tocoo()
            m = mat.shape[0]
            sc = sp.lil_matrix((m, scalar_ids.size))
            blocks = [sp.lil_matrix((m, b.size * b.size)) for b in self.psd_blocks]
            for r, c, v in zip(coo.row, coo.col, coo.data):
                if not psd_entry[c]:
                    sc[r, pos[c]] += v
                else:
                    bi, i, j = entry_of[int(c)]
                    k = self.psd_blocks[bi].size
                    if i == j:
                        blocks[bi][r, i * k + j] += v
                    else:
                        blocks[bi][r, i * k + j] += v / 2.0
                        blocks[bi][r, j * k + i] += v / 2.0
            return sc.tocsr(), [b.tocsr() for b in blocks]

        def expr_for(mat: sp.csr_matrix):
            parts = []
            sc, blocks = split(mat)
            if x is not None and sc.nnz >= 0:
                parts.append(sc @ x)
            for bmat, g in zip(blocks, gs):
                parts.append(bmat @ cp.vec(g, order="C"))
            return sum(parts) if parts else None

        constraints = [g >> 0 for g in gs]
        A_eq, b_eq = self._stack(self._eq)
        if A_eq.shape[0]:
            constraints.append(expr_for(A_eq) == b_eq)
        A_ub, b_ub = self._stack(self._le)
        if A_ub.shape[0]:
            constraints.append(expr_for(A_ub) <= b_ub)
        lb = np.array(self._lb)[scalar_ids]
        ub = np.array(self._ub)[scalar_ids]
        if x is not None:
            fin = np.isfinite(lb)
            if fin.any():
                constraints.append(x[fin] >= lb[fin])
            fin = np.isfinite(ub)
            if fin.any():
                constraints.append(x[fin] <= ub[fin])

        c = self._cost()
        obj_expr = expr_for(sp.csr_matrix(c.reshape(1, -1)))
        objective = cp.Minimize(obj_expr if obj_expr is not None else 0)
        prob = cp.Problem(objective, constraints)
        solver = cp.CLARABEL if backend == "clarabel" else cp.SCS
        try:
            prob.solve(solver=solver)
        except cp.error.SolverError as exc:
            return SolveResult(INCONCLUSIVE, diagnostics={"backend": backend, "error": str(exc)})

        diag = {"backend": backend, "solver_status": prob.status}
        if prob.status in (cp.INFEASIBLE,):
            return SolveResult(INFEASIBLE, diagnostics=diag)
        if prob.status in (cp.UNBOUNDED,):
            return SolveResult(UNBOUNDED, diagnostics=diag)
        if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            return SolveResult(INCONCLUSIVE, diagnostics=diag)

        values = np.zeros(n)
        if x is not None:
            values[scalar_ids] = np.asarray(x.value).ravel()
        for b, g in zip(self.psd_blocks, gs):
            gv = np.asarray(g.value)
            for i in range(b.size):
                for j in range(i, b.size):
                    values[b.ids[i, j]] = gv[i, j]
        return SolveResult(OPTIMAL, values, float(prob.value), diag)

    # -- independent arithmetic re-check -----------------------------------------

    def recheck(self, values: np.ndarray, tol: float = 1e-7) -> dict:
        """Re-evaluate all constraints at ``values`` with plain numpy."""
        res: dict[str, float] = {}
        A_eq, b_eq = self._stack(self._eq)
        res["eq"] = float(np.max(np.abs(A_eq @ values - b_eq))) if b_eq.size else 0.0
        A_ub, b_ub = self._stack(self._le)
        res["ineq"] = float(np.max(A_ub @ values - b_ub)) if b_ub.size else 0.0
        lb = np.array(self._lb)
        ub = np.array(self._ub)
        bound_viol = 0.0
        fin = np.isfinite(lb)
        if fin.any():
            bound_viol = max(bound_viol, float(np.max(lb[fin] - values[fin])))
        fin = np.isfinite(ub)
        if fin.any():
            bound_viol = max(bound_viol, float(np.max(values[fin] - ub[fin])))
        res["bounds"] = bound_viol
        psd_viol = 0.0
        for b in self.psd_blocks:
            eigs = np.linalg.eigvalsh(values[b.ids])
            psd_viol = max(psd_viol, float(-eigs.min()))
        res["psd"] = psd_viol
        res["max_violation"] = max(res["eq"], res["ineq"], res["bounds"], res["psd"])
        return res
