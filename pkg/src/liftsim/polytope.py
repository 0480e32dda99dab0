"""Halfspace/vertex polytope geometry at desk scale (dimension <= 8).

Conventions:

* :class:`HPolytope` is ``{w | H w <= h}``.
* :class:`Box` is an axis-aligned box given by bound vectors.
* :class:`VPolytope` is a finite vertex list; Minkowski sums keep all pairwise
  vertex sums without hull reduction, which is a superset of the true vertex
  set and therefore sound for convex containment checks.

Vertex enumeration of an H-polytope goes through Qhull's halfspace
intersection seeded with a Chebyshev-center interior point; degenerate inputs
fall back to exact facet-intersection enumeration with feasibility filtering.
All LPs are built on the :mod:`liftsim.conic` contract.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from . import conic
from .errors import CapacityError, EmptySetError, InputError, UnboundedSetError

logger = logging.getLogger(__name__)

MAX_VERTEX_DIM = 8
DEFAULT_TOL = 1e-8
_FEAS_SLACK = 1e-9


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``{w | lower <= w <= upper}``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        up = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != up.shape or lo.ndim != 1:
            raise InputError("box bounds must be vectors of equal length")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def dim(self) -> int:
        return self.lower.size

    def is_nonempty(self) -> bool:
        return bool(np.all(self.lower <= self.upper))

    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains_point(self, w, tol: float = DEFAULT_TOL) -> bool:
        w = np.asarray(w, dtype=float)
        return bool(np.all(w >= self.lower - tol) and np.all(w <= self.upper + tol))

    def to_hpolytope(self) -> "HPolytope":
        n = self.dim
        eye = np.eye(n)
        H = np.vstack([eye, -eye])
        h = np.concatenate([self.upper, -self.lower])
        return HPolytope(H, h)

    def inflate(self, amount: float) -> "Box":
        return Box(self.lower - amount, self.upper + amount)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)


@dataclass(frozen=True)
class HPolytope:
    """Halfspace intersection ``{w | H w <= h}``."""

    H: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=float))
        h = np.atleast_1d(np.asarray(self.h, dtype=float))
        if H.ndim != 2 or h.ndim != 1 or H.shape[0] != h.size or H.shape[0] < 1:
            raise InputError("inconsistent halfspace data")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "h", h)

    @property
    def dim(self) -> int:
        return self.H.shape[1]

    @property
    def num_rows(self) -> int:
        return self.H.shape[0]

    def contains_point(self, w, tol: float = DEFAULT_TOL) -> bool:
        return self.violation(w) <= tol

    def violation(self, w) -> float:
        w = np.asarray(w, dtype=float)
        return float(np.max(self.H @ w - self.h))

    def inflate(self, amount: float) -> "HPolytope":
        return HPolytope(self.H, self.h + amount)

    def as_box(self, tol: float = 1e-12) -> Box | None:
        """Recognize the +/- elementary-row pattern and return bounds, else None."""
        n = self.dim
        if self.num_rows != 2 * n:
            return None
        lower = np.full(n, np.nan)
        upper = np.full(n, np.nan)
        for row, offset in zip(self.H, self.h):
            nz = np.flatnonzero(np.abs(row) > tol)
            if nz.size != 1:
                return None
            j = int(nz[0])
            c = row[j]
            if abs(c - 1.0) <= tol:
                if not np.isnan(upper[j]):
                    return None
                upper[j] = offset
            elif abs(c + 1.0) <= tol:
                if not np.isnan(lower[j]):
                    return None
                lower[j] = -offset
            else:
                return None
        if np.isnan(lower).any() or np.isnan(upper).any():
            return None
        return Box(lower, upper)


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of a finite vertex list (stored as a (k, n) array)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.ndim != 2 or v.shape[0] < 1:
            raise InputError("vertex list must be a nonempty (k, n) array")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    def support(self, direction) -> float:
        d = np.asarray(direction, dtype=float)
        return float(np.max(self.vertices @ d))


@dataclass(frozen=True)
class ContainmentCheck:
    contained: bool
    max_violation: float


PolytopeLike = Box | HPolytope | VPolytope


def _dedupe(points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if points.shape[0] <= 1:
        return points
    order = np.lexsort(points.T[::-1])
    pts = points[order]
    keep = [pts[0]]
    for p in pts[1:]:
        if np.max(np.abs(p - keep[-1])) > tol:
            keep.append(p)
    return np.array(keep)


def chebyshev_center(P: HPolytope) -> tuple[np.ndarray, float]:
    """Center and radius of the largest inscribed ball (radius clipped at >= 0)."""
    prob = conic.ConicProblem("chebyshev")
    c = prob.add_vars(P.dim)
    r = prob.add_var(lb=0.0)
    norms = np.linalg.norm(P.H, axis=1)
    for row, nrm, rhs in zip(P.H, norms, P.h):
        ids = np.append(c, r)
        vals = np.append(row, nrm)
        prob.add_le((ids, vals), rhs)
    prob.minimize({r: -1.0})
    res = prob.solve()
    if res.status == conic.UNBOUNDED:
        raise UnboundedSetError("polytope has unbounded inscribed balls")
    if res.status != conic.OPTIMAL:
        raise EmptySetError("polytope is empty or center LP failed")
    return res.value(c), float(res.value(r))


def is_nonempty_bounded(P: HPolytope) -> tuple[bool, bool]:
    """(nonempty, bounded); boundedness probed by maximizing +/- each axis."""
    feas = conic.ConicProblem("feasibility")
    x = feas.add_vars(P.dim)
    for row, rhs in zip(P.H, P.h):
        feas.add_le((x, row), rhs + _FEAS_SLACK)
    if feas.solve().status != conic.OPTIMAL:
        return False, False
    for i in range(P.dim):
        for sign in (1.0, -1.0):
            prob = conic.ConicProblem("bound probe")
            y = prob.add_vars(P.dim)
            for row, rhs in zip(P.H, P.h):
                prob.add_le((y, row), rhs + _FEAS_SLACK)
            prob.minimize({int(y[i]): sign})
            if prob.solve().status == conic.UNBOUNDED:
                return True, False
    return True, True


def bounding_box(P: HPolytope) -> Box:
    nonempty, bounded = is_nonempty_bounded(P)
    if not nonempty:
        raise EmptySetError("cannot bound an empty polytope")
    if not bounded:
        raise UnboundedSetError("polytope is unbounded")
    lo = np.zeros(P.dim)
    up = np.zeros(P.dim)
    for i in range(P.dim):
        for sign, target in ((1.0, up), (-1.0, lo)):
            prob = conic.ConicProblem("bbox")
            y = prob.add_vars(P.dim)
            for row, rhs in zip(P.H, P.h):
                prob.add_le((y, row), rhs)
            prob.minimize({int(y[i]): -sign})
            res = prob.solve()
            if res.status != conic.OPTIMAL:
                raise EmptySetError("bounding box LP failed")
            target[i] = sign * -res.objective
    return Box(lo, up)


def _box_vertices(box: Box) -> np.ndarray:
    if not box.is_nonempty():
        raise EmptySetError("box is empty")
    if box.dim > MAX_VERTEX_DIM:
        raise CapacityError(f"vertex enumeration limited to dim <= {MAX_VERTEX_DIM}")
    if box.dim == 0:
        return np.zeros((1, 0))
    cols = [(lo, up) for lo, up in zip(box.lower, box.upper)]
    return np.array(list(itertools.product(*cols)), dtype=float)


def _qhull_vertices(P: HPolytope) -> np.ndarray | None:
    from scipy.spatial import HalfspaceIntersection, QhullError

    try:
        center, radius = chebyshev_center(P)
    except (EmptySetError, UnboundedSetError):
        return None
    if radius <= 1e-9:
        return None  # no interior; fall back to exact enumeration
    halfspaces = np.hstack([P.H, -P.h.reshape(-1, 1)])
    try:
        intersection = HalfspaceIntersection(halfspaces, center)
    except (QhullError, ValueError):
        return None
    return np.asarray(intersection.intersections)

def _combinatorial_vertices(P: HPolytope, tol: float = 1e-7) -> np.ndarray:
    """Exact facet-intersection enumeration with feasibility filtering."""
    n = P.dim
    found = []
    for rows in itertools.combinations(range(P.num_rows), n):
        A = P.H[list(rows)]
        b = P.h[list(rows)]
        try:
            v = np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            continue
        if P.violation(v) <= tol:
            found.append(v)
    if not found:
        raise EmptySetError("no vertices found; polytope may be empty or degenerate")
    return np.array(found)


def vertices(P: PolytopeLike) -> VPolytope:
    """All extreme points of a bounded nonempty polytope (dimension <= 8)."""
    if isinstance(P, VPolytope):
        return P
    if isinstance(P, Box):
        return VPolytope(_box_vertices(P))
    if P.dim > MAX_VERTEX_DIM:
        raise CapacityError(f"vertex enumeration limited to dim <= {MAX_VERTEX_DIM}")
    nonempty, bounded = is_nonempty_bounded(P)
    if not nonempty:
        raise EmptySetError("polytope is empty")
    if not bounded:
        raise UnboundedSetError("polytope is unbounded")
    box = P.as_box()
    if box is not None:
        return VPolytope(_box_vertices(box))
    pts = _qhull_vertices(P)
    if pts is None:
        pts = _combinatorial_vertices(P)
    return VPolytope(_dedupe(pts))


def minkowski_sum(P: VPolytope, Q: VPolytope) -> VPolytope:
    """Pairwise vertex sums (superset of the true vertex set; no hull pass)."""
    if P.dim != Q.dim:
        raise InputError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    sums = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.dim)
    return VPolytope(_dedupe(sums))


def affine_image(M, P: VPolytope) -> VPolytope:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[1] != P.dim:
        raise InputError(f"matrix has {M.shape[1]} columns, polytope dim {P.dim}")
    return VPolytope(_dedupe(P.vertices @ M.T))


def contains(P: VPolytope, Q: HPolytope, tol: float = DEFAULT_TOL) -> ContainmentCheck:
    """Whether every vertex of P satisfies Q, with the worst halfspace residual."""
    if P.dim != Q.dim:
        raise InputError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    residual = Q.H @ P.vertices.T - Q.h[:, None]
    worst = float(residual.max())
    return ContainmentCheck(worst <= tol, worst)


def membership_in_sum(
    point,
    factors: list[tuple[np.ndarray | None, PolytopeLike]],
    tol: float = DEFAULT_TOL,
) -> ContainmentCheck:
    """Decide ``point in (+)_f M_f P_f`` by LP, reporting the minimal slack.

    Each factor is ``(M, P)`` with ``M`` applied to points of ``P`` (``None``
    for identity).  H-polytopes/boxes contribute a free point subject to their
    halfspaces; V-polytopes contribute convex weights over their vertices.
    """
    v = np.asarray(point, dtype=float)
    prob = conic.ConicProblem("membership")
    eps = prob.add_var(lb=0.0)
    # accumulated equality rows: sum of factor images == v (with +/- eps slack)
    row_ids: list[list[int]] = [[] for _ in range(v.size)]
    row_vals: list[list[float]] = [[] for _ in range(v.size)]

    for M, P in factors:
        if M is None:
            M = np.eye(P.dim)
        M = np.atleast_2d(np.asarray(M, dtype=float))
        if M.shape != (v.size, P.dim):
            raise InputError("factor matrix shape does not match")
        if P.dim == 0:
            continue
        if isinstance(P, VPolytope):
            lam = prob.add_vars(P.num_vertices, lb=0.0)
            prob.add_eq((lam, np.ones(lam.size)), 1.0)
            img = M @ P.vertices.T  # (v.size, k)
            for r in range(v.size):
                row_ids[r].extend(int(i) for i in lam)
                row_vals[r].extend(img[r].tolist())
        else:
            Hp = P.to_hpolytope() if isinstance(P, Box) else P
            p = prob.add_vars(P.dim)
            for row, rhs in zip(Hp.H, Hp.h):
                prob.add_le((p, row), rhs)
            for r in range(v.size):
                row_ids[r].extend(int(i) for i in p)
                row_vals[r].extend(M[r].tolist())

    for r in range(v.size):
        ids = np.array(row_ids[r] + [eps], dtype=int)
        prob.add_le((ids, np.array(row_vals[r] + [-1.0])), v[r])
        prob.add_le((ids, np.array([-c for c in row_vals[r]] + [-1.0])), -v[r])
    prob.minimize({eps: 1.0})
    res = prob.solve()
    if res.status != conic.OPTIMAL:
        return ContainmentCheck(False, np.inf)
    slack = float(res.value(eps))
    return ContainmentCheck(slack <= tol, slack)
