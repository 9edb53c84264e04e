"""Polyhedral machinery for rate regions: Fourier-Motzkin elimination,
vertex enumeration for 3-D rate polytopes, Pareto frontiers, projection,
and region membership.

All geometric comparisons use a 1e-9 bit tolerance; inputs are closed-form
values with ~1e-15 native error, so this leaves several orders of margin.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import UnboundedPolytopeError, ValidationError

GEOM_TOL = 1e-9
SANITY_BOX_BITS = 64.0

RATE_VARS = ("r0", "r1", "r2")

# Constraint-row patterns (left-hand sides only; right-hand sides vary per
# sweep point).  Non-negativity rows come last so bound values can be stacked
# directly in front of a zero block.
A_FIVE_BOUNDS = np.array(
    [
        [1.0, 0.0, 0.0],  # r0 <= b0
        [0.0, 1.0, 0.0],  # r1 <= b1
        [0.0, 0.0, 1.0],  # r2 <= b2
        [0.0, 1.0, 1.0],  # r1 + r2 <= b12
        [1.0, 1.0, 1.0],  # r0 + r1 + r2 <= b012
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, -1.0],
    ]
)
A_OUTER_GAUSSIAN = np.array(
    [
        [1.0, 0.0, 0.0],  # r0 <= b0
        [0.0, 1.0, 1.0],  # r1 + r2 <= b12
        [1.0, 1.0, 1.0],  # r0 + r1 + r2 <= b012
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, -1.0],
    ]
)
A_CMAC = np.array(
    [
        [0.0, 1.0, 0.0],  # r1 <= b1
        [0.0, 0.0, 1.0],  # r2 <= b2
        [0.0, 1.0, 1.0],  # r1 + r2 <= b12
        [1.0, 1.0, 1.0],  # r0 + r1 + r2 <= b012
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, -1.0],
    ]
)

CONSTRAINT_PATTERNS = {
    "dm_inner": A_FIVE_BOUNDS,
    "dm_outer": A_FIVE_BOUNDS,
    "g_inner": A_FIVE_BOUNDS,
    "g_outer": A_OUTER_GAUSSIAN,
    "cmac": A_CMAC,
}


@dataclass(frozen=True)
class RateTriple:
    """A rate point (r0, r1, r2) in bits per channel use."""

    r0: float
    r1: float
    r2: float

    def __post_init__(self):
        for name in ("r0", "r1", "r2"):
            v = getattr(self, name)
            if v < -GEOM_TOL:
                raise ValidationError(f"{name}={v} is negative")
            object.__setattr__(self, name, max(float(v), 0.0))

    def as_array(self) -> np.ndarray:
        return np.array([self.r0, self.r1, self.r2])


@dataclass(frozen=True)
class RateRegion:
    """A swept rate region: Pareto frontier plus enough per-sweep-point bound
    data to answer exact membership queries.

    points:     (F, 3) Pareto-maximal frontier, sorted by (r0, r1, r2)
    records:    (F, k) provenance row per frontier point (chain index, or
                sweep parameters beta1/beta2[/rho])
    bound_rows: (M, nb) right-hand sides of the defining inequalities, one
                row per sweep point, matching CONSTRAINT_PATTERNS[kind]
    """

    kind: str
    points: np.ndarray
    records: np.ndarray = field(repr=False)
    bound_rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in CONSTRAINT_PATTERNS:
            raise ValidationError(f"unknown bound kind {self.kind!r}")

    def frontier_triples(self) -> list:
        return [RateTriple(*p) for p in self.points]

    def max_sum_rate(self) -> float:
        """Largest r1 + r2 on the frontier (0 for an empty region)."""
        if len(self.points) == 0:
            return 0.0
        return float((self.points[:, 1] + self.points[:, 2]).max())

    def max_common_rate(self) -> float:
        if len(self.points) == 0:
            return 0.0
        return float(self.points[:, 0].max())


# ---------------------------------------------------------------------------
# Halfspace systems and Fourier-Motzkin elimination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HalfspaceSystem:
    """Linear constraints over named variables.

    Each row is (coefficients, relation, constant) with relation '<=' or '=='.
    An equality is equivalent to the pair of opposing inequalities.
    """

    variables: tuple
    rows: tuple

    def __post_init__(self):
        variables = tuple(self.variables)
        rows = []
        for coeffs, rel, rhs in self.rows:
            c = np.asarray(coeffs, dtype=float)
            if c.shape != (len(variables),):
                raise ValidationError("coefficient vector length mismatch")
            if rel not in ("<=", "=="):
                raise ValidationError(f"unsupported relation {rel!r}")
            rows.append((c, rel, float(rhs)))
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "rows", tuple(rows))

    def inequality_rows(self):
        """All rows as '<=' pairs (equalities expanded)."""
        out = []
        for c, rel, rhs in self.rows:
            out.append((c, rhs))
            if rel == "==":
                out.append((-c, -rhs))
        return out

    def to_arrays(self, order=None):
        """(A, b) with A @ x <= b, columns in the given variable order."""
        order = tuple(order) if order is not None else self.variables
        idx = [self.variables.index(v) for v in order]
        ineqs = self.inequality_rows()
        A = np.array([c[idx] for c, _ in ineqs]).reshape(len(ineqs), len(order))
        b = np.array([rhs for _, rhs in ineqs])
        return A, b


def _prune_pairwise(A: np.ndarray, b: np.ndarray, tol: float = GEOM_TOL):
    """Drop rows dominated by another row with the same (normalized)
    coefficient vector but a smaller or equal constant, plus trivial
    0 <= nonneg rows.  Infeasibility markers (0 <= negative) are kept.
    """
    keep = []
    norms = np.linalg.norm(A, axis=1)
    for i in range(len(b)):
        if norms[i] < tol:
            if b[i] < -tol:
                keep.append(i)  # infeasible marker
            continue
        ai, bi = A[i] / norms[i], b[i] / norms[i]
        dominated = False
        for j in keep + list(range(i + 1, len(b))):
            if j == i or norms[j] < tol:
                continue
            aj, bj = A[j] / norms[j], b[j] / norms[j]
            if np.allclose(ai, aj, atol=tol):
                if bj < bi - tol or (abs(bj - bi) <= tol and j < i):
                    dominated = True
                    break
        if not dominated:
            keep.append(i)
    return A[keep], b[keep]


def fm_eliminate(system: HalfspaceSystem, var: str) -> HalfspaceSystem:
    """Project a halfspace system onto the remaining variables by pairing
    every upper bound on `var` with every lower bound.
    """
    if var not in system.variables:
        raise ValidationError(f"variable {var!r} not in system")
    j = system.variables.index(var)
    ineqs = system.inequality_rows()
    upper, lower, passthrough = [], [], []
    for c, rhs in ineqs:
        if c[j] > GEOM_TOL:
            upper.append((c / c[j], rhs / c[j]))
        elif c[j] < -GEOM_TOL:
            lower.append((c / -c[j], rhs / -c[j]))
        else:
            passthrough.append((c, rhs))
    combined = [(cu + cl, ru + rl) for cu, ru in upper for cl, rl in lower]
    rows = passthrough + combined

    keep_idx = [k for k in range(len(system.variables)) if k != j]
    if rows:
        A = np.array([c[keep_idx] for c, _ in rows]).reshape(len(rows), len(keep_idx))
        b = np.array([rhs for _, rhs in rows])
        A, b = _prune_pairwise(A, b)
    else:
        A = np.zeros((0, len(keep_idx)))
        b = np.zeros(0)
    new_vars = tuple(v for v in system.variables if v != var)
    return HalfspaceSystem(new_vars, tuple((A[i], "<=", b[i]) for i in range(len(b))))


# ---------------------------------------------------------------------------
# Vertex enumeration
# ---------------------------------------------------------------------------


def enumerate_vertices(A: np.ndarray, b: np.ndarray, tol: float = GEOM_TOL) -> np.ndarray:
    """Vertices of {x in R^3 : A x <= b} from all feasible basic solutions.

    Near-singular 3x3 subsystems (|det| < 1e-12) are skipped; their vertices,
    when real, are produced by neighbouring non-degenerate triples.  Raises
    UnboundedPolytopeError when the polytope escapes the sanity box.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[1] != 3:
        raise ValidationError("vertex enumeration expects 3 rate variables")
    box_a = np.eye(3)
    box_b = np.full(3, SANITY_BOX_BITS)
    Af = np.vstack([A, box_a])
    bf = np.concatenate([b, box_b])

    m = len(bf)
    combos = np.array(list(combinations(range(m), 3)))
    sub_a = Af[combos]
    sub_b = bf[combos]
    dets = np.linalg.det(sub_a)
    ok = np.abs(dets) > 1e-12
    if not ok.any():
        return np.zeros((0, 3))
    cand = np.linalg.solve(sub_a[ok], sub_b[ok][..., None])[..., 0]
    feas = (cand @ Af.T <= bf + tol).all(axis=1)
    verts = cand[feas]
    if len(verts) == 0:
        return np.zeros((0, 3))
    if np.any(verts > SANITY_BOX_BITS - 1e-6):
        raise UnboundedPolytopeError("polytope reaches the 64-bit sanity box")
    verts = np.unique(np.round(verts / tol) * tol, axis=0)
    return verts


def batch_vertices(A: np.ndarray, B: np.ndarray, tol: float = GEOM_TOL):
    """Feasible basic solutions of many polytopes sharing constraint pattern A.

    A is (m, 3); B is (N, m), one right-hand-side row per polytope.  Returns
    (points, owner) where owner[i] is the row of B that produced points[i].
    Bounds are assumed finite, so no sanity box is added.
    """
    A = np.asarray(A, dtype=float)
    B = np.atleast_2d(np.asarray(B, dtype=float))
    m = A.shape[0]
    pts, owners = [], []
    n = B.shape[0]
    for combo in combinations(range(m), 3):
        sub = A[list(combo)]
        det = np.linalg.det(sub)
        if abs(det) < 1e-12:
            continue
        inv = np.linalg.inv(sub)
        cand = B[:, list(combo)] @ inv.T  # (N, 3)
        feas = (cand @ A.T <= B + tol).all(axis=1)
        if feas.any():
            pts.append(cand[feas])
            owners.append(np.nonzero(feas)[0])
    if not pts:
        return np.zeros((0, 3)), np.zeros(0, dtype=int)
    return np.vstack(pts), np.concatenate(owners)


@dataclass(frozen=True)
class Polytope3:
    """Halfspace intersection over exactly (r0, r1, r2) with cached vertices."""

    A: np.ndarray
    b: np.ndarray

    @classmethod
    def from_system(cls, system: HalfspaceSystem) -> "Polytope3":
        if set(system.variables) != set(RATE_VARS):
            raise ValidationError("Polytope3 requires variables (r0, r1, r2)")
        A, b = system.to_arrays(RATE_VARS)
        return cls(A, b)

    @classmethod
    def from_bounds(cls, kind: str, bounds) -> "Polytope3":
        A = CONSTRAINT_PATTERNS[kind]
        nb = A.shape[0] - 3  # non-negativity rows carry rhs 0
        bounds = np.asarray(bounds, dtype=float)
        if bounds.shape != (nb,):
            raise ValidationError(f"{kind} expects {nb} bound values")
        return cls(A, np.concatenate([bounds, np.zeros(3)]))

    def vertices(self) -> np.ndarray:
        return enumerate_vertices(self.A, self.b)

    def vertex_triples(self) -> list:
        return [RateTriple(*v) for v in self.vertices()]

    def contains_point(self, p, tol: float = GEOM_TOL) -> bool:
        p = np.asarray(p, dtype=float)
        return bool((self.A @ p <= self.b + tol).all())


# ---------------------------------------------------------------------------
# Pareto frontiers, projection, membership
# ---------------------------------------------------------------------------


def _dominated_by_any(points: np.ndarray, others: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Mask of points component-wise dominated (>= everywhere, > somewhere)
    by some row of `others`."""
    if len(others) == 0 or len(points) == 0:
        return np.zeros(len(points), dtype=bool)
    out = np.empty(len(points), dtype=bool)
    block = max(1, 2_000_000 // len(others))  # bound the broadcast working set
    for s in range(0, len(points), block):
        p = points[s : s + block]
        ge = others[None, :, :] >= p[:, None, :] - tol
        gt = others[None, :, :] > p[:, None, :] + tol
        out[s : s + block] = (ge.all(axis=2) & gt.any(axis=2)).any(axis=1)
    return out


def _stair_covers(stair_r1, stair_r2, r1, r2) -> bool:
    """True when the staircase holds a point with both coordinates >=."""
    k = bisect_left(stair_r1, r1)
    return k < len(stair_r1) and stair_r2[k] >= r2


def _stair_insert(stair_r1, stair_r2, r1, r2) -> None:
    if _stair_covers(stair_r1, stair_r2, r1, r2):
        return
    k = bisect_left(stair_r1, r1)
    hi = k
    if hi < len(stair_r1) and stair_r1[hi] == r1:
        hi += 1  # same r1, smaller r2: superseded
    lo = k
    while lo > 0 and stair_r2[lo - 1] <= r2:
        lo -= 1
    stair_r1[lo:hi] = [r1]
    stair_r2[lo:hi] = [r2]


def _pareto_mask(points: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Mask of rows not component-wise dominated by any other distinct row.

    Plane-sweep over descending r0 with a 2-D maxima staircase on (r1, r2);
    O(n log n), so million-point sweeps stay cheap.  Rows are expected to be
    distinct; tol > 0 quantizes coordinates before comparing.
    """
    pts = points if tol <= 0 else np.round(points / tol)
    n = len(pts)
    keep = np.zeros(n, dtype=bool)
    if n == 0:
        return keep
    order = np.lexsort((-pts[:, 2], -pts[:, 1], -pts[:, 0]))
    p = pts[order]
    stair_r1: list = []  # ascending r1
    stair_r2: list = []  # strictly descending r2
    i = 0
    while i < n:
        j = i
        while j < n and p[j, 0] == p[i, 0]:
            j += 1
        survivors = []
        best_r2 = -np.inf  # over earlier group members, all of which have r1 >=
        for g in range(i, j):
            r1, r2 = p[g, 1], p[g, 2]
            dominated = best_r2 >= r2 or _stair_covers(stair_r1, stair_r2, r1, r2)
            if not dominated:
                keep[order[g]] = True
                survivors.append((r1, r2))
            best_r2 = max(best_r2, r2)
        for r1, r2 in survivors:
            _stair_insert(stair_r1, stair_r2, r1, r2)
        i = j
    return keep


def pareto_frontier(points, tol: float = 0.0) -> np.ndarray:
    """Component-wise non-dominated subset, in stable (r0, r1, r2) order.

    Accepts an (N, 2) or (N, 3) array, or a list of RateTriple.
    """
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], RateTriple):
        points = np.array([[p.r0, p.r1, p.r2] for p in points])
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        return np.zeros((0, 3))
    pts = np.unique(pts, axis=0)
    full = pts if pts.shape[1] == 3 else np.column_stack([pts, np.zeros(len(pts))])
    if pts.shape[1] not in (2, 3):
        raise ValidationError("pareto_frontier expects 2 or 3 rate columns")
    frontier = pts[_pareto_mask(full, tol)]
    order = np.lexsort(frontier.T[::-1])
    return frontier[order]


class FrontierAccumulator:
    """Collects sweep vertices chunk by chunk, prunes each chunk to its local
    Pareto maxima, and computes the global frontier once at the end, keeping
    one provenance row aligned with every surviving point.  Merge order does
    not affect the final frontier (set semantics).
    """

    def __init__(self, record_width: int):
        self.record_width = record_width
        self._points: list = []
        self._records: list = []

    @staticmethod
    def _dedupe(pts: np.ndarray, recs: np.ndarray):
        rounded = np.round(pts / GEOM_TOL) * GEOM_TOL
        _, first = np.unique(rounded, axis=0, return_index=True)
        first = np.sort(first)
        return pts[first], recs[first]

    def add(self, points: np.ndarray, records: np.ndarray) -> None:
        if len(points) == 0:
            return
        pts, recs = self._dedupe(np.asarray(points, float), np.asarray(records, float))
        mask = _pareto_mask(pts)
        self._points.append(pts[mask])
        self._records.append(recs[mask])

    def finish(self, kind: str, bound_rows: np.ndarray) -> RateRegion:
        if not self._points:
            pts = np.zeros((0, 3))
            recs = np.zeros((0, self.record_width))
        else:
            pts, recs = self._dedupe(np.vstack(self._points), np.vstack(self._records))
            mask = _pareto_mask(pts)
            pts, recs = pts[mask], recs[mask]
        order = np.lexsort(pts.T[::-1])
        return RateRegion(kind, pts[order], recs[order], np.atleast_2d(bound_rows))


def region_membership(kind: str, bound_rows: np.ndarray, p, tol: float = GEOM_TOL) -> bool:
    """True when p satisfies all defining inequalities of at least one sweep
    point's polytope."""
    A = CONSTRAINT_PATTERNS[kind]
    nb = A.shape[0] - 3
    p = np.asarray(p, dtype=float)
    if (p < -tol).any():
        return False
    lhs = A[:nb] @ p  # (nb,)
    B = np.atleast_2d(bound_rows)
    return bool((lhs[None, :] <= B + tol).all(axis=1).any())


def contains(outer: RateRegion, p, tol: float = GEOM_TOL) -> bool:
    """Membership of a rate triple in a swept region: dominated by some
    frontier point, or inside some sweep point's halfspace system."""
    if isinstance(p, RateTriple):
        p = p.as_array()
    p = np.asarray(p, dtype=float)
    if (p < -tol).any():
        return False
    if len(outer.points) and (outer.points >= p[None, :] - tol).all(axis=1).any():
        return True
    return region_membership(outer.kind, outer.bound_rows, p, tol)


def project(points, axis: str) -> np.ndarray:
    """Drop the named rate coordinate and return the 2-D Pareto frontier."""
    if axis not in RATE_VARS:
        raise ValidationError(f"axis must be one of {RATE_VARS}")
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], RateTriple):
        points = np.array([[p.r0, p.r1, p.r2] for p in points])
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        return np.zeros((0, 2))
    keep = [i for i, v in enumerate(RATE_VARS) if v != axis]
    return pareto_frontier(pts[:, keep])
