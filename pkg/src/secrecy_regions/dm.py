"""Discrete-memoryless rate-region bounds: per-chain evaluation of the
achievable (inner) and converse (outer) inequality sets, and grid sweeps
over auxiliary-chain distributions.

An auxiliary chain is the factored input distribution
p(u) p(v1,v2|u) p(x1|v1) p(x2|v2); the inner class additionally requires
p(v1,v2|u) = p(v1|u) p(v2|u).  Chain evaluation is pure, so sweeps may be
partitioned across workers and merged by set union.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import CapExceededError, ValidationError
from .geometry import (
    CONSTRAINT_PATTERNS,
    FrontierAccumulator,
    Polytope3,
    RateRegion,
    batch_vertices,
)
from .info import DiscreteChannel, FiniteDistribution, entropy_bits

MAX_AUX_ALPHABET = 3
PRODUCT_TOL = 1e-12


def _check_conditional(table: np.ndarray, what: str) -> None:
    flat = table.reshape(-1, table.shape[-1])
    if np.any(flat < 0):
        raise ValidationError(f"{what} has negative entries")
    sums = flat.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-12):
        raise ValidationError(f"{what} rows do not sum to 1")


@dataclass(frozen=True)
class AuxiliaryChain:
    """Factored auxiliary distribution feeding a two-input channel.

    p_v1v2_given_u has shape (|U|, |V1|, |V2|); for kind 'inner' every u
    slice must factor as p(v1|u) p(v2|u) exactly.
    """

    p_u: FiniteDistribution
    p_v1v2_given_u: np.ndarray
    p_x1_given_v1: np.ndarray
    p_x2_given_v2: np.ndarray
    kind: str = "outer"

    def __post_init__(self):
        pv = np.asarray(self.p_v1v2_given_u, dtype=float)
        px1 = np.asarray(self.p_x1_given_v1, dtype=float)
        px2 = np.asarray(self.p_x2_given_v2, dtype=float)
        object.__setattr__(self, "p_v1v2_given_u", pv)
        object.__setattr__(self, "p_x1_given_v1", px1)
        object.__setattr__(self, "p_x2_given_v2", px2)
        if self.kind not in ("inner", "outer"):
            raise ValidationError(f"chain kind must be inner or outer, got {self.kind!r}")
        if pv.ndim != 3 or pv.shape[0] != len(self.p_u):
            raise ValidationError("p(v1,v2|u) must have one slice per u symbol")
        if px1.shape[0] != pv.shape[1] or px2.shape[0] != pv.shape[2]:
            raise ValidationError("p(x|v) rows must match the v alphabets")
        _check_conditional(pv.reshape(pv.shape[0], -1), "p(v1,v2|u)")
        _check_conditional(px1, "p(x1|v1)")
        _check_conditional(px2, "p(x2|v2)")
        if self.kind == "inner":
            for u in range(pv.shape[0]):
                slice_u = pv[u]
                prod_form = np.outer(slice_u.sum(axis=1), slice_u.sum(axis=0))
                if np.max(np.abs(slice_u - prod_form)) > PRODUCT_TOL:
                    raise ValidationError(
                        f"inner chain slice u={u} is not a product distribution"
                    )

    @classmethod
    def inner(cls, p_u, p_v1_given_u, p_v2_given_u, p_x1_given_v1, p_x2_given_v2):
        """Inner-class chain from per-u product factors."""
        pv1 = np.asarray(p_v1_given_u, dtype=float)
        pv2 = np.asarray(p_v2_given_u, dtype=float)
        joint = np.einsum("ua,ub->uab", pv1, pv2)
        return cls(p_u, joint, p_x1_given_v1, p_x2_given_v2, kind="inner")

    @property
    def u_size(self) -> int:
        return len(self.p_u)

    @property
    def v1_size(self) -> int:
        return self.p_v1v2_given_u.shape[1]

    @property
    def v2_size(self) -> int:
        return self.p_v1v2_given_u.shape[2]


# ---------------------------------------------------------------------------
# Chain evaluation
# ---------------------------------------------------------------------------

_SUBSETS = {
    "u": (0,),
    "y1": (3,),
    "y2": (4,),
    "uv1": (0, 1),
    "uv2": (0, 2),
    "uy1": (0, 3),
    "uy2": (0, 4),
    "v1v2": (1, 2),
    "uv1v2": (0, 1, 2),
    "uv1y1": (0, 1, 3),
    "uv1y2": (0, 1, 4),
    "uv2y1": (0, 2, 3),
    "uv2y2": (0, 2, 4),
    "uv1v2y1": (0, 1, 2, 3),
    "uv1v2y2": (0, 1, 2, 4),
    "v1v2y1": (1, 2, 3),
}


def _joint5(p_u, p_v1v2, p_x1, p_x2, transition) -> np.ndarray:
    """p(u, v1, v2, y1, y2) with the channel inputs marginalized out."""
    p_y_given_v = np.einsum("ax,by,xycd->abcd", p_x1, p_x2, transition, optimize=True)
    return np.einsum("u,uab,abcd->uabcd", p_u, p_v1v2, p_y_given_v)


def _entropies(joint5: np.ndarray) -> dict:
    all_axes = set(range(5))
    out = {}
    for name, keep in _SUBSETS.items():
        drop = tuple(sorted(all_axes - set(keep)))
        out[name] = entropy_bits(joint5.sum(axis=drop))
    return out


def chain_information(aux: AuxiliaryChain, ch: DiscreteChannel) -> dict:
    """All conditional mutual informations (bits) the region inequalities and
    the raw achievability constraint system need, for one chain."""
    j = _joint5(aux.p_u.probs, aux.p_v1v2_given_u, aux.p_x1_given_v1, aux.p_x2_given_v2, ch.transition)
    h = _entropies(j)
    return {
        "I(U;Y1)": h["u"] + h["y1"] - h["uy1"],
        "I(U;Y2)": h["u"] + h["y2"] - h["uy2"],
        "I(V1;Y1|U)": h["uv1"] + h["uy1"] - h["uv1y1"] - h["u"],
        "I(V2;Y1|U)": h["uv2"] + h["uy1"] - h["uv2y1"] - h["u"],
        "I(V1;Y2|U)": h["uv1"] + h["uy2"] - h["uv1y2"] - h["u"],
        "I(V2;Y2|U)": h["uv2"] + h["uy2"] - h["uv2y2"] - h["u"],
        "I(V1;Y1|V2,U)": h["uv1v2"] + h["uv2y1"] - h["uv1v2y1"] - h["uv2"],
        "I(V2;Y1|V1,U)": h["uv1v2"] + h["uv1y1"] - h["uv1v2y1"] - h["uv1"],
        "I(V1;Y2|V2,U)": h["uv1v2"] + h["uv2y2"] - h["uv1v2y2"] - h["uv2"],
        "I(V2;Y2|V1,U)": h["uv1v2"] + h["uv1y2"] - h["uv1v2y2"] - h["uv1"],
        "I(V1,V2;Y1|U)": h["uv1v2"] + h["uy1"] - h["uv1v2y1"] - h["u"],
        "I(V1,V2;Y2|U)": h["uv1v2"] + h["uy2"] - h["uv1v2y2"] - h["u"],
        "I(V1,V2;Y1)": h["v1v2"] + h["y1"] - h["v1v2y1"],
        "I(U,V1,V2;Y1)": h["uv1v2"] + h["y1"] - h["uv1v2y1"],
    }


def _bounds_from_entropies(h: dict, kind: str) -> np.ndarray:
    pos = lambda x: max(x, 0.0)
    b12 = pos(h["uy1"] - h["uv1v2y1"] - h["uy2"] + h["uv1v2y2"])
    b012 = pos(
        h["v1v2"] + h["y1"] - h["v1v2y1"]
        - (h["uv1v2"] + h["uy2"] - h["uv1v2y2"] - h["u"])
    )
    if kind == "dm_inner":
        b0 = h["u"] + h["y2"] - h["uy2"]
        b1 = pos(
            (h["uv1v2"] + h["uv2y1"] - h["uv1v2y1"] - h["uv2"])
            - (h["uv1"] + h["uy2"] - h["uv1y2"] - h["u"])
        )
        b2 = pos(
            (h["uv1v2"] + h["uv1y1"] - h["uv1v2y1"] - h["uv1"])
            - (h["uv2"] + h["uy2"] - h["uv2y2"] - h["u"])
        )
    else:
        b0 = min(
            h["u"] + h["y1"] - h["uy1"],
            h["u"] + h["y2"] - h["uy2"],
        )
        b1 = pos(h["uy1"] - h["uv1y1"] - h["uy2"] + h["uv1y2"])
        b2 = pos(h["uy1"] - h["uv2y1"] - h["uy2"] + h["uv2y2"])
    return np.array([max(b0, 0.0), b1, b2, b12, b012])


def region_bounds(aux: AuxiliaryChain, ch: DiscreteChannel, kind: str) -> np.ndarray:
    """The five right-hand sides (b0, b1, b2, b12, b012), clamped at zero."""
    if kind not in ("dm_inner", "dm_outer"):
        raise ValidationError(f"unknown dm bound kind {kind!r}")
    j = _joint5(aux.p_u.probs, aux.p_v1v2_given_u, aux.p_x1_given_v1, aux.p_x2_given_v2, ch.transition)
    return _bounds_from_entropies(_entropies(j), kind)


def inner_corner_triples(aux: AuxiliaryChain, ch: DiscreteChannel) -> list:
    """Vertices of the five-inequality achievable polytope for one
    inner-class chain, intersected with the non-negative orthant."""
    if aux.kind != "inner":
        raise ValidationError("inner region evaluation requires an inner-class chain")
    poly = Polytope3.from_bounds("dm_inner", region_bounds(aux, ch, "dm_inner"))
    return poly.vertex_triples()


def outer_corner_triples(aux: AuxiliaryChain, ch: DiscreteChannel) -> list:
    """Vertices of the converse polytope for one (possibly correlated) chain."""
    poly = Polytope3.from_bounds("dm_outer", region_bounds(aux, ch, "dm_outer"))
    return poly.vertex_triples()


# ---------------------------------------------------------------------------
# Raw achievability constraint system (before eliminating the bin rates)
# ---------------------------------------------------------------------------

RAW_VARS = ("r0", "r1", "r2", "r1p", "r2p")


def achievability_constraint_system(aux: AuxiliaryChain, ch: DiscreteChannel) -> "HalfspaceSystem":
    """The raw constraint system of the binning scheme for one inner-class
    chain: the rate-split equality on the bin rates, the decoding constraints
    at the legitimate receiver, the eavesdropper bin-decoding constraints,
    and non-negativity.  Eliminating r1p and r2p reproduces the direct
    five-inequality region.
    """
    if aux.kind != "inner":
        raise ValidationError("the binning scheme requires an inner-class chain")
    mi = chain_information(aux, ch)
    rows = [
        # r1p + r2p pinned to the eavesdropper's conditional rate (slack -> 0)
        ((0, 0, 0, 1, 1), "==", mi["I(V1,V2;Y2|U)"]),
        # reliable decoding at the legitimate receiver / of the common message
        ((1, 0, 0, 0, 0), "<=", mi["I(U;Y2)"]),
        ((0, 1, 0, 1, 0), "<=", mi["I(V1;Y1|V2,U)"]),
        ((0, 0, 1, 0, 1), "<=", mi["I(V2;Y1|V1,U)"]),
        ((0, 1, 1, 1, 1), "<=", mi["I(V1,V2;Y1|U)"]),
        ((1, 1, 1, 1, 1), "<=", mi["I(U,V1,V2;Y1)"]),
        # eavesdropper can resolve the bin indices given the messages
        ((0, 0, 0, 1, 0), "<=", mi["I(V1;Y2|V2,U)"]),
        ((0, 0, 0, 0, 1), "<=", mi["I(V2;Y2|V1,U)"]),
        ((0, 0, 0, 1, 1), "<=", mi["I(V1,V2;Y2|U)"]),
    ]
    rows += [(tuple(-1.0 if i == k else 0.0 for i in range(5)), "<=", 0.0) for k in range(5)]
    from .geometry import HalfspaceSystem

    return HalfspaceSystem(RAW_VARS, tuple(rows))


def fm_region_polytope(aux: AuxiliaryChain, ch: DiscreteChannel) -> Polytope3:
    """Project the raw constraint system onto (r0, r1, r2) by eliminating
    both bin rates with Fourier-Motzkin."""
    from .geometry import fm_eliminate

    system = achievability_constraint_system(aux, ch)
    system = fm_eliminate(system, "r1p")
    system = fm_eliminate(system, "r2p")
    return Polytope3.from_system(system)


def random_inner_chain(
    ch: DiscreteChannel,
    rng: np.random.Generator,
    u_size: int = 2,
    v1_size: int = 2,
    v2_size: int = 2,
) -> AuxiliaryChain:
    """A random inner-class chain with flat-Dirichlet factors, for seeded
    equivalence suites."""

    def rows(n, k):
        return rng.dirichlet(np.ones(k), size=n)

    return AuxiliaryChain.inner(
        FiniteDistribution(rng.dirichlet(np.ones(u_size))),
        rows(u_size, v1_size),
        rows(u_size, v2_size),
        rows(v1_size, ch.x1_size),
        rows(v2_size, ch.x2_size),
    )


def fm_matches_direct(aux: AuxiliaryChain, ch: DiscreteChannel, tol: float = 1e-9) -> bool:
    """Mutual vertex containment of the Fourier-Motzkin projection and the
    direct five-inequality polytope for one inner-class chain."""
    direct = Polytope3.from_bounds("dm_inner", region_bounds(aux, ch, "dm_inner"))
    projected = fm_region_polytope(aux, ch)
    return all(projected.contains_point(v, tol) for v in direct.vertices()) and all(
        direct.contains_point(v, tol) for v in projected.vertices()
    )


# ---------------------------------------------------------------------------
# Grid sweeps
# ---------------------------------------------------------------------------


def simplex_grid(cells: int, resolution: int) -> np.ndarray:
    """All probability vectors over `cells` whose entries are multiples of
    1/(resolution-1); resolution 1 yields just the uniform vector."""
    if resolution < 1:
        raise ValidationError("resolution must be >= 1")
    if resolution == 1:
        return np.full((1, cells), 1.0 / cells)
    steps = resolution - 1
    rows = [
        c + (steps - sum(c),)
        for c in product(range(steps + 1), repeat=cells - 1)
        if sum(c) <= steps
    ]
    return np.array(rows, dtype=float) / steps


@dataclass(frozen=True)
class GridSpec:
    """Deterministic enumeration grid over auxiliary chains."""

    u_size: int = 2
    v1_size: int = 2
    v2_size: int = 2
    resolution: int = 3
    max_chains: int = 300_000

    def __post_init__(self):
        for name in ("u_size", "v1_size", "v2_size"):
            v = getattr(self, name)
            if not 1 <= v <= MAX_AUX_ALPHABET:
                raise ValidationError(f"{name}={v} outside 1..{MAX_AUX_ALPHABET}")
        if self.resolution < 1:
            raise ValidationError("resolution must be >= 1")


def _chain_blocks(grid: GridSpec, ch: DiscreteChannel, sweep_class: str):
    """Per-parameter option tables; a chain is one choice from every block."""
    k = grid.resolution
    blocks = [simplex_grid(grid.u_size, k)]
    if sweep_class == "inner":
        blocks += [simplex_grid(grid.v1_size, k)] * grid.u_size
        blocks += [simplex_grid(grid.v2_size, k)] * grid.u_size
    else:
        blocks += [simplex_grid(grid.v1_size * grid.v2_size, k)] * grid.u_size
    blocks += [simplex_grid(ch.x1_size, k)] * grid.v1_size
    blocks += [simplex_grid(ch.x2_size, k)] * grid.v2_size
    return blocks


def chain_count(grid: GridSpec, ch: DiscreteChannel, sweep_class: str) -> int:
    count = 1
    for b in _chain_blocks(grid, ch, sweep_class):
        count *= len(b)
    return count


def _chain_tables(blocks, grid: GridSpec, sweep_class: str, index: int):
    digits = []
    for b in reversed(blocks):
        index, d = divmod(index, len(b))
        digits.append(d)
    digits.reverse()
    pos = 0
    p_u = blocks[pos][digits[pos]]
    pos += 1
    if sweep_class == "inner":
        pv1 = np.array([blocks[pos + u][digits[pos + u]] for u in range(grid.u_size)])
        pos += grid.u_size
        pv2 = np.array([blocks[pos + u][digits[pos + u]] for u in range(grid.u_size)])
        pos += grid.u_size
        p_v1v2 = np.einsum("ua,ub->uab", pv1, pv2)
    else:
        p_v1v2 = np.array(
            [blocks[pos + u][digits[pos + u]] for u in range(grid.u_size)]
        ).reshape(grid.u_size, grid.v1_size, grid.v2_size)
        pos += grid.u_size
    px1 = np.array([blocks[pos + v][digits[pos + v]] for v in range(grid.v1_size)])
    pos += grid.v1_size
    px2 = np.array([blocks[pos + v][digits[pos + v]] for v in range(grid.v2_size)])
    return p_u, p_v1v2, px1, px2


def chain_at(grid: GridSpec, ch: DiscreteChannel, sweep_class: str, index: int) -> AuxiliaryChain:
    """Materialize grid chain `index` as an AuxiliaryChain."""
    blocks = _chain_blocks(grid, ch, sweep_class)
    p_u, p_v1v2, px1, px2 = _chain_tables(blocks, grid, sweep_class, index)
    return AuxiliaryChain(
        FiniteDistribution(p_u), p_v1v2, px1, px2,
        kind="inner" if sweep_class == "inner" else "outer",
    )


def _bounds_slice(transition, grid: GridSpec, sweep_class: str, kind: str, start: int, stop: int):
    blocks = _chain_blocks(grid, DiscreteChannel(transition), sweep_class)
    out = np.empty((stop - start, 5))
    for i, index in enumerate(range(start, stop)):
        p_u, p_v1v2, px1, px2 = _chain_tables(blocks, grid, sweep_class, index)
        j = _joint5(p_u, p_v1v2, px1, px2, transition)
        out[i] = _bounds_from_entropies(_entropies(j), kind)
    return out


def default_workers() -> int:
    env = os.environ.get("SECRECY_REGIONS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"SECRECY_REGIONS_THREADS={env!r} is not an integer")
    return os.cpu_count() or 1


def sweep_region(
    ch: DiscreteChannel,
    sweep_class: str,
    grid: GridSpec,
    workers: int | None = None,
) -> RateRegion:
    """Sweep every grid chain, collect all corner triples, and return the
    Pareto frontier with chain-index provenance.  Deterministic given the
    grid; worker partitioning only splits the bound evaluation.
    """
    if sweep_class not in ("inner", "outer"):
        raise ValidationError(f"sweep class must be inner or outer, got {sweep_class!r}")
    kind = "dm_inner" if sweep_class == "inner" else "dm_outer"
    total = chain_count(grid, ch, sweep_class)
    if total > grid.max_chains:
        raise CapExceededError(
            f"grid enumerates {total} chains, above the cap of {grid.max_chains}"
        )
    workers = workers if workers is not None else default_workers()
    workers = max(1, min(workers, total))

    if workers == 1:
        bounds = _bounds_slice(ch.transition, grid, sweep_class, kind, 0, total)
    else:
        edges = np.linspace(0, total, workers + 1, dtype=int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    _bounds_slice,
                    [ch.transition] * workers,
                    [grid] * workers,
                    [sweep_class] * workers,
                    [kind] * workers,
                    edges[:-1],
                    edges[1:],
                )
            )
        bounds = np.vstack(parts)

    A = CONSTRAINT_PATTERNS[kind]
    acc = FrontierAccumulator(record_width=1)
    chunk = 8192
    for start in range(0, total, chunk):
        rows = bounds[start : start + chunk]
        B = np.hstack([rows, np.zeros((len(rows), 3))])
        pts, owner = batch_vertices(A, B)
        acc.add(pts, (start + owner)[:, None].astype(float))
    return acc.finish(kind, bounds)
