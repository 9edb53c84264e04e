"""Finite distributions, discrete channels, and exact entropy / mutual
information evaluation in bits.

Everything here is a pure function over small dense numpy tables; alphabets
are expected to stay at four symbols or fewer per variable, so a full joint
over seven variables is at most 4**7 entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .errors import ValidationError

NORMALIZATION_TOL = 1e-12
_LN2 = np.log(2.0)


def _check_distribution(p: np.ndarray, what: str) -> None:
    if np.any(p < 0):
        raise ValidationError(f"{what} has negative entries")
    total = float(p.sum())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValidationError(f"{what} sums to {total!r}, not 1 within {NORMALIZATION_TOL}")


def entropy_bits(p: np.ndarray) -> float:
    """Shannon entropy -sum p log2 p of a (possibly multi-axis) mass table.

    Zero entries contribute zero; the table is not re-normalized.
    """
    return float(-xlogy(p, p).sum() / _LN2)


@dataclass(frozen=True)
class FiniteDistribution:
    """Probability vector over an indexed finite alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if p.ndim != 1 or p.size == 0:
            raise ValidationError("probabilities must form a non-empty vector")
        _check_distribution(p, "distribution")

    def __len__(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, n: int) -> "FiniteDistribution":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, at: int = 0) -> "FiniteDistribution":
        p = np.zeros(n)
        p[at] = 1.0
        return cls(p)


def entropy(d: FiniteDistribution) -> float:
    """Entropy of a distribution in bits; lies in [0, log2(alphabet size)]."""
    return entropy_bits(d.probs)


@dataclass(frozen=True)
class DiscreteChannel:
    """Joint transition law p(y1, y2 | x1, x2) on finite alphabets.

    transition has shape (|X1|, |X2|, |Y1|, |Y2|) and every (x1, x2) slice
    is a probability table over (y1, y2).
    """

    transition: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=float)
        object.__setattr__(self, "transition", t)
        if t.ndim != 4:
            raise ValidationError("channel transition must be a 4-index table")
        for x1 in range(t.shape[0]):
            for x2 in range(t.shape[1]):
                _check_distribution(t[x1, x2], f"channel slice ({x1},{x2})")

    @property
    def x1_size(self) -> int:
        return self.transition.shape[0]

    @property
    def x2_size(self) -> int:
        return self.transition.shape[1]

    @property
    def y1_size(self) -> int:
        return self.transition.shape[2]

    @property
    def y2_size(self) -> int:
        return self.transition.shape[3]

    def y1_marginal(self) -> np.ndarray:
        """p(y1 | x1, x2)."""
        return self.transition.sum(axis=3)

    def y2_marginal(self) -> np.ndarray:
        """p(y2 | x1, x2)."""
        return self.transition.sum(axis=2)


@dataclass(frozen=True)
class JointDistribution:
    """Dense joint mass table over named variables."""

    names: tuple
    mass: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=float)
        names = tuple(self.names)
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "names", names)
        if len(names) != m.ndim:
            raise ValidationError("variable names do not match table rank")
        if len(set(names)) != len(names):
            raise ValidationError("duplicate variable names")
        _check_distribution(m, "joint distribution")

    def _axes(self, group) -> tuple:
        unknown = [v for v in group if v not in self.names]
        if unknown:
            raise ValidationError(f"unknown variables: {unknown}")
        return tuple(self.names.index(v) for v in group)

    def marginal(self, keep) -> "JointDistribution":
        """Marginalize onto the named subset, preserving this joint's order."""
        keep = [v for v in self.names if v in set(keep)]
        drop = self._axes([v for v in self.names if v not in keep])
        return JointDistribution(tuple(keep), self.mass.sum(axis=drop) if drop else self.mass)

    def entropy_of(self, group) -> float:
        """Joint entropy H(group) in bits."""
        drop = self._axes([v for v in self.names if v not in set(group)])
        table = self.mass.sum(axis=drop) if drop else self.mass
        return entropy_bits(table)


def mutual_information(j: JointDistribution, group_a, group_b, given=()) -> float:
    """Conditional mutual information I(A; B | C) in bits.

    Evaluated as H(A,C) + H(B,C) - H(A,B,C) - H(C); tiny negative values from
    float cancellation are clamped to zero.
    """
    a, b, c = set(group_a), set(group_b), set(given)
    if a & b or a & c or b & c:
        raise ValidationError("variable groups must be disjoint")
    for g in (a, b, c):
        j._axes(list(g))
    value = (
        j.entropy_of(a | c)
        + j.entropy_of(b | c)
        - j.entropy_of(a | b | c)
        - j.entropy_of(c)
    )
    if value < -1e-9:
        raise ValidationError(f"mutual information evaluated to {value}, far below zero")
    return max(value, 0.0)


def assemble_joint(aux, ch: DiscreteChannel) -> JointDistribution:
    """Full joint over (U, V1, V2, X1, X2, Y1, Y2) from an auxiliary chain
    composed with a channel; the chain U -> (V1,V2) -> (X1,X2) -> (Y1,Y2)
    holds by construction.
    """
    if aux.p_x1_given_v1.shape[1] != ch.x1_size or aux.p_x2_given_v2.shape[1] != ch.x2_size:
        raise ValidationError("auxiliary chain input alphabets do not match the channel")
    mass = np.einsum(
        "u,uab,ax,by,xycd->uabxycd",
        aux.p_u.probs,
        aux.p_v1v2_given_u,
        aux.p_x1_given_v1,
        aux.p_x2_given_v2,
        ch.transition,
        optimize=True,
    )
    return JointDistribution(("U", "V1", "V2", "X1", "X2", "Y1", "Y2"), mass)
