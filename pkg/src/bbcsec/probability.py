"""Exact finite-alphabet probability and information measures.

Everything is base-2: entropies and mutual informations are in bits. The
types are immutable after construction and validated there (mass within
1e-9 of one, no negative entries); nothing renormalizes silently.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .exceptions import ValidationError

MASS_TOL = 1e-9

# Axis names of the full input/output chain, in canonical order.
CHAIN_AXES = ("U", "V", "X", "Y1", "Y2")


def _as_prob_array(values, ndim: int, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValidationError(f"{what}: expected {ndim}-dimensional data, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{what}: empty")
    if np.any(arr < 0.0):
        idx = tuple(int(i) for i in np.argwhere(arr < 0.0)[0])
        raise ValidationError(f"{what}: negative entry {arr[idx]!r} at index {idx}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Dist:
    """Probability distribution over a finite alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        arr = _as_prob_array(self.probs, 1, "Dist")
        total = math.fsum(arr.tolist())
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(f"Dist: mass {total!r} differs from 1 by more than {MASS_TOL}")
        object.__setattr__(self, "probs", arr)

    @classmethod
    def normalized(cls, values) -> "Dist":
        """Explicitly renormalize raw nonnegative weights into a Dist."""
        arr = np.asarray(values, dtype=np.float64)
        total = arr.sum()
        if total <= 0.0:
            raise ValidationError("Dist.normalized: total weight must be positive")
        return cls(arr / total)

    @classmethod
    def uniform(cls, size: int) -> "Dist":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size: int, at: int) -> "Dist":
        probs = np.zeros(size)
        probs[at] = 1.0
        return cls(probs)

    @property
    def size(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True, eq=False)
class CondDist:
    """Conditional distribution: one Dist per conditioning symbol (rows)."""

    rows: np.ndarray

    def __post_init__(self):
        arr = _as_prob_array(self.rows, 2, "CondDist")
        sums = [math.fsum(row.tolist()) for row in arr]
        for i, s in enumerate(sums):
            if abs(s - 1.0) > MASS_TOL:
                raise ValidationError(
                    f"CondDist: row {i} has mass {s!r}, differs from 1 by more than {MASS_TOL}"
                )
        object.__setattr__(self, "rows", arr)

    @classmethod
    def identity(cls, size: int) -> "CondDist":
        return cls(np.eye(size))

    @property
    def dims(self) -> tuple:
        return self.rows.shape


@dataclass(frozen=True, eq=False)
class JointDist:
    """Joint distribution over named axes (a subset of U, V, X, Y1, Y2)."""

    axes: tuple
    tensor: np.ndarray = field(repr=False)

    def __post_init__(self):
        axes = tuple(self.axes)
        if len(set(axes)) != len(axes):
            raise ValidationError(f"JointDist: duplicate axis names in {axes}")
        arr = _as_prob_array(self.tensor, len(axes), "JointDist")
        total = math.fsum(arr.reshape(-1).tolist())
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(f"JointDist: mass {total!r} differs from 1 by more than {MASS_TOL}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "tensor", arr)

    def axis_size(self, name: str) -> int:
        return self.tensor.shape[self.axes.index(name)]

    def marginal(self, keep: Iterable[str]) -> "JointDist":
        return marginalize(self, keep)


def _entropy_of_tensor(arr: np.ndarray) -> float:
    flat = arr.reshape(-1)
    pos = flat[flat > 0.0]
    # fsum keeps the chain-rule identities exact to ~1e-15
    return -math.fsum((p * math.log2(p) for p in pos.tolist()))


def entropy(d) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    if not isinstance(d, Dist):
        d = Dist(d)
    return _entropy_of_tensor(d.probs)


def marginalize(j: JointDist, keep: Iterable[str]) -> JointDist:
    """Sum out every axis not in `keep`, preserving axis order and mass."""
    keep = set(keep)
    unknown = keep - set(j.axes)
    if unknown:
        raise ValidationError(f"marginalize: unknown axes {sorted(unknown)}; joint has {j.axes}")
    kept = tuple(a for a in j.axes if a in keep)
    drop = tuple(i for i, a in enumerate(j.axes) if a not in keep)
    tensor = j.tensor.sum(axis=drop) if drop else j.tensor
    return JointDist(kept, tensor)


def _subset_entropy(j: JointDist, axes: set) -> float:
    if not axes:
        return 0.0
    return _entropy_of_tensor(marginalize(j, axes).tensor)


def conditional_mutual_information(j: JointDist, a, b, c=()) -> float:
    """I(A;B|C) in bits via H(A,C) + H(B,C) - H(A,B,C) - H(C).

    With empty C this is the plain mutual information I(A;B).
    """
    a, b, c = set(a), set(b), set(c)
    if (a & b) or (a & c) or (b & c):
        raise ValidationError("conditional_mutual_information: axis sets must be pairwise disjoint")
    for name, s in (("A", a), ("B", b), ("C", c)):
        unknown = s - set(j.axes)
        if unknown:
            raise ValidationError(f"conditional_mutual_information: {name} has unknown axes {sorted(unknown)}")
    if not a or not b:
        raise ValidationError("conditional_mutual_information: A and B must be non-empty")
    return (
        _subset_entropy(j, a | c)
        + _subset_entropy(j, b | c)
        - _subset_entropy(j, a | b | c)
        - _subset_entropy(j, c)
    )


def chain_joint(pu: Dist, pvu: CondDist, pxv: CondDist, ch) -> JointDist:
    """Joint law of the chain U -> V -> X -> (Y1, Y2) over all five axes.

    The factorization is exactly P(u) P(v|u) P(x|v) W(y1,y2|x); the Markov
    structure I(U;Y1,Y2|X) = 0 and I(U;X|V) = 0 holds by construction.
    """
    nu, nv = pvu.dims
    nv2, nx = pxv.dims
    if pu.size != nu:
        raise ValidationError(f"chain_joint: first layer has {pu.size} symbols but P(v|u) expects {nu}")
    if nv != nv2:
        raise ValidationError(f"chain_joint: P(v|u) emits {nv} symbols but P(x|v) expects {nv2}")
    if nx != ch.x_size:
        raise ValidationError(f"chain_joint: P(x|v) emits {nx} symbols but channel expects {ch.x_size}")
    tensor = np.einsum("u,uv,vx,xab->uvxab", pu.probs, pvu.rows, pxv.rows, ch.tensor)
    return JointDist(CHAIN_AXES, tensor)
