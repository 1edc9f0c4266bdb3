"""Positive additive ball measures driven by leaf masses."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .exceptions import MissingLeafMass, NonPositiveMass, UnknownVertex
from .tree import DirectedTree

__all__ = ["BallMeasure", "from_leaf_masses", "homogeneous_measure", "measure_of"]


@dataclass(frozen=True, eq=False)
class BallMeasure:
    """Measure of every ball, in tree index order.

    ``ball[i]`` is the mass of the ball at vertex ``i``; leaf entries are the
    leaf masses and every internal entry is the sum over its children.
    """

    tree: DirectedTree
    ball: np.ndarray

    @property
    def total(self) -> float:
        return float(self.ball[0])

    @property
    def leaf_masses(self) -> np.ndarray:
        """Leaf masses in ``tree.leaves`` order."""
        return self.ball[self.tree.leaf_vertex]

    def __getitem__(self, v: str) -> float:
        return float(self.ball[self.tree.idx(v)])

    def to_json(self) -> dict:
        return dict(zip(self.tree.ids, self.ball.tolist()))


def _accumulate(tree: DirectedTree, leaf_mass: np.ndarray) -> np.ndarray:
    ball = np.zeros(len(tree))
    ball[tree.leaf_vertex] = leaf_mass
    # BFS order: children have larger indices than their parent
    for v in range(len(tree) - 1, -1, -1):
        k = tree.n_children[v]
        if k:
            s = tree.child_start[v]
            ball[v] = ball[s:s + k].sum()
    ball.flags.writeable = False
    return ball


def from_leaf_masses(tree: DirectedTree, masses) -> BallMeasure:
    """Measure with the given leaf masses, extended to balls by additivity.

    ``masses`` is a ``{leaf: mass}`` mapping or an array in ``tree.leaves``
    order.
    """
    if isinstance(masses, Mapping):
        extra = set(masses) - set(tree.leaves)
        if extra:
            raise UnknownVertex(f"mass given for non-leaf {sorted(extra)[0]!r}")
        missing = [x for x in tree.leaves if x not in masses]
        if missing:
            raise MissingLeafMass(f"no mass for leaf {missing[0]!r}")
        values = [masses[x] for x in tree.leaves]
    else:
        values = masses
    try:
        m = np.asarray(values, dtype=float)
    except (TypeError, ValueError):
        raise NonPositiveMass("leaf masses must be real numbers") from None
    if m.shape != (tree.n_leaves,):
        raise MissingLeafMass(f"expected {tree.n_leaves} leaf masses, got shape {m.shape}")
    bad = ~(np.isfinite(m) & (m > 0))
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise NonPositiveMass(f"mass of leaf {tree.leaves[k]!r} must be positive and finite, got {m[k]}")
    return BallMeasure(tree, _accumulate(tree, m))


def homogeneous_measure(tree: DirectedTree, total: float = 1.0) -> BallMeasure:
    """Split each ball's mass equally among its maximal subballs."""
    if not (np.isfinite(total) and total > 0):
        raise NonPositiveMass(f"total mass must be positive, got {total}")
    ball = np.empty(len(tree))
    ball[0] = total
    for v in range(1, len(tree)):
        p = tree.parent[v]
        ball[v] = ball[p] / tree.n_children[p]
    return from_leaf_masses(tree, ball[tree.leaf_vertex])


def measure_of(measure: BallMeasure, i: str) -> float:
    return measure[i]
