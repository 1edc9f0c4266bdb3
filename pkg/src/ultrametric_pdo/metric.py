"""Ultrametrics induced by increasing vertex functions on a directed tree.

Any strictly increasing positive function ``F`` on the vertices gives the
ultrametric ``|AB| = F(sup(A, B))`` for ``A != B``; ``F(I)`` is the diameter
of the ball at ``I``. All such metrics share the same balls.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .exceptions import InvalidAssignment, InvalidParameter
from .reports import Report
from .tree import DirectedTree, _sup_index, sup_indices

__all__ = [
    "UltrametricAssignment",
    "standard_assignment",
    "padic_assignment",
    "table_assignment",
    "distance",
    "distance_matrix",
    "verify_ultrametric",
    "balls_of",
    "enumerate_balls",
]

MONOTONE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class UltrametricAssignment:
    """Diameters ``F(I)`` for every vertex, stored in tree index order."""

    tree: DirectedTree
    values: np.ndarray
    reference: str | None = None

    def __getitem__(self, v: str) -> float:
        return float(self.values[self.tree.idx(v)])

    @property
    def diameters(self) -> dict:
        return dict(zip(self.tree.ids, self.values.tolist()))

    def to_json(self) -> dict:
        return self.diameters


def standard_assignment(tree: DirectedTree, reference: str | None = None) -> UltrametricAssignment:
    """Branching-index metric: product of ``p**(+-1)`` along the path from ``reference``.

    Each link contributes the branching index of its larger vertex, raised to
    +1 when the path climbs the link and -1 when it descends. Telescoping
    gives ``F(I) = G(reference) / G(I)`` where ``G(v)`` is the product of
    branching indices over the strict ancestors of ``v``.
    """
    reference = tree.root if reference is None else reference
    ref = tree.idx(reference)
    g = np.ones(len(tree))
    p = tree.n_children.astype(float)
    for v in range(1, len(tree)):
        g[v] = g[tree.parent[v]] * p[tree.parent[v]]
    values = g[ref] / g
    values.flags.writeable = False
    return UltrametricAssignment(tree, values, reference)


def padic_assignment(tree: DirectedTree, p: float | None = None) -> UltrametricAssignment:
    """``F(I) = p**(-depth(I))``; ``p`` defaults to the root's branching index."""
    if p is None:
        p = float(tree.n_children[0]) if len(tree) > 1 else 2.0
    if p <= 1:
        raise InvalidParameter(f"p must exceed 1, got {p}")
    values = float(p) ** -tree.depth.astype(float)
    values.flags.writeable = False
    return UltrametricAssignment(tree, values, tree.root)


def table_assignment(tree: DirectedTree, diameters: Mapping[str, float], check: bool = True) -> UltrametricAssignment:
    """Assignment from an explicit ``{vertex: diameter}`` table covering every vertex.

    With ``check=False`` only completeness and positivity are enforced, so a
    non-monotone table can be built and then diagnosed by
    :func:`verify_ultrametric`.
    """
    unknown = set(diameters) - set(tree.ids)
    if unknown:
        raise InvalidAssignment(f"diameter given for unknown vertex {sorted(unknown)[0]!r}")
    missing = [v for v in tree.ids if v not in diameters]
    if missing:
        raise InvalidAssignment(f"no diameter for vertex {missing[0]!r}")
    values = np.array([diameters[v] for v in tree.ids], dtype=float)
    bad = ~(np.isfinite(values) & (values > 0))
    if bad.any():
        v = tree.ids[int(np.flatnonzero(bad)[0])]
        raise InvalidAssignment(f"diameter of {v!r} must be positive and finite, got {diameters[v]!r}")
    values.flags.writeable = False
    a = UltrametricAssignment(tree, values, None)
    if check:
        witness = _monotonicity_violation(a)
        if witness is not None:
            raise InvalidAssignment(
                f"diameter not increasing: F({witness['child']!r})={witness['child_diameter']} "
                f">= F({witness['parent']!r})={witness['parent_diameter']}")
    return a


def distance(tree: DirectedTree, assignment: UltrametricAssignment, a: str, b: str) -> float:
    """``0`` if ``a == b``, else the diameter of ``sup(a, b)``."""
    i, j = tree.idx(a), tree.idx(b)
    if i == j:
        return 0.0
    return float(assignment.values[_sup_index(tree, i, j)])


def distance_matrix(tree: DirectedTree, assignment: UltrametricAssignment, vertices=None) -> np.ndarray:
    """Pairwise distances among ``vertices`` (default: all, in tree index order)."""
    idx = np.arange(len(tree)) if vertices is None else np.array([tree.idx(v) for v in vertices], dtype=np.intp)
    a, b = np.meshgrid(idx, idx, indexing="ij")
    d = assignment.values[sup_indices(tree, a.ravel(), b.ravel())].reshape(a.shape)
    d[a == b] = 0.0
    return d


def _monotonicity_violation(assignment):
    tree, f = assignment.tree, assignment.values
    if len(tree) == 1:
        return None
    child = np.arange(1, len(tree))
    par = tree.parent[child]
    bad = f[child] >= f[par] * (1.0 - MONOTONE_RTOL)
    if not bad.any():
        return None
    c = int(child[np.flatnonzero(bad)[0]])
    p = int(tree.parent[c])
    return {
        "child": tree.ids[c], "parent": tree.ids[p],
        "child_diameter": float(f[c]), "parent_diameter": float(f[p]),
    }


def verify_ultrametric(tree: DirectedTree, assignment: UltrametricAssignment, exhaustive_limit: int = 50,
                       n_samples: int = 100_000, seed=0) -> Report:
    """Check monotonicity of the assignment and the strong triangle inequality.

    Triples range over all vertices of the tree (points and balls alike):
    exhaustively when the tree has at most ``exhaustive_limit`` vertices,
    otherwise over ``n_samples`` random triples.
    """
    witness = _monotonicity_violation(assignment)
    if witness is not None:
        excess = witness["child_diameter"] / witness["parent_diameter"] - 1.0
        return Report("ultrametric", False, max(excess, 0.0), {"monotonicity": witness})

    n = len(tree)
    if n <= exhaustive_limit:
        d = distance_matrix(tree, assignment)
        # excess[a, b, c] = |ab| - max(|ac|, |bc|)
        excess = d[:, :, None] - np.maximum(d[:, None, :], d.T[None, :, :])
        note = f"exhaustive over {n ** 3} triples"
        flat = np.argmax(excess)
        worst = float(excess.flat[flat])
        a, b, c = np.unravel_index(flat, excess.shape)
        scale = float(d.max()) if n > 1 else 1.0
    else:
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(n, size=(3, n_samples))
        f = assignment.values

        def dist(x, y):
            out = f[sup_indices(tree, x, y)]
            out[x == y] = 0.0
            return out

        excess = dist(a, b) - np.maximum(dist(a, c), dist(b, c))
        k = int(np.argmax(excess))
        worst = float(excess[k])
        a, b, c = a[k], b[k], c[k]
        scale = float(f.max())
        note = f"sampled {n_samples} triples"
    passed = worst <= MONOTONE_RTOL * scale
    witness = None if passed else {"triple": [tree.ids[a], tree.ids[b], tree.ids[c]]}
    return Report("ultrametric", passed, max(worst, 0.0), witness, [note])


def balls_of(tree: DirectedTree, assignment: UltrametricAssignment) -> dict:
    """Map each vertex to ``(leaf set, radius)``; leaves are singleton balls of radius 0."""
    out = {}
    for i, v in enumerate(tree.ids):
        leaves = frozenset(tree.leaves[tree.leaf_lo[i]:tree.leaf_hi[i]])
        out[v] = (leaves, 0.0 if tree.n_children[i] == 0 else float(assignment.values[i]))
    return out


def enumerate_balls(tree: DirectedTree, assignment: UltrametricAssignment) -> set:
    """Brute-force family of closed balls ``{y : |xy| <= r}`` over the leaves.

    For each center only the distances it realizes matter as radii. Uses
    nothing but the distance function.
    """
    d = distance_matrix(tree, assignment, tree.leaves)
    family = set()
    for x in range(tree.n_leaves):
        for r in np.unique(d[x]):
            family.add(frozenset(tree.leaves[y] for y in np.flatnonzero(d[x] <= r)))
    return family
