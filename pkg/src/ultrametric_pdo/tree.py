"""Finite directed trees: the combinatorial skeleton of an ultrametric space.

A tree is given by its children lists. The root is the maximal vertex of the
direction, internal vertices are balls of nonzero diameter and leaves
(branching index 0) are the points of the space. Vertices are addressed by
string ids; internally everything is stored in flat integer arrays indexed in
breadth-first order with children sorted lexicographically, so the children
of any vertex occupy a contiguous index range.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import (
    BranchingIndexOne,
    CycleDetected,
    Disconnected,
    DuplicateId,
    InvalidParameter,
    NotComparable,
    NotStrictAncestor,
    RootDegenerate,
    TreeSpecError,
    UnknownVertex,
)

__all__ = [
    "DirectedTree",
    "build_tree",
    "generate_padic_tree",
    "generate_random_tree",
    "sup",
    "path_up",
    "child_toward",
    "leaves_under",
]


class DirectedTree:
    """Immutable rooted tree with validated branching structure.

    Do not instantiate directly; use :func:`build_tree` or one of the
    generators.

    Attributes
    ----------
    ids : tuple of str
        Vertex ids in breadth-first order (root first, children sorted).
    root : str
    parent : ndarray of int
        Parent index per vertex, -1 for the root.
    depth : ndarray of int
        Number of links from the root.
    child_start, n_children : ndarray of int
        Children of vertex ``v`` are ``range(child_start[v], child_start[v] + n_children[v])``.
    leaves : tuple of str
        Leaf ids in depth-first (left to right) order. Leaf functions are
        arrays indexed in this order.
    leaf_lo, leaf_hi : ndarray of int
        The leaves under vertex ``v`` are ``leaves[leaf_lo[v]:leaf_hi[v]]``.
    """

    __slots__ = (
        "ids", "root", "index", "parent", "depth", "child_start", "n_children",
        "leaves", "leaf_vertex", "leaf_lo", "leaf_hi", "internal",
    )

    def __init__(self, ids: Sequence[str], parent: Sequence[int]):
        self.ids = tuple(ids)
        self.index = {v: i for i, v in enumerate(self.ids)}
        self.root = self.ids[0]
        n = len(self.ids)
        self.parent = np.asarray(parent, dtype=np.intp)
        self.n_children = np.bincount(self.parent[1:], minlength=n).astype(np.intp)
        self.child_start = np.zeros(n, dtype=np.intp)
        # BFS order: vertex v's children follow those of v-1
        self.child_start[:] = 1 + np.concatenate(([0], np.cumsum(self.n_children)[:-1]))
        self.depth = np.zeros(n, dtype=np.intp)
        for v in range(1, n):
            self.depth[v] = self.depth[self.parent[v]] + 1

        leaf_vertex = []
        lo = np.zeros(n, dtype=np.intp)
        hi = np.zeros(n, dtype=np.intp)
        stack = [(0, False)]
        while stack:
            v, done = stack.pop()
            if done:
                hi[v] = len(leaf_vertex)
                continue
            lo[v] = len(leaf_vertex)
            if self.n_children[v] == 0:
                leaf_vertex.append(v)
                hi[v] = len(leaf_vertex)
                continue
            stack.append((v, True))
            s = self.child_start[v]
            for c in range(s + self.n_children[v] - 1, s - 1, -1):
                stack.append((c, False))
        self.leaf_vertex = np.asarray(leaf_vertex, dtype=np.intp)
        self.leaf_lo, self.leaf_hi = lo, hi
        self.leaves = tuple(self.ids[v] for v in leaf_vertex)
        self.internal = tuple(v for i, v in enumerate(self.ids) if self.n_children[i] > 0)
        for name in ("parent", "depth", "child_start", "n_children", "leaf_vertex", "leaf_lo", "leaf_hi"):
            getattr(self, name).flags.writeable = False

    def __len__(self):
        return len(self.ids)

    def __contains__(self, v):
        return v in self.index

    def __repr__(self):
        return f"DirectedTree(root={self.root!r}, vertices={len(self)}, leaves={self.n_leaves})"

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    def idx(self, v: str) -> int:
        try:
            return self.index[v]
        except (KeyError, TypeError):
            raise UnknownVertex(f"vertex {v!r} is not in the tree") from None

    def children(self, v: str) -> tuple:
        i = self.idx(v)
        s = self.child_start[i]
        return self.ids[s:s + self.n_children[i]]

    def parent_of(self, v: str):
        p = self.parent[self.idx(v)]
        return None if p < 0 else self.ids[p]

    def branching_index(self, v: str) -> int:
        return int(self.n_children[self.idx(v)])

    def is_leaf(self, v: str) -> bool:
        return self.n_children[self.idx(v)] == 0

    def is_ancestor_or_self(self, anc: str, v: str) -> bool:
        """True iff ``anc >= v`` in the direction."""
        a, i = self.idx(anc), self.idx(v)
        d = self.depth[i] - self.depth[a]
        return d >= 0 and _lift(self.parent, i, d) == a

    def to_children_map(self) -> dict:
        """Children lists for every vertex (leaves map to empty lists)."""
        return {v: list(self.children(v)) for v in self.ids}

    def leaf_array(self, values: Mapping[str, complex], dtype=None) -> np.ndarray:
        """Convert a leaf -> value mapping into an array in :attr:`leaves` order."""
        missing = [x for x in self.leaves if x not in values]
        if missing:
            raise UnknownVertex(f"no value for leaf {missing[0]!r}")
        extra = set(values) - set(self.leaves)
        if extra:
            raise UnknownVertex(f"{sorted(extra)[0]!r} is not a leaf of the tree")
        return np.asarray([values[x] for x in self.leaves], dtype=dtype)

    def leaf_dict(self, arr) -> dict:
        return dict(zip(self.leaves, np.asarray(arr).tolist()))


def _lift(parent, v: int, steps: int) -> int:
    for _ in range(steps):
        v = parent[v]
    return v


def _sup_index(tree: DirectedTree, a: int, b: int) -> int:
    depth, parent = tree.depth, tree.parent
    while depth[a] > depth[b]:
        a = parent[a]
    while depth[b] > depth[a]:
        b = parent[b]
    while a != b:
        a, b = parent[a], parent[b]
    return int(a)


def sup_indices(tree: DirectedTree, a, b) -> np.ndarray:
    """Vectorized least common ancestor over index arrays."""
    a = np.array(a, dtype=np.intp, copy=True)
    b = np.array(b, dtype=np.intp, copy=True)
    depth, parent = tree.depth, tree.parent
    while True:
        da, db = depth[a], depth[b]
        up_a, up_b = da > db, db > da
        if not (up_a.any() or up_b.any()):
            break
        a[up_a] = parent[a[up_a]]
        b[up_b] = parent[b[up_b]]
    while True:
        ne = a != b
        if not ne.any():
            return a
        a[ne] = parent[a[ne]]
        b[ne] = parent[b[ne]]


def build_tree(children: Mapping[str, Iterable[str]], root: str | None = None) -> DirectedTree:
    """Build and validate a directed tree from children lists.

    Vertices that occur only as children are leaves and need not be listed
    as keys. ``root`` is inferred as the unique parentless vertex when not
    given.

    Raises
    ------
    DuplicateId
        A vertex is listed twice as a child (same or different parent).
    CycleDetected, Disconnected
        The description is not a single tree.
    BranchingIndexOne
        A vertex has exactly one child (:class:`RootDegenerate` for the root).
    """
    parent_of: dict = {}
    vertices: dict = {}
    for v, kids in children.items():
        _check_id(v)
        vertices.setdefault(v, None)
        seen = set()
        for c in kids:
            _check_id(c)
            if c in seen:
                raise DuplicateId(f"child {c!r} listed twice under {v!r}")
            seen.add(c)
            if c == v:
                raise CycleDetected(f"vertex {v!r} is its own child")
            if c in parent_of:
                raise DuplicateId(f"vertex {c!r} has two parents: {parent_of[c]!r} and {v!r}")
            parent_of[c] = v
            vertices.setdefault(c, None)
    if not vertices:
        raise TreeSpecError("empty tree")

    parentless = [v for v in vertices if v not in parent_of]
    if root is not None:
        _check_id(root)
        if root not in vertices:
            raise UnknownVertex(f"declared root {root!r} is not a vertex")
        if root in parent_of:
            raise TreeSpecError(f"declared root {root!r} has parent {parent_of[root]!r}")
    if not parentless:
        raise CycleDetected("every vertex has a parent")
    if len(parentless) > 1:
        raise Disconnected(f"several parentless vertices: {sorted(parentless)}")
    root = parentless[0]

    kids_of = {v: sorted(children.get(v, ())) for v in vertices}
    ids = [root]
    parent = [-1]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for c in kids_of[ids[i]]:
            parent.append(i)
            ids.append(c)
            queue.append(len(ids) - 1)
    if len(ids) != len(vertices):
        stray = sorted(set(vertices) - set(ids))
        raise CycleDetected(f"vertices unreachable from root {root!r} lie on a cycle: {stray[:5]}")

    for v in ids:
        if len(kids_of[v]) == 1:
            if v == root:
                raise RootDegenerate(f"root {v!r} has branching index 1 (BranchingIndexOne)")
            raise BranchingIndexOne(f"vertex {v!r} has branching index 1")
    return DirectedTree(ids, parent)


def _check_id(v):
    if not isinstance(v, str) or not v:
        raise TreeSpecError(f"vertex ids must be non-empty strings, got {v!r}")


def generate_padic_tree(p: int, depth: int) -> DirectedTree:
    """Complete ``p``-ary tree of the given depth (``p**depth`` leaves).

    Vertex ids are digit paths from the root ``"r"``, e.g. ``"r.0.1"``,
    zero-padded so lexicographic order is digit order.
    """
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise InvalidParameter(f"p must be an integer >= 2, got {p!r}")
    if not isinstance(depth, (int, np.integer)) or depth < 1:
        raise InvalidParameter(f"depth must be an integer >= 1, got {depth!r}")
    width = len(str(p - 1))
    digits = [str(d).zfill(width) for d in range(p)]
    ids = ["r"]
    parent = [-1]
    level = [0]
    for _ in range(depth):
        nxt = []
        for i in level:
            for d in digits:
                ids.append(f"{ids[i]}.{d}")
                parent.append(i)
                nxt.append(len(ids) - 1)
        level = nxt
    return DirectedTree(ids, parent)


def generate_random_tree(n_leaves: int, seed=None, branching: Sequence[int] = (2, 3, 4)) -> DirectedTree:
    """Random tree with exactly ``n_leaves`` leaves.

    Starting from a single vertex, a uniformly chosen leaf is repeatedly
    split into ``k`` children with ``k`` drawn from ``branching`` (capped so
    the leaf count is not overshot). Deterministic for a given seed.
    """
    if n_leaves < 2:
        raise InvalidParameter(f"n_leaves must be >= 2, got {n_leaves}")
    if min(branching) != 2 or any(k < 2 for k in branching):
        raise InvalidParameter("branching choices must be >= 2 and include 2")
    rng = np.random.default_rng(seed)
    choices = np.asarray(sorted(branching))
    kids: list = [[]]
    leaves = [0]
    n_have = 1
    while n_have < n_leaves:
        pos = 0 if len(kids) == 1 else int(rng.integers(len(leaves)))
        v = leaves[pos]
        allowed = choices[choices - 1 <= n_leaves - n_have]
        k = int(rng.choice(allowed))
        leaves[pos] = leaves[-1]
        leaves.pop()
        for _ in range(k):
            kids.append([])
            kids[v].append(len(kids) - 1)
            leaves.append(len(kids) - 1)
        n_have += k - 1
    width = len(str(len(kids) - 1))
    name = [f"v{i:0{width}d}" for i in range(len(kids))]
    return build_tree({name[v]: [name[c] for c in cs] for v, cs in enumerate(kids) if cs})


def sup(tree: DirectedTree, a: str, b: str) -> str:
    """Least common ancestor of ``a`` and ``b``: the minimal ball containing both."""
    return tree.ids[_sup_index(tree, tree.idx(a), tree.idx(b))]


def path_up(tree: DirectedTree, start: str, stop: str) -> list:
    """Vertices from ``start`` up to its ancestor-or-self ``stop``, both inclusive."""
    i, j = tree.idx(start), tree.idx(stop)
    path = [i]
    while i != j:
        if tree.depth[i] <= tree.depth[j]:
            raise NotComparable(f"{stop!r} is not an ancestor of {start!r}")
        i = tree.parent[i]
        path.append(i)
    return [tree.ids[k] for k in path]


def child_toward(tree: DirectedTree, j: str, i: str) -> str:
    """The child of ``j`` lying on the path from ``i`` up to ``j``."""
    jj, ii = tree.idx(j), tree.idx(i)
    d = tree.depth[ii] - tree.depth[jj]
    if d < 1:
        raise NotStrictAncestor(f"{j!r} is not a strict ancestor of {i!r}")
    c = _lift(tree.parent, ii, d - 1)
    if tree.parent[c] != jj:
        raise NotStrictAncestor(f"{j!r} is not a strict ancestor of {i!r}")
    return tree.ids[c]


def leaves_under(tree: DirectedTree, i: str) -> frozenset:
    """Leaves of the ball at ``i`` (``{i}`` itself for a leaf)."""
    k = tree.idx(i)
    return frozenset(tree.leaves[tree.leaf_lo[k]:tree.leaf_hi[k]])
