"""Orthonormal ultrametric wavelet bases for arbitrary ball measures.

For an internal vertex ``I`` with children ``c_1 < ... < c_p`` of masses
``m_1..m_p``, wavelet ``k`` (``k = 1..p-1``) is ``a_k`` on the balls of
``c_1..c_k``, ``b_k`` on the ball of ``c_{k+1}`` and zero elsewhere::

    M_k = m_1 + ... + m_k
    a_k =  sqrt(m_{k+1} / (M_k (M_k + m_{k+1})))
    b_k = -sqrt(M_k / (m_{k+1} (M_k + m_{k+1})))

which has zero mean and unit norm in ``L2(nu)``. Together with the constant
``A**-0.5`` (``A`` the total mass) the wavelets of all internal vertices form
an orthonormal basis of functions on the leaves.

Coefficient vectors are ordered by (owner id, index) with the constant
member last.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch, NotInternalVertex
from .measure import BallMeasure
from .tree import DirectedTree

__all__ = [
    "Wavelet",
    "WaveletBasis",
    "local_basis",
    "full_basis",
    "analyze",
    "synthesize",
    "fast_analyze",
    "fast_synthesize",
    "as_leaf_array",
]


@dataclass(frozen=True)
class Wavelet:
    owner: str
    index: int
    child_values: dict

    def realize(self, tree: DirectedTree) -> np.ndarray:
        """Values on the leaves, in ``tree.leaves`` order."""
        out = np.zeros(tree.n_leaves)
        for c, val in self.child_values.items():
            k = tree.idx(c)
            out[tree.leaf_lo[k]:tree.leaf_hi[k]] = val
        return out

    def to_json(self) -> dict:
        return {"owner": self.owner, "index": self.index, "child_values": dict(self.child_values)}


def _haar_coefficients(masses: np.ndarray):
    """Return ``(a, b)`` arrays of length ``p - 1`` for children masses ``masses``."""
    head = np.cumsum(masses)[:-1]
    nxt = masses[1:]
    tot = head + nxt
    return np.sqrt(nxt / (head * tot)), -np.sqrt(head / (nxt * tot))


def local_basis(tree: DirectedTree, measure: BallMeasure, i: str) -> list:
    """Nested Haar basis of the zero-mean functions constant on the children of ``i``."""
    kids = tree.children(i)
    if len(kids) < 2:
        raise NotInternalVertex(f"{i!r} is a leaf")
    masses = np.array([measure[c] for c in kids])
    a, b = _haar_coefficients(masses)
    out = []
    for k in range(1, len(kids)):
        vals = {c: float(a[k - 1]) for c in kids[:k]}
        vals[kids[k]] = float(b[k - 1])
        vals.update({c: 0.0 for c in kids[k + 1:]})
        out.append(Wavelet(i, k - 1, vals))
    return out


class _HaarPlan:
    """Vectorized bottom-up / top-down transforms for one (tree, measure) pair."""

    def __init__(self, tree: DirectedTree, measure: BallMeasure):
        self.tree = tree
        self.total = measure.total
        self.masses = measure.leaf_masses
        ball = measure.ball
        owners = sorted((tree.index[v] for v in tree.internal), key=lambda i: tree.ids[i])
        owners = np.asarray(owners, dtype=np.intp)
        p = tree.n_children[owners]
        wstart = np.concatenate(([0], np.cumsum(p - 1)[:-1])).astype(np.intp) if len(owners) else owners
        self.owners, self.p, self.wstart = owners, p, wstart
        self.n_wavelets = int((p - 1).sum())
        self.owner_of = np.repeat(owners, p - 1)
        self.a = np.empty(self.n_wavelets)
        self.b = np.empty(self.n_wavelets)
        s = tree.child_start[owners]
        head = np.zeros(len(owners))
        # steps[k-1] = (owner rows, first-child index, wavelet positions) for wavelet k
        self.steps = []
        for k in range(1, int(p.max()) if len(p) else 1):
            rows = np.flatnonzero(p > k)
            head[rows] += ball[s[rows] + k - 1]
            nxt = ball[s[rows] + k]
            tot = head[rows] + nxt
            pos = wstart[rows] + k - 1
            self.a[pos] = np.sqrt(nxt / (head[rows] * tot))
            self.b[pos] = -np.sqrt(head[rows] / (nxt * tot))
            self.steps.append((rows, s[rows], pos))
        self.s = s

        depth = tree.depth
        self.levels = []
        n = len(tree)
        bounds = np.searchsorted(depth, np.arange(depth.max() + 2)) if n else np.zeros(1, dtype=np.intp)
        for d in range(1, len(bounds) - 1):
            lo, hi = int(bounds[d - 1]), int(bounds[d])
            par = np.arange(lo, hi)
            par = par[tree.n_children[par] > 0]
            clo, chi = int(bounds[d]), int(bounds[d + 1])
            self.levels.append((par, clo, chi, tree.child_start[par] - clo))

    @property
    def size(self) -> int:
        return self.n_wavelets + 1

    def ball_integrals(self, f: np.ndarray) -> np.ndarray:
        """``S[..., v]`` = integral of ``f`` over the ball at ``v``."""
        tree = self.tree
        S = np.zeros(f.shape[:-1] + (len(tree),), dtype=np.result_type(f, float))
        S[..., tree.leaf_vertex] = f * self.masses
        for par, clo, chi, offs in reversed(self.levels):
            S[..., par] = np.add.reduceat(S[..., clo:chi], offs, axis=-1)
        return S

    def analyze(self, f: np.ndarray) -> np.ndarray:
        S = self.ball_integrals(f)
        out = np.empty(f.shape[:-1] + (self.size,), dtype=S.dtype)
        acc = np.zeros(f.shape[:-1] + (len(self.owners),), dtype=S.dtype)
        for k, (rows, s, pos) in enumerate(self.steps, start=1):
            acc[..., rows] += S[..., s + k - 1]
            out[..., pos] = self.a[pos] * acc[..., rows] + self.b[pos] * S[..., s + k]
        out[..., -1] = S[..., 0] / np.sqrt(self.total)
        return out

    def synthesize(self, c: np.ndarray) -> np.ndarray:
        tree = self.tree
        lead = c.shape[:-1]
        contrib = np.zeros(lead + (len(tree),), dtype=np.result_type(c, float))
        suffix = np.zeros(lead + (len(self.owners),), dtype=contrib.dtype)
        for k in range(len(self.steps), 0, -1):
            rows, s, pos = self.steps[k - 1]
            ck = c[..., pos]
            # child k (0-based) carries b_k; children 0..k-1 carry a_k
            contrib[..., s + k] = suffix[..., rows] + self.b[pos] * ck
            suffix[..., rows] += self.a[pos] * ck
        if len(self.owners):
            contrib[..., self.s] = suffix
        contrib[..., 0] = c[..., -1] / np.sqrt(self.total)
        for par, clo, chi, offs in self.levels:
            counts = tree.n_children[par]
            contrib[..., clo:chi] += np.repeat(contrib[..., par], counts, axis=-1)
        return contrib[..., tree.leaf_vertex]


_plans: "weakref.WeakKeyDictionary[BallMeasure, _HaarPlan]" = weakref.WeakKeyDictionary()


def _plan(measure: BallMeasure) -> _HaarPlan:
    plan = _plans.get(measure)
    if plan is None:
        plan = _plans[measure] = _HaarPlan(measure.tree, measure)
    return plan


@dataclass(frozen=True, eq=False)
class WaveletBasis:
    """Wavelets of every internal vertex plus the normed constant."""

    tree: DirectedTree
    measure: BallMeasure
    wavelets: tuple
    constant_value: float
    _matrix: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.wavelets) + 1

    @property
    def labels(self) -> list:
        """``(owner, index)`` per coefficient, ``None`` for the constant."""
        return [(w.owner, w.index) for w in self.wavelets] + [None]

    def realize(self, k: int) -> np.ndarray:
        if k == len(self.wavelets) or k == -1:
            return np.full(self.tree.n_leaves, self.constant_value)
        return self.wavelets[k].realize(self.tree)

    def matrix(self) -> np.ndarray:
        """Leaf-by-basis matrix whose columns are the realized basis functions."""
        if self._matrix is None:
            cols = [w.realize(self.tree) for w in self.wavelets]
            cols.append(np.full(self.tree.n_leaves, self.constant_value))
            m = np.column_stack(cols)
            m.flags.writeable = False
            object.__setattr__(self, "_matrix", m)
        return self._matrix

    def gram(self) -> np.ndarray:
        B = self.matrix()
        return B.T @ (self.measure.leaf_masses[:, None] * B)

    def to_json(self) -> dict:
        return {
            "wavelets": [w.to_json() for w in self.wavelets],
            "constant": self.constant_value,
        }


def full_basis(tree: DirectedTree, measure: BallMeasure) -> WaveletBasis:
    wavelets = []
    for v in sorted(tree.internal):
        wavelets.extend(local_basis(tree, measure, v))
    return WaveletBasis(tree, measure, tuple(wavelets), float(measure.total ** -0.5))


def as_leaf_array(tree: DirectedTree, f) -> np.ndarray:
    """Accept a ``{leaf: value}`` mapping or an array whose last axis runs over leaves."""
    if isinstance(f, dict):
        return tree.leaf_array(f)
    arr = np.asarray(f)
    if arr.ndim == 0 or arr.shape[-1] != tree.n_leaves:
        raise DimensionMismatch(f"expected last axis of length {tree.n_leaves}, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.number):
        raise DimensionMismatch(f"leaf values must be numeric, got dtype {arr.dtype}")
    return arr


def analyze(basis: WaveletBasis, f) -> np.ndarray:
    """Coefficients ``c_b = sum_x f(x) b(x) nu(x)`` by explicit inner products."""
    f = as_leaf_array(basis.tree, f)
    return (f * basis.measure.leaf_masses) @ basis.matrix()


def synthesize(basis: WaveletBasis, coefficients) -> np.ndarray:
    c = np.asarray(coefficients)
    if c.ndim == 0 or c.shape[-1] != len(basis):
        raise DimensionMismatch(f"expected {len(basis)} coefficients, got shape {c.shape}")
    return c @ basis.matrix().T


def fast_analyze(tree: DirectedTree, measure: BallMeasure, f) -> np.ndarray:
    """Same result as :func:`analyze` in one bottom-up pass over the tree."""
    _check_pair(tree, measure)
    return _plan(measure).analyze(as_leaf_array(tree, f))


def fast_synthesize(tree: DirectedTree, measure: BallMeasure, coefficients) -> np.ndarray:
    """Inverse of :func:`fast_analyze` in one top-down pass."""
    _check_pair(tree, measure)
    plan = _plan(measure)
    c = np.asarray(coefficients)
    if c.ndim == 0 or c.shape[-1] != plan.size:
        raise DimensionMismatch(f"expected {plan.size} coefficients, got shape {c.shape}")
    return plan.synthesize(c)


def _check_pair(tree, measure):
    if measure.tree is not tree:
        raise DimensionMismatch("measure was built for a different tree")
