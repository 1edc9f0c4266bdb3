"""Ultrametric pseudodifferential operators and their closed-form spectra.

The operator acts on leaf functions by

    T f(x) = sum_y T(sup(x, y)) (f(x) - f(y)) nu(y)

with a kernel value ``T(I)`` per internal vertex. Every wavelet owned by
``I`` is an eigenfunction with eigenvalue

    lambda_I = T(I) nu(I) + sum_{J > I} T(J) (nu(J) - nu(child of J toward I))

and constants are mapped to zero.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .exceptions import InvalidKernel, InvalidParameter, NotInternalVertex
from .measure import BallMeasure
from .metric import UltrametricAssignment
from .tree import DirectedTree, child_toward
from .wavelets import _check_pair, _plan, as_leaf_array

__all__ = [
    "Kernel",
    "Spectrum",
    "table_kernel",
    "power_kernel",
    "eigenvalue_of",
    "spectrum",
    "apply",
    "heat_apply",
    "weighted_mean",
]


@dataclass(frozen=True, eq=False)
class Kernel:
    """Kernel values in tree index order; leaf entries are unused zeros."""

    tree: DirectedTree
    values: np.ndarray

    def __getitem__(self, v: str):
        i = self.tree.idx(v)
        if self.tree.n_children[i] == 0:
            raise NotInternalVertex(f"kernel is not defined on leaf {v!r}")
        return self.values[i].item()

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values) or not np.any(self.values.imag)

    def to_json(self) -> dict:
        return {"type": "table", "values": {v: _num(self[v]) for v in self.tree.internal}}


def _num(x):
    if isinstance(x, complex):
        return x.real if x.imag == 0 else [x.real, x.imag]
    return float(x)


def table_kernel(tree: DirectedTree, values: Mapping[str, complex]) -> Kernel:
    """Kernel from a ``{internal vertex: value}`` table covering every internal vertex."""
    for v in values:
        if v not in tree:
            raise InvalidKernel(f"kernel value for unknown vertex {v!r}")
        if tree.is_leaf(v):
            raise InvalidKernel(f"kernel value given for leaf {v!r}")
    missing = [v for v in tree.internal if v not in values]
    if missing:
        raise InvalidKernel(f"no kernel value for internal vertex {missing[0]!r}")
    raw = [values[v] for v in tree.internal]
    dtype = complex if any(isinstance(x, complex) for x in raw) else float
    try:
        arr = np.zeros(len(tree), dtype=dtype)
        arr[[tree.index[v] for v in tree.internal]] = raw
    except (TypeError, ValueError):
        raise InvalidKernel("kernel values must be numbers") from None
    if not np.all(np.isfinite(arr)):
        raise InvalidKernel("kernel values must be finite")
    arr.flags.writeable = False
    return Kernel(tree, arr)


def power_kernel(tree: DirectedTree, assignment: UltrametricAssignment, alpha: float) -> Kernel:
    """``T(I) = diameter(I) ** -(1 + alpha)`` on internal vertices."""
    if assignment.tree is not tree:
        raise InvalidKernel("assignment was built for a different tree")
    arr = np.where(tree.n_children > 0, assignment.values ** -(1.0 + alpha), 0.0)
    arr.flags.writeable = False
    return Kernel(tree, arr)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalue per internal vertex; the constant eigenvalue is 0.

    ``values`` is in tree index order (leaf entries unused). The eigenvalue
    of ``I`` has multiplicity ``p_I - 1``.
    """

    tree: DirectedTree
    values: np.ndarray
    constant_eigenvalue: float = 0.0

    def __getitem__(self, v: str):
        i = self.tree.idx(v)
        if self.tree.n_children[i] == 0:
            raise NotInternalVertex(f"{v!r} is a leaf")
        return self.values[i].item()

    @property
    def eigenvalues(self) -> dict:
        return {v: self[v] for v in sorted(self.tree.internal)}

    @property
    def multiplicity(self) -> dict:
        return {v: self.tree.branching_index(v) - 1 for v in sorted(self.tree.internal)}

    def per_coefficient(self) -> np.ndarray:
        """Eigenvalue for each wavelet coefficient slot, constant slot last."""
        owners = np.array([self.tree.index[v] for v in sorted(self.tree.internal)], dtype=np.intp)
        lam = np.repeat(self.values[owners], self.tree.n_children[owners] - 1)
        return np.concatenate((lam, [self.constant_eigenvalue]))

    def multiset(self) -> np.ndarray:
        """All eigenvalues with multiplicity, sorted (by real part, then imaginary)."""
        return np.sort_complex(self.per_coefficient()) if np.iscomplexobj(self.values) \
            else np.sort(self.per_coefficient())

    def to_json(self) -> dict:
        return {
            "eigenvalues": {v: _num(x) for v, x in self.eigenvalues.items()},
            "multiplicity": self.multiplicity,
            "constant_eigenvalue": self.constant_eigenvalue,
        }


def eigenvalue_of(tree: DirectedTree, measure: BallMeasure, kernel: Kernel, i: str):
    """Eigenvalue of the wavelets owned by ``i``, by an explicit walk over its ancestors."""
    if tree.is_leaf(i):
        raise NotInternalVertex(f"{i!r} is a leaf")
    lam = kernel[i] * measure[i]
    j = tree.parent_of(i)
    while j is not None:
        lam += kernel[j] * (measure[j] - measure[child_toward(tree, j, i)])
        j = tree.parent_of(j)
    return lam


def spectrum(tree: DirectedTree, measure: BallMeasure, kernel: Kernel) -> Spectrum:
    """All eigenvalues in one top-down pass.

    The ancestor sum of a child ``c`` of ``P`` is the sum of ``P`` plus the
    term ``T(P) (nu(P) - nu(c))``.
    """
    _check_pair(tree, measure)
    if kernel.tree is not tree:
        raise InvalidKernel("kernel was built for a different tree")
    nu, t = measure.ball, kernel.values
    above = np.zeros(len(tree), dtype=t.dtype)
    for c in range(1, len(tree)):
        p = tree.parent[c]
        above[c] = above[p] + t[p] * (nu[p] - nu[c])
    lam = np.where(tree.n_children > 0, t * nu + above, 0)
    lam.flags.writeable = False
    return Spectrum(tree, lam)


def weighted_mean(measure: BallMeasure, f) -> np.ndarray:
    f = as_leaf_array(measure.tree, f)
    return (f * measure.leaf_masses).sum(axis=-1) / measure.total


def apply(tree: DirectedTree, measure: BallMeasure, kernel: Kernel, f, spec: Spectrum | None = None) -> np.ndarray:
    """``T f`` via the wavelet transform: scale each coefficient by its eigenvalue."""
    f = as_leaf_array(tree, f)
    spec = spectrum(tree, measure, kernel) if spec is None else spec
    plan = _plan(measure)
    # T kills constants; shifting by one leaf value maps constant input to exact zeros
    c = plan.analyze(f - f[..., :1])
    return plan.synthesize(c * spec.per_coefficient())


def heat_apply(tree: DirectedTree, measure: BallMeasure, kernel: Kernel, f, t: float,
               spec: Spectrum | None = None) -> np.ndarray:
    """Heat semigroup ``exp(-t T) f``; the constant component is preserved."""
    if not t >= 0:
        raise InvalidParameter(f"t must be non-negative, got {t}")
    f = as_leaf_array(tree, f)
    spec = spectrum(tree, measure, kernel) if spec is None else spec
    lam = spec.per_coefficient()
    if not kernel.is_real:
        warnings.warn("complex kernel: heat semigroup need not be contractive", RuntimeWarning, stacklevel=2)
    elif np.any(np.real(lam) < 0):
        warnings.warn("negative eigenvalues: heat semigroup grows in some directions", RuntimeWarning,
                      stacklevel=2)
    if t == 0:
        return f.astype(np.result_type(f.dtype, float), copy=True)
    plan = _plan(measure)
    # constants are fixed points; shifting them out keeps constant input exact
    base = f[..., :1]
    return base + plan.synthesize(plan.analyze(f - base) * np.exp(-t * lam))
