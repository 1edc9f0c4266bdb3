"""scikit-learn compatible wrappers.

Samples are rows, one column per leaf in ``tree.leaves`` order. The tree,
the leaf masses and the kernel are hyperparameters; ``fit`` only checks the
column count and precomputes the measure, basis plan and spectrum.

    >>> from ultrametric_pdo import generate_padic_tree
    >>> tree = generate_padic_tree(2, 3)
    >>> wt = UltrametricWaveletTransform(tree).fit()
    >>> wt.transform(np.eye(8)).shape
    (8, 8)
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import metric as _metric
from .measure import from_leaf_masses, homogeneous_measure
from .pdo import Kernel, heat_apply, power_kernel, spectrum, table_kernel
from .tree import DirectedTree
from .wavelets import _plan

__all__ = ["UltrametricWaveletTransform", "UltrametricOperator", "HeatDiffusion", "check_leaf_matrix"]


def check_leaf_matrix(X, n_leaves: int, allow_complex: bool = True) -> np.ndarray:
    """Validate a 2-D ``(n_samples, n_leaves)`` array of finite numbers.

    Unlike :func:`sklearn.utils.check_array` complex input is accepted,
    since leaf functions may be complex valued.
    """
    X = np.asarray(X)
    if X.dtype == object or not np.issubdtype(X.dtype, np.number):
        raise ValueError(f"expected numeric data, got dtype {X.dtype}")
    if np.iscomplexobj(X) and not allow_complex:
        raise ValueError("complex data not supported")
    if X.ndim != 2:
        raise ValueError(f"expected 2D array, got {X.ndim}D; reshape a single function with f.reshape(1, -1)")
    if X.shape[1] != n_leaves:
        raise ValueError(f"X has {X.shape[1]} features, but the tree has {n_leaves} leaves")
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains NaN or infinity")
    if not np.iscomplexobj(X):
        X = X.astype(float, copy=False)
    return X


def _check_tree(tree):
    if not isinstance(tree, DirectedTree):
        raise TypeError(f"tree must be a DirectedTree, got {type(tree).__name__}")
    return tree


class UltrametricWaveletTransform(TransformerMixin, BaseEstimator):
    """Orthonormal wavelet transform of leaf functions.

    Parameters
    ----------
    tree : DirectedTree
    leaf_masses : array-like or dict, optional
        Leaf masses; equal splitting with total mass 1 when omitted.

    Attributes
    ----------
    measure_ : BallMeasure
    n_features_in_ : int
    """

    def __init__(self, tree=None, leaf_masses=None):
        self.tree = tree
        self.leaf_masses = leaf_masses

    def _fit_measure(self, X):
        tree = _check_tree(self.tree)
        if X is not None:
            check_leaf_matrix(X, tree.n_leaves)
        if self.leaf_masses is None:
            self.measure_ = homogeneous_measure(tree)
        else:
            self.measure_ = from_leaf_masses(tree, self.leaf_masses)
        self.n_features_in_ = tree.n_leaves

    def fit(self, X=None, y=None):
        self._fit_measure(X)
        return self

    def transform(self, X):
        """Coefficients ordered by (owner id, index), constant member last."""
        check_is_fitted(self, "measure_")
        X = check_leaf_matrix(X, self.n_features_in_)
        return _plan(self.measure_).analyze(X)

    def inverse_transform(self, X):
        check_is_fitted(self, "measure_")
        X = check_leaf_matrix(X, self.n_features_in_)
        return _plan(self.measure_).synthesize(X)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "measure_")
        tree = self.tree
        names = [f"{v}:{k}" for v in sorted(tree.internal) for k in range(tree.branching_index(v) - 1)]
        return np.asarray(names + ["constant"], dtype=object)


class UltrametricOperator(UltrametricWaveletTransform):
    """Applies ``T f(x) = sum_y T(sup(x, y)) (f(x) - f(y)) nu(y)`` to each row.

    Parameters
    ----------
    tree : DirectedTree
    leaf_masses : array-like or dict, optional
    kernel : Kernel or dict, optional
        Kernel object or ``{internal vertex: value}`` table. When omitted the
        power kernel ``diameter ** -(1 + alpha)`` is used.
    alpha : float, default=1.0
    metric : UltrametricAssignment, optional
        Diameters for the power kernel; the standard branching-index metric
        when omitted.

    Attributes
    ----------
    kernel_ : Kernel
    spectrum_ : Spectrum
    eigenvalues_ : ndarray
        Eigenvalue per transform coefficient (constant slot last, value 0).
    """

    def __init__(self, tree=None, leaf_masses=None, kernel=None, alpha=1.0, metric=None):
        super().__init__(tree=tree, leaf_masses=leaf_masses)
        self.kernel = kernel
        self.alpha = alpha
        self.metric = metric

    def fit(self, X=None, y=None):
        self._fit_measure(X)
        tree = self.tree
        if isinstance(self.kernel, Kernel):
            if self.kernel.tree is not tree:
                raise ValueError("kernel was built for a different tree")
            self.kernel_ = self.kernel
        elif self.kernel is not None:
            self.kernel_ = table_kernel(tree, self.kernel)
        else:
            assignment = self.metric if self.metric is not None else _metric.standard_assignment(tree)
            self.kernel_ = power_kernel(tree, assignment, self.alpha)
        self.spectrum_ = spectrum(tree, self.measure_, self.kernel_)
        self.eigenvalues_ = self.spectrum_.per_coefficient()
        return self

    def transform(self, X):
        check_is_fitted(self, "spectrum_")
        X = check_leaf_matrix(X, self.n_features_in_)
        plan = _plan(self.measure_)
        # T kills constants; shift so constant rows map to exact zeros
        return plan.synthesize(plan.analyze(X - X[:, :1]) * self.eigenvalues_)

    def diffuse(self, X, t):
        """Heat semigroup ``exp(-t T)`` applied to each row."""
        check_is_fitted(self, "spectrum_")
        X = check_leaf_matrix(X, self.n_features_in_)
        return heat_apply(self.tree, self.measure_, self.kernel_, X, t, spec=self.spectrum_)

    def inverse_transform(self, X):
        raise NotImplementedError("the operator annihilates constants and is not invertible")

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "spectrum_")
        return np.asarray(self.tree.leaves, dtype=object)


class HeatDiffusion(UltrametricOperator):
    """``exp(-t T)`` as a transformer; ``t`` is a hyperparameter."""

    def __init__(self, tree=None, leaf_masses=None, kernel=None, alpha=1.0, metric=None, t=1.0):
        super().__init__(tree=tree, leaf_masses=leaf_masses, kernel=kernel, alpha=alpha, metric=metric)
        self.t = t

    def transform(self, X):
        return self.diffuse(X, self.t)
