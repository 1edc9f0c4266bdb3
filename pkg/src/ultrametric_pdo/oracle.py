"""Dense-matrix ground truth for the wavelet and spectral machinery.

Nothing here goes through the fast transforms: the operator is assembled
entry by entry from pairwise least common ancestors, and basis checks use
realized wavelet vectors and explicit sums over leaves.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pdo
from .exceptions import TooLarge
from .measure import BallMeasure
from .reports import Report
from .tree import DirectedTree
from .wavelets import WaveletBasis, full_basis

__all__ = [
    "DenseOperator",
    "dense_operator",
    "leaf_sup_matrix",
    "verify_diagonalization",
    "verify_spectrum",
    "verify_parseval",
    "verify_selfadjoint",
    "verify_row_sums",
    "verify_orthonormality",
    "verify_all",
]

MAX_LEAVES = 2000


@dataclass(frozen=True, eq=False)
class DenseOperator:
    matrix: np.ndarray
    masses: np.ndarray
    leaves: tuple

    def eigenvalues(self) -> np.ndarray:
        """Sorted eigenvalues; real kernels use the mass-symmetrized matrix."""
        if np.iscomplexobj(self.matrix) and np.any(self.matrix.imag):
            return np.sort_complex(np.linalg.eigvals(self.matrix))
        root = np.sqrt(self.masses)
        sym = root[:, None] * self.matrix.real / root[None, :]
        return np.linalg.eigvalsh((sym + sym.T) / 2)


def _ancestor_chains(tree: DirectedTree) -> np.ndarray:
    """Row per leaf: its ancestors by depth, root first, padded with -1."""
    chains = []
    for v in tree.leaf_vertex:
        chain = [int(v)]
        while tree.parent[chain[-1]] >= 0:
            chain.append(int(tree.parent[chain[-1]]))
        chains.append(chain[::-1])
    width = max(len(c) for c in chains)
    out = np.full((len(chains), width), -1, dtype=np.intp)
    for k, c in enumerate(chains):
        out[k, :len(c)] = c
    return out


def leaf_sup_matrix(tree: DirectedTree) -> np.ndarray:
    """``sup(x, y)`` vertex index for every leaf pair, by comparing ancestor chains."""
    anc = _ancestor_chains(tree)
    n = len(anc)
    out = np.empty((n, n), dtype=np.intp)
    for x in range(n):
        common = (anc == anc[x]) & (anc >= 0)
        depth = common.sum(axis=1) - 1
        out[x] = anc[x, depth]
    return out


def dense_operator(tree: DirectedTree, measure: BallMeasure, kernel: pdo.Kernel,
                   max_leaves: int = MAX_LEAVES) -> DenseOperator:
    """``A[x, y] = -T(sup(x, y)) m(y)`` off the diagonal, rows summing to zero."""
    if tree.n_leaves > max_leaves:
        raise TooLarge(f"{tree.n_leaves} leaves exceeds the dense cap of {max_leaves}")
    m = measure.leaf_masses
    K = kernel.values[leaf_sup_matrix(tree)]
    A = -K * m[None, :]
    np.fill_diagonal(A, 0)
    np.fill_diagonal(A, -A.sum(axis=1))
    A.flags.writeable = False
    return DenseOperator(A, m, tree.leaves)


def verify_diagonalization(tree: DirectedTree, measure: BallMeasure, kernel: pdo.Kernel,
                           basis: WaveletBasis | None = None, spectrum: pdo.Spectrum | None = None,
                           dense: DenseOperator | None = None, tol: float = 1e-9) -> Report:
    """``max|A psi - lambda psi| <= tol (1 + |lambda|)`` for every wavelet."""
    basis = full_basis(tree, measure) if basis is None else basis
    spectrum = pdo.spectrum(tree, measure, kernel) if spectrum is None else spectrum
    dense = dense_operator(tree, measure, kernel) if dense is None else dense
    worst, witness = 0.0, None
    for w in basis.wavelets:
        psi = w.realize(tree)
        lam = spectrum[w.owner]
        res = float(np.max(np.abs(dense.matrix @ psi - lam * psi))) / (1 + abs(lam))
        if res > worst:
            worst = res
            witness = {"owner": w.owner, "index": w.index, "eigenvalue": pdo._num(lam), "residual": res}
    return Report("diagonalization", worst <= tol, worst, witness if worst > tol else None,
                  [f"{len(basis.wavelets)} wavelets"])


def verify_spectrum(dense: DenseOperator, spectrum: pdo.Spectrum, tol: float = 1e-9) -> Report:
    """Sorted eigenvalue multisets of the dense matrix and the closed form agree pairwise."""
    got = spectrum.multiset()
    ref = dense.eigenvalues()
    if got.shape != ref.shape:
        return Report("spectrum", False, float("inf"), {"sizes": [len(got), len(ref)]})
    res = np.abs(got - ref) / (1 + np.abs(ref))
    k = int(np.argmax(res)) if len(res) else 0
    worst = float(res[k]) if len(res) else 0.0
    witness = None if worst <= tol else {"position": k, "formula": pdo._num(got[k].item()),
                                         "dense": pdo._num(ref[k].item())}
    return Report("spectrum", worst <= tol, worst, witness)


def verify_parseval(tree: DirectedTree, measure: BallMeasure, basis: WaveletBasis | None = None,
                    tol: float = 1e-9) -> Report:
    """Coefficient mass of every ball indicator, split into wavelet and constant parts.

    Expected: wavelets carry ``nu(I)**2 (1/nu(I) - 1/A)`` and the constant
    ``nu(I)**2 / A``. Errors are relative to the expected value, or to
    ``||chi_I||**2 = nu(I)`` where the expected value is zero (the root).
    """
    basis = full_basis(tree, measure) if basis is None else basis
    B = basis.matrix()
    m = measure.leaf_masses
    total = m.sum()
    worst, witness = 0.0, None
    for i, v in enumerate(tree.ids):
        inside = np.zeros(tree.n_leaves, dtype=bool)
        inside[tree.leaf_lo[i]:tree.leaf_hi[i]] = True
        nu, rest = float(m[inside].sum()), float(m[~inside].sum())
        c = np.where(inside, m, 0.0) @ B
        wav, const = float(np.sum(c[:-1] ** 2)), float(c[-1] ** 2)
        # nu**2 (1/nu - 1/A) = nu (A - nu) / A, with A - nu summed directly
        want_wav, want_const = nu * rest / total, nu * nu / total
        errs = (abs(wav - want_wav) / (want_wav if want_wav > 0 else nu),
                abs(const - want_const) / want_const,
                abs(wav + const - nu) / nu)
        if max(errs) > worst:
            worst = max(errs)
            witness = {"vertex": v, "wavelet_mass": wav, "constant_mass": const, "ball_measure": nu}
    return Report("parseval", worst <= tol, worst, witness if worst > tol else None,
                  [f"{len(tree)} balls"])


def verify_selfadjoint(dense: DenseOperator, tol: float = 1e-12) -> Report:
    """``m(x) A[x, y] == m(y) A[y, x]`` for real operators."""
    if np.iscomplexobj(dense.matrix) and np.any(dense.matrix.imag):
        return Report("selfadjoint", True, 0.0, None, ["skipped: complex kernel"])
    W = dense.masses[:, None] * dense.matrix.real
    diff = np.abs(W - W.T)
    k = int(np.argmax(diff))
    worst = float(diff.flat[k])
    x, y = np.unravel_index(k, diff.shape)
    witness = None if worst <= tol else {"pair": [dense.leaves[x], dense.leaves[y]]}
    return Report("selfadjoint", worst <= tol, worst, witness)


def verify_row_sums(dense: DenseOperator, tol: float = 1e-12) -> Report:
    """Rows sum to zero, i.e. constants are in the kernel."""
    sums = np.abs(dense.matrix.sum(axis=1))
    k = int(np.argmax(sums))
    worst = float(sums[k])
    return Report("row_sums", worst <= tol, worst, None if worst <= tol else {"leaf": dense.leaves[k]})


def verify_orthonormality(basis: WaveletBasis, tol: float = 1e-9) -> Report:
    """Gram matrix of the realized basis under the mass-weighted product is the identity."""
    G = basis.gram()
    n = len(G)
    err = np.abs(G - np.eye(n))
    k = int(np.argmax(err))
    worst = float(err.flat[k])
    witness = None
    if worst > tol:
        r, c = np.unravel_index(k, G.shape)
        witness = {"pair": [basis.labels[r], basis.labels[c]], "gram": float(G[r, c])}
    notes = [f"basis size {n}, leaves {basis.tree.n_leaves}"]
    ok = worst <= tol and n == basis.tree.n_leaves
    return Report("orthonormality", ok, worst, witness, notes)


def verify_all(tree: DirectedTree, measure: BallMeasure, kernel: pdo.Kernel | None = None,
               max_leaves: int = MAX_LEAVES) -> list:
    """Run every oracle check that applies to the inputs."""
    basis = full_basis(tree, measure)
    reports = [verify_orthonormality(basis), verify_parseval(tree, measure, basis)]
    if kernel is not None:
        dense = dense_operator(tree, measure, kernel, max_leaves=max_leaves)
        spec = pdo.spectrum(tree, measure, kernel)
        reports += [
            verify_diagonalization(tree, measure, kernel, basis, spec, dense),
            verify_spectrum(dense, spec),
            verify_row_sums(dense),
            verify_selfadjoint(dense),
        ]
    return reports
