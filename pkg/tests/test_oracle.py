import dataclasses

import numpy as np
import pytest

from ultrametric_pdo import TooLarge, build_tree, from_leaf_masses, full_basis, spectrum, table_kernel
from ultrametric_pdo.oracle import (
    DenseOperator,
    dense_operator,
    leaf_sup_matrix,
    verify_all,
    verify_diagonalization,
    verify_orthonormality,
    verify_parseval,
    verify_row_sums,
    verify_selfadjoint,
    verify_spectrum,
)
from ultrametric_pdo.tree import sup

from conftest import random_instance


class TestDenseOperator:
    def test_two_leaf_star(self):
        t = build_tree({"R": ["x", "y"]})
        nu = from_leaf_masses(t, [0.5, 0.5])
        A = dense_operator(t, nu, table_kernel(t, {"R": 3.0})).matrix
        np.testing.assert_array_equal(A, [[1.5, -1.5], [-1.5, 1.5]])

    def test_zero_kernel(self):
        t, nu, _ = random_instance(1, 20)
        A = dense_operator(t, nu, table_kernel(t, {v: 0.0 for v in t.internal})).matrix
        assert not A.any()

    def test_fixture_eigenvalues(self, binary_hom, fixture_kernel):
        ev = dense_operator(*binary_hom, fixture_kernel).eigenvalues()
        np.testing.assert_allclose(ev, [0, 1, 1.5, 1.5], atol=1e-12)

    def test_entries(self):
        t, nu, k = random_instance(2, 15)
        A = dense_operator(t, nu, k).matrix
        m = nu.leaf_masses
        for i, x in enumerate(t.leaves):
            for j, y in enumerate(t.leaves):
                if i != j:
                    assert A[i, j] == -k[sup(t, x, y)] * m[j]
            off = sum(k[sup(t, x, y)] * m[j] for j, y in enumerate(t.leaves) if j != i)
            assert A[i, i] == pytest.approx(off, rel=1e-14)

    def test_sup_matrix(self):
        t, _, _ = random_instance(3, 30)
        S = leaf_sup_matrix(t)
        for i, x in enumerate(t.leaves):
            for j, y in enumerate(t.leaves):
                assert t.ids[S[i, j]] == sup(t, x, y)

    def test_too_large(self):
        t, nu, k = random_instance(4, 30)
        with pytest.raises(TooLarge):
            dense_operator(t, nu, k, max_leaves=29)


class TestDiagonalization:
    def test_fixture(self, binary_hom, fixture_kernel):
        rep = verify_diagonalization(*binary_hom, fixture_kernel)
        assert rep.passed and rep.worst_residual < 1e-12

    def test_perturbed_wavelet_located(self):
        t, nu, k = random_instance(5, 30)
        b = full_basis(t, nu)
        w = b.wavelets[4]
        vals = dict(w.child_values)
        first = next(iter(vals))
        vals[first] += 0.1
        bad = dataclasses.replace(b, wavelets=b.wavelets[:4] + (dataclasses.replace(w, child_values=vals),)
                                  + b.wavelets[5:], _matrix=None)
        rep = verify_diagonalization(t, nu, k, bad)
        assert not rep.passed
        assert rep.witness["owner"] == w.owner

    def test_random_100(self):
        t, nu, k = random_instance(6, 100)
        assert verify_diagonalization(t, nu, k).passed


class TestSpectrumCheck:
    def test_random(self):
        t, nu, k = random_instance(7, 120)
        assert verify_spectrum(dense_operator(t, nu, k), spectrum(t, nu, k)).passed

    def test_complex(self):
        t, nu, k = random_instance(8, 40, complex_kernel=True)
        assert verify_spectrum(dense_operator(t, nu, k), spectrum(t, nu, k)).passed

    def test_detects_wrong_eigenvalue(self, binary_hom, fixture_kernel):
        t, nu = binary_hom
        wrong = table_kernel(t, {"R": 1.0, "A": 2.0, "B": 2.5})
        assert not verify_spectrum(dense_operator(t, nu, fixture_kernel), spectrum(t, nu, wrong)).passed


class TestParseval:
    def test_root_indicator(self):
        t, nu, _ = random_instance(9, 40)
        B = full_basis(t, nu).matrix()
        c = nu.leaf_masses @ B
        assert np.sum(c[:-1] ** 2) < 1e-25
        assert c[-1] ** 2 == pytest.approx(nu.total, rel=1e-12)

    def test_binary_indicator(self, binary_hom):
        t, nu = binary_hom
        c = np.array([0.25, 0.25, 0, 0]) @ full_basis(t, nu).matrix()
        # nu(A)^2 (1/nu(A) - 1/A) with nu(A) = 1/2, A = 1
        assert np.sum(c[:-1] ** 2) == pytest.approx(0.25, rel=1e-12)
        assert c[-1] ** 2 == pytest.approx(0.25, rel=1e-12)

    def test_random_64(self):
        t, nu, _ = random_instance(10, 64)
        assert verify_parseval(t, nu).passed

    def test_detects_broken_basis(self):
        t, nu, _ = random_instance(11, 20)
        b = full_basis(t, nu)
        bad = dataclasses.replace(b, constant_value=b.constant_value * 1.01, _matrix=None)
        assert not verify_parseval(t, nu, bad).passed
        assert not verify_orthonormality(bad).passed


class TestSelfAdjoint:
    def test_homogeneous(self, binary_hom, fixture_kernel):
        assert verify_selfadjoint(dense_operator(*binary_hom, fixture_kernel)).passed

    def test_non_homogeneous(self):
        t, nu, k = random_instance(12, 80)
        dense = dense_operator(t, nu, k)
        assert not np.allclose(dense.matrix, dense.matrix.T)
        assert verify_selfadjoint(dense).passed
        assert verify_row_sums(dense).passed

    def test_injected_asymmetry(self):
        t, nu, k = random_instance(13, 30)
        dense = dense_operator(t, nu, k)
        A = dense.matrix.copy()
        A[2, 5] += 1e-6
        rep = verify_selfadjoint(DenseOperator(A, dense.masses, dense.leaves))
        assert not rep.passed
        assert set(rep.witness["pair"]) == {t.leaves[2], t.leaves[5]}

    def test_complex_skipped(self):
        t, nu, k = random_instance(14, 20, complex_kernel=True)
        rep = verify_selfadjoint(dense_operator(t, nu, k))
        assert rep.passed and "skipped" in rep.notes[0]


def test_verify_all_json():
    t, nu, k = random_instance(15, 50)
    reports = verify_all(t, nu, k)
    assert [r.check for r in reports] == ["orthonormality", "parseval", "diagonalization", "spectrum",
                                          "row_sums", "selfadjoint"]
    for r in reports:
        d = r.to_dict()
        assert d["pass"] is True and set(d) >= {"check", "pass", "worst_residual", "witness"}
