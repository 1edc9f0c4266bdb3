import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ultrametric_pdo import (
    DimensionMismatch,
    NotInternalVertex,
    analyze,
    build_tree,
    fast_analyze,
    fast_synthesize,
    from_leaf_masses,
    full_basis,
    generate_padic_tree,
    generate_random_tree,
    homogeneous_measure,
    local_basis,
    synthesize,
)
from ultrametric_pdo.oracle import verify_orthonormality

from conftest import random_instance


def two_leaf(m1, m2):
    t = build_tree({"R": ["x", "y"]})
    return t, from_leaf_masses(t, {"x": m1, "y": m2})


class TestLocalBasis:
    def test_symmetric_pair(self):
        t, nu = two_leaf(0.5, 0.5)
        (w,) = local_basis(t, nu, "R")
        assert w.child_values == {"x": 1.0, "y": -1.0}
        assert (w.owner, w.index) == ("R", 0)

    def test_skewed_pair(self):
        t, nu = two_leaf(0.75, 0.25)
        (w,) = local_basis(t, nu, "R")
        a, b = w.child_values["x"], w.child_values["y"]
        # two constraints: zero mean and unit norm, with a > 0 > b
        assert math.isclose(a * 0.75 + b * 0.25, 0, abs_tol=1e-15)
        assert math.isclose(a * a * 0.75 + b * b * 0.25, 1, rel_tol=1e-15)
        assert math.isclose(a, math.sqrt(1 / 3), rel_tol=1e-15)
        assert math.isclose(b, -math.sqrt(3), rel_tol=1e-15)
        assert (round(a, 5), round(b, 5)) == (0.57735, -1.73205)

    def test_three_children(self):
        t = generate_padic_tree(3, 1)
        nu = homogeneous_measure(t)
        ws = local_basis(t, nu, "r")
        assert len(ws) == 2
        kids = t.children("r")
        V = np.array([[w.child_values[c] for c in kids] for w in ws])
        m = np.array([nu[c] for c in kids])
        np.testing.assert_allclose(V @ np.diag(m) @ V.T, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(V @ m, 0, atol=1e-15)

    def test_nested_shape(self):
        t = build_tree({"R": ["c1", "c2", "c3", "c4"]})
        ws = local_basis(t, from_leaf_masses(t, [1, 2, 3, 4]), "R")
        for k, w in enumerate(ws, start=1):
            vals = [w.child_values[c] for c in t.children("R")]
            assert all(v > 0 for v in vals[:k]) and len(set(vals[:k])) == 1
            assert vals[k] < 0
            assert all(v == 0 for v in vals[k + 1:])

    def test_leaf_rejected(self, binary_hom):
        t, nu = binary_hom
        with pytest.raises(NotInternalVertex):
            local_basis(t, nu, "a1")


class TestFullBasis:
    def test_counts(self, binary_hom):
        t, nu = binary_hom
        b = full_basis(t, nu)
        assert len(b.wavelets) == 3 and len(b) == 4
        assert [(w.owner, w.index) for w in b.wavelets] == [("A", 0), ("B", 0), ("R", 0)]
        assert b.constant_value == 1.0

    def test_star(self):
        t = build_tree({"R": ["x1", "x2", "x3"]})
        assert len(full_basis(t, homogeneous_measure(t)).wavelets) == 2

    def test_single_point(self):
        t = build_tree({"R": []})
        nu = from_leaf_masses(t, [4.0])
        b = full_basis(t, nu)
        assert len(b) == 1
        np.testing.assert_allclose(fast_analyze(t, nu, [3.0]), [6.0])
        np.testing.assert_allclose(fast_synthesize(t, nu, [6.0]), [3.0])

    @pytest.mark.parametrize("seed", range(5))
    def test_gram_identity(self, seed):
        t, nu, _ = random_instance(seed)
        B = full_basis(t, nu).matrix()
        gram = B.T @ np.diag(nu.leaf_masses) @ B
        np.testing.assert_allclose(gram, np.eye(t.n_leaves), atol=1e-9)
        assert verify_orthonormality(full_basis(t, nu)).passed

    def test_wavelets_constant_on_children_and_supported_inside(self):
        t, nu, _ = random_instance(11, 60)
        for w in full_basis(t, nu).wavelets:
            f = w.realize(t)
            i = t.idx(w.owner)
            outside = np.ones(t.n_leaves, dtype=bool)
            outside[t.leaf_lo[i]:t.leaf_hi[i]] = False
            assert not f[outside].any()
            for c in t.children(w.owner):
                k = t.idx(c)
                assert np.ptp(f[t.leaf_lo[k]:t.leaf_hi[k]]) == 0

    def test_orthogonal_across_vertices(self):
        t, nu, _ = random_instance(12, 50)
        b = full_basis(t, nu)
        G = b.gram()
        owners = [w.owner for w in b.wavelets]
        for i in range(len(owners)):
            for j in range(len(owners)):
                if owners[i] != owners[j]:
                    assert abs(G[i, j]) < 1e-12

    def test_json(self, binary_hom):
        d = full_basis(*binary_hom).to_json()
        # children of A weigh 1/4 each: a = sqrt(m2 / (m1 (m1 + m2))) = sqrt(2)
        assert d["wavelets"][0] == {"owner": "A", "index": 0,
                                    "child_values": {"a1": math.sqrt(2), "a2": -math.sqrt(2)}}
        assert d["wavelets"][2]["child_values"] == {"A": 1.0, "B": -1.0}
        assert d["constant"] == 1.0


class TestTransforms:
    def test_constant(self, binary_hom):
        t, nu = binary_hom
        b = full_basis(t, nu)
        c = analyze(b, np.full(4, 3.0))
        np.testing.assert_allclose(c[:-1], 0, atol=1e-15)
        assert math.isclose(c[-1], 3.0 * math.sqrt(nu.total))

    def test_indicator(self, binary_hom):
        t, nu = binary_hom
        b = full_basis(t, nu)
        chi_a = {"a1": 1, "a2": 1, "b1": 0, "b2": 0}
        c = analyze(b, chi_a)
        direct = [sum(w.realize(t)[k] * chi_a[x] * nu[x] for k, x in enumerate(t.leaves)) for w in b.wavelets]
        np.testing.assert_allclose(c[:-1], direct)
        np.testing.assert_allclose(c, [0, 0, 0.5, 0.5], atol=1e-15)
        np.testing.assert_allclose(fast_analyze(t, nu, chi_a), c, atol=1e-15)

    def test_parseval_random(self):
        t = generate_padic_tree(2, 4)
        rng = np.random.default_rng(3)
        nu = from_leaf_masses(t, rng.uniform(0.1, 1, 16))
        f = rng.normal(size=16)
        c = analyze(full_basis(t, nu), f)
        assert math.isclose(np.sum(c ** 2), np.sum(f ** 2 * nu.leaf_masses), rel_tol=1e-9)

    def test_synthesize(self, binary_hom):
        t, nu = binary_hom
        b = full_basis(t, nu)
        np.testing.assert_array_equal(synthesize(b, np.zeros(4)), np.zeros(4))
        e = np.zeros(4)
        e[2] = 1
        np.testing.assert_array_equal(synthesize(b, e), b.wavelets[2].realize(t))
        with pytest.raises(DimensionMismatch):
            synthesize(b, np.zeros(3))
        with pytest.raises(DimensionMismatch):
            analyze(b, np.zeros(5))

    def test_complex_roundtrip(self):
        t, nu, _ = random_instance(4, 30)
        rng = np.random.default_rng(0)
        f = rng.normal(size=30) + 1j * rng.normal(size=30)
        b = full_basis(t, nu)
        c = analyze(b, f)
        np.testing.assert_allclose(fast_analyze(t, nu, f), c, atol=1e-12)
        np.testing.assert_allclose(synthesize(b, c), f, atol=1e-12)
        assert math.isclose(np.sum(np.abs(c) ** 2), np.sum(np.abs(f) ** 2 * nu.leaf_masses), rel_tol=1e-9)

    def test_fast_batch(self):
        t, nu, _ = random_instance(5, 64)
        X = np.random.default_rng(1).normal(size=(7, 64))
        C = fast_analyze(t, nu, X)
        np.testing.assert_allclose(C, analyze(full_basis(t, nu), X), atol=1e-12)
        np.testing.assert_allclose(fast_synthesize(t, nu, C), X, atol=1e-12)

    def test_fast_constant(self):
        t, nu, _ = random_instance(6, 64)
        c = fast_analyze(t, nu, np.full(64, 2.5))
        np.testing.assert_allclose(c[:-1], 0, atol=1e-13)

    def test_fast_rejects_foreign_measure(self, binary_hom):
        t, nu = binary_hom
        other = build_tree({"R": ["A", "B"], "A": ["a1", "a2"], "B": ["b1", "b2"]})
        with pytest.raises(DimensionMismatch):
            fast_analyze(other, nu, np.zeros(4))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 150), seed=st.integers(0, 10_000))
def test_fast_matches_naive_and_roundtrips(n, seed):
    t = generate_random_tree(n, seed=seed)
    rng = np.random.default_rng(seed)
    nu = from_leaf_masses(t, rng.uniform(0.01, 1, n))
    f = rng.normal(size=n)
    b = full_basis(t, nu)
    naive, fast = analyze(b, f), fast_analyze(t, nu, f)
    scale = np.linalg.norm(naive)
    assert np.max(np.abs(naive - fast)) <= 1e-9 * scale
    assert np.max(np.abs(synthesize(b, naive) - f)) <= 1e-9 * np.max(np.abs(f))
    assert np.max(np.abs(fast_synthesize(t, nu, fast) - f)) <= 1e-9 * np.max(np.abs(f))
