import numpy as np
import pytest

from biham.compatibility import check_compatible
from biham.decomposition import (
    canonical_basis,
    decompose,
    group_signature,
    is_generic,
    synthesize_pair,
)
from biham.linalg import op_norm
from conftest import standard_triple


def block_data(decomposition):
    return [(b.eigenvalue, b.sign, b.dim) for b in decomposition.blocks]


class TestDecompose:
    def test_reference_4d(self, ref4d_pair):
        d = decompose(ref4d_pair)
        data = block_data(d)
        assert len(data) == 2
        assert data[0] == (pytest.approx(2.0, abs=1e-12), 1, 2)
        assert data[1] == (pytest.approx(3.0, abs=1e-12), -1, 2)

    def test_identity_pair_single_block(self):
        t = standard_triple(2)
        d = decompose(check_compatible(t, t))
        assert block_data(d) == [(pytest.approx(1.0), 1, 4)]

    def test_reference_2d(self, ref2d_pair):
        d = decompose(ref2d_pair)
        assert block_data(d) == [(pytest.approx(2.0), 1, 2)]

    def test_equal_eigenvalue_opposite_signs_ordering(self):
        p = synthesize_pair([(2.0, -1, 1), (2.0, 1, 1)], seed=0)
        d = decompose(p)
        data = block_data(d)
        assert data[0][1] == 1 and data[1][1] == -1  # plus comes first
        assert data[0][0] == pytest.approx(2.0, rel=1e-9)

    def test_block_bases_are_g1_orthonormal_eigenvectors(self, ref4d_pair):
        p = ref4d_pair
        d = decompose(p)
        for b in d.blocks:
            c = b.basis
            np.testing.assert_allclose(c.T @ p.t1.g.m @ c, np.eye(b.dim), atol=1e-12)
            assert op_norm(p.metric_operator @ c - b.eigenvalue * c) <= 1e-9
            assert op_norm(p.recursion_operator @ c
                           - b.sign * b.eigenvalue * c) <= 1e-9

    def test_cross_block_biorthogonality(self):
        p = synthesize_pair([(1.0, 1, 2), (2.5, 1, 1), (2.5, -1, 1)], seed=5)
        d = decompose(p)
        for i in range(len(d.blocks)):
            for k in range(i + 1, len(d.blocks)):
                for g in (p.t1.g.m, p.t2.g.m):
                    assert op_norm(d.blocks[i].basis.T @ g @ d.blocks[k].basis) <= 1e-9

    def test_per_block_proportionality(self):
        p = synthesize_pair([(0.5, 1, 1), (3.0, -1, 2)], seed=9)
        g1, w1 = p.t1.g.m, p.t1.omega.m
        g2, w2 = p.t2.g.m, p.t2.omega.m
        for b in decompose(p).blocks:
            c = b.basis
            lam, sign = b.eigenvalue, b.sign
            assert op_norm(c.T @ g2 @ c - lam * (c.T @ g1 @ c)) <= 1e-9 * op_norm(g2)
            assert op_norm(c.T @ w2 @ c - sign * lam * (c.T @ w1 @ c)) <= 1e-9 * op_norm(w2)
            assert op_norm(p.t2.j.m @ c - sign * (p.t1.j.m @ c)) <= 1e-9


class TestIsGeneric:
    def test_reference_4d_is_generic(self, ref4d_pair):
        assert is_generic(decompose(ref4d_pair))

    def test_identity_pair_is_not(self):
        t = standard_triple(2)
        assert not is_generic(decompose(check_compatible(t, t)))

    def test_2d_always_generic(self, ref2d_pair):
        assert is_generic(decompose(ref2d_pair))


class TestCanonicalBasis:
    def test_standard_identity_pair(self):
        t = standard_triple(1)
        p = check_compatible(t, t)
        frame = canonical_basis(decompose(p).blocks[0], p)
        np.testing.assert_allclose(np.abs(frame.e1), [1.0, 0.0], atol=1e-12)
        # e2 = J1 e1 by definition, which rotates e1 by a quarter turn
        np.testing.assert_allclose(frame.e2, t.j.m @ frame.e1, atol=1e-12)
        assert frame.eigenvalue == pytest.approx(1.0)
        assert frame.metric_ratio == pytest.approx(1.0)

    def test_weighted_pair_frame(self, ref2d_pair):
        p = ref2d_pair
        frame = canonical_basis(decompose(p).blocks[0], p)
        g1 = p.t1.g.m
        len1 = frame.e1 @ g1 @ frame.e1
        assert len1 == pytest.approx(1.0, abs=1e-12)
        assert frame.e2 @ g1 @ frame.e2 == pytest.approx(1.0, abs=1e-12)
        assert frame.e1 @ g1 @ frame.e2 == pytest.approx(0.0, abs=1e-12)
        # orientation: omega1(e1, e2) = -g1(e1, e1)
        assert frame.e1 @ p.t1.omega.m @ frame.e2 == pytest.approx(-1.0, abs=1e-12)
        assert frame.metric_ratio == pytest.approx(2.0, abs=1e-12)
        # with e1 = (1, 0) the partner is J1 e1 = (0, -1/2)
        if frame.e1[0] > 0:
            np.testing.assert_allclose(frame.e2, [0.0, -0.5], atol=1e-12)

    def test_opposite_sign_block(self, ref4d_pair):
        p = ref4d_pair
        blocks = decompose(p).blocks
        frame = canonical_basis(blocks[1], p)
        assert blocks[1].sign == -1
        np.testing.assert_allclose(p.t2.j.m @ frame.e1, -(p.t1.j.m @ frame.e1),
                                   atol=1e-12)

    def test_rejects_big_block(self):
        t = standard_triple(2)
        p = check_compatible(t, t)
        with pytest.raises(ValueError):
            canonical_basis(decompose(p).blocks[0], p)


class TestGroupSignature:
    def test_generic_4d(self, ref4d_pair):
        sig = group_signature(decompose(ref4d_pair))
        assert sig.multiplicities == (1, 1)
        assert sig.complex_form == "U(1)×U(1)"
        assert sig.real_form == "SO(2)×SO(2)"

    def test_identity_pair_full_group(self):
        t = standard_triple(3)
        sig = group_signature(decompose(check_compatible(t, t)))
        assert sig.multiplicities == (3,)
        assert sig.complex_form == "U(3)"
        assert sig.real_form == "U_r(6;g,ω)"

    def test_mixed_ranks(self):
        p = synthesize_pair([(2.0, 1, 2), (5.0, -1, 1)], seed=21)
        sig = group_signature(decompose(p))
        assert sorted(sig.multiplicities) == [1, 2]
        assert sig.complex_form == "U(2)×U(1)"

    def test_rank_sums_to_half_dimension(self):
        p = synthesize_pair([(1.0, 1, 2), (2.0, -1, 3), (7.0, 1, 1)], seed=2)
        sig = group_signature(decompose(p))
        assert sig.rank == p.dim // 2


class TestSynthesizePair:
    def test_round_trip_two_blocks(self):
        p = synthesize_pair([(2.0, 1, 1), (3.0, -1, 1)], seed=42)
        data = block_data(decompose(p))
        assert data[0] == (pytest.approx(2.0, rel=1e-9), 1, 2)
        assert data[1] == (pytest.approx(3.0, rel=1e-9), -1, 2)

    def test_round_trip_multiplicity(self):
        p = synthesize_pair([(2.0, 1, 2)], seed=7)
        sig = group_signature(decompose(p))
        assert sig.multiplicities == (2,)
        assert sig.complex_form == "U(2)"

    def test_trivial_spec_keeps_triples_equivalent(self):
        p = synthesize_pair([(1.0, 1, 3)], seed=1)
        d = decompose(p)
        assert block_data(d) == [(pytest.approx(1.0, rel=1e-9), 1, 6)]
        assert group_signature(d).complex_form == "U(3)"

    def test_first_triple_is_standard(self):
        p = synthesize_pair([(2.0, 1, 1), (3.0, -1, 1)], seed=11)
        np.testing.assert_allclose(p.t1.g.m, np.eye(4), atol=1e-12)

    def test_reproducible_for_fixed_seed(self):
        a = synthesize_pair([(2.0, 1, 1), (3.0, -1, 2)], seed=123)
        b = synthesize_pair([(2.0, 1, 1), (3.0, -1, 2)], seed=123)
        np.testing.assert_array_equal(a.t2.g.m, b.t2.g.m)
        np.testing.assert_array_equal(a.t2.omega.m, b.t2.omega.m)
        c = synthesize_pair([(2.0, 1, 1), (3.0, -1, 2)], seed=124)
        assert op_norm(a.t2.g.m - c.t2.g.m) > 1e-3

    @pytest.mark.parametrize("bad", [
        [],
        [(0.0, 1, 1)],
        [(-2.0, 1, 1)],
        [(2.0, 2, 1)],
        [(2.0, 1, 0)],
        [(2.0, 1, 1), (2.0, 1, 1)],
    ])
    def test_rejects_inconsistent_specs(self, bad):
        with pytest.raises(ValueError):
            synthesize_pair(bad, seed=0)

    def test_same_eigenvalue_opposite_signs_allowed(self):
        p = synthesize_pair([(2.0, 1, 1), (2.0, -1, 1)], seed=4)
        sig = group_signature(decompose(p))
        assert sig.multiplicities == (1, 1)

    @pytest.mark.parametrize("seed", range(12))
    def test_round_trip_random_specs(self, seed):
        rng = np.random.default_rng(1000 + seed)
        n_blocks = int(rng.integers(1, 4))
        spec = []
        used = {1: set(), -1: set()}
        for _ in range(n_blocks):
            sign = int(rng.choice([-1, 1]))
            lam = float(np.round(rng.uniform(0.5, 8.0), 3))
            while lam in used[sign]:
                lam = float(np.round(rng.uniform(0.5, 8.0), 3))
            used[sign].add(lam)
            spec.append((lam, sign, int(rng.integers(1, 3))))
        p = synthesize_pair(spec, seed=seed)
        recovered = sorted((round(b.eigenvalue, 6), b.sign, b.dim // 2)
                           for b in decompose(p).blocks)
        expected = sorted((round(lam, 6), sign, mult) for lam, sign, mult in spec)
        assert recovered == expected
