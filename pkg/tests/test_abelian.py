import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cechseries import abelian as ab
from cechseries import groups as G
from cechseries.errors import StructureError

matrices = st.lists(
    st.lists(st.integers(-9, 9), min_size=1, max_size=4),
    min_size=1, max_size=4,
).filter(lambda rows: len({len(r) for r in rows}) == 1)


class TestSmith:
    @given(matrices)
    @settings(max_examples=60, deadline=None)
    def test_decomposition_properties(self, mat):
        d, u, ui, v, vi = ab.smith_normal_form(mat)
        m, n = len(mat), len(mat[0])
        assert ab._matmul(ab._matmul(u, [list(r) for r in mat]), v) == d
        assert ab._matmul(u, ui) == ab._identity(m)
        assert ab._matmul(vi, v) == ab._identity(n)
        diag = [d[i][i] for i in range(min(m, n))]
        for i in range(min(m, n)):
            for j in range(n):
                if i != j:
                    assert d[i][j] == 0
        for a, b in zip(diag, diag[1:]):
            assert a >= 0 and b >= 0
            if a:
                assert b % a == 0
            else:
                assert b == 0

    def test_kernel_basis(self):
        mat = [[2, 4], [1, 2]]
        basis = ab.integer_kernel_basis(mat)
        assert len(basis) == 1
        x = basis[0]
        assert 2 * x[0] + 4 * x[1] == 0

    def test_solver(self):
        sol = ab._solve_integer([[2, 0], [0, 3]], [[4, 9]])
        assert sol == [[2, 3]]
        with pytest.raises(StructureError):
            ab._solve_integer([[2]], [[3]])


class TestDecomposition:
    @pytest.mark.parametrize("grp,expected", [
        (G.cyclic(1), ()),
        (G.cyclic(12), (12,)),
        (G.product(G.cyclic(2), G.cyclic(4)), (2, 4)),
        (G.product(G.cyclic(2), G.cyclic(2)), (2, 2)),
        (G.product(G.cyclic(6), G.cyclic(4)), (2, 12)),
        (G.product(G.cyclic(3), G.cyclic(5)), (15,)),
    ])
    def test_invariant_factors(self, grp, expected):
        st_ = ab.abelian_structure(grp)
        assert st_.orders == expected

    @pytest.mark.parametrize("grp", [
        G.cyclic(8),
        G.product(G.cyclic(2), G.cyclic(6)),
        G.product(G.cyclic(4), G.cyclic(4)),
    ])
    def test_coords_are_an_isomorphism(self, grp):
        st_ = ab.abelian_structure(grp)
        # bijective
        seen = {tuple(st_.to_coords[a]) for a in range(grp.order)}
        assert len(seen) == grp.order
        # additive on every pair
        for a in range(grp.order):
            for b in range(grp.order):
                lhs = st_.to_coords[grp.mul(a, b)]
                rhs = (st_.to_coords[a] + st_.to_coords[b]) % np.array(st_.orders)
                assert np.array_equal(lhs, rhs)
        # round trip
        for a in range(grp.order):
            assert st_.from_coords(st_.to_coords[a]) == a

    def test_nonabelian_rejected(self):
        with pytest.raises(StructureError):
            ab.abelian_structure(G.quaternion8())

    def test_hom_matrix(self):
        z4, z2 = G.cyclic(4), G.cyclic(2)
        s4, s2 = ab.abelian_structure(z4), ab.abelian_structure(z2)
        proj = G.GroupHom(z4, z2, np.array([0, 1, 0, 1]))
        mat = ab.hom_matrix(proj, s4, s2)
        for a in range(4):
            img = (mat[0][0] * s4.to_coords[a][0]) % 2
            assert img == s2.to_coords[proj(a)][0]


class TestCanonicalRep:
    def test_prime_field_rep_is_orbit_minimum(self):
        # lattice spanned by (1,1,0) and (0,1,1) in (Z/3)^3
        cols = [[1, 1, 0], [0, 1, 1]]
        moduli = [3, 3, 3]
        for vec in itertools.product(range(3), repeat=3):
            rep = ab.lattice_canonical_rep(list(vec), cols, moduli)
            orbit = []
            for a in range(3):
                for b in range(3):
                    orbit.append(tuple(
                        (vec[i] + a * cols[0][i] + b * cols[1][i]) % 3
                        for i in range(3)))
            assert tuple(rep) == min(orbit)

    def test_idempotent_and_in_coset(self):
        cols = [[2, 0], [0, 4]]
        moduli = [8, 8]
        for vec in itertools.product(range(8), repeat=2):
            rep = ab.lattice_canonical_rep(list(vec), cols, moduli)
            assert ab.lattice_canonical_rep(rep, cols, moduli) == rep
            diff0 = (vec[0] - rep[0]) % 8
            diff1 = (vec[1] - rep[1]) % 8
            assert diff0 % 2 == 0 and diff1 % 4 == 0


class TestCohomologyGroup:
    def test_two_term_complex(self):
        # Z/4 --x2--> Z/4: kernel {0,2}, image {0,2}: H = 0 in the middle slot
        h = ab.CohomologyGroup([4], [[2]], [4], [[2]], 1)
        assert h.orders == ()
        # kernel {0,2} with no incoming map: H = Z/2
        h0 = ab.CohomologyGroup([4], [[2]], [4], None, 0)
        assert h0.orders == (2,)
        rep = h0.rep((1,))
        assert rep[0] in (2,)

    def test_reduce_rejects_noncocycle(self):
        h = ab.CohomologyGroup([4], [[1]], [4], None, 0)
        with pytest.raises(StructureError):
            h.reduce([1])
        assert h.orders == ()
