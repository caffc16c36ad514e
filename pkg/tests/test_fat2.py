import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fatdist.core import Subspace, Tolerance, form_perp, intersect, subspace_sum
from fatdist.errors import (
    InvalidFormError, NoRoomError, NumericFailure, PreconditionError,
)
from fatdist.fat2 import (
    FatTuple2, FormalIsocontactJet, check_isocontact_jet, companion_tuple,
    compatible_complex_structure, connecting_automorphism, deg2_identities,
    degree, extend_isotropic, extend_regular, holomorphic_tuple, is_fat, is_isotropic,
    is_regular, isotropic_complement, omega_perp, random_fat_tuple,
    random_pair, regularity_criteria, standard_form, symplectic_complete,
)

E4 = np.eye(4)
# frozen from hand elimination of W1 A = W2 for the holomorphic frame basis
HOLO_A = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)
seeds = st.integers(0, 2**32 - 1)


def line(t, u):
    return Subspace(u, t.dim)


class TestConstruction:
    def test_rejects_odd_nonskew_degenerate(self):
        with pytest.raises(InvalidFormError):
            FatTuple2(np.eye(2), np.eye(2))
        with pytest.raises(InvalidFormError):
            FatTuple2(np.zeros((4, 4)), standard_form(4))
        with pytest.raises(InvalidFormError):
            FatTuple2(np.zeros((3, 3)), np.zeros((3, 3)))

    def test_ill_conditioned(self):
        w1 = standard_form(4)
        w1[1, 3], w1[3, 1] = 1e-13, -1e-13
        t = FatTuple2(w1, standard_form(4), Tolerance(rel_eps=1e-15, abs_eps=1e-300))
        with pytest.raises(NumericFailure):
            connecting_automorphism(t)


class TestConnectingAutomorphism:
    def test_equal_forms_give_identity(self):
        t = FatTuple2(standard_form(4), standard_form(4))
        assert np.allclose(t.a, np.eye(4))
        assert not is_fat(t)

    def test_holomorphic_example(self):
        t = holomorphic_tuple(1)
        assert np.allclose(t.a, HOLO_A, atol=1e-14)
        assert np.allclose(t.a @ t.a, -np.eye(4))
        assert is_fat(t) and degree(t) == 2

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from([4, 6, 8, 10]), seeds)
    def test_defining_identity(self, n, seed):
        t = random_pair(n, seed)
        a = connecting_automorphism(t).a
        res = np.abs(t.omega1 @ a - t.omega2).max()
        assert res <= 1e-9 * max(1.0, np.abs(t.omega2).max())
        # skew-Hamiltonian: A is omega1-self-adjoint
        assert np.allclose(a.T @ t.omega1, t.omega1 @ a, atol=1e-9)


class TestDegree:
    def test_companion(self):
        t = companion_tuple()
        assert np.allclose(t.omega2, -t.omega2.T)
        assert is_fat(t) and degree(t) == 4

    def test_not_fat_precondition(self):
        with pytest.raises(PreconditionError):
            degree(FatTuple2(standard_form(4), standard_form(4)))

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from([4, 8, 12]), seeds)
    def test_even_and_bounded(self, n, seed):
        t = random_fat_tuple(n, seed, deg=None)
        d = degree(t)
        assert d % 2 == 0 and d <= n // 2

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from([4, 8]), st.sampled_from([2, None]), seeds)
    def test_invariant_under_change_of_pair(self, n, deg, seed):
        g = np.random.default_rng(seed)
        t = random_fat_tuple(n, g, deg=deg)
        p, q, r, s = g.uniform(-1, 1, 4)
        if abs(p * s - q * r) < 0.3:
            p, s = p + 1.5, s + 1.5
        mixed = FatTuple2(p * t.omega1 + q * t.omega2, r * t.omega1 + s * t.omega2)
        assert degree(mixed) == degree(t)


class TestOmegaPerp:
    def test_examples(self):
        t = holomorphic_tuple(1)
        assert omega_perp(t, Subspace.zero(4)).dim == 4
        assert omega_perp(t, line(t, E4[0])).equals(Subspace(E4[:, :2]))

    def test_observation_identities(self, rng):
        t = random_fat_tuple(8, rng)
        v = Subspace(rng.standard_normal((8, 2)))
        a = t.a
        assert form_perp(v, t.omega2).equals(form_perp(v.image(a), t.omega1))
        assert form_perp(v, t.omega1).equals(form_perp(v, t.omega2).image(a))

    def test_codim_for_regular(self, rng):
        t = random_fat_tuple(12, rng)
        v = Subspace(rng.standard_normal((12, 3)))
        assert is_regular(t, v)
        assert omega_perp(t, v).codim == 6


class TestRegularity:
    def test_lines_regular(self, rng):
        t = random_fat_tuple(8, rng)
        for _ in range(10):
            assert is_regular(t, line(t, rng.standard_normal(8)))

    def test_a_invariant_plane_not_regular(self):
        t = holomorphic_tuple(1)
        assert not is_regular(t, Subspace(E4[:, :2]))

    def test_zero_regular(self):
        assert is_regular(holomorphic_tuple(1), Subspace.zero(4))

    def test_criteria_agree_on_nonregular(self, rng):
        t = random_fat_tuple(8, rng, deg=None)
        u = rng.standard_normal(8)
        v = Subspace(np.column_stack([u, t.a @ u, rng.standard_normal(8)]))
        crit = regularity_criteria(t, v)
        assert crit == {"map_rank": False, "trivial_intersection": False, "codim": False}

    def test_isotropic_regular_bound(self, rng):
        t = random_fat_tuple(8, rng)
        v = Subspace.zero(8)
        for _ in range(2):
            vo = omega_perp(t, v)
            meet = intersect(vo, omega_perp(t, vo))
            comp = intersect(vo, meet.orthogonal_complement())
            v = subspace_sum(v, Subspace(comp.basis @ rng.standard_normal(comp.dim), 8))
        assert is_isotropic(t, v) and is_regular(t, v) and v.dim == 2
        vo = omega_perp(t, v)
        assert intersect(vo, omega_perp(t, vo)).contains_subspace(v)

    def test_symplectic_isotropic_pair(self, rng):
        t = holomorphic_tuple(3)
        v = extend_isotropic(t, extend_isotropic(t, Subspace.zero(12), rng), rng)
        s = subspace_sum(v, isotropic_complement(t, v))
        assert is_regular(t, s)
        so = omega_perp(t, s)
        soo = omega_perp(t, so)
        assert intersect(so, soo).dim == 0
        for w in t.forms:
            for sub in (so, soo):
                assert np.linalg.matrix_rank(sub.basis.T @ w @ sub.basis) == sub.dim


class TestIsotropic:
    def test_examples(self):
        t = holomorphic_tuple(1)
        assert is_isotropic(t, line(t, np.array([1.0, 2, 3, 4])))
        assert not is_isotropic(t, Subspace(np.column_stack([E4[0], E4[2]])))


class TestDeg2Identities:
    def test_zero(self):
        rep = deg2_identities(holomorphic_tuple(1), Subspace.zero(4))
        assert rep.passed

    def test_requires_degree2(self):
        with pytest.raises(PreconditionError):
            deg2_identities(companion_tuple(), Subspace.zero(8))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4), seeds)
    def test_holomorphic_random(self, k, seed):
        g = np.random.default_rng(seed)
        t = holomorphic_tuple(2)
        rep = deg2_identities(t, Subspace(g.standard_normal((8, k))))
        assert rep.passed, str(rep)

    def test_isotropic_closure_isotropic(self, rng):
        t = random_fat_tuple(8, rng)
        v = extend_isotropic(t, extend_isotropic(t, Subspace.zero(8), rng), rng)
        rep = deg2_identities(t, v)
        assert rep.passed
        assert rep["(V^Omega)^Omega isotropic"].detail != "vacuous: V not isotropic"


class TestExtendRegular:
    def test_iterate_to_quarter_dimension(self, rng):
        for k in (1, 2, 3):
            t = random_fat_tuple(4 * k, rng)
            v = Subspace.zero(4 * k)
            for i in range(k):
                v = extend_regular(t, v, rng)
                assert v.dim == i + 1 and is_regular(t, v)

    def test_no_room(self, rng):
        t = holomorphic_tuple(1)
        with pytest.raises(NoRoomError):
            extend_regular(t, Subspace(np.column_stack([E4[0], E4[2]])), rng)

    def test_requires_regular(self, rng):
        with pytest.raises(PreconditionError):
            extend_regular(holomorphic_tuple(1), Subspace(E4[:, :2]), rng)


class TestExtendIsotropic:
    def test_quarter_dimension(self, rng):
        for k in (1, 2, 3):
            t = random_fat_tuple(4 * k, rng)
            v = Subspace.zero(4 * k)
            for _ in range(k):
                v = extend_isotropic(t, v, rng)
            assert v.dim == k and is_isotropic(t, v) and is_regular(t, v)
            with pytest.raises(NoRoomError):
                extend_isotropic(t, v, rng)


class TestComplexStructure:
    def _check(self, w, j):
        n = w.shape[0]
        assert np.linalg.norm(j @ j + np.eye(n)) <= 1e-8
        g = w @ j
        assert np.allclose(g, g.T, atol=1e-10)
        assert np.linalg.eigvalsh(0.5 * (g + g.T)).min() > 0
        assert np.allclose(j.T @ w @ j, w, atol=1e-10)

    def test_plane(self):
        w = np.array([[0.0, 1.0], [-1.0, 0.0]])
        j = compatible_complex_structure(w)
        self._check(w, j)

    def test_standard_r4(self):
        self._check(standard_form(4), compatible_complex_structure(standard_form(4)))

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from([2, 4, 6, 8, 10]), seeds)
    def test_random(self, n, seed):
        x = np.random.default_rng(seed).standard_normal((n, n))
        w = x - x.T
        if np.linalg.cond(w) > 1e6:
            return
        self._check(w, compatible_complex_structure(w))


class TestIsotropicComplement:
    def test_zero(self):
        assert isotropic_complement(holomorphic_tuple(1), Subspace.zero(4)).dim == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_regular_isotropic(self, seed):
        g = np.random.default_rng(seed)
        t = holomorphic_tuple(2)
        v = extend_isotropic(t, extend_isotropic(t, Subspace.zero(8), g), g)
        vp = isotropic_complement(t, v)
        assert vp.dim == v.dim
        v2 = form_perp(v, t.omega2)
        vo = omega_perp(t, v)
        assert intersect(vo, vp).dim == 0
        assert subspace_sum(vo, vp).equals(v2)
        s = subspace_sum(v, vp)
        sb = s.basis
        assert np.linalg.norm(sb.T @ t.omega2 @ sb) <= 1e-10
        assert np.linalg.matrix_rank(sb.T @ t.omega1 @ sb) == s.dim

    def test_rejects_nonisotropic(self):
        with pytest.raises(PreconditionError):
            isotropic_complement(holomorphic_tuple(1), Subspace(np.column_stack([E4[0], E4[2]])))


def _symplectic_relations(w, x, y):
    return max(np.abs(x.T @ w @ x).max(), np.abs(y.T @ w @ y).max(),
               np.abs(x.T @ w @ y - np.eye(x.shape[1])).max())


class TestSymplecticComplete:
    def test_plane(self):
        w = np.array([[0.0, 1.0], [-1.0, 0.0]])
        x, y = symplectic_complete(w, np.array([[1.0], [0.0]]))
        assert (x.T @ w @ y)[0, 0] == pytest.approx(1.0)

    def test_r4(self):
        w = standard_form(4)
        x, y = symplectic_complete(w, np.eye(4)[:, :2])
        assert _symplectic_relations(w, x, y) <= 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 6), seeds)
    def test_random_lagrangian(self, k, seed):
        g = np.random.default_rng(seed)
        n = 2 * k
        p = np.linalg.qr(g.standard_normal((n, n)))[0] @ np.diag(g.uniform(1, 3, n))
        w = p.T @ standard_form(n) @ p
        mix = np.linalg.qr(g.standard_normal((k, k)))[0]
        lag = np.linalg.solve(p, np.eye(n)[:, :k] @ mix)
        x, y = symplectic_complete(w, lag)
        assert _symplectic_relations(w, x, y) <= 1e-9

    def test_inside_subspace(self, rng):
        t = holomorphic_tuple(2)
        v = extend_isotropic(t, extend_isotropic(t, Subspace.zero(8), rng), rng)
        s = subspace_sum(v, isotropic_complement(t, v))
        x, y = symplectic_complete(t.omega1, v.basis, s)
        assert _symplectic_relations(t.omega1, x, y) <= 1e-9
        assert s.contains(y)

    def test_non_lagrangian(self):
        w = standard_form(4)
        with pytest.raises(PreconditionError):
            symplectic_complete(w, np.column_stack([np.eye(4)[0], np.eye(4)[2]]))


class TestIsocontactJet:
    def test_holomorphic_rank2(self):
        t = holomorphic_tuple(2)
        f = np.zeros((8, 2))
        f[0, 0] = 1.0
        f[2, 1] = 1.0
        eta = np.array([[0.0, 1.0], [-1.0, 0.0]])
        rep = check_isocontact_jet(t, FormalIsocontactJet(f, eta))
        assert rep.passed and rep["regular"].passed

    def test_nonisotropic_for_omega2(self):
        t = holomorphic_tuple(2)
        f = np.zeros((8, 2))
        f[0, 0] = 1.0
        f[3, 1] = 1.0
        rep = check_isocontact_jet(t, FormalIsocontactJet(f, np.array([[0.0, 1.0], [-1.0, 0.0]])))
        assert not rep.passed
        assert not rep["curvature_omega2"].passed

    def test_zero_eta(self):
        with pytest.raises(PreconditionError):
            check_isocontact_jet(holomorphic_tuple(1), FormalIsocontactJet(np.eye(4)[:, :2], np.zeros((2, 2))))
