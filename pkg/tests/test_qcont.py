import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fatdist.core import Subspace, intersect, subspace_sum
from fatdist.errors import ConstructionFailure, InvalidFormError, NoRoomError, PreconditionError
from fatdist.fat2 import connecting_automorphism, degree, deg2_identities, is_fat
from fatdist.qcont import (
    QContTriple, decomposition_check, induced_fat_pair, is_isotropic3,
    is_regular3, omega_perp3, pansu_check, pick_eta, pick_tau, quaternion_units,
    random_qcont, standard_qcont, validate_triple,
)

seeds = st.integers(0, 2**32 - 1)


def _isotropic(q, k, rng):
    v = Subspace.zero(q.dim)
    for _ in range(k):
        vo = omega_perp3(q, v)
        comp = intersect(vo, v.orthogonal_complement())
        v = subspace_sum(v, Subspace(comp.basis @ rng.standard_normal(comp.dim), q.dim))
    return v


class TestTriple:
    def test_quaternion_relations_by_hand(self):
        i, j, k = quaternion_units()
        e = np.eye(4)
        for u in (i, j, k):
            assert np.array_equal(u @ u, -e)
        assert np.array_equal(i @ j, k)
        assert np.array_equal(i @ j @ k, -e)

    def test_standard_passes(self):
        assert validate_triple(standard_qcont(1)).passed

    def test_flipped_j3_fails(self):
        i, j, k = quaternion_units()
        rep = validate_triple(QContTriple(i, j, -k))
        assert not rep.passed
        assert not rep["J1 J2 J3 = -I"].passed
        assert rep["J3^2 = -I"].passed

    def test_dimension_rejected(self):
        with pytest.raises(InvalidFormError):
            QContTriple(np.eye(6), np.eye(6), np.eye(6))

    def test_independent_forms_checked(self):
        q0 = standard_qcont(1)
        q = QContTriple(*q0.js, omegas=[q0.derived[0], q0.derived[1], -q0.derived[2]])
        assert not validate_triple(q)["omega3 = g(J3.,.)"].passed

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 4), seeds, st.lists(st.floats(-2, 2), min_size=3, max_size=3))
    def test_combination_squares(self, blocks, seed, a):
        q = random_qcont(blocks, seed)
        if sum(x * x for x in a) < 1e-2:
            return
        s = sum(x * j for x, j in zip(a, q.js))
        assert np.allclose(s @ s, -sum(x * x for x in a) * np.eye(q.dim), atol=1e-8)
        w = sum(x * o for x, o in zip(a, q.omegas))
        assert np.linalg.matrix_rank(w) == q.dim


class TestInducedPair:
    def test_standard(self):
        q = standard_qcont(1)
        t = induced_fat_pair(q)
        assert np.allclose(connecting_automorphism(t).a, -q.j1, atol=1e-12)
        assert is_fat(t) and degree(t) == 2

    @pytest.mark.parametrize("seed", range(5))
    def test_random_dim8(self, seed):
        q = random_qcont(2, seed)
        t = induced_fat_pair(q)
        a = connecting_automorphism(t).a
        assert np.linalg.norm(a + q.j1) / np.linalg.norm(q.j1) <= 1e-9
        assert degree(t) == 2
        rng = np.random.default_rng(seed)
        assert deg2_identities(t, Subspace(rng.standard_normal((8, 2)))).passed

    def test_invalid_rejected(self):
        i, j, k = quaternion_units()
        with pytest.raises(PreconditionError):
            induced_fat_pair(QContTriple(i, j, -k))


class TestRegularity:
    def test_lines(self, rng):
        q = random_qcont(3, rng)
        for _ in range(10):
            v = Subspace(rng.standard_normal(12), 12)
            assert is_isotropic3(q, v) and is_regular3(q, v)
            assert omega_perp3(q, v).codim == 3

    def test_complex_line_not_isotropic(self, rng):
        q = random_qcont(2, rng)
        u = rng.standard_normal(8)
        assert not is_isotropic3(q, Subspace(np.column_stack([u, q.j1 @ u])))

    def test_pansu_greedy(self, rng):
        q = random_qcont(3, rng)
        v = _isotropic(q, 2, rng)
        assert v.dim == 2 and pansu_check(q, v)
        assert omega_perp3(q, v).codim == 6

    def test_pansu_precondition(self, rng):
        q = standard_qcont(1)
        u = np.eye(4)[0]
        with pytest.raises(PreconditionError):
            pansu_check(q, Subspace(np.column_stack([u, q.j1 @ u])))


class TestDecomposition:
    def test_zero(self):
        rep = decomposition_check(standard_qcont(1), Subspace.zero(4))
        assert rep.passed and rep.info["dim_perp"] == 4

    def test_isotropic(self, rng):
        q = random_qcont(3, rng)
        w = _isotropic(q, 2, rng)
        rep = decomposition_check(q, w)
        assert rep.passed and rep.info["direct"]
        assert rep.info["dim_jspan"] == 6 and rep.info["dim_perp"] == 6

    def test_nonregular(self, rng):
        q = random_qcont(2, rng)
        u = rng.standard_normal(8)
        rep = decomposition_check(q, Subspace(np.column_stack([u, q.js[1] @ u])))
        assert rep.passed and not rep.info["direct"] and not rep.info["regular"]


class TestTauEta:
    def test_tau_no_room(self, rng):
        q = standard_qcont(1)
        v = Subspace(np.eye(4)[:, :1])
        with pytest.raises(NoRoomError):
            pick_tau(q, v, rng)

    def test_tau_from_zero(self, rng):
        tau = pick_tau(standard_qcont(1), Subspace.zero(4), rng)
        assert np.linalg.norm(tau) == pytest.approx(1.0)

    def test_eta_dim8(self, rng):
        q = standard_qcont(2)
        tau = np.eye(8)[0]
        eta = pick_eta(q, Subspace(tau, 8), tau, rng)
        w1, w2, w3 = q.omegas
        assert tau @ w1 @ eta == pytest.approx(1.0)
        assert abs(tau @ w2 @ eta) < 1e-12 and abs(tau @ w3 @ eta) < 1e-12

    def test_tau_dim12_second_step(self, rng):
        q = random_qcont(3, rng)
        tau = pick_tau(q, Subspace.zero(12), rng)
        vt = Subspace(tau, 12)
        eta = pick_eta(q, vt, tau, rng)
        v = subspace_sum(vt, Subspace(eta, 12))
        tau2 = pick_tau(q, v, rng)
        assert is_regular3(q, subspace_sum(v, Subspace(tau2, 12)))
        b = v.basis
        assert np.abs(b.T @ q.omegas[1] @ b).max() < 1e-12

    def test_eta_no_room_dim4(self, rng):
        q = standard_qcont(1)
        tau = np.eye(4)[0]
        # the slice lies inside span{tau, J1 tau}
        with pytest.raises(ConstructionFailure):
            pick_eta(q, Subspace(tau, 4), tau, rng)
