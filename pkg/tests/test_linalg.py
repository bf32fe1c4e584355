import numpy as np
import pytest

from tensorbss.linalg import (
    RankDeficiencyError,
    diag_objective,
    joint_diagonalize,
    sym_eigen,
    sym_inv_sqrt,
)

from oracles import pj_distance

rng = np.random.default_rng(42)


def random_orthogonal(p, r=rng):
    q, rr = np.linalg.qr(r.standard_normal((p, p)))
    return q * np.sign(np.diag(rr))


class TestSymEigen:
    def test_identity(self):
        vals, vecs = sym_eigen(np.eye(4))
        assert np.allclose(vals, 1.0)
        assert np.allclose(vecs @ vecs.T, np.eye(4), atol=1e-12)

    def test_diagonal(self):
        vals, vecs = sym_eigen(np.diag([3.0, 1.0]))
        assert np.allclose(vals, [3.0, 1.0])
        assert np.allclose(np.abs(vecs), np.eye(2), atol=1e-14)

    def test_planted_spectrum(self):
        q = random_orthogonal(6)
        lam = np.sort(rng.standard_normal(6))[::-1]
        s = q @ np.diag(lam) @ q.T
        vals, vecs = sym_eigen(s)
        assert np.allclose(vals, lam, atol=1e-9)
        assert np.allclose(vecs @ np.diag(vals) @ vecs.T, s, atol=1e-9 * max(1, np.abs(s).max()))

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError):
            sym_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSymInvSqrt:
    def test_identity(self):
        assert np.allclose(sym_inv_sqrt(np.eye(3)), np.eye(3), atol=1e-14)

    def test_analytic_diagonal(self):
        r = sym_inv_sqrt(np.diag([4.0, 9.0]))
        assert np.allclose(r, np.diag([0.5, 1.0 / 3.0]), atol=1e-14)

    def test_random_spd(self):
        a = rng.standard_normal((5, 5))
        s = a @ a.T + 5 * np.eye(5)
        r = sym_inv_sqrt(s)
        assert np.abs(r - r.T).max() < 1e-10
        assert np.allclose(r @ s @ r, np.eye(5), atol=1e-8)

    def test_rank_deficiency_reports_ratio(self):
        s = np.diag([1.0, 1e-15])
        with pytest.raises(RankDeficiencyError, match="ratio"):
            sym_inv_sqrt(s)


class TestJointDiagonalize:
    def test_already_diagonal(self):
        ms = [np.diag([3.0, 2.0, 1.0]), np.diag([1.0, 5.0, 2.0])]
        res = joint_diagonalize(ms)
        assert pj_distance(res.rotation, np.eye(3)) < 1e-10
        assert res.converged

    def test_planted_rotation(self):
        p = 6
        q = random_orthogonal(p)
        ms = [q @ np.diag(rng.standard_normal(p)) @ q.T for _ in range(13)]
        res = joint_diagonalize(ms)
        assert pj_distance(res.rotation.T, q.T) < 1e-8
        assert res.converged

    def test_single_matrix_matches_eigendecomposition(self):
        q = random_orthogonal(4)
        s = q @ np.diag([4.0, 3.0, 2.0, 1.0]) @ q.T
        res = joint_diagonalize([s])
        _, vecs = sym_eigen(s)
        assert pj_distance(res.rotation.T, vecs.T) < 1e-9

    def test_objective_no_worse_than_identity(self):
        for _ in range(5):
            ms = rng.standard_normal((4, 5, 5))
            ms = 0.5 * (ms + ms.transpose(0, 2, 1))
            res = joint_diagonalize(ms)
            assert res.objective >= diag_objective(ms, np.eye(5)) - 1e-12

    def test_objective_trace_non_decreasing(self):
        ms = rng.standard_normal((6, 5, 5))
        ms = 0.5 * (ms + ms.transpose(0, 2, 1))
        res = joint_diagonalize(ms)
        trace = np.array(res.objective_trace)
        assert np.all(np.diff(trace) >= -1e-9 * max(1.0, trace.max()))

    def test_objective_invariant_under_pj(self):
        ms = rng.standard_normal((3, 4, 4))
        ms = 0.5 * (ms + ms.transpose(0, 2, 1))
        res = joint_diagonalize(ms)
        u = res.rotation
        perm = rng.permutation(4)
        signs = np.diag(rng.choice([-1.0, 1.0], 4))
        u2 = (u @ signs)[:, perm]
        assert abs(diag_objective(ms, u) - diag_objective(ms, u2)) < 1e-9

    def test_frobenius_mass_conserved(self):
        ms = rng.standard_normal((4, 5, 5))
        ms = 0.5 * (ms + ms.transpose(0, 2, 1))
        res = joint_diagonalize(ms)
        u = res.rotation
        for m in ms:
            rotated = u.T @ m @ u
            d = np.diag(rotated)
            off = rotated - np.diag(d)
            assert np.isclose(d @ d + np.sum(off * off), np.sum(m * m), atol=1e-10)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            joint_diagonalize(np.zeros((2, 3, 4)))
        with pytest.raises(ValueError):
            joint_diagonalize(np.zeros((0, 3, 3)))

    def test_non_convergence_flagged_not_fatal(self):
        ms = rng.standard_normal((5, 6, 6))
        ms = 0.5 * (ms + ms.transpose(0, 2, 1))
        res = joint_diagonalize(ms, tol=0.0, max_sweeps=2)
        assert not res.converged
        assert res.sweeps_used == 2

    def test_deterministic_output_convention(self):
        q = random_orthogonal(5)
        ms = [q @ np.diag(rng.standard_normal(5)) @ q.T for _ in range(4)]
        res = joint_diagonalize(ms)
        u = res.rotation
        d1 = np.diag(u.T @ ms[0] @ u)
        assert np.all(np.diff(d1) <= 1e-12)  # descending by first matrix
        peaks = u[np.argmax(np.abs(u), axis=0), np.arange(5)]
        assert np.all(peaks > 0)
