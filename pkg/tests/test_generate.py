import numpy as np
import pytest

from qpp.core import idempotency_residual, is_projection, quasi_pair_residual
from qpp.decomp import canonical_2x2
from qpp.errors import BadSpec
from qpp.generate import (
    GenSpec,
    RandomStream,
    GeneratedQuasiPair,
    haar_unitary,
    random_idempotent,
    random_projection,
    random_quadratic,
    random_quasi_pair,
)
from qpp.linalg import operator_norm


class TestRandomStream:
    def test_reproducible(self):
        a = RandomStream(42).normal(11)
        b = RandomStream(42).normal(11)
        assert np.array_equal(a, b)

    def test_gaussian_moments(self):
        z = RandomStream(7).normal(200_000)
        assert abs(z.mean()) < 0.01
        assert abs(z.std() - 1.0) < 0.01

    def test_integer_bounds(self):
        s = RandomStream(3)
        vals = {s.integer(2, 5) for _ in range(200)}
        assert vals == {2, 3, 4, 5}

    def test_haar_unitary(self):
        u = haar_unitary(6, RandomStream(9))
        assert operator_norm(u @ u.conj().T - np.eye(6)) <= 1e-12


class TestRandomProjection:
    def test_rank_zero_and_full(self):
        assert np.allclose(random_projection(GenSpec(3, 1, "projection", rank=0)), 0.0)
        full = random_projection(GenSpec(3, 1, "projection", rank=3))
        assert np.allclose(full, np.eye(3), atol=1e-12)

    def test_determinism(self):
        spec = GenSpec(dim=4, seed=7, kind="projection", rank=2)
        assert np.array_equal(random_projection(spec), random_projection(spec))

    def test_is_projection(self):
        p = random_projection(GenSpec(dim=5, seed=11, kind="projection", rank=2))
        assert is_projection(p)
        assert np.isclose(np.trace(p).real, 2.0)

    def test_bad_rank(self):
        with pytest.raises(BadSpec):
            random_projection(GenSpec(dim=3, seed=1, kind="projection", rank=4))


class TestRandomIdempotent:
    def test_construction_residual(self):
        for k in range(30):
            q = random_idempotent(GenSpec(dim=2 + k % 9, seed=100 + k, kind="idempotent"))
            assert idempotency_residual(q) <= 1e-10 * (1 + operator_norm(q) ** 2)

    def test_zero_coupling_is_projection(self):
        q = random_idempotent(GenSpec(dim=4, seed=5, kind="idempotent", rank=2, target_norm=1.0))
        assert is_projection(q)

    def test_target_norm(self):
        q = random_idempotent(
            GenSpec(dim=2, seed=21, kind="idempotent", rank=1, target_norm=np.sqrt(5))
        )
        assert abs(operator_norm(q) - np.sqrt(5)) <= 1e-8

    def test_determinism(self):
        spec = GenSpec(dim=5, seed=77, kind="idempotent", rank=2)
        assert np.array_equal(random_idempotent(spec), random_idempotent(spec))

    def test_bad_target(self):
        with pytest.raises(BadSpec):
            random_idempotent(GenSpec(dim=3, seed=1, kind="idempotent", target_norm=0.5))


class TestRandomQuasiPair:
    def test_pair_identity_residual(self):
        for k in range(40):
            inst = random_quasi_pair(GenSpec(dim=2 + k % 8, seed=200 + k, kind="quasi_pair"))
            assert quasi_pair_residual(inst.p, inst.q) <= 1e-10 * (1 + operator_norm(inst.q))
            assert idempotency_residual(inst.q) <= 1e-10 * (1 + operator_norm(inst.q) ** 2)
            assert is_projection(inst.p)

    def test_determinism(self):
        spec = GenSpec(dim=6, seed=303, kind="quasi_pair")
        a = random_quasi_pair(spec)
        b = random_quasi_pair(spec)
        assert np.array_equal(a.p, b.p) and np.array_equal(a.q, b.q)

    def test_feature_coverage_over_seed_sweep(self):
        seen = {k: False for k in (
            "lower_branch", "upper_branch", "q0_nonzero", "u_non_surjective",
            "fixes_zero", "fixes_one", "hermitian_q",
        )}
        for seed in range(120):
            inst = random_quasi_pair(GenSpec(dim=6, seed=seed, kind="quasi_pair"))
            for key, val in inst.features.items():
                seen[key] = seen[key] or val
        assert all(seen.values()), seen

    def test_planted_data_recoverable(self):
        inst = random_quasi_pair(GenSpec(dim=7, seed=55, kind="quasi_pair"))
        c = canonical_2x2(inst.p, inst.q)
        lam = np.sort(np.linalg.eigvalsh(c.a))
        assert np.allclose(lam, inst.planted_spectrum, atol=1e-9)
        assert np.linalg.matrix_rank(c.u, tol=1e-8) == inst.coupling_rank
        assert int(round(np.trace(c.q0).real)) == inst.q0_rank

    def test_scalar_example(self):
        # planted A = [2], U = [1] in the standard frame gives [[2, -sqrt2], [sqrt2, -1]]
        blk = np.array([[2.0, -np.sqrt(2)], [np.sqrt(2), -1.0]])
        assert idempotency_residual(blk) <= 1e-12
        assert quasi_pair_residual(np.diag([1.0, 0.0]), blk) <= 1e-12


class TestRandomQuadratic:
    def test_annihilation_residual(self):
        for k in range(30):
            inst = random_quadratic(GenSpec(dim=2 + k % 8, seed=400 + k, kind="quadratic"))
            t = inst.matrix
            eye = np.eye(t.shape[0])
            res = operator_norm((t - inst.a * eye) @ (t - inst.b * eye))
            assert res <= 1e-10 * (1 + operator_norm(t) ** 2)

    def test_normal_when_uncoupled(self):
        inst = random_quadratic(
            GenSpec(dim=4, seed=17, kind="quadratic", blocks=(2, 2, 0), a=2.0, b=-1.0)
        )
        t = inst.matrix
        assert operator_norm(t @ t.conj().T - t.conj().T @ t) <= 1e-10

    def test_fixed_blocks(self):
        inst = random_quadratic(
            GenSpec(dim=2, seed=19, kind="quadratic", blocks=(0, 0, 1), a=0.0, b=1.0)
        )
        assert inst.blocks == (0, 0, 1)
        assert inst.planted_b.shape == (1, 1)

    def test_determinism(self):
        spec = GenSpec(dim=5, seed=23, kind="quadratic")
        a = random_quadratic(spec)
        b = random_quadratic(spec)
        assert np.array_equal(a.matrix, b.matrix)

    def test_bad_blocks(self):
        with pytest.raises(BadSpec):
            random_quadratic(GenSpec(dim=4, seed=1, kind="quadratic", blocks=(1, 1, 3)))


class TestGenSpecValidation:
    def test_bad_dim(self):
        with pytest.raises(BadSpec):
            GenSpec(dim=0, seed=1, kind="projection")

    def test_bad_gap(self):
        with pytest.raises(BadSpec):
            GenSpec(dim=2, seed=1, kind="projection", gap=0.0)

    def test_bad_kind(self):
        with pytest.raises(BadSpec):
            GenSpec(dim=2, seed=1, kind="unitary")
