import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpp.errors import NotHermitian, NotProjection, SpectrumViolation
from qpp.linalg import (
    DEFAULT_TOL,
    FnKind,
    SubspaceBasis,
    Tolerances,
    as_cmatrix,
    func_calc,
    hermitian_eig,
    kernel_is_trivial,
    moore_penrose,
    operator_norm,
    polar_decomposition,
    range_basis,
    subspace_intersection,
    svd,
)

RNG = np.random.default_rng(20240811)


def random_hermitian(n, rng=RNG):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (z + z.conj().T) / 2


def random_complex(rows, cols, rng=RNG):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


# Scalar oracles for the four gap functions, evaluated per eigenvalue.
def scalar_f(t):
    return 1.0 if t >= 1 else -1.0


def scalar_g(t):
    return np.sqrt(abs(t))


def scalar_h(t):
    return -scalar_f(t) * np.sqrt(abs(t - 1.0))


def scalar_ell(t):
    return np.sqrt(max(t * t - t, 0.0))


class TestHermitianEig:
    def test_identity(self):
        w, v = hermitian_eig(np.eye(3))
        assert np.allclose(w, [1, 1, 1])
        assert np.allclose(v @ v.conj().T, np.eye(3))

    def test_already_diagonal(self):
        w, v = hermitian_eig(np.diag([2.0, 0.0]))
        assert np.allclose(w, [0.0, 2.0])
        # column-permuted identity after the phase rule
        assert np.allclose(np.abs(v), [[0, 1], [1, 0]])

    def test_two_by_two_hand_roots(self):
        # char poly of [[2,1],[1,2]]: (2-l)^2 - 1 = 0 -> l in {1, 3}
        w, _ = hermitian_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(w, [1.0, 3.0])

    def test_reconstruction_residual_random(self):
        for n in (2, 5, 17, 32):
            m = random_hermitian(n)
            w, v = hermitian_eig(m)
            res = operator_norm((v * w) @ v.conj().T - m)
            assert res <= 1e-10 * (1 + operator_norm(m))
            assert np.all(np.diff(w) >= 0)

    def test_phase_rule_determinism(self):
        m = random_hermitian(6)
        w1, v1 = hermitian_eig(m)
        w2, v2 = hermitian_eig(m.copy())
        assert np.array_equal(v1, v2) and np.array_equal(w1, w2)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(NotHermitian):
            hermitian_eig(np.zeros((2, 3)))


class TestFuncCalc:
    def test_f_on_diagonal(self):
        out = func_calc(np.diag([2.0, 0.0]), FnKind.F)
        assert np.allclose(out, np.diag([1.0, -1.0]))

    def test_ell_on_identity(self):
        out = func_calc(np.eye(2), FnKind.ELL)
        assert np.allclose(out, 0.0)

    def test_h_matches_scalar_oracle(self):
        # oracle: h applied per eigenvalue of diag(2, -3) gives diag(-1, 2)
        out = func_calc(np.diag([2.0, -3.0]), FnKind.H)
        expected = np.diag([scalar_h(2.0), scalar_h(-3.0)])
        assert np.allclose(expected, np.diag([-1.0, 2.0]))
        assert np.allclose(out, expected, atol=1e-12)

    def test_gap_eigenvalue_rejected(self):
        for kind in FnKind:
            with pytest.raises(SpectrumViolation):
                func_calc(np.diag([0.5, 2.0]), kind)

    def test_clamping_near_endpoints(self):
        a = np.diag([1e-9, 1 - 1e-9, 3.0])
        out = func_calc(a, FnKind.ELL)
        assert np.allclose(np.diag(out), [0.0, 0.0, scalar_ell(3.0)])

    def test_operator_identities_random_spectrum(self):
        # all five identities of the scalar family, as matrix identities
        rng = np.random.default_rng(7)
        for _ in range(25):
            n = int(rng.integers(1, 7))
            lam = np.where(
                rng.random(n) < 0.5,
                -rng.random(n) * 4,
                1 + rng.random(n) * 4,
            )
            q, _ = np.linalg.qr(random_complex(n, n, rng))
            a = (q * lam) @ q.conj().T
            a = (a + a.conj().T) / 2
            fa = func_calc(a, FnKind.F)
            ga = func_calc(a, FnKind.G)
            ha = func_calc(a, FnKind.H)
            la = func_calc(a, FnKind.ELL)
            eye = np.eye(n)
            abs2a = (q * np.abs(2 * lam - 1)) @ q.conj().T
            tol = DEFAULT_TOL.eq_tol * (1 + operator_norm(a)) * 10
            assert operator_norm(fa @ fa - eye) <= tol
            assert operator_norm(ha @ ha + ga @ ga - abs2a) <= tol
            assert operator_norm(ha @ a + ga @ la) <= tol
            assert operator_norm(ga @ ga - ha @ ha - fa) <= tol
            assert operator_norm(ha @ la + ga @ (a - eye)) <= tol


@given(
    st.lists(
        st.one_of(
            st.floats(min_value=-50.0, max_value=0.0),
            st.floats(min_value=1.0, max_value=50.0),
        ),
        min_size=1,
        max_size=6,
    )
)
@settings(deadline=None, max_examples=60)
def test_func_calc_diagonal_matches_scalars(lams):
    a = np.diag(np.array(lams, dtype=float))
    # mirror the documented clamp: eigenvalues within spec_tol of {0, 1}
    # are evaluated at the endpoint itself
    def clamp(t):
        if abs(t) <= DEFAULT_TOL.spec_tol:
            return 0.0
        if abs(t - 1.0) <= DEFAULT_TOL.spec_tol:
            return 1.0
        return t

    for kind, fn in [
        (FnKind.F, scalar_f),
        (FnKind.G, scalar_g),
        (FnKind.H, scalar_h),
        (FnKind.ELL, scalar_ell),
    ]:
        out = func_calc(a, kind)
        expected = np.diag([fn(clamp(t)) for t in lams])
        assert np.allclose(out, expected, atol=1e-9 * (1 + operator_norm(a)))


class TestSvd:
    def test_zero_matrix(self):
        u, s, v = svd(np.zeros((2, 3)))
        assert np.allclose(s, 0.0)
        assert u.shape == (2, 2) and v.shape == (3, 3)

    def test_rank_one_hand_value(self):
        # QQ* = diag(2, 0) so singular values are (sqrt(2), 0)
        _, s, _ = svd(np.array([[1.0, 1.0], [0.0, 0.0]]))
        assert np.allclose(s, [np.sqrt(2), 0.0])

    def test_unitary_input(self):
        q, _ = np.linalg.qr(random_complex(4, 4))
        _, s, _ = svd(q)
        assert np.allclose(s, 1.0)

    def test_reconstruction_and_orthogonality(self):
        for rows, cols in [(3, 5), (5, 3), (4, 4), (1, 6)]:
            m = random_complex(rows, cols)
            u, s, v = svd(m)
            sig = np.zeros((rows, cols))
            sig[: s.size, : s.size] = np.diag(s)
            assert operator_norm(u @ sig @ v.conj().T - m) <= 1e-9 * (1 + operator_norm(m))
            assert operator_norm(u.conj().T @ u - np.eye(rows)) <= 1e-12
            assert operator_norm(v.conj().T @ v - np.eye(cols)) <= 1e-12
            assert np.all(np.diff(s) <= 0) and np.all(s >= 0)


class TestMoorePenrose:
    def test_diagonal(self):
        out = moore_penrose(np.diag([np.sqrt(2), 0.0]))
        assert np.allclose(out, np.diag([1 / np.sqrt(2), 0.0]))

    def test_identity(self):
        assert np.allclose(moore_penrose(np.eye(3)), np.eye(3))

    def test_abs_adjoint_of_rank_one_idempotent(self):
        # for Q = [[1,1],[0,0]]: |Q*| = (QQ*)^(1/2) = diag(sqrt2, 0); the pinv
        # oracle is elementwise inversion of the nonzero diagonal
        q = np.array([[1.0, 1.0], [0.0, 0.0]])
        abs_qstar = np.diag(np.sqrt(np.linalg.eigvalsh(q @ q.conj().T))[::-1])
        assert np.allclose(abs_qstar, np.diag([np.sqrt(2), 0.0]))
        assert np.allclose(moore_penrose(abs_qstar), np.diag([1 / np.sqrt(2), 0.0]))

    def test_penrose_identities_seeded(self):
        rng = np.random.default_rng(500)
        for k in range(500):
            rows = int(rng.integers(1, 13))
            cols = int(rng.integers(1, 13))
            m = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
            if k % 3 == 0 and min(rows, cols) > 1:
                m[:, -1] = m[:, 0]  # force rank deficiency
            x = moore_penrose(m)
            scale = 1 + operator_norm(m) * operator_norm(x)
            assert operator_norm(m @ x @ m - m) <= 1e-8 * scale
            assert operator_norm(x @ m @ x - x) <= 1e-8 * scale
            assert operator_norm(m @ x - (m @ x).conj().T) <= 1e-8 * scale
            assert operator_norm(x @ m - (x @ m).conj().T) <= 1e-8 * scale


class TestPolar:
    def test_zero(self):
        u, a = polar_decomposition(np.zeros((2, 2)))
        assert np.allclose(u, 0.0) and np.allclose(a, 0.0)

    def test_psd_input(self):
        m = random_complex(3, 3)
        t = m @ m.conj().T
        u, a = polar_decomposition(t)
        assert np.allclose(a, t, atol=1e-9 * (1 + operator_norm(t)))
        rb = range_basis(t)
        assert np.allclose(u, rb.projection(), atol=1e-9)

    def test_nilpotent_hand_case(self):
        t = np.array([[0.0, 1.0], [0.0, 0.0]])
        u, a = polar_decomposition(t)
        assert np.allclose(a, np.diag([0.0, 1.0]))
        assert np.allclose(u @ a, t, atol=1e-12)
        assert np.allclose(u.conj().T @ u, np.diag([0.0, 1.0]), atol=1e-12)

    def test_partial_isometry_property_random(self):
        rng = np.random.default_rng(81)
        for _ in range(50):
            rows = int(rng.integers(1, 9))
            cols = int(rng.integers(1, 9))
            t = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
            u, a = polar_decomposition(t)
            assert operator_norm(t - u @ a) <= 1e-8 * (1 + operator_norm(t))
            assert operator_norm(u.conj().T @ u @ a - a) <= 1e-8 * (1 + operator_norm(t))


class TestRangeBasis:
    def test_zero_matrix(self):
        assert range_basis(np.zeros((3, 3))).dim == 0

    def test_rank_one(self):
        rb = range_basis(np.array([[1.0, 1.0], [0.0, 0.0]]))
        assert rb.dim == 1
        assert np.allclose(np.abs(rb.basis), [[1.0], [0.0]])

    def test_identity(self):
        assert range_basis(np.eye(4)).dim == 4


class TestSubspaceIntersection:
    def test_self_intersection(self):
        p = np.diag([1.0, 0.0])
        out = subspace_intersection(p, p)
        assert out.dim == 1
        assert np.allclose(out.projection(), p)

    def test_orthogonal_ranges(self):
        out = subspace_intersection(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
        assert out.dim == 0

    def test_coordinate_overlap(self):
        out = subspace_intersection(np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 1.0, 1.0]))
        assert out.dim == 1
        assert np.allclose(out.projection(), np.diag([0.0, 1.0, 0.0]))

    def test_symmetry_and_self_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(2, 8))
            q1, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            q2, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            r1, r2 = int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1))
            p1 = q1[:, :r1] @ q1[:, :r1].conj().T
            p2 = q2[:, :r2] @ q2[:, :r2].conj().T
            ab = subspace_intersection(p1, p2)
            ba = subspace_intersection(p2, p1)
            assert operator_norm(ab.projection() - ba.projection()) <= 1e-8
            self_ = subspace_intersection(p1, p1)
            assert operator_norm(self_.projection() - p1) <= 1e-8

    def test_rejects_non_projection(self):
        with pytest.raises(NotProjection):
            subspace_intersection(np.array([[1.0, 1.0], [0.0, 0.0]]), np.eye(2))


class TestOperatorNorm:
    def test_projection_norm_is_one(self):
        assert np.isclose(operator_norm(np.diag([1.0, 0.0])), 1.0)

    def test_hand_value(self):
        assert np.isclose(operator_norm(np.array([[1.0, 1.0], [0.0, 0.0]])), np.sqrt(2))

    def test_zero(self):
        assert operator_norm(np.zeros((3, 2))) == 0.0
        assert operator_norm(np.zeros((0, 0))) == 0.0


class TestMisc:
    def test_tolerances_must_be_positive(self):
        with pytest.raises(ValueError):
            Tolerances(eq_tol=0.0)
        with pytest.raises(ValueError):
            Tolerances(spec_tol=-1e-9)
        with pytest.raises(ValueError):
            Tolerances(rank_rel_tol=0.0)

    def test_as_cmatrix_rejects_non_finite(self):
        with pytest.raises(ValueError):
            as_cmatrix(np.array([[np.nan, 0.0], [0.0, 0.0]]))

    def test_subspace_basis_validation(self):
        b = SubspaceBasis(2, np.array([[1.0], [1.0]]))
        with pytest.raises(ValueError):
            b.validate()

    def test_kernel_is_trivial(self):
        assert kernel_is_trivial(np.eye(3), 1e-8)
        assert not kernel_is_trivial(np.diag([1.0, 0.0]), 1e-8)
        assert kernel_is_trivial(np.zeros((3, 0)), 1e-8)
        assert not kernel_is_trivial(np.ones((1, 2)), 1e-8)
