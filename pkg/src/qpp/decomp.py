"""Constructive block decompositions for quasi-projection pairs.

The coupled 2x2 form of an idempotent against R(P) + N(P), the derived
2x2 forms of the range/null/matched projections, the six-subspace
simultaneous decomposition of (P, Q), its four-subspace specializations to
matched pairs, and the block form of the supplementary projection.  Every
decomposition is returned as compressed coordinate blocks together with the
orthonormal bases needed to reassemble ambient operators, and empty (k = 0)
blocks are first-class so projections flow through the same paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    is_projection,
    matched_projection,
    null_projection,
    quasi_pair_residual,
    range_projection,
)
from .errors import (
    DimensionMismatch,
    InvariantViolation,
    IsProjection,
    NotProjection,
    NotQuasiPair,
    TrivialProjection,
)
from .linalg import (
    DEFAULT_TOL,
    CMatrix,
    FnKind,
    SubspaceBasis,
    Tolerances,
    as_cmatrix,
    clamp_spectrum,
    func_calc,
    hermitize,
    kernel_is_trivial,
    operator_norm,
    projection_split,
    range_basis,
    spectral_map,
    subspace_intersection,
    svd,
)
from .supplementary import supplementary_projection


@dataclass(frozen=True)
class Canonical2x2:
    """Coupled 2x2 block data of an idempotent relative to R(P) + N(P).

    In the coordinates of (range_p, null_p) the idempotent reads
    [[A, -L U^H], [U L, U (I - A) U^H + Q0]] with L = (A^2 - A)^(1/2),
    sigma(A) outside (0, 1), U a partial isometry whose co-range is the
    closure of R(A^2 - A), and Q0 a projection with U^H Q0 = 0.
    """

    range_p: SubspaceBasis
    null_p: SubspaceBasis
    a: CMatrix
    u: CMatrix
    q0: CMatrix

    @property
    def dims(self) -> tuple[int, int]:
        return self.range_p.dim, self.null_p.dim

    def frame(self) -> CMatrix:
        return np.hstack([self.range_p.basis, self.null_p.basis])

    def coupling(self, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
        return func_calc(self.a, FnKind.ELL, tol)

    def block_matrix(self, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
        k1, k2 = self.dims
        ell = self.coupling(tol)
        blk = np.zeros((k1 + k2, k1 + k2), dtype=np.complex128)
        blk[:k1, :k1] = self.a
        blk[:k1, k1:] = -ell @ self.u.conj().T
        blk[k1:, :k1] = self.u @ ell
        blk[k1:, k1:] = self.u @ (np.eye(k1) - self.a) @ self.u.conj().T + self.q0
        return blk

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> None:
        k1, k2 = self.dims
        if self.a.shape != (k1, k1) or self.u.shape != (k2, k1) or self.q0.shape != (k2, k2):
            raise InvariantViolation("block shapes inconsistent with basis dimensions")
        self.range_p.validate(tol)
        self.null_p.validate(tol)
        lam = np.linalg.eigvalsh(hermitize(self.a))
        if lam.size and np.any((lam > tol.spec_tol) & (lam < 1 - tol.spec_tol)):
            raise InvariantViolation("sigma(A) enters the forbidden interval")
        if lam.size and np.min(lam * lam - lam) < -tol.spec_tol:
            raise InvariantViolation("A^2 - A is not positive semidefinite")
        co_range = self.u.conj().T @ self.u
        ell = self.coupling(tol)
        coupled = range_basis(ell @ ell, tol).projection()
        if operator_norm(co_range - coupled) > 100 * tol.eq_tol:
            raise InvariantViolation("co-range of U does not match closure R(A^2 - A)")
        if operator_norm(self.u.conj().T @ self.q0) > 100 * tol.eq_tol:
            raise InvariantViolation("U^H Q0 != 0")


@dataclass(frozen=True)
class RangeNullBlocks:
    """2x2 block data of the range and null projections of an idempotent.

    B = A (2A - I)^(-1) is a positive contraction, U1 = U f(A) a partial
    isometry, and Q1 = I - U1 U1^H - Q0 the leftover projection with
    U1^H Q1 = 0.
    """

    b: CMatrix
    u1: CMatrix
    q0: CMatrix
    q1: CMatrix


@dataclass(frozen=True)
class SixSpace:
    """Simultaneous block decomposition data of a quasi-projection pair.

    h1..h4 are the pairwise intersections of ranges/kernels, h5/h6 the two
    coupling subspaces; a acts on h5 coordinates and u maps h5 to h6
    coordinates unitarily.  P reads I + I + 0 + 0 + I + 0 in the stacked
    basis, and Q is diagonal outside the coupled (h5, h6) block.
    """

    h1: SubspaceBasis
    h2: SubspaceBasis
    h3: SubspaceBasis
    h4: SubspaceBasis
    h5: SubspaceBasis
    h6: SubspaceBasis

    a: CMatrix
    u: CMatrix

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.dim for b in (self.h1, self.h2, self.h3, self.h4, self.h5, self.h6))

    def bases(self) -> tuple[SubspaceBasis, ...]:
        return (self.h1, self.h2, self.h3, self.h4, self.h5, self.h6)

    def frame(self) -> CMatrix:
        return np.hstack([b.basis for b in self.bases()])

    def coupled_frame(self) -> CMatrix:
        return np.hstack([self.h5.basis, self.h6.basis])

    def coupled_q_block(self, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
        k = self.h5.dim
        ell = func_calc(self.a, FnKind.ELL, tol)
        blk = np.zeros((2 * k, 2 * k), dtype=np.complex128)
        blk[:k, :k] = self.a
        blk[:k, k:] = -ell @ self.u.conj().T
        blk[k:, :k] = self.u @ ell
        blk[k:, k:] = self.u @ (np.eye(k) - self.a) @ self.u.conj().T
        return blk

    def assemble_p(self) -> CMatrix:
        return hermitize(
            self.h1.projection() + self.h2.projection() + self.h5.projection()
        )

    def assemble_q(self, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
        out = self.h1.projection() + self.h3.projection()
        cf = self.coupled_frame()
        return out + cf @ self.coupled_q_block(tol) @ cf.conj().T

    def orthogonality_residual(self) -> float:
        f = self.frame()
        return operator_norm(f.conj().T @ f - np.eye(f.shape[1]))


@dataclass(frozen=True)
class UnitarityCriteria:
    """The four equivalent characterizations of a unitary coupling factor."""

    a_kernels_trivial_and_ustar: bool
    coupling_kernel_trivial_and_ustar: bool
    u_unitary: bool
    a_kernels_trivial_and_q22: bool

    def as_tuple(self) -> tuple[bool, bool, bool, bool]:
        return (
            self.a_kernels_trivial_and_ustar,
            self.coupling_kernel_trivial_and_ustar,
            self.u_unitary,
            self.a_kernels_trivial_and_q22,
        )

    def all_agree(self) -> bool:
        return len(set(self.as_tuple())) == 1


def canonical_2x2(p: CMatrix, q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> Canonical2x2:
    """Extract the coupled 2x2 data of Q relative to a non-trivial projection P.

    A is the compression of Q to R(P); the lower-left block factors through
    a polar decomposition as U (A^2 - A)^(1/2); Q0 collects the part of the
    lower-right block orthogonal to R(U).  Raises TrivialProjection,
    NotQuasiPair, or SpectrumViolation (when Q is numerically far from an
    exact idempotent).
    """
    p = as_cmatrix(p)
    q = as_cmatrix(q)
    if not is_projection(p, tol):
        raise NotProjection("P fails the projection residual test")
    n = p.shape[0]
    v1, v2 = projection_split(p, tol)
    if v1.dim == 0 or v1.dim == n:
        raise TrivialProjection("P must differ from 0 and I")
    if quasi_pair_residual(p, q) > tol.eq_tol * (1 + operator_norm(q)):
        raise NotQuasiPair("(P, Q) fails the pairing identity")

    a = hermitize(v1.basis.conj().T @ q @ v1.basis)
    q21 = v2.basis.conj().T @ q @ v1.basis
    q22 = hermitize(v2.basis.conj().T @ q @ v2.basis)
    # rank of the coupling is decided by the clamped spectrum of A (|Q21| =
    # (A^2 - A)^(1/2) exactly), not by relative truncation of Q21 itself,
    # which would keep noise directions whenever Q21 is essentially zero
    lam = clamp_spectrum(np.linalg.eigvalsh(a), tol)
    r_ell = int(np.sum((lam != 0.0) & (lam != 1.0)))
    uu, _, vv = svd(q21, tol)
    u = uu[:, :r_ell] @ vv[:, :r_ell].conj().T
    q0 = hermitize((np.eye(v2.dim) - u @ u.conj().T) @ q22)
    return Canonical2x2(range_p=v1, null_p=v2, a=a, u=u, q0=q0)


def assemble_canonical(c: Canonical2x2, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """Rebuild the ambient idempotent encoded by coupled 2x2 data."""
    c.validate(tol)
    f = c.frame()
    return f @ c.block_matrix(tol) @ f.conj().T


def _contraction(a: CMatrix, tol: Tolerances) -> CMatrix:
    """B = A (2A - I)^(-1) through the spectral map t -> t / (2t - 1)."""
    return spectral_map(a, lambda t: t / (2 * t - 1), tol, clamp=True)


def range_null_blocks(c: Canonical2x2, tol: Tolerances = DEFAULT_TOL) -> RangeNullBlocks:
    """Block data of the range and null projections derived from 2x2 data."""
    c.validate(tol)
    k2 = c.null_p.dim
    b = _contraction(c.a, tol)
    u1 = c.u @ func_calc(c.a, FnKind.F, tol)
    q1 = hermitize(np.eye(k2) - u1 @ u1.conj().T - c.q0)
    return RangeNullBlocks(b=b, u1=u1, q0=c.q0, q1=q1)


def assemble_range_null(
    c: Canonical2x2, blocks: RangeNullBlocks, tol: Tolerances = DEFAULT_TOL
):
    """Ambient (range, null) projections reassembled from their block data."""
    k1, k2 = c.dims
    eye1 = np.eye(k1)
    root = spectral_map(blocks.b, lambda t: np.sqrt(max(t, 0.0) * max(1 - t, 0.0)), tol)

    def build(top, corner):
        blk = np.zeros((k1 + k2, k1 + k2), dtype=np.complex128)
        blk[:k1, :k1] = top
        blk[:k1, k1:] = root @ blocks.u1.conj().T
        blk[k1:, :k1] = blocks.u1 @ root
        blk[k1:, k1:] = corner
        return blk

    rng = build(blocks.b, blocks.u1 @ (eye1 - blocks.b) @ blocks.u1.conj().T + blocks.q0)
    nul = build(eye1 - blocks.b, blocks.u1 @ blocks.b @ blocks.u1.conj().T + blocks.q1)
    f = c.frame()
    return (
        hermitize(f @ rng @ f.conj().T),
        hermitize(f @ nul @ f.conj().T),
    )


def matched_block(c: Canonical2x2, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """Ambient matched projection from 2x2 data: diag((I+f(A))/2, U(I-f(A))U^H/2 + Q0)."""
    k1, k2 = c.dims
    fa = func_calc(c.a, FnKind.F, tol)
    blk = np.zeros((k1 + k2, k1 + k2), dtype=np.complex128)
    blk[:k1, :k1] = (np.eye(k1) + fa) / 2
    blk[k1:, k1:] = c.u @ ((np.eye(k1) - fa) / 2) @ c.u.conj().T + c.q0
    f = c.frame()
    return hermitize(f @ blk @ f.conj().T)


def _coupling_factors(q: CMatrix, h5: SubspaceBasis, h6: SubspaceBasis, tol: Tolerances):
    """(A, U) on the coupled pair of subspaces; U is the full unitary polar
    factor of the lower-left compression (its kernel is trivial there)."""
    a = hermitize(h5.basis.conj().T @ q @ h5.basis)
    q21 = h6.basis.conj().T @ q @ h5.basis
    w, _, v = svd(q21, tol)
    u = w @ v.conj().T
    return a, u


def halmos_6x6(p: CMatrix, q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> SixSpace:
    """Simultaneous six-subspace decomposition of a quasi-projection pair.

    h1..h4 come from intersections of R(P)/N(P) with R(Q)/N(Q); h5/h6 are
    the ranges of the coupling products PQ(I-P) and (I-P)QP.  The coupling
    factor U is unitary and h5 is empty exactly when Q is Hermitian.
    """
    p = as_cmatrix(p)
    q = as_cmatrix(q)
    if not is_projection(p, tol):
        raise NotProjection("P fails the projection residual test")
    if quasi_pair_residual(p, q) > tol.eq_tol * (1 + operator_norm(q)):
        raise NotQuasiPair("(P, Q) fails the pairing identity")
    n = p.shape[0]
    eye = np.eye(n)
    pr = range_projection(q, tol)
    pn = null_projection(q, tol)
    h1 = subspace_intersection(p, pr, tol)
    h2 = subspace_intersection(p, pn, tol)
    h3 = subspace_intersection(eye - p, pr, tol)
    h4 = subspace_intersection(eye - p, pn, tol)
    floor = tol.eq_tol * (1 + operator_norm(q))
    h5 = range_basis(p @ q @ (eye - p), tol, floor=floor)
    h6 = range_basis((eye - p) @ q @ p, tol, floor=floor)

    total = h1.dim + h2.dim + h3.dim + h4.dim + h5.dim + h6.dim
    if total != n:
        rank_p = range_basis(p, tol).dim
        if rank_p in (0, n):
            side = "zero" if rank_p == 0 else "identity"
            raise TrivialProjection(f"P is the {side} projection; subspaces do not split H")
        raise DimensionMismatch(f"subspace dimensions sum to {total}, ambient is {n}")
    if h5.dim != h6.dim:
        raise DimensionMismatch(f"coupling subspaces differ: {h5.dim} vs {h6.dim}")

    a, u = _coupling_factors(q, h5, h6, tol)
    return SixSpace(h1=h1, h2=h2, h3=h3, h4=h4, h5=h5, h6=h6, a=a, u=u)


def matched_4x4(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> SixSpace:
    """Six-subspace decomposition of (m(Q), Q) for a non-projection idempotent.

    The two mixed intersections are empty and A dominates the identity on
    the coupling subspace with trivial kernel of A - I.
    """
    q = as_cmatrix(q)
    if operator_norm(q) <= 1 + tol.spec_tol:
        raise IsProjection("matched 4x4 form needs a non-projection idempotent")
    m = matched_projection(q, tol)
    six = halmos_6x6(m, q, tol)
    if six.h2.dim or six.h3.dim:
        raise InvariantViolation("mixed intersections must vanish for a matched pair")
    lam = np.linalg.eigvalsh(hermitize(six.a))
    if lam.size and lam[0] < 1 - tol.spec_tol:
        raise InvariantViolation(f"coupling block has eigenvalue {lam[0]:.6g} below 1")
    if lam.size and lam[0] - 1.0 <= 0.0:
        raise InvariantViolation("A - I has a numerically nontrivial kernel")
    return six


@dataclass(frozen=True)
class RangeNullFourBlocks:
    """Four-subspace block forms of the range/null projections of Q."""

    space: SixSpace
    b: CMatrix
    range_block: CMatrix
    null_block: CMatrix
    range_ambient: CMatrix
    null_ambient: CMatrix


def matched_range_null_4x4(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> RangeNullFourBlocks:
    """Range/null projections of Q through the matched-pair decomposition."""
    six = matched_4x4(q, tol)
    k = six.h5.dim
    eye_k = np.eye(k)
    b = _contraction(six.a, tol)
    root = spectral_map(b, lambda t: np.sqrt(max(t, 0.0) * max(1 - t, 0.0)), tol)

    def build(top, corner):
        blk = np.zeros((2 * k, 2 * k), dtype=np.complex128)
        blk[:k, :k] = top
        blk[:k, k:] = root @ six.u.conj().T
        blk[k:, :k] = six.u @ root
        blk[k:, k:] = corner
        return blk

    range_block = build(b, six.u @ (eye_k - b) @ six.u.conj().T)
    null_block = build(eye_k - b, six.u @ b @ six.u.conj().T)
    cf = six.coupled_frame()
    range_ambient = hermitize(six.h1.projection() + cf @ range_block @ cf.conj().T)
    null_ambient = hermitize(six.h4.projection() + cf @ null_block @ cf.conj().T)
    return RangeNullFourBlocks(
        space=six,
        b=b,
        range_block=range_block,
        null_block=null_block,
        range_ambient=range_ambient,
        null_ambient=null_ambient,
    )


def supplementary_4x4(q: CMatrix, tol: Tolerances = DEFAULT_TOL):
    """(S, ambient s(Q)) via the matched-pair decomposition, S = (2A - I)^(-2).

    The ambient assembly must reproduce the supplementary projection
    computed directly; the cross-check is the caller's (see the test and
    verification suites).
    """
    six = matched_4x4(q, tol)
    k = six.h5.dim
    s = spectral_map(six.a, lambda t: 1.0 / (2 * t - 1) ** 2, tol, clamp=True)
    root = spectral_map(s, lambda t: np.sqrt(max(t, 0.0) * max(1 - t, 0.0)), tol)
    blk = np.zeros((2 * k, 2 * k), dtype=np.complex128)
    blk[:k, :k] = s
    blk[:k, k:] = root @ six.u.conj().T
    blk[k:, :k] = six.u @ root
    blk[k:, k:] = six.u @ (np.eye(k) - s) @ six.u.conj().T
    cf = six.coupled_frame()
    ambient = hermitize(six.h1.projection() + cf @ blk @ cf.conj().T)
    return s, ambient


def unitarity_criteria(c: Canonical2x2, tol: Tolerances = DEFAULT_TOL) -> UnitarityCriteria:
    """Evaluate the four equivalent unitarity conditions on 2x2 data."""
    k1, k2 = c.dims
    eye1 = np.eye(k1)
    eye2 = np.eye(k2)
    thr = tol.spec_tol
    a_kernels = kernel_is_trivial(c.a, thr) and kernel_is_trivial(eye1 - c.a, thr)
    ustar = kernel_is_trivial(c.u.conj().T, thr)
    coupling = kernel_is_trivial(c.a @ c.a - c.a, thr)
    q22 = c.u @ (eye1 - c.a) @ c.u.conj().T + c.q0
    unitary = (
        k1 == k2
        and operator_norm(c.u.conj().T @ c.u - eye1) <= thr
        and operator_norm(c.u @ c.u.conj().T - eye2) <= thr
    )
    return UnitarityCriteria(
        a_kernels_trivial_and_ustar=a_kernels and ustar,
        coupling_kernel_trivial_and_ustar=coupling and ustar,
        u_unitary=unitary,
        a_kernels_trivial_and_q22=(
            a_kernels
            and kernel_is_trivial(q22, thr)
            and kernel_is_trivial(eye2 - q22, thr)
        ),
    )


def supplementary_4x4_crosscheck(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> float:
    """Residual between the block route and the direct supplementary projection."""
    _, ambient = supplementary_4x4(q, tol)
    return operator_norm(ambient - supplementary_projection(q, tol))
