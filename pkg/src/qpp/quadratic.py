"""Canonical forms of quadratic operators.

An operator annihilated by a monic degree-<=2 polynomial is unitarily
equivalent to a*I + b*I + [[a*I, B], [0, b*I]] with B Hermitian positive
and injective.  Idempotents (a, b) = (1, 0) and square-zero operators
(a = b = 0) are the two primitive cases; the general case reduces to them
by an affine substitution plus a diagonal phase twist.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import is_idempotent, is_projection
from .decomp import matched_4x4
from .errors import InvariantViolation, NotIdempotent, NotQuadratic, NotSquareZero
from .linalg import (
    DEFAULT_TOL,
    CMatrix,
    FnKind,
    Tolerances,
    as_cmatrix,
    func_calc,
    hermitian_eig,
    hermitize,
    operator_norm,
    projection_split,
    range_basis,
    spectral_map,
)


@dataclass(frozen=True)
class QuadraticCanonicalForm:
    """Unitary reduction data: W T W^H = a*I_k1 + b*I_k2 + [[a*I, B], [0, b*I]].

    B is k3 x k3 Hermitian PSD with numerically trivial kernel (near-kernel
    directions are reassigned to the uncoupled blocks).
    """

    a: complex
    b: complex
    dims: tuple[int, int, int]
    w: CMatrix
    b_block: CMatrix

    @property
    def ambient_dim(self) -> int:
        k1, k2, k3 = self.dims
        return k1 + k2 + 2 * k3

    def canonical_matrix(self) -> CMatrix:
        k1, k2, k3 = self.dims
        n = self.ambient_dim
        out = np.zeros((n, n), dtype=np.complex128)
        out[:k1, :k1] = self.a * np.eye(k1)
        out[k1 : k1 + k2, k1 : k1 + k2] = self.b * np.eye(k2)
        lo = k1 + k2
        out[lo : lo + k3, lo : lo + k3] = self.a * np.eye(k3)
        out[lo : lo + k3, lo + k3 :] = self.b_block
        out[lo + k3 :, lo + k3 :] = self.b * np.eye(k3)
        return out

    def unitarity_residual(self) -> float:
        n = self.ambient_dim
        return max(
            operator_norm(self.w @ self.w.conj().T - np.eye(n)),
            operator_norm(self.w.conj().T @ self.w - np.eye(n)),
        )

    def reassembly_residual(self, t: CMatrix) -> float:
        return operator_norm(self.w @ as_cmatrix(t) @ self.w.conj().T - self.canonical_matrix())

    def validate(self, t: CMatrix, tol: Tolerances = DEFAULT_TOL) -> None:
        k3 = self.dims[2]
        if self.b_block.shape != (k3, k3):
            raise InvariantViolation("B block has the wrong shape")
        if self.unitarity_residual() > 100 * tol.eq_tol:
            raise InvariantViolation("W is not unitary")
        scale = 1 + operator_norm(t)
        if self.reassembly_residual(t) > 100 * tol.eq_tol * scale:
            raise InvariantViolation("canonical form does not reproduce the input")
        if k3:
            lam = np.linalg.eigvalsh(hermitize(self.b_block))
            if lam[0] <= 0:
                raise InvariantViolation("B must be positive with trivial kernel")


def _diagonalize_coupling(w: CMatrix, dims, b_block: CMatrix, tol: Tolerances):
    """Rotate the two coupled copies so B becomes diagonal with descending
    entries, then migrate near-kernel directions of B into the uncoupled
    blocks (a [[1, 0], [0, 0]] sub-block is just one a-direction plus one
    b-direction)."""
    k1, k2, k3 = dims
    if k3 == 0:
        return w, dims, b_block
    lam, v = hermitian_eig(b_block, tol)
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    v = v[:, order]
    n = w.shape[0]
    rot = np.eye(n, dtype=np.complex128)
    lo = k1 + k2
    rot[lo : lo + k3, lo : lo + k3] = v.conj().T
    rot[lo + k3 :, lo + k3 :] = v.conj().T
    w = rot @ w
    cutoff = tol.rank_cutoff((k3, k3)) * max(lam[0], 1.0)
    keep = lam > cutoff
    k_keep = int(np.sum(keep))
    if k_keep == k3:
        return w, dims, np.diag(lam)
    # rows of W: [k1 | k2 | k3 (a-copy) | k3 (b-copy)]; dropped coupling
    # directions contribute one pure-a row and one pure-b row each
    drop = ~keep
    a_rows = np.vstack([w[:k1], w[lo : lo + k3][drop]])
    b_rows = np.vstack([w[k1:lo], w[lo + k3 :][drop]])
    coupled_a = w[lo : lo + k3][keep]
    coupled_b = w[lo + k3 :][keep]
    new_w = np.vstack([a_rows, b_rows, coupled_a, coupled_b])
    new_dims = (k1 + k3 - k_keep, k2 + k3 - k_keep, k_keep)
    return new_w, new_dims, np.diag(lam[keep])


def idempotent_canonical(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> QuadraticCanonicalForm:
    """Canonical form of an idempotent: W Q W^H = I_k1 + 0_k2 + [[I, B], [0, 0]].

    Projections split directly into range and kernel (k3 = 0); otherwise the
    matched-pair decomposition supplies the four subspaces and the coupled
    block is straightened by the sign-split symmetry, giving B = 2(A^2-A)^(1/2).
    """
    q = as_cmatrix(q)
    if not is_idempotent(q, tol):
        raise NotIdempotent("input fails the idempotency residual test")
    n = q.shape[0]
    if is_projection(q, tol):
        rng, ker = projection_split(hermitize(q), tol)
        w = np.vstack([rng.basis.conj().T, ker.basis.conj().T])
        form = QuadraticCanonicalForm(
            a=1.0 + 0j,
            b=0.0 + 0j,
            dims=(rng.dim, ker.dim, 0),
            w=w,
            b_block=np.zeros((0, 0), dtype=np.complex128),
        )
        form.validate(q, tol)
        return form

    six = matched_4x4(q, tol)
    k = six.h5.dim
    a = six.a
    ell = func_calc(a, FnKind.ELL, tol)
    ga = func_calc(a, FnKind.G, tol)
    ha = func_calc(a, FnKind.H, tol)
    scale = spectral_map(a, lambda t: 1.0 / np.sqrt(abs(2 * t - 1)), tol, clamp=True)
    # self-adjoint unitary straightening the coupled involution:
    # |2A - I|^(-1/2) [[g(A), -h(A)], [-h(A), -g(A)]]
    u0 = np.zeros((2 * k, 2 * k), dtype=np.complex128)
    u0[:k, :k] = scale @ ga
    u0[:k, k:] = -scale @ ha
    u0[k:, :k] = -scale @ ha
    u0[k:, k:] = -scale @ ga

    # coordinates: rows of W map ambient H to K1 + K2 + K3 + K3
    utilde = np.zeros((2 * k, 2 * k), dtype=np.complex128)
    utilde[:k, :k] = np.eye(k)
    utilde[k:, k:] = six.u
    coupled_rows = u0.conj().T @ utilde.conj().T @ six.coupled_frame().conj().T
    w = np.vstack([six.h1.basis.conj().T, six.h4.basis.conj().T, coupled_rows])
    b_block = 2 * ell
    w, dims, b_block = _diagonalize_coupling(w, (six.h1.dim, six.h4.dim, k), b_block, tol)
    form = QuadraticCanonicalForm(a=1.0 + 0j, b=0.0 + 0j, dims=dims, w=w, b_block=b_block)
    form.validate(q, tol)
    return form


def square_zero_canonical(s: CMatrix, tol: Tolerances = DEFAULT_TOL) -> QuadraticCanonicalForm:
    """Canonical form of a square-zero operator: W S W^H = 0 + 0 + [[0, B], [0, 0]].

    Adds the projection onto the closure of R(S) to obtain an idempotent,
    reduces that, and subtracts the projection back in canonical coordinates.
    """
    s = as_cmatrix(s)
    if operator_norm(s @ s) > tol.eq_tol * (1 + operator_norm(s) ** 2):
        raise NotSquareZero("input fails the square-zero residual test")
    p = range_basis(s, tol, floor=tol.eq_tol * (1 + operator_norm(s))).projection()
    q = p + s
    form_q = idempotent_canonical(q, tol)
    form = QuadraticCanonicalForm(
        a=0.0 + 0j, b=0.0 + 0j, dims=form_q.dims, w=form_q.w, b_block=form_q.b_block
    )
    # the added projection must occupy exactly the a-labelled coordinates
    k1, k2, k3 = form.dims
    n = form.ambient_dim
    p_target = np.zeros((n, n), dtype=np.complex128)
    p_target[:k1, :k1] = np.eye(k1)
    lo = k1 + k2
    p_target[lo : lo + k3, lo : lo + k3] = np.eye(k3)
    if operator_norm(form.w @ p @ form.w.conj().T - p_target) > 100 * tol.eq_tol * (
        1 + operator_norm(s)
    ):
        raise InvariantViolation("range projection does not align with the a-blocks")
    form.validate(s, tol)
    return form


def quadratic_canonical(
    t: CMatrix, a: complex, b: complex, tol: Tolerances = DEFAULT_TOL
) -> QuadraticCanonicalForm:
    """Canonical form of T with (T - aI)(T - bI) = 0.

    Roots are ordered by real part then imaginary part (swapping them
    transposes the coupled block, so the order is normative).  Nearly equal
    roots route through the square-zero reduction at their midpoint; distinct
    roots reduce to an idempotent, and the phase of a - b is absorbed into a
    diagonal twist so B stays positive.
    """
    t = as_cmatrix(t)
    a = complex(a)
    b = complex(b)
    if (b.real, b.imag) < (a.real, a.imag):
        a, b = b, a
    n = t.shape[0]
    eye = np.eye(n)
    scale = (1 + operator_norm(t) + max(abs(a), abs(b))) ** 2
    if operator_norm((t - a * eye) @ (t - b * eye)) > tol.eq_tol * scale:
        raise NotQuadratic("no degree-2 annihilation at the given roots")

    if abs(a - b) < tol.spec_tol * (1 + abs(a) + abs(b)):
        mid = (a + b) / 2
        form_s = square_zero_canonical(t - mid * eye, tol)
        form = QuadraticCanonicalForm(
            a=mid, b=mid, dims=form_s.dims, w=form_s.w, b_block=form_s.b_block
        )
        form.validate(t, tol)
        return form

    q = (t - b * eye) / (a - b)
    form_q = idempotent_canonical(q, tol)
    theta = np.angle(a - b)
    k1, k2, k3 = form_q.dims
    twist = np.ones(form_q.ambient_dim, dtype=np.complex128)
    twist[k1 + k2 + k3 :] = np.exp(1j * theta)
    w = twist[:, None] * form_q.w
    form = QuadraticCanonicalForm(
        a=a, b=b, dims=form_q.dims, w=w, b_block=abs(a - b) * form_q.b_block
    )
    form.validate(t, tol)
    return form


def detect_quadratic(t: CMatrix, tol: Tolerances = DEFAULT_TOL) -> tuple[complex, complex]:
    """Roots of the minimal monic annihilating polynomial of degree <= 2.

    Degree one is preferred when it already annihilates (the root is then
    reported twice); otherwise the least-squares fit of T^2 in span{T, I}
    supplies the candidate coefficients.  Roots come back ordered by real
    part, then imaginary part.
    """
    t = as_cmatrix(t)
    n = t.shape[0]
    eye = np.eye(n)
    norm_t = operator_norm(t)

    c = complex(np.trace(t) / n)
    if operator_norm(t - c * eye) <= tol.eq_tol * (1 + norm_t):
        return (c, c)

    t2 = t @ t
    basis = np.stack([t.ravel(), eye.ravel()], axis=1)
    coeffs, *_ = np.linalg.lstsq(basis, -t2.ravel(), rcond=None)
    p, q = complex(coeffs[0]), complex(coeffs[1])
    roots = np.roots([1.0, p, q])
    a, b = sorted((complex(roots[0]), complex(roots[1])), key=lambda z: (z.real, z.imag))
    scale = (1 + norm_t + max(abs(a), abs(b))) ** 2
    if operator_norm((t - a * eye) @ (t - b * eye)) > tol.eq_tol * scale:
        raise NotQuadratic("residual exceeds tolerance for every degree <= 2 candidate")
    return (a, b)
