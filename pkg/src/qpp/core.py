"""Idempotents, quasi-projection pairs, and their canonical projections.

Predicates, the range/null/matched projections of an idempotent, the
absolute value |Q*| and its pseudo-inverse (with dual-route cross-checks),
the Afriat and Ando reconstructions, and the norm identities attached to
quasi-projection pairs and matched pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CrossCheckFailure,
    DegenerateSplit,
    IllConditioned,
    IsProjection,
    NotIdempotent,
    NotProjection,
    NotQuasiPair,
)
from .linalg import (
    DEFAULT_TOL,
    CMatrix,
    Tolerances,
    as_cmatrix,
    herm_sqrt,
    herm_sqrt_truncated,
    hermitize,
    numerical_rank,
    operator_norm,
    range_basis,
    svd,
)


def idempotency_residual(q: CMatrix) -> float:
    q = as_cmatrix(q)
    return operator_norm(q @ q - q)


def is_idempotent(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> bool:
    q = as_cmatrix(q)
    return idempotency_residual(q) <= tol.eq_tol * (1 + operator_norm(q) ** 2)


def is_projection(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> bool:
    q = as_cmatrix(q)
    if not is_idempotent(q, tol):
        return False
    return operator_norm(q - q.conj().T) <= tol.eq_tol * (1 + operator_norm(q))


def quasi_pair_residual(p: CMatrix, q: CMatrix) -> float:
    """Defect of the pairing identity Q^H = (2P - I)Q(2P - I)."""
    p = as_cmatrix(p)
    q = as_cmatrix(q)
    s = 2 * p - np.eye(p.shape[0])
    return operator_norm(q.conj().T - s @ q @ s)


def is_quasi_pair(p: CMatrix, q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether (P, Q) is a quasi-projection pair.

    Raises NotProjection / NotIdempotent when the inputs fail their own
    structural tests; the pairing identity itself is reported as a boolean.
    """
    if not is_projection(p, tol):
        raise NotProjection("P fails the projection residual test")
    if not is_idempotent(q, tol):
        raise NotIdempotent("Q fails the idempotency residual test")
    return quasi_pair_residual(p, q) <= tol.eq_tol * (1 + operator_norm(q))


def require_quasi_pair(p: CMatrix, q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> None:
    if not is_quasi_pair(p, q, tol):
        raise NotQuasiPair("pairing identity residual exceeds tolerance")


@dataclass(frozen=True)
class QuasiPair:
    """A validated (projection, idempotent) pair satisfying the pairing identity."""

    p: CMatrix
    q: CMatrix
    dim: int

    @classmethod
    def checked(cls, p: CMatrix, q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> "QuasiPair":
        p = as_cmatrix(p)
        q = as_cmatrix(q)
        require_quasi_pair(p, q, tol)
        return cls(p=p, q=q, dim=p.shape[0])


@dataclass(frozen=True)
class DefectOperators:
    """The four coupling products of a pair of idempotents."""

    t1: CMatrix  # P(I - Q)
    t2: CMatrix  # (I - P)Q
    t3: CMatrix  # PQ(I - P)
    t4: CMatrix  # (I - P)QP


def defect_operators(p: CMatrix, q: CMatrix) -> DefectOperators:
    p = as_cmatrix(p)
    q = as_cmatrix(q)
    if p.shape != q.shape:
        raise ValueError("P and Q must have equal shapes")
    eye = np.eye(p.shape[0])
    return DefectOperators(
        t1=p @ (eye - q),
        t2=(eye - p) @ q,
        t3=p @ q @ (eye - p),
        t4=(eye - p) @ q @ p,
    )


def _guarded_inverse(m: CMatrix, tol: Tolerances, what: str) -> CMatrix:
    """Dense inverse with a smallest-singular-value guard, no regularization."""
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[-1] <= tol.eq_tol:
        raise IllConditioned(f"{what} is numerically singular (smallest sv {0 if s.size == 0 else s[-1]:.3g})")
    return np.linalg.inv(m)


def range_projection(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """Orthogonal projection onto R(Q) for an idempotent Q: Q(Q + Q^H - I)^(-1)."""
    q = as_cmatrix(q)
    inv = _guarded_inverse(q + q.conj().T - np.eye(q.shape[0]), tol, "Q + Q^H - I")
    return hermitize(q @ inv)


def null_projection(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """Orthogonal projection onto N(Q) for an idempotent Q: (Q - I)(Q + Q^H - I)^(-1)."""
    q = as_cmatrix(q)
    inv = _guarded_inverse(q + q.conj().T - np.eye(q.shape[0]), tol, "Q + Q^H - I")
    return hermitize((q - np.eye(q.shape[0])) @ inv)


def _abs_qstar_pair(q: CMatrix, tol: Tolerances):
    """(|Q^*|, |Q^*|^+) from one SVD of Q.

    Working with the singular values of Q directly (|Q^*| = U diag(s) U^H)
    sidesteps the sqrt(eps)-level noise that squaring into QQ^H would put on
    the zero part of the spectrum before inversion.  Idempotents have no
    singular values in (0, 1), so the absolute floor eq_tol * (1 + s_max)
    cannot drop true rank but does discard product roundoff.
    """
    u, s, _ = svd(q, tol)
    floor = tol.eq_tol * (1 + float(s[0])) if s.size else 0.0
    r = numerical_rank(s, q.shape, tol, floor=floor)
    absq = hermitize((u * s) @ u.conj().T)
    if r == 0:
        return absq, np.zeros_like(absq)
    pinv = hermitize((u[:, :r] / s[:r]) @ u[:, :r].conj().T)
    return absq, pinv


def abs_qstar(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """|Q^*| = (QQ^H)^(1/2), computed from the SVD of Q."""
    q = as_cmatrix(q)
    return _abs_qstar_pair(q, tol)[0]


def abs_qstar_pinv(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """Pseudo-inverse of |Q^*| by two independent routes, cross-checked.

    Route one inverts the singular values of Q directly; route two evaluates
    the closed form (P_R(Q) P_R(Q^H) P_R(Q))^(1/2).  Disagreement beyond
    10x eq_tol raises CrossCheckFailure; the SVD route is returned.
    """
    q = as_cmatrix(q)
    via_svd = _abs_qstar_pair(q, tol)[1]
    pr = range_projection(q, tol)
    pr_adj = range_projection(q.conj().T, tol)
    closed = herm_sqrt_truncated(hermitize(pr @ pr_adj @ pr), tol)
    gap = operator_norm(via_svd - closed)
    if gap > 10 * tol.eq_tol:
        raise CrossCheckFailure(
            f"|Q^*| pseudo-inverse routes disagree by {gap:.3g}"
        )
    return via_svd


def abs_qstar_via_matched(q: CMatrix, mq: CMatrix, tol: Tolerances = DEFAULT_TOL):
    """|Q^*| and its pseudo-inverse from the matched projection.

    |Q^*| = Q(2 m(Q) - I) and |Q^*|^+ = |Q^*| (Q + Q^H - I)^(-2).
    """
    q = as_cmatrix(q)
    mq = as_cmatrix(mq)
    eye = np.eye(q.shape[0])
    absq = hermitize(q @ (2 * mq - eye))
    inv = _guarded_inverse(q + q.conj().T - eye, tol, "Q + Q^H - I")
    pinv = hermitize(absq @ inv @ inv)
    return absq, pinv


def matched_projection(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """The projection matched to an idempotent Q.

    m(Q) = (1/2)(|Q^*| + Q^H) |Q^*|^+ (|Q^*| + I)^(-1) (|Q^*| + Q); it is the
    unique projection forming a quasi-projection pair with Q through the
    closed formula, and satisfies m(Q^H) = m(Q) and m(I - Q) = I - m(Q).
    """
    q = as_cmatrix(q)
    eye = np.eye(q.shape[0])
    absq, pinv = _abs_qstar_pair(q, tol)
    mid = np.linalg.solve(absq + eye, absq + q)
    return hermitize(0.5 * (absq + q.conj().T) @ pinv @ mid)


def matched_via_block(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """Matched projection through the coupled 2x2 form over R(Q) + R(Q)^perp.

    Writes Q as [[I, A], [0, 0]] against orthonormal bases of R(Q) and
    N(Q^H), applies the block formula with B = (AA^H + I)^(1/2), and
    conjugates back.  Projections short-circuit to Q itself.
    """
    q = as_cmatrix(q)
    if is_projection(q, tol):
        return hermitize(q)
    n = q.shape[0]
    floor = tol.eq_tol * (1 + operator_norm(q))
    v1 = range_basis(q, tol, floor=floor).basis
    v2 = range_basis(np.eye(n) - q.conj().T, tol, floor=floor).basis
    k1, k2 = v1.shape[1], v2.shape[1]
    if k1 + k2 != n:
        raise DegenerateSplit(f"dim R(Q) + dim N(Q^H) = {k1}+{k2} != {n}")
    a = v1.conj().T @ q @ v2
    b = herm_sqrt(a @ a.conj().T + np.eye(k1), tol)
    binv = np.linalg.inv(b)
    bbi_inv = np.linalg.inv(b @ (b + np.eye(k1)))
    top_left = (b + np.eye(k1)) @ binv
    blk = 0.5 * np.block(
        [
            [top_left, binv @ a],
            [a.conj().T @ binv, a.conj().T @ bbi_inv @ a],
        ]
    )
    frame = np.hstack([v1, v2])
    return hermitize(frame @ blk @ frame.conj().T)


def afriat_reconstruct(pr: CMatrix, pn: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """Idempotent with range R(pr) and null space R(pn).

    Q = (I - pr pn)^(-1) pr (I - pr pn); requires the two ranges to meet
    only at zero so that I - pr pn is invertible.
    """
    pr = as_cmatrix(pr)
    pn = as_cmatrix(pn)
    for p, name in ((pr, "range factor"), (pn, "null factor")):
        if not is_projection(p, tol):
            raise NotProjection(f"{name} fails the projection residual test")
    eye = np.eye(pr.shape[0])
    mixer = eye - pr @ pn
    inv = _guarded_inverse(mixer, tol, "I - P_R P_N")
    return inv @ pr @ mixer


def ando_reconstruct(
    pr: CMatrix, pn: CMatrix, lam: complex, tol: Tolerances = DEFAULT_TOL
) -> CMatrix:
    """Idempotent from its range/null projections: Q = pr (pr + lam*pn)^(-1)."""
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    pr = as_cmatrix(pr)
    pn = as_cmatrix(pn)
    for p, name in ((pr, "range factor"), (pn, "null factor")):
        if not is_projection(p, tol):
            raise NotProjection(f"{name} fails the projection residual test")
    inv = _guarded_inverse(pr + lam * pn, tol, "P_R + lambda P_N")
    return pr @ inv


@dataclass(frozen=True)
class NormReport:
    """Norm data attached to a quasi-projection pair.

    norm_PQ_diff = ||P - Q||, norm_sq_diff = ||(P - Q)^2||,
    norm_T1 = ||P(I - Q)||, norm_T2 = ||(I - P)Q||.  kkm_holds records
    whether the exact two-projection norm equality is met.  M is the
    coupling-block quantity ||(A - I)^2 + (A^2 - A)||^(1/2) and is present
    only when a decomposition-backed value is available.
    """

    norm_PQ_diff: float
    norm_sq_diff: float
    norm_T1: float
    norm_T2: float
    kkm_holds: bool
    M: float | None = None


def kkm_equality_residual(p: CMatrix, q: CMatrix) -> float:
    """|  ||P-Q|| - max(||P(I-Q)||, ||(I-P)Q||)  | for two projections."""
    p = as_cmatrix(p)
    q = as_cmatrix(q)
    eye = np.eye(p.shape[0])
    lhs = operator_norm(p - q)
    rhs = max(operator_norm(p @ (eye - q)), operator_norm((eye - p) @ q))
    return abs(lhs - rhs)


def kkm_suite(p: CMatrix, q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> NormReport:
    """Norm inequalities of a quasi-projection pair.

    Asserts the adjoint-pair norm equalities and the two-sided chain
    ||(P-Q)^2|| <= max(||(I-P)Q||, ||(I-Q)P||) <= ||P-Q||; for two
    projections additionally the exact norm equality.
    """
    p = as_cmatrix(p)
    q = as_cmatrix(q)
    if not is_quasi_pair(p, q, tol):
        raise NotQuasiPair("(P, Q) fails the pairing identity")
    eye = np.eye(p.shape[0])
    diff = operator_norm(p - q)
    sq = operator_norm((p - q) @ (p - q))
    t1 = operator_norm(p @ (eye - q))
    t2 = operator_norm((eye - p) @ q)
    slack = tol.eq_tol * (1 + operator_norm(q))
    pair_gap = max(
        abs(t2 - operator_norm(q @ (eye - p))),
        abs(t1 - operator_norm((eye - q) @ p)),
    )
    if pair_gap > slack:
        raise AssertionError(f"adjoint-pair norm equality violated by {pair_gap:.3g}")
    mid = max(t1, t2)
    if sq > mid + slack or mid > diff + slack:
        raise AssertionError("two-sided norm inequality violated")
    kkm = abs(diff - mid) <= slack
    if is_projection(q, tol) and not kkm:
        raise AssertionError("exact norm equality must hold for two projections")
    return NormReport(
        norm_PQ_diff=diff, norm_sq_diff=sq, norm_T1=t1, norm_T2=t2, kkm_holds=kkm
    )


def matched_norms(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> NormReport:
    """Closed-form norm identities of the matched pair of a non-projection idempotent.

    The four mixed products (I-m)Q, Q(I-m), (I-Q)m, m(I-Q) share the norm
    sqrt(2)/2 * sqrt(||Q||(||Q||-1)); ||(m-Q)^2|| = (||Q||-1)/2;
    ||m-Q|| = (||Q||-1+sqrt(||Q||^2-1))/2; and the strict chain
    sqrt(2)||(m-Q)^2|| < ||(I-m)Q|| < ||m-Q|| < sqrt(2)||(I-m)Q|| holds
    with margin at least spec_tol.
    """
    q = as_cmatrix(q)
    norm_q = operator_norm(q)
    if norm_q <= 1 + tol.spec_tol:
        raise IsProjection(f"||Q|| = {norm_q:.12g} does not exceed 1 + spec_tol")
    m = matched_projection(q, tol)
    eye = np.eye(q.shape[0])
    mixed = [
        operator_norm((eye - m) @ q),
        operator_norm(q @ (eye - m)),
        operator_norm((eye - q) @ m),
        operator_norm(m @ (eye - q)),
    ]
    shared = np.sqrt(2) / 2 * np.sqrt(norm_q * (norm_q - 1))
    slack = tol.eq_tol * (1 + norm_q) ** 2
    worst_mixed = max(abs(v - shared) for v in mixed)
    if worst_mixed > slack:
        raise AssertionError(f"mixed-product norms deviate by {worst_mixed:.3g}")
    diff = operator_norm(m - q)
    sq = operator_norm((m - q) @ (m - q))
    closed_diff = 0.5 * (norm_q - 1 + np.sqrt(norm_q**2 - 1))
    closed_sq = (norm_q - 1) / 2
    if abs(diff - closed_diff) > slack or abs(sq - closed_sq) > slack:
        raise AssertionError("matched-pair distance norms deviate from closed forms")
    chain_margin = min(
        mixed[0] - np.sqrt(2) * sq,
        diff - mixed[0],
        np.sqrt(2) * mixed[0] - diff,
    )
    if chain_margin <= tol.spec_tol:
        raise AssertionError(f"strict norm chain margin {chain_margin:.3g} too small")
    return NormReport(
        norm_PQ_diff=diff,
        norm_sq_diff=sq,
        norm_T1=operator_norm(m @ (eye - q)),
        norm_T2=mixed[0],
        kkm_holds=False,
        M=float(shared),
    )
