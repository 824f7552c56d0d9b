"""The supplementary projection of an idempotent and its calculus.

Both closed forms of s(Q), the Murray-von Neumann witnesses pairing s(Q)
with the range projection, the reconstruction of Q from the projection pair
(m(Q), s(Q)), and a report-style bundle of the structural properties that
characterize projections among idempotents.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    _abs_qstar_pair,
    is_projection,
    matched_projection,
    range_projection,
)
from .errors import CrossCheckFailure, IllConditioned, NotProjection
from .generate import RandomStream, haar_unitary
from .linalg import (
    DEFAULT_TOL,
    CMatrix,
    Tolerances,
    as_cmatrix,
    herm_sqrt,
    herm_sqrt_truncated,
    hermitian_eig,
    hermitize,
    moore_penrose,
    operator_norm,
)


def supplementary_projection(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """s(Q): the matched projection of the reflected idempotent 2 P_R(Q) - Q.

    Fixes projections (s(Q) = Q there) and together with m(Q) determines Q.
    """
    q = as_cmatrix(q)
    reflected = 2 * range_projection(q, tol) - q
    return matched_projection(reflected, tol)


def supplementary_via_formula(q: CMatrix, mq: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """s(Q) = m(Q) + (I - Q^H)|Q^*|^+ + |Q^*|^+(I - Q), cross-checked.

    Disagreement with the defining route beyond 10x eq_tol raises
    CrossCheckFailure.
    """
    q = as_cmatrix(q)
    mq = as_cmatrix(mq)
    eye = np.eye(q.shape[0])
    pinv = _abs_qstar_pair(q, tol)[1]
    candidate = hermitize(mq + (eye - q.conj().T) @ pinv + pinv @ (eye - q))
    direct = supplementary_projection(q, tol)
    gap = operator_norm(candidate - direct)
    if gap > 10 * tol.eq_tol * (1 + operator_norm(q)):
        raise CrossCheckFailure(f"supplementary projection routes disagree by {gap:.3g}")
    return candidate


@dataclass(frozen=True)
class MvnWitnesses:
    """Operators exhibiting s(Q) ~ P_R(Q) in the Murray-von Neumann sense.

    s(Q) = T T^+ = V V^H and P_R(Q) = T^+ T = V^H V.
    """

    t: CMatrix
    v: CMatrix


def mvn_witnesses(q: CMatrix, tol: Tolerances = DEFAULT_TOL) -> MvnWitnesses:
    """Construct the equivalence witnesses T and V.

    T = |Q^*| + 2 P_R(Q) - Q^H satisfies T^H T = 2(I + |Q^*|)|Q^*|, and
    V = (sqrt(2)/2) T (|Q^*|^+)^(1/2) (|Q^*| + I)^(-1/2) is the isometric
    normalization of T.
    """
    q = as_cmatrix(q)
    eye = np.eye(q.shape[0])
    absq, pinv = _abs_qstar_pair(q, tol)
    t = absq + 2 * range_projection(q, tol) - q.conj().T
    lam, vec = hermitian_eig(absq + eye, tol)
    inv_half = hermitize((vec / np.sqrt(lam)) @ vec.conj().T)
    v = (np.sqrt(2) / 2) * t @ herm_sqrt_truncated(pinv, tol) @ inv_half
    return MvnWitnesses(t=t, v=v)


def reconstruct_idempotent(mq: CMatrix, sq: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """Rebuild the idempotent determined by its matched/supplementary pair.

    Q = (1/2) C^(-1) [ (C^(1/2) + s)(2m - I) + I - m ] with
    C = (I - m - s)^2.  C^(1/2) is the principal PSD root (eigenvalues
    clamped at zero); singular C raises IllConditioned.  Inputs that never
    arose from an idempotent simply yield a matrix that fails downstream
    idempotency checks.
    """
    mq = as_cmatrix(mq)
    sq = as_cmatrix(sq)
    for p, name in ((mq, "matched input"), (sq, "supplementary input")):
        if not is_projection(p, tol):
            raise NotProjection(f"{name} fails the projection residual test")
    eye = np.eye(mq.shape[0])
    c = hermitize((eye - mq - sq) @ (eye - mq - sq))
    svals = np.linalg.svd(c, compute_uv=False)
    if svals[-1] <= tol.eq_tol:
        raise IllConditioned("(I - m - s)^2 is numerically singular")
    c_half = herm_sqrt(c, tol)
    rhs = (c_half + sq) @ (2 * mq - eye) + eye - mq
    return 0.5 * np.linalg.solve(c, rhs)


@dataclass(frozen=True)
class SupplementaryChecks:
    """Residuals of the structural laws tying s(Q) to m(Q) and P_R(Q)."""

    involution_residual: float       # || s(2 P_R - Q) - m(Q) ||
    norm_bound_excess: float         # max(0, ||s - m|| - ||P_R - Q||)
    complement_residual: float       # || s(I - Q) - (I - s(Q^H)) ||
    unitary_covariance_residual: float
    adjoint_separation: float        # || s(Q) - s(Q^H) ||; 0 iff Q is a projection
    is_projection_input: bool

    def all_pass(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        basic = (
            self.involution_residual <= 100 * tol.eq_tol
            and self.norm_bound_excess <= tol.eq_tol
            and self.complement_residual <= 100 * tol.eq_tol
            and self.unitary_covariance_residual <= 100 * tol.eq_tol
        )
        if self.is_projection_input:
            return basic and self.adjoint_separation <= tol.spec_tol
        return basic and self.adjoint_separation > tol.spec_tol


def supplementary_properties(
    q: CMatrix, tol: Tolerances = DEFAULT_TOL, seed: int = 0
) -> SupplementaryChecks:
    """Evaluate the supplementary-projection laws on one idempotent.

    The unitary-covariance law s(U Q U^H) = U s(Q) U^H is spot-checked with
    one Haar unitary drawn from `seed`, the finite stand-in for covariance
    under arbitrary unital morphisms.
    """
    q = as_cmatrix(q)
    eye = np.eye(q.shape[0])
    pr = range_projection(q, tol)
    mq = matched_projection(q, tol)
    sq = supplementary_projection(q, tol)

    involution = operator_norm(supplementary_projection(2 * pr - q, tol) - mq)
    excess = max(0.0, operator_norm(sq - mq) - operator_norm(pr - q))
    complement = operator_norm(
        supplementary_projection(eye - q, tol) - (eye - supplementary_projection(q.conj().T, tol))
    )
    u = haar_unitary(q.shape[0], RandomStream(seed))
    covariance = operator_norm(
        supplementary_projection(u @ q @ u.conj().T, tol) - u @ sq @ u.conj().T
    )
    separation = operator_norm(sq - supplementary_projection(q.conj().T, tol))
    return SupplementaryChecks(
        involution_residual=involution,
        norm_bound_excess=excess,
        complement_residual=complement,
        unitary_covariance_residual=covariance,
        adjoint_separation=separation,
        is_projection_input=is_projection(q, tol),
    )


def witness_residuals(q: CMatrix, w: MvnWitnesses, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Residuals of the defining witness identities, for verification suites."""
    q = as_cmatrix(q)
    eye = np.eye(q.shape[0])
    absq = _abs_qstar_pair(q, tol)[0]
    pr = range_projection(q, tol)
    sq = supplementary_projection(q, tol)
    # nonzero singular values of T are at least 2 (T^H T = 2(I + |Q*|)|Q*|)
    t_pinv = moore_penrose(w.t, tol, floor=tol.eq_tol * (1 + operator_norm(w.t)))
    return {
        "tt_pinv_vs_s": operator_norm(w.t @ t_pinv - sq),
        "t_pinv_t_vs_range": operator_norm(t_pinv @ w.t - pr),
        "vv_vs_s": operator_norm(w.v @ w.v.conj().T - sq),
        "v_v_vs_range": operator_norm(w.v.conj().T @ w.v - pr),
        "gram_identity": operator_norm(
            w.t.conj().T @ w.t - 2 * (eye + absq) @ absq
        ),
    }
