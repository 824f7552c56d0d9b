"""Dense complex-matrix kernel.

Hermitian eigendecomposition, SVD, Moore-Penrose inverse, polar
factorization, spectral application of the four gap functions, subspace
algebra, and the operator norm.  Every routine is a pure function of
immutable numpy arrays; a single numerical-rank policy (relative
singular-value cutoff) is shared by the pseudo-inverse, the polar factor,
and range extraction so that decompositions stay mutually consistent.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NotHermitian, NotProjection, SpectrumViolation

# The universal operator carrier: a 2-d complex128 ndarray.
CMatrix = np.ndarray


def as_cmatrix(m) -> CMatrix:
    """Coerce to a finite 2-d complex128 array (copying only if needed)."""
    out = np.asarray(m, dtype=np.complex128)
    if out.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim={out.ndim}")
    if out.size and not np.all(np.isfinite(out)):
        raise ValueError("matrix contains NaN or Inf entries")
    return out


@dataclass(frozen=True)
class Tolerances:
    """Numerical policy knobs.

    eq_tol: residual threshold for operator identities.
    rank_rel_tol: relative singular-value cutoff; None means the default
        machine-epsilon * max(rows, cols), evaluated per matrix.
    spec_tol: classification margin for spectra near {0, 1}.
    """

    eq_tol: float = 1e-9
    rank_rel_tol: float | None = None
    spec_tol: float = 1e-8

    def __post_init__(self):
        if self.eq_tol <= 0 or self.spec_tol <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.rank_rel_tol is not None and self.rank_rel_tol <= 0:
            raise ValueError("rank_rel_tol must be strictly positive")

    def rank_cutoff(self, shape) -> float:
        if self.rank_rel_tol is not None:
            return self.rank_rel_tol
        return float(np.finfo(np.float64).eps) * max(max(shape), 1)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class SubspaceBasis:
    """Isometry whose columns orthonormally span a subspace (k may be 0)."""

    ambient_dim: int
    basis: CMatrix

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projection(self) -> CMatrix:
        return self.basis @ self.basis.conj().T

    def orthonormality_residual(self) -> float:
        k = self.dim
        return operator_norm(self.basis.conj().T @ self.basis - np.eye(k))

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> None:
        if self.basis.shape[0] != self.ambient_dim:
            raise ValueError("basis rows do not match ambient dimension")
        if self.orthonormality_residual() > tol.eq_tol:
            raise ValueError("basis columns are not orthonormal")


class FnKind(Enum):
    """Selector for the four scalar functions defined on (-inf,0] u [1,inf)."""

    F = "f"      # sign split: +1 on [1,inf), -1 on (-inf,0]
    G = "g"      # sqrt(|t|)
    H = "h"      # -f(t)*sqrt(|t-1|)
    ELL = "ell"  # sqrt(t^2 - t)


def operator_norm(m: CMatrix) -> float:
    """Largest singular value; 0.0 for empty matrices."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def _phase_normalize_columns(v: CMatrix) -> CMatrix:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = np.array(v, dtype=np.complex128, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        if col.size == 0:
            continue
        i = int(np.argmax(np.abs(col)))
        a = col[i]
        if abs(a) > 0:
            out[:, j] = col * (a.conjugate() / abs(a))
    return out


def hermitize(m: CMatrix) -> CMatrix:
    """Symmetrize roundoff noise away from an analytically Hermitian matrix."""
    return (m + m.conj().T) / 2.0


def hermitian_eig(m: CMatrix, tol: Tolerances = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvectors as unitary columns) with
    the deterministic phase rule applied.  Raises NotHermitian when the
    symmetry residual exceeds eq_tol * (1 + ||M||).
    """
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotHermitian(f"matrix is {m.shape[0]}x{m.shape[1]}, not square")
    scale = 1.0 + operator_norm(m)
    if operator_norm(m - m.conj().T) > tol.eq_tol * scale:
        raise NotHermitian("symmetry residual exceeds tolerance")
    w, v = np.linalg.eigh(hermitize(m))
    return w.astype(np.float64), _phase_normalize_columns(v)


def _fn_values(kind: FnKind, lam: np.ndarray) -> np.ndarray:
    sign = np.where(lam >= 0.5, 1.0, -1.0)
    if kind is FnKind.F:
        return sign
    if kind is FnKind.G:
        return np.sqrt(np.abs(lam))
    if kind is FnKind.H:
        return -sign * np.sqrt(np.abs(lam - 1.0))
    if kind is FnKind.ELL:
        return np.sqrt(np.maximum(lam * lam - lam, 0.0))
    raise ValueError(f"unknown function kind {kind!r}")


def clamp_spectrum(lam: np.ndarray, tol: Tolerances, *, require_gap_free: bool = True) -> np.ndarray:
    """Snap eigenvalues within spec_tol of {0, 1} to the exact endpoint.

    Values strictly inside (spec_tol, 1 - spec_tol) signal invalid input and
    raise SpectrumViolation rather than being projected silently.
    """
    lam = np.asarray(lam, dtype=np.float64)
    out = lam.copy()
    out[np.abs(lam) <= tol.spec_tol] = 0.0
    out[np.abs(lam - 1.0) <= tol.spec_tol] = 1.0
    if require_gap_free:
        inside = (out > 0.0) & (out < 1.0)
        if np.any(inside):
            worst = out[inside][np.argmin(np.abs(out[inside] - 0.5))]
            raise SpectrumViolation(
                f"eigenvalue {worst:.6g} lies strictly inside the forbidden gap (0, 1)"
            )
    return out


def func_calc(a: CMatrix, kind: FnKind, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """Apply one of the four gap functions to a Hermitian matrix spectrally."""
    lam, v = hermitian_eig(a, tol)
    if kind is FnKind.ELL and lam.size:
        margin = float(np.min(lam * lam - lam))
        if margin < -tol.spec_tol:
            raise SpectrumViolation(
                f"A^2 - A has eigenvalue {margin:.6g} below -spec_tol"
            )
    lam = clamp_spectrum(lam, tol)
    vals = _fn_values(kind, lam)
    return hermitize((v * vals) @ v.conj().T)


def spectral_map(a: CMatrix, fn, tol: Tolerances = DEFAULT_TOL, *, clamp: bool = False) -> CMatrix:
    """Hermitian functional calculus for an arbitrary scalar map `fn`.

    With clamp=True the eigenvalues are snapped to {0, 1} within spec_tol
    first (gap values rejected), matching the policy of func_calc.
    """
    lam, v = hermitian_eig(a, tol)
    if clamp:
        lam = clamp_spectrum(lam, tol)
    vals = np.array([fn(x) for x in lam], dtype=np.complex128)
    if np.allclose(vals.imag, 0.0):
        vals = vals.real
    return hermitize((v * vals) @ v.conj().T)


def herm_sqrt(m: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """Principal PSD square root; small negative eigenvalues clamp to 0."""
    lam, v = hermitian_eig(m, tol)
    return hermitize((v * np.sqrt(np.maximum(lam, 0.0))) @ v.conj().T)


def herm_sqrt_truncated(m: CMatrix, tol: Tolerances = DEFAULT_TOL) -> CMatrix:
    """PSD square root that treats sub-cutoff eigenvalues as exact zeros.

    For PSD matrices with a kernel, eps-level eigennoise would otherwise
    surface as sqrt(eps)-level output and defeat tight residual checks.
    """
    lam, v = hermitian_eig(m, tol)
    if lam.size == 0:
        return hermitize(m)
    cutoff = tol.rank_cutoff(m.shape) * max(float(lam[-1]), 0.0)
    vals = np.where(lam > cutoff, np.sqrt(np.maximum(lam, 0.0)), 0.0)
    return hermitize((v * vals) @ v.conj().T)


def svd(m: CMatrix, tol: Tolerances = DEFAULT_TOL):
    """Full SVD M = U diag(sigma) V^H with deterministic phases.

    For each positive singular value the left vector's phase rule co-rotates
    the paired right vector; null-space vectors are normalized independently.
    """
    m = as_cmatrix(m)
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    u = np.array(u, copy=True)
    vh = np.array(vh, copy=True)
    for j in range(u.shape[1]):
        col = u[:, j]
        i = int(np.argmax(np.abs(col)))
        a = col[i]
        if abs(a) == 0:
            continue
        c = a.conjugate() / abs(a)
        u[:, j] = col * c
        if j < s.size and s[j] > 0:
            vh[j, :] = vh[j, :] * np.conj(c)
    for j in range(vh.shape[0]):
        if j < s.size and s[j] > 0:
            continue
        row = vh[j, :]
        i = int(np.argmax(np.abs(row)))
        a = row[i]
        if abs(a) > 0:
            vh[j, :] = row * (a.conjugate() / abs(a))
    return u, s.astype(np.float64), vh.conj().T


def numerical_rank(s: np.ndarray, shape, tol: Tolerances, *, floor: float = 0.0) -> int:
    """Count of singular values at or above the relative cutoff.

    `floor` adds an absolute threshold for operators whose nonzero singular
    values are bounded away from zero (idempotents have sigma in {0} u
    [1, inf)): product roundoff can exceed the purely relative cutoff.
    """
    if s.size == 0 or s[0] <= 0:
        return 0
    r = int(np.sum(s >= tol.rank_cutoff(shape) * s[0]))
    while r > 0 and s[r - 1] <= floor:
        r -= 1
    return r


def moore_penrose(m: CMatrix, tol: Tolerances = DEFAULT_TOL, *, floor: float = 0.0) -> CMatrix:
    """Moore-Penrose inverse via SVD with relative rank truncation."""
    m = as_cmatrix(m)
    u, s, v = svd(m, tol)
    r = numerical_rank(s, m.shape, tol, floor=floor)
    if r == 0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    return (v[:, :r] / s[:r]) @ u[:, :r].conj().T


def polar_decomposition(t: CMatrix, tol: Tolerances = DEFAULT_TOL):
    """Polar factorization T = U |T| with U a partial isometry.

    |T| = (T^H T)^(1/2) and U^H U is the orthogonal projection onto the
    closure of R(T^H); U is built from the SVD factors restricted to the
    numerical rank.
    """
    t = as_cmatrix(t)
    u, s, v = svd(t, tol)
    r = numerical_rank(s, t.shape, tol)
    iso = u[:, :r] @ v[:, :r].conj().T
    abs_t = hermitize((v * np.concatenate([s, np.zeros(v.shape[1] - s.size)])) @ v.conj().T)
    return iso, abs_t


def range_basis(m: CMatrix, tol: Tolerances = DEFAULT_TOL, *, floor: float = 0.0) -> SubspaceBasis:
    """Orthonormal basis of the numerical column space of M.

    `floor` is an absolute singular-value threshold for callers whose M is a
    product or compression of larger operators: relative truncation alone
    would keep noise directions when M is essentially zero.
    """
    m = as_cmatrix(m)
    u, s, _ = svd(m, tol)
    r = numerical_rank(s, m.shape, tol, floor=floor)
    return SubspaceBasis(ambient_dim=m.shape[0], basis=u[:, :r])


def projection_split(p: CMatrix, tol: Tolerances = DEFAULT_TOL):
    """Complementary orthonormal bases (range, kernel) of a projection.

    One eigendecomposition supplies both bases, so their dimensions always
    sum to the ambient dimension; eigenvalues away from {0, 1} mean the
    input is not a projection.
    """
    lam, v = hermitian_eig(p, tol)
    near_one = np.abs(lam - 1.0) <= 0.5
    if lam.size and np.max(np.minimum(np.abs(lam), np.abs(lam - 1.0))) > tol.spec_tol:
        raise NotProjection("spectrum is not concentrated on {0, 1}")
    n = p.shape[0]
    order = np.argsort(~near_one, kind="stable")  # range part first
    v = v[:, order]
    k = int(np.sum(near_one))
    return (
        SubspaceBasis(ambient_dim=n, basis=v[:, :k]),
        SubspaceBasis(ambient_dim=n, basis=v[:, k:]),
    )


def projection_residual(p: CMatrix) -> float:
    """max(||P^2 - P||, ||P - P^H||), the defect from being a projection."""
    p = as_cmatrix(p)
    return max(operator_norm(p @ p - p), operator_norm(p - p.conj().T))


def subspace_intersection(p1: CMatrix, p2: CMatrix, tol: Tolerances = DEFAULT_TOL) -> SubspaceBasis:
    """Basis of R(P1) n R(P2) for two orthogonal projections.

    Computed as the eigenspace of P1 + P2 at eigenvalue 2 (threshold
    2 - spec_tol); direct and non-iterative.
    """
    p1 = as_cmatrix(p1)
    p2 = as_cmatrix(p2)
    if p1.shape != p2.shape or p1.shape[0] != p1.shape[1]:
        raise NotProjection("projections must be square and of equal size")
    for p in (p1, p2):
        scale = 1.0 + operator_norm(p) ** 2
        if projection_residual(p) > tol.eq_tol * scale:
            raise NotProjection("input fails the projection residual test")
    lam, v = hermitian_eig(hermitize(p1) + hermitize(p2), tol)
    keep = lam >= 2.0 - tol.spec_tol
    return SubspaceBasis(ambient_dim=p1.shape[0], basis=v[:, keep])


def kernel_is_trivial(m: CMatrix, threshold: float) -> bool:
    """N(M) == {0} decided by the smallest singular value."""
    m = as_cmatrix(m)
    rows, cols = m.shape
    if cols == 0:
        return True
    if cols > rows:
        return False
    s = np.linalg.svd(m, compute_uv=False)
    return bool(s[-1] > threshold)
