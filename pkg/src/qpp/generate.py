"""Seeded, reproducible instance generators.

Projections, idempotents, quasi-projection pairs (assembled from planted
block data so the pairing identity holds by construction), and quadratic
operators.  Randomness comes from a counter-based Philox stream keyed by
the seed, with Gaussian variates produced by a fixed Box-Muller convention,
so identical GenSpec values give bitwise-identical matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadSpec
from .linalg import CMatrix, hermitize

_TWO_PI = 2.0 * np.pi


class RandomStream:
    """Counter-based PRNG with an explicit Box-Muller Gaussian convention."""

    def __init__(self, seed: int):
        self._gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))

    def uniform(self, n: int) -> np.ndarray:
        return self._gen.random(n)

    def normal(self, n: int) -> np.ndarray:
        # Box-Muller on consecutive uniform pairs; 1 - u keeps log() finite.
        pairs = (n + 1) // 2
        u = self._gen.random((2, pairs))
        r = np.sqrt(-2.0 * np.log(1.0 - u[0]))
        z = np.concatenate([r * np.cos(_TWO_PI * u[1]), r * np.sin(_TWO_PI * u[1])])
        return z[:n]

    def complex_normal(self, rows: int, cols: int) -> CMatrix:
        z = self.normal(2 * rows * cols)
        re = z[: rows * cols].reshape(rows, cols)
        im = z[rows * cols :].reshape(rows, cols)
        return (re + 1j * im) / np.sqrt(2.0)

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in the inclusive range [lo, hi]."""
        if hi < lo:
            raise BadSpec(f"empty integer range [{lo}, {hi}]")
        u = float(self._gen.random())
        return lo + min(int(u * (hi - lo + 1)), hi - lo)

    def choice(self, weights) -> int:
        u = float(self._gen.random())
        acc = 0.0
        total = float(sum(weights))
        for i, w in enumerate(weights):
            acc += w / total
            if u < acc:
                return i
        return len(weights) - 1


def haar_unitary(dim: int, stream: RandomStream) -> CMatrix:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    if dim == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    z = stream.complex_normal(dim, dim)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phases = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1)), 1.0)
    return q * phases


@dataclass(frozen=True)
class GenSpec:
    """Recipe for one random instance.

    kind is one of {"projection", "idempotent", "quasi_pair", "quadratic"}.
    gap is the minimal distance kept between the coupling spectrum and the
    forbidden interval (0, 1); blocks fixes the (k1, k2, k3) split for
    quadratic operators.
    """

    dim: int
    seed: int
    kind: str
    rank: int | None = None
    target_norm: float | None = None
    a: complex | None = None
    b: complex | None = None
    gap: float = 0.05
    blocks: tuple[int, int, int] | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise BadSpec("dim must be at least 1")
        if self.gap <= 0:
            raise BadSpec("gap must be strictly positive")
        if self.kind not in {"projection", "idempotent", "quasi_pair", "quadratic"}:
            raise BadSpec(f"unknown kind {self.kind!r}")


@dataclass(frozen=True)
class GeneratedQuasiPair:
    """A planted quasi-projection pair plus the data it was assembled from."""

    p: CMatrix
    q: CMatrix
    planted_spectrum: np.ndarray
    coupling_rank: int
    q0_rank: int
    features: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GeneratedQuadratic:
    """A planted quadratic operator with the generating canonical data."""

    matrix: CMatrix
    a: complex
    b: complex
    blocks: tuple[int, int, int]
    planted_b: CMatrix


def random_projection(spec: GenSpec) -> CMatrix:
    """Rank-`rank` orthogonal projection built as V V^H from a Haar frame."""
    stream = RandomStream(spec.seed)
    rank = spec.rank if spec.rank is not None else stream.integer(0, spec.dim)
    if rank < 0 or rank > spec.dim:
        raise BadSpec(f"rank {rank} out of range for dim {spec.dim}")
    frame = haar_unitary(spec.dim, stream)
    v = frame[:, :rank]
    return hermitize(v @ v.conj().T)


def random_idempotent(spec: GenSpec) -> CMatrix:
    """Idempotent assembled as [[I, A], [0, 0]] in a random orthonormal basis.

    With target_norm set, the coupling is rescaled so ||Q|| hits the target
    (exact for this block shape since ||Q||^2 = 1 + s_max(A)^2, which the
    caller-facing contract still verifies numerically).
    """
    stream = RandomStream(spec.seed)
    if spec.dim < 2:
        raise BadSpec("non-projection idempotents need dim >= 2")
    rank = spec.rank if spec.rank is not None else stream.integer(1, spec.dim - 1)
    if rank < 1 or rank >= spec.dim:
        raise BadSpec(f"rank {rank} must satisfy 1 <= rank < dim")
    coupling = stream.complex_normal(rank, spec.dim - rank)
    if spec.target_norm is not None:
        if spec.target_norm < 1:
            raise BadSpec("target_norm must be at least 1 for an idempotent")
        smax = np.linalg.norm(coupling, 2)
        desired = np.sqrt(max(spec.target_norm**2 - 1.0, 0.0))
        coupling = coupling * (desired / smax) if smax > 0 else coupling * 0.0
    frame = haar_unitary(spec.dim, stream)
    v1 = frame[:, :rank]
    v2 = frame[:, rank:]
    return v1 @ v1.conj().T + v1 @ coupling @ v2.conj().T


def _sample_coupling_spectrum(stream: RandomStream, r: int, max_coupled: int, gap: float):
    """Eigenvalues for the coupling block: drawn from the two admissible
    branches plus the exact fixed points 0 and 1, at most max_coupled
    eigenvalues off the fixed points."""
    lam = np.empty(r)
    coupled = 0
    for i in range(r):
        branch = stream.choice([0.35, 0.15, 0.15, 0.35])
        if coupled >= max_coupled and branch in (0, 3):
            branch = 1 if branch == 0 else 2
        if branch == 0:
            lam[i] = -gap - (5.0 - gap) * float(stream.uniform(1)[0])
            coupled += 1
        elif branch == 1:
            lam[i] = 0.0
        elif branch == 2:
            lam[i] = 1.0
        else:
            lam[i] = 1.0 + gap + (4.0 - gap) * float(stream.uniform(1)[0])
            coupled += 1
    return lam


def random_quasi_pair(spec: GenSpec) -> GeneratedQuasiPair:
    """Quasi-projection pair assembled from planted (A, U, Q0) block data.

    A carries the sampled spectrum, U is a partial isometry whose co-range
    matches the coupled eigdirections of A, and Q0 is a projection
    orthogonal to R(U); the pair identity then holds by construction.
    """
    if spec.dim < 2:
        raise BadSpec("quasi pairs need dim >= 2 (P must be non-trivial)")
    stream = RandomStream(spec.seed)
    r = spec.rank if spec.rank is not None else stream.integer(1, spec.dim - 1)
    if r < 1 or r >= spec.dim:
        raise BadSpec(f"rank {r} must satisfy 1 <= rank < dim")
    comp = spec.dim - r

    lam = _sample_coupling_spectrum(stream, r, comp, spec.gap)
    coupled_mask = (lam != 0.0) & (lam != 1.0)
    k_c = int(np.sum(coupled_mask))

    va = haar_unitary(r, stream)
    a = hermitize((va * lam) @ va.conj().T)
    ell = hermitize((va * np.sqrt(np.maximum(lam * lam - lam, 0.0))) @ va.conj().T)

    wn = haar_unitary(comp, stream)
    f = wn[:, :k_c]
    e = va[:, coupled_mask]
    u = f @ e.conj().T

    avail = comp - k_c
    q0_rank = stream.integer(0, avail) if avail > 0 else 0
    g = wn[:, k_c : k_c + q0_rank]
    q0 = g @ g.conj().T

    blk = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
    blk[:r, :r] = a
    blk[:r, r:] = -ell @ u.conj().T
    blk[r:, :r] = u @ ell
    blk[r:, r:] = u @ (np.eye(r) - a) @ u.conj().T + q0

    frame = haar_unitary(spec.dim, stream)
    v1 = frame[:, :r]
    q = frame @ blk @ frame.conj().T
    p = hermitize(v1 @ v1.conj().T)

    features = {
        "lower_branch": bool(np.any(lam <= -spec.gap)),
        "upper_branch": bool(np.any(lam >= 1 + spec.gap)),
        "fixes_zero": bool(np.any(lam == 0.0)),
        "fixes_one": bool(np.any(lam == 1.0)),
        "q0_nonzero": q0_rank > 0,
        "u_non_surjective": k_c < comp,
        "hermitian_q": k_c == 0,
    }
    return GeneratedQuasiPair(
        p=p,
        q=q,
        planted_spectrum=np.sort(lam),
        coupling_rank=k_c,
        q0_rank=q0_rank,
        features=features,
    )


def random_quadratic(spec: GenSpec) -> GeneratedQuadratic:
    """Quadratic operator conjugated from a planted canonical form."""
    stream = RandomStream(spec.seed)
    if spec.blocks is not None:
        k1, k2, k3 = spec.blocks
        if min(k1, k2, k3) < 0 or k1 + k2 + 2 * k3 != spec.dim:
            raise BadSpec(f"blocks {spec.blocks} incompatible with dim {spec.dim}")
    else:
        k3 = stream.integer(0, spec.dim // 2)
        k1 = stream.integer(0, spec.dim - 2 * k3)
        k2 = spec.dim - 2 * k3 - k1
    if spec.a is not None and spec.b is not None:
        a, b = complex(spec.a), complex(spec.b)
    else:
        z = stream.normal(4)
        a = complex(z[0], z[1])
        b = complex(z[2], z[3])
        if abs(a - b) < 0.5:  # keep the two-root branch well separated
            b = a + (0.5 + abs(a - b)) * np.exp(1j * _TWO_PI * float(stream.uniform(1)[0]))

    vb = haar_unitary(k3, stream)
    bvals = 0.25 + 2.75 * stream.uniform(k3)
    planted_b = hermitize((vb * bvals) @ vb.conj().T) if k3 else np.zeros((0, 0), dtype=np.complex128)

    canon = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
    canon[:k1, :k1] = a * np.eye(k1)
    canon[k1 : k1 + k2, k1 : k1 + k2] = b * np.eye(k2)
    lo = k1 + k2
    canon[lo : lo + k3, lo : lo + k3] = a * np.eye(k3)
    canon[lo : lo + k3, lo + k3 :] = planted_b
    canon[lo + k3 :, lo + k3 :] = b * np.eye(k3)

    w = haar_unitary(spec.dim, stream)
    t = w.conj().T @ canon @ w
    return GeneratedQuadratic(matrix=t, a=a, b=b, blocks=(k1, k2, k3), planted_b=planted_b)
