"""Seeded property-verification suites behind the `verify` command.

Each suite draws deterministic instances from the generators, evaluates a
fixed set of named invariants, and reports the worst residual seen per
invariant.  Check names are stable identifiers so reports can be diffed
across runs and versions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core, decomp, quadratic, supplementary
from .errors import BadSpec
from .generate import (
    GenSpec,
    RandomStream,
    haar_unitary,
    random_idempotent,
    random_projection,
    random_quadratic,
    random_quasi_pair,
)
from .linalg import DEFAULT_TOL, Tolerances, operator_norm
from .matrixio import Check

SUITES = ("core", "decomp", "supp", "quad")
ANDO_LAMBDAS = (1.0, 2.0, -3.0, 1j)


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 1
    trials: int = 50
    dim_lo: int = 2
    dim_hi: int = 8
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        if self.trials < 1:
            raise BadSpec("trials must be at least 1")
        if self.dim_lo < 2 or self.dim_hi < self.dim_lo:
            raise BadSpec("dims must satisfy 2 <= lo <= hi")


class _Worst:
    """Running max of residuals keyed by check name."""

    def __init__(self, thresholds: dict[str, float]):
        self.thresholds = thresholds
        self.values = {name: 0.0 for name in thresholds}

    def record(self, name: str, residual: float) -> None:
        self.values[name] = max(self.values[name], float(residual))

    def checks(self) -> list[Check]:
        return [
            Check(name=name, residual=self.values[name], threshold=self.thresholds[name])
            for name in sorted(self.thresholds)
        ]


def _trial_dims(cfg: VerifyConfig, k: int) -> int:
    span = cfg.dim_hi - cfg.dim_lo + 1
    return cfg.dim_lo + (k % span)


def _trial_seed(cfg: VerifyConfig, k: int, salt: int) -> int:
    return (cfg.seed * 1_000_003 + salt * 7919 + k) % (2**63)


def run_core_suite(cfg: VerifyConfig) -> list[Check]:
    tol = cfg.tol
    w = _Worst(
        {
            "matched_projection_defect": 1e-8,
            "matched_pair_identity": 1e-8,
            "matched_complement": 1e-8,
            "matched_adjoint": 1e-8,
            "matched_unitary_covariance": 1e-8,
            "matched_direct_sum": 1e-8,
            "range_projection_laws": 1e-8,
            "null_projection_laws": 1e-8,
            "afriat_roundtrip": 1e-8,
            "ando_agreement": 1e-8,
            "abs_qstar_consistency": 1e-8,
            "matched_norm_identities": 1e-8,
            "matched_chain_margin_deficit": 0.0,
            "kkm_pair_equalities": 1e-8,
            "kkm_two_sided_slack": 1e-10,
            "kkm_projection_equality": 1e-8,
        }
    )
    stream = RandomStream(_trial_seed(cfg, 0, 99))
    for k in range(cfg.trials):
        dim = _trial_dims(cfg, k)
        q = random_idempotent(GenSpec(dim=dim, seed=_trial_seed(cfg, k, 1), kind="idempotent"))
        n = q.shape[0]
        eye = np.eye(n)
        scale = 1 + operator_norm(q)
        m = core.matched_projection(q, tol)

        w.record(
            "matched_projection_defect",
            max(operator_norm(m @ m - m), operator_norm(m - m.conj().T)),
        )
        w.record("matched_pair_identity", core.quasi_pair_residual(m, q) / scale)
        w.record(
            "matched_complement",
            operator_norm(core.matched_projection(eye - q, tol) - (eye - m)) / scale,
        )
        w.record(
            "matched_adjoint",
            operator_norm(core.matched_projection(q.conj().T, tol) - m) / scale,
        )
        u = haar_unitary(n, stream)
        w.record(
            "matched_unitary_covariance",
            operator_norm(core.matched_projection(u @ q @ u.conj().T, tol) - u @ m @ u.conj().T)
            / scale,
        )

        ext = np.zeros((n + 2, n + 2), dtype=np.complex128)
        ext[2:, 2:] = q
        p_ext = np.zeros_like(ext)
        p_ext[0, 0] = 1.0
        ue = haar_unitary(n + 2, stream)
        big_q = ue @ ext @ ue.conj().T
        big_p = ue @ p_ext @ ue.conj().T
        w.record(
            "matched_direct_sum",
            operator_norm(
                core.matched_projection(big_p + big_q, tol)
                - (big_p + core.matched_projection(big_q, tol))
            )
            / scale,
        )

        pr = core.range_projection(q, tol)
        pn = core.null_projection(q, tol)
        w.record(
            "range_projection_laws",
            max(operator_norm(pr @ q - q), operator_norm(q @ pr - pr)) / scale,
        )
        w.record(
            "null_projection_laws",
            max(
                operator_norm(pn @ (eye - q) - (eye - q)),
                operator_norm((eye - q) @ pn - pn),
            )
            / scale,
        )
        w.record("afriat_roundtrip", operator_norm(core.afriat_reconstruct(pr, pn, tol) - q) / scale)
        w.record(
            "ando_agreement",
            max(
                operator_norm(core.ando_reconstruct(pr, pn, lam, tol) - q)
                for lam in ANDO_LAMBDAS
            )
            / scale,
        )

        absq = core.abs_qstar(q, tol)
        pinv = core.abs_qstar_pinv(q, tol)
        absq2, pinv2 = core.abs_qstar_via_matched(q, m, tol)
        w.record(
            "abs_qstar_consistency",
            max(operator_norm(absq - absq2), operator_norm(pinv - pinv2)) / scale,
        )

        norm_q = operator_norm(q)
        if norm_q > 1 + tol.spec_tol:
            rep = core.matched_norms(q, tol)
            shared = np.sqrt(2) / 2 * np.sqrt(norm_q * (norm_q - 1))
            w.record(
                "matched_norm_identities",
                max(
                    abs(rep.norm_T2 - shared),
                    abs(rep.norm_sq_diff - (norm_q - 1) / 2),
                    abs(rep.norm_PQ_diff - (norm_q - 1 + np.sqrt(norm_q**2 - 1)) / 2),
                ),
            )
            margin = min(
                rep.norm_T2 - np.sqrt(2) * rep.norm_sq_diff,
                rep.norm_PQ_diff - rep.norm_T2,
                np.sqrt(2) * rep.norm_T2 - rep.norm_PQ_diff,
            )
            w.record("matched_chain_margin_deficit", max(0.0, tol.spec_tol - margin))

        pair = random_quasi_pair(
            GenSpec(dim=dim, seed=_trial_seed(cfg, k, 2), kind="quasi_pair")
        )
        rep = core.kkm_suite(pair.p, pair.q, tol)
        eye_p = np.eye(pair.p.shape[0])
        w.record(
            "kkm_pair_equalities",
            max(
                abs(rep.norm_T2 - operator_norm(pair.q @ (eye_p - pair.p))),
                abs(rep.norm_T1 - operator_norm((eye_p - pair.q) @ pair.p)),
            ),
        )
        mid = max(rep.norm_T1, rep.norm_T2)
        w.record(
            "kkm_two_sided_slack",
            max(0.0, rep.norm_sq_diff - mid, mid - rep.norm_PQ_diff),
        )

        p1 = random_projection(GenSpec(dim=dim, seed=_trial_seed(cfg, k, 3), kind="projection"))
        p2 = random_projection(GenSpec(dim=dim, seed=_trial_seed(cfg, k, 4), kind="projection"))
        w.record("kkm_projection_equality", core.kkm_equality_residual(p1, p2))
    return w.checks()


def run_supp_suite(cfg: VerifyConfig) -> list[Check]:
    tol = cfg.tol
    w = _Worst(
        {
            "supplementary_is_projection": 1e-8,
            "supplementary_involution": 1e-8,
            "supplementary_bound_excess": 1e-9,
            "supplementary_complement": 1e-8,
            "supplementary_formula_agreement": 1e-8,
            "mvn_witness_identities": 1e-8,
            "reconstruction_roundtrip": 1e-8,
            "supplementary_pair_separation_deficit": 0.0,
        }
    )
    for k in range(cfg.trials):
        dim = _trial_dims(cfg, k)
        q = random_idempotent(GenSpec(dim=dim, seed=_trial_seed(cfg, k, 11), kind="idempotent"))
        scale = 1 + operator_norm(q)
        eye = np.eye(q.shape[0])
        s = supplementary.supplementary_projection(q, tol)
        m = core.matched_projection(q, tol)
        pr = core.range_projection(q, tol)

        w.record(
            "supplementary_is_projection",
            max(operator_norm(s @ s - s), operator_norm(s - s.conj().T)),
        )
        w.record(
            "supplementary_involution",
            max(
                operator_norm(supplementary.supplementary_projection(2 * pr - q, tol) - m),
                operator_norm(core.matched_projection(2 * pr - q, tol) - s),
            )
            / scale,
        )
        w.record(
            "supplementary_bound_excess",
            max(0.0, operator_norm(s - m) - operator_norm(pr - q)),
        )
        w.record(
            "supplementary_complement",
            operator_norm(
                supplementary.supplementary_projection(eye - q, tol)
                - (eye - supplementary.supplementary_projection(q.conj().T, tol))
            )
            / scale,
        )
        w.record(
            "supplementary_formula_agreement",
            operator_norm(supplementary.supplementary_via_formula(q, m, tol) - s) / scale,
        )
        res = supplementary.witness_residuals(q, supplementary.mvn_witnesses(q, tol), tol)
        w.record("mvn_witness_identities", max(res.values()) / scale)
        w.record(
            "reconstruction_roundtrip",
            operator_norm(supplementary.reconstruct_idempotent(m, s, tol) - q) / scale,
        )
        pair_res = core.quasi_pair_residual(s, q)
        if core.is_projection(q, tol):
            w.record("supplementary_pair_separation_deficit", pair_res)
        else:
            w.record(
                "supplementary_pair_separation_deficit",
                max(0.0, tol.spec_tol - pair_res),
            )
    return w.checks()


def run_decomp_suite(cfg: VerifyConfig) -> list[Check]:
    tol = cfg.tol
    w = _Worst(
        {
            "canonical_roundtrip": 1e-9,
            "canonical_side_conditions": 1e-8,
            "unitarity_equivalence_agreement": 0.0,
            "sixspace_orthogonality": 1e-9,
            "sixspace_dimension_consistency": 0.0,
            "sixspace_p_identity": 1e-9,
            "sixspace_reassembly": 1e-8,
            "sixspace_hermitian_iff": 0.0,
            "matched_block_agreement": 1e-8,
            "range_null_block_agreement": 1e-8,
            "matched4_range_null_agreement": 1e-8,
            "supplementary4_agreement": 1e-8,
            "matched_norm_bridge": 1e-8,
        }
    )
    for k in range(cfg.trials):
        dim = _trial_dims(cfg, k)
        inst = random_quasi_pair(
            GenSpec(dim=dim, seed=_trial_seed(cfg, k, 21), kind="quasi_pair")
        )
        p, q = inst.p, inst.q
        scale = 1 + operator_norm(q)

        c = decomp.canonical_2x2(p, q, tol)
        back = decomp.assemble_canonical(c, tol)
        w.record("canonical_roundtrip", operator_norm(back - q) / scale)
        ell = c.coupling(tol)
        from .linalg import range_basis

        co_range = range_basis(ell @ ell, tol).projection()
        w.record(
            "canonical_side_conditions",
            max(
                operator_norm(c.u.conj().T @ c.u - co_range),
                operator_norm(c.u.conj().T @ c.q0),
                float(np.max(np.maximum(-np.linalg.eigvalsh(c.a @ c.a - c.a), 0.0), initial=0.0)),
            ),
        )
        w.record(
            "unitarity_equivalence_agreement",
            0.0 if decomp.unitarity_criteria(c, tol).all_agree() else 1.0,
        )

        six = decomp.halmos_6x6(p, q, tol)
        w.record("sixspace_orthogonality", six.orthogonality_residual())
        dims_ok = sum(six.dims) == dim and six.h5.dim == six.h6.dim
        w.record("sixspace_dimension_consistency", 0.0 if dims_ok else 1.0)
        w.record("sixspace_p_identity", operator_norm(six.assemble_p() - p))
        w.record("sixspace_reassembly", operator_norm(six.assemble_q(tol) - q) / scale)
        hermitian = operator_norm(q - q.conj().T) <= tol.eq_tol * scale
        w.record(
            "sixspace_hermitian_iff", 0.0 if (six.h5.dim == 0) == hermitian else 1.0
        )

        w.record(
            "matched_block_agreement",
            operator_norm(decomp.matched_block(c, tol) - core.matched_projection(q, tol)) / scale,
        )
        pr_direct = core.range_projection(q, tol)
        pn_direct = core.null_projection(q, tol)
        pr_blk, pn_blk = decomp.assemble_range_null(c, decomp.range_null_blocks(c, tol), tol)
        w.record(
            "range_null_block_agreement",
            max(operator_norm(pr_blk - pr_direct), operator_norm(pn_blk - pn_direct)),
        )

        norm_q = operator_norm(q)
        if norm_q > 1 + tol.spec_tol:
            four = decomp.matched_range_null_4x4(q, tol)
            w.record(
                "matched4_range_null_agreement",
                max(
                    operator_norm(four.range_ambient - pr_direct),
                    operator_norm(four.null_ambient - pn_direct),
                ),
            )
            _, samb = decomp.supplementary_4x4(q, tol)
            w.record(
                "supplementary4_agreement",
                operator_norm(samb - supplementary.supplementary_projection(q, tol)),
            )
            lam_max = float(np.max(np.linalg.eigvalsh(four.space.a)))
            w.record("matched_norm_bridge", abs(2 * lam_max - 1 - norm_q))
    return w.checks()


def run_quad_suite(cfg: VerifyConfig) -> list[Check]:
    tol = cfg.tol
    w = _Worst(
        {
            "quadratic_w_unitarity": 1e-10,
            "quadratic_reassembly": 1e-9,
            "quadratic_b_spectrum": 1e-8,
            "quadratic_detect_roots": 1e-7,
            "idempotent_form_norm": 1e-9,
            "square_zero_reassembly": 1e-9,
        }
    )
    for k in range(cfg.trials):
        dim = _trial_dims(cfg, k)
        inst = random_quadratic(GenSpec(dim=dim, seed=_trial_seed(cfg, k, 31), kind="quadratic"))
        t = inst.matrix
        scale = 1 + operator_norm(t)
        form = quadratic.quadratic_canonical(t, inst.a, inst.b, tol)
        w.record("quadratic_w_unitarity", form.unitarity_residual())
        w.record("quadratic_reassembly", form.reassembly_residual(t) / scale)
        got = (
            np.sort(np.linalg.svd(form.b_block, compute_uv=False))
            if form.dims[2]
            else np.zeros(0)
        )
        want = (
            np.sort(np.linalg.svd(inst.planted_b, compute_uv=False))
            if inst.blocks[2]
            else np.zeros(0)
        )
        if got.size != want.size:
            w.record("quadratic_b_spectrum", 1.0)
        elif got.size:
            w.record("quadratic_b_spectrum", float(np.max(np.abs(got - want))))

        k1, k2, k3 = inst.blocks
        if (k1 + k3) and (k2 + k3):  # both roots actually occur in the spectrum
            a, b = quadratic.detect_quadratic(t, tol)
            want_roots = sorted([inst.a, inst.b], key=lambda z: (z.real, z.imag))
            w.record(
                "quadratic_detect_roots",
                max(abs(a - want_roots[0]), abs(b - want_roots[1])),
            )

        q = random_idempotent(GenSpec(dim=dim, seed=_trial_seed(cfg, k, 32), kind="idempotent"))
        form_q = quadratic.idempotent_canonical(q, tol)
        w.record(
            "idempotent_form_norm",
            abs(operator_norm(form_q.canonical_matrix()) - operator_norm(q)) / (1 + operator_norm(q)),
        )

        # the nilpotent part Q - P_R(Q) of any idempotent is square-zero
        s = q - core.range_projection(q, tol)
        form_s = quadratic.square_zero_canonical(s, tol)
        w.record("square_zero_reassembly", form_s.reassembly_residual(s) / scale)
    return w.checks()


_RUNNERS = {
    "core": run_core_suite,
    "decomp": run_decomp_suite,
    "supp": run_supp_suite,
    "quad": run_quad_suite,
}


def run_suites(suite: str, cfg: VerifyConfig) -> list[Check]:
    """Run one suite or all of them; returns the combined check list."""
    if suite == "all":
        names = SUITES
    elif suite in _RUNNERS:
        names = (suite,)
    else:
        raise BadSpec(f"unknown suite {suite!r}")
    checks: list[Check] = []
    for name in names:
        checks.extend(_RUNNERS[name](cfg))
    return checks
