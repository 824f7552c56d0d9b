"""Command-line interface.

Subcommands: analyze, decompose, reconstruct, quadratic, verify.  Matrices
travel as MatrixFile JSON; every invocation produces one Report document
with named checks.  Exit codes: 0 all checks pass, 1 a mathematical check
or operation failed, 2 usage/parse failure.  Tolerances come from flags,
then QPP_* environment variables, then defaults.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import core, decomp, quadratic, supplementary
from .errors import BadSpec, QppError
from .linalg import Tolerances, operator_norm, projection_residual
from .matrixio import Report, read_matrix, write_matrix
from .verify import SUITES, VerifyConfig, run_suites

USAGE_EXIT = 2
CHECK_EXIT = 1


def _env_float(name: str) -> float | None:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    return float(raw)


def resolve_tolerances(args) -> Tolerances:
    eq = args.eq_tol if args.eq_tol is not None else _env_float("QPP_EQ_TOL")
    rank = args.rank_tol if args.rank_tol is not None else _env_float("QPP_RANK_TOL")
    spec = args.spec_tol if args.spec_tol is not None else _env_float("QPP_SPEC_TOL")
    kwargs = {}
    if eq is not None:
        kwargs["eq_tol"] = eq
    if rank is not None:
        kwargs["rank_rel_tol"] = rank
    if spec is not None:
        kwargs["spec_tol"] = spec
    return Tolerances(**kwargs)


def _parse_complex(raw: str) -> complex:
    parts = raw.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"expected RE or RE,IM, got {raw!r}")


def _parse_dims(raw: str) -> tuple[int, int]:
    lo, sep, hi = raw.partition("..")
    if not sep:
        raise ValueError(f"expected LO..HI, got {raw!r}")
    return int(lo), int(hi)


def _add_global_flags(parser: argparse.ArgumentParser, *, suppress: bool) -> None:
    # the same flags hang off the main parser and every subparser so they may
    # appear on either side of the subcommand; SUPPRESS keeps an unset
    # subparser copy from clobbering a value parsed before the subcommand
    d = argparse.SUPPRESS if suppress else None
    flag = {"default": d} if suppress else {"default": None}
    parser.add_argument("--eq-tol", type=float, help="identity residual threshold", **flag)
    parser.add_argument("--rank-tol", type=float, help="relative singular-value cutoff", **flag)
    parser.add_argument("--spec-tol", type=float, help="spectrum classification margin", **flag)
    parser.add_argument("--emit-dir", type=Path, help="also write output matrices here", **flag)
    if suppress:
        parser.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                            help="print the full report as JSON")
    else:
        parser.add_argument("--json", action="store_true", default=False,
                            help="print the full report as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpp",
        description="Idempotents, quasi-projection pairs, and their block decompositions.",
    )
    _add_global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common],
                       help="derived projections and norm identities of an idempotent")
    p.add_argument("q_file", type=Path)

    p = sub.add_parser("decompose", parents=[common],
                       help="block decompositions of a quasi-projection pair")
    p.add_argument("--mode", choices=("2x2", "6x6", "matched4"), required=True)
    p.add_argument("files", nargs="+", type=Path, metavar="FILE",
                   help="P.json Q.json (2x2, 6x6) or Q.json (matched4)")

    p = sub.add_parser("reconstruct", parents=[common],
                       help="rebuild Q from its matched/supplementary pair")
    p.add_argument("m_file", type=Path)
    p.add_argument("s_file", type=Path)

    p = sub.add_parser("quadratic", parents=[common],
                       help="canonical form of a quadratic operator")
    p.add_argument("t_file", type=Path)
    p.add_argument("--a", type=_parse_complex, default=None, metavar="RE,IM")
    p.add_argument("--b", type=_parse_complex, default=None, metavar="RE,IM")

    p = sub.add_parser("verify", parents=[common], help="run the seeded property suites")
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--dims", type=_parse_dims, default=(2, 8), metavar="LO..HI")
    return parser


def cmd_analyze(args, tol: Tolerances) -> Report:
    report = Report(command="analyze", tolerances=tol)
    report.add_input(args.q_file.name, args.q_file)
    q = read_matrix(args.q_file)
    if q.shape[0] != q.shape[1]:
        raise ValueError(f"{args.q_file}: matrix must be square")
    n = q.shape[0]
    eye = np.eye(n)
    norm_q = operator_norm(q)
    report.properties["dim"] = n
    report.properties["operator_norm"] = float(norm_q)

    idem_scale = 1 + norm_q**2
    report.check("is_idempotent", core.idempotency_residual(q) / idem_scale, tol.eq_tol)
    if not report.checks[-1].passed:
        report.properties["is_projection"] = False
        return report

    projection = core.is_projection(q, tol)
    report.properties["is_projection"] = bool(projection)
    scale = 1 + norm_q

    pr = core.range_projection(q, tol)
    pn = core.null_projection(q, tol)
    m = core.matched_projection(q, tol)
    s = supplementary.supplementary_projection(q, tol)
    pinv = core.abs_qstar_pinv(q, tol)

    report.check(
        "range_projection_laws",
        max(operator_norm(pr @ q - q), operator_norm(q @ pr - pr)) / scale,
        tol.eq_tol,
    )
    report.check(
        "null_projection_laws",
        max(operator_norm(pn @ (eye - q) - (eye - q)), operator_norm((eye - q) @ pn - pn)) / scale,
        tol.eq_tol,
    )
    report.check("matched_projection_defect", projection_residual(m), 10 * tol.eq_tol)
    report.check("matched_pair_identity", core.quasi_pair_residual(m, q) / scale, tol.eq_tol)
    report.check("supplementary_projection_defect", projection_residual(s), 10 * tol.eq_tol)
    report.check(
        "reconstruction_roundtrip",
        operator_norm(supplementary.reconstruct_idempotent(m, s, tol) - q) / scale,
        10 * tol.eq_tol,
    )

    if not projection:
        rep = core.matched_norms(q, tol)
        shared = np.sqrt(2) / 2 * np.sqrt(norm_q * (norm_q - 1))
        report.check(
            "matched_norm_identities",
            max(
                abs(rep.norm_T2 - shared),
                abs(rep.norm_sq_diff - (norm_q - 1) / 2),
                abs(rep.norm_PQ_diff - (norm_q - 1 + np.sqrt(norm_q**2 - 1)) / 2),
            ),
            tol.eq_tol * scale**2,
        )
        report.properties["matched_distance"] = float(rep.norm_PQ_diff)
        report.properties["shared_mixed_norm"] = float(rep.norm_T2)

    report.add_output("range_projection", pr)
    report.add_output("null_projection", pn)
    report.add_output("matched_projection", m)
    report.add_output("supplementary_projection", s)
    report.add_output("abs_adjoint_pinv", pinv)
    return report


def cmd_decompose(args, tol: Tolerances) -> Report:
    report = Report(command=f"decompose-{args.mode}", tolerances=tol)
    if args.mode == "matched4":
        if len(args.files) != 1:
            raise ValueError("matched4 mode takes exactly one matrix file (Q.json)")
        (q_file,) = args.files
        p = None
    else:
        if len(args.files) != 2:
            raise ValueError(f"{args.mode} mode takes two matrix files (P.json Q.json)")
        p_file, q_file = args.files
        report.add_input(p_file.name, p_file)
        p = read_matrix(p_file)
    report.add_input(q_file.name, q_file)
    q = read_matrix(q_file)
    if p is not None and p.shape != q.shape:
        raise ValueError(f"dimension mismatch: P is {p.shape}, Q is {q.shape}")
    scale = 1 + operator_norm(q)

    if args.mode == "2x2":
        report.check("quasi_pair_identity", core.quasi_pair_residual(p, q) / scale, tol.eq_tol)
        if not report.checks[-1].passed:
            return report
        c = decomp.canonical_2x2(p, q, tol)
        back = decomp.assemble_canonical(c, tol)
        report.check("canonical_roundtrip", operator_norm(back - q) / scale, tol.eq_tol)
        report.check(
            "coupling_orthogonality", operator_norm(c.u.conj().T @ c.q0), 10 * tol.eq_tol
        )
        report.properties["range_dim"] = c.range_p.dim
        report.properties["null_dim"] = c.null_p.dim
        report.add_output("block_a", c.a)
        report.add_output("block_u", c.u)
        report.add_output("block_q0", c.q0)
        return report

    if args.mode == "6x6":
        report.check("quasi_pair_identity", core.quasi_pair_residual(p, q) / scale, tol.eq_tol)
        if not report.checks[-1].passed:
            return report
        six = decomp.halmos_6x6(p, q, tol)
        report.check("subspace_orthogonality", six.orthogonality_residual(), 10 * tol.eq_tol)
        report.check("p_identity", operator_norm(six.assemble_p() - p), 10 * tol.eq_tol)
        report.check("q_reassembly", operator_norm(six.assemble_q(tol) - q) / scale, 10 * tol.eq_tol)
        report.properties["subspace_dims"] = list(six.dims)
        report.add_output("block_a", six.a)
        report.add_output("block_u", six.u)
        return report

    six = decomp.matched_4x4(q, tol)
    report.check("q_reassembly", operator_norm(six.assemble_q(tol) - q) / scale, 10 * tol.eq_tol)
    report.check("subspace_orthogonality", six.orthogonality_residual(), 10 * tol.eq_tol)
    s_block, s_ambient = decomp.supplementary_4x4(q, tol)
    report.check(
        "supplementary_block_agreement",
        operator_norm(s_ambient - supplementary.supplementary_projection(q, tol)),
        10 * tol.eq_tol,
    )
    report.properties["subspace_dims"] = list(six.dims)
    report.add_output("block_a", six.a)
    report.add_output("block_u", six.u)
    report.add_output("block_s", s_block)
    return report


def cmd_reconstruct(args, tol: Tolerances) -> Report:
    report = Report(command="reconstruct", tolerances=tol)
    report.add_input(args.m_file.name, args.m_file)
    report.add_input(args.s_file.name, args.s_file)
    m = read_matrix(args.m_file)
    s = read_matrix(args.s_file)
    if m.shape != s.shape:
        raise ValueError(f"dimension mismatch: {m.shape} vs {s.shape}")
    report.check("matched_input_projection", projection_residual(m), tol.eq_tol * 10)
    report.check("supplementary_input_projection", projection_residual(s), tol.eq_tol * 10)
    if not all(c.passed for c in report.checks):
        return report
    q = supplementary.reconstruct_idempotent(m, s, tol)
    scale = 1 + operator_norm(q)
    report.check("result_idempotent", core.idempotency_residual(q) / (1 + operator_norm(q) ** 2), 10 * tol.eq_tol)
    report.check(
        "matched_roundtrip",
        operator_norm(core.matched_projection(q, tol) - m) / scale,
        100 * tol.eq_tol,
    )
    report.check(
        "supplementary_roundtrip",
        operator_norm(supplementary.supplementary_projection(q, tol) - s) / scale,
        100 * tol.eq_tol,
    )
    report.properties["operator_norm"] = float(operator_norm(q))
    report.add_output("idempotent", q)
    return report


def cmd_quadratic(args, tol: Tolerances) -> Report:
    report = Report(command="quadratic", tolerances=tol)
    report.add_input(args.t_file.name, args.t_file)
    t = read_matrix(args.t_file)
    if (args.a is None) != (args.b is None):
        raise ValueError("provide both --a and --b, or neither")
    if args.a is None:
        a, b = quadratic.detect_quadratic(t, tol)
    else:
        a, b = args.a, args.b
    form = quadratic.quadratic_canonical(t, a, b, tol)
    scale = 1 + operator_norm(t)
    eye = np.eye(t.shape[0])
    report.check(
        "annihilation",
        operator_norm((t - form.a * eye) @ (t - form.b * eye)) / scale**2,
        tol.eq_tol,
    )
    report.check("w_unitarity", form.unitarity_residual(), 100 * tol.eq_tol)
    report.check("reassembly", form.reassembly_residual(t) / scale, 100 * tol.eq_tol)
    report.properties["a"] = [form.a.real, form.a.imag]
    report.properties["b"] = [form.b.real, form.b.imag]
    report.properties["dims"] = list(form.dims)
    report.add_output("transform_w", form.w)
    report.add_output("block_b", form.b_block)
    return report


def cmd_verify(args, tol: Tolerances) -> Report:
    lo, hi = args.dims
    cfg = VerifyConfig(seed=args.seed, trials=args.trials, dim_lo=lo, dim_hi=hi, tol=tol)
    report = Report(command="verify", tolerances=tol)
    report.properties["suite"] = args.suite
    report.properties["seed"] = args.seed
    report.properties["trials"] = args.trials
    report.properties["dims"] = [lo, hi]
    report.checks.extend(run_suites(args.suite, cfg))
    return report


COMMANDS = {
    "analyze": cmd_analyze,
    "decompose": cmd_decompose,
    "reconstruct": cmd_reconstruct,
    "quadratic": cmd_quadratic,
    "verify": cmd_verify,
}


def _emit(report: Report, args) -> None:
    if args.emit_dir is not None:
        args.emit_dir.mkdir(parents=True, exist_ok=True)
        from .matrixio import payload_to_matrix

        for payload in report.outputs:
            name = payload.get("name", "output")
            write_matrix(args.emit_dir / f"{name}.json", payload_to_matrix(payload), name)
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        for c in report.checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"{status}  {c.name:44s} residual={c.residual:.3e}  threshold={c.threshold:.1e}")
        for key, val in report.properties.items():
            print(f"#     {key} = {val}")
        print(f"verdict: {report.verdict}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = resolve_tolerances(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    try:
        report = COMMANDS[args.command](args, tol)
    except (OSError, ValueError, BadSpec) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except QppError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return CHECK_EXIT
    _emit(report, args)
    return 0 if report.verdict == "pass" else CHECK_EXIT


if __name__ == "__main__":
    sys.exit(main())
