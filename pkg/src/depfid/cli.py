"""Command-line interface: audit, synth, sweep, and tail subcommands.

Exit codes: 0 on success, 1 on any error, 2 when --fail-on-unstable is set
and the audit lands in the unstable regime. All randomness is seeded, so
identical invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .diagnostics import davis_kahan_bound, joint_tail_probability
from .errors import DepfidError, DomainError, IoError
from .linalg import (
    DataMatrix,
    cholesky_factor,
    estimate_covariance,
    principal_subspace,
    subspace_sin_theta,
    sym_eigendecompose,
)
from .report import (
    DEFAULT_BOOTSTRAP_B,
    DEFAULT_SEED,
    DEFAULT_SUBSPACE_DIMS,
    AuditReport,
    emit_report,
    ingest_csv,
    run_audit,
)
from .rng import Stream, derive
from .scenarios import (
    ClosedForms,
    make_diagonal_collapse_pair,
    make_eigengap_pair,
    make_sign_flip_pair,
    sample_gaussian_copula,
    sample_t_copula,
)


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _write_csv(path: str, header: list[str] | None, rows: list[list[str]]) -> None:
    lines = []
    if header is not None:
        lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _write_data_csv(path: str, data: DataMatrix) -> None:
    rows = [[repr(float(v)) for v in row] for row in data.values]
    _write_csv(path, None, rows)


def _looks_like_header(path: str) -> bool:
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            first = handle.readline()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    for cell in first.strip().split(","):
        try:
            float(cell)
        except ValueError:
            return True
    return False


def _load_dataset(path: str) -> DataMatrix:
    return ingest_csv(path, has_header=_looks_like_header(path))


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise DomainError(f"cannot parse integer list {text!r}") from exc


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"grid must be START:STOP:STEP, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise DomainError(f"cannot parse grid {text!r}") from exc
    if step <= 0.0:
        raise DomainError("grid step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count < 1:
        raise DomainError("grid is empty")
    return start + step * np.arange(count)


def exit_code_policy(report: AuditReport, fail_on_unstable: bool) -> int:
    """0 on success; 2 when the flag is set and the regime is unstable."""
    if fail_on_unstable and report.verdict.regime == "unstable":
        return 2
    return 0


def _closed_forms_json(forms: ClosedForms) -> str:
    def fmt(x):
        return None if x is None else round(float(x), 6)

    return (
        json.dumps(
            {
                "d_sigma": fmt(forms.d_sigma),
                "beta_ref": fmt(forms.beta_ref),
                "beta_syn": fmt(forms.beta_syn),
                "exact_sin_theta": fmt(forms.exact_sin_theta),
            }
        )
        + "\n"
    )


def _cmd_audit(args: argparse.Namespace) -> int:
    ref = _load_dataset(args.real)
    syn = _load_dataset(args.syn)
    subsets = None
    if args.subsets is not None:
        if args.subset_size is None:
            raise DomainError("--subsets requires --subset-size")
        subsets = (args.subsets, args.subset_size)
    report = run_audit(
        ref,
        syn,
        pca_dims=args.pca_dims,
        subspace_dims=_parse_int_list(args.subspace_dims),
        bootstrap_b=args.bootstrap,
        subsets=subsets,
        mmd=args.mmd,
        copula_mmd_flag=args.copula_mmd,
        slope_target=args.slope_target,
        slope_predictors=(
            _parse_int_list(args.slope_predictors)
            if args.slope_predictors is not None
            else None
        ),
        seed=args.seed,
        cov_mode=args.cov_mode.replace("-", "_"),
    )
    fmt = {"json": "json", "md": "markdown"}[args.format]
    _write_text(args.out, emit_report(report, fmt))
    return exit_code_policy(report, args.fail_on_unstable)


def cmd_synth(args: argparse.Namespace) -> int:
    scenario = args.scenario.replace("-", "_")
    if scenario == "sign_flip":
        pair = make_sign_flip_pair(args.rho, args.sigma2, args.n, args.seed, d=args.d)
        ref, syn, forms = pair.samples_ref, pair.samples_syn, pair.closed_forms
    elif scenario == "eigengap":
        pair = make_eigengap_pair(args.eps, args.n, args.seed)
        ref, syn, forms = pair.samples_ref, pair.samples_syn, pair.closed_forms
    elif scenario == "diagonal_collapse":
        pair = make_diagonal_collapse_pair(args.rho, args.n, args.seed)
        ref, syn, forms = pair.samples_ref, pair.samples_syn, pair.closed_forms
    elif scenario == "gaussian_copula":
        # Matched-null pair: two independent draws from the same copula.
        ref = sample_gaussian_copula(args.rho, args.n, derive(args.seed, 1))
        syn = sample_gaussian_copula(args.rho, args.n, derive(args.seed, 2))
        forms = ClosedForms(d_sigma=0.0, beta_ref=args.rho, beta_syn=args.rho, exact_sin_theta=0.0)
    elif scenario == "t_copula":
        # Gaussian copula reference vs t-copula synthetic: identical
        # marginals, different tails. No closed-form population covariance
        # exists for the transformed t-copula, hence the nulls.
        ref = sample_gaussian_copula(args.rho, args.n, derive(args.seed, 1))
        syn = sample_t_copula(args.rho, args.nu, args.n, derive(args.seed, 2))
        forms = ClosedForms(d_sigma=None, beta_ref=args.rho, beta_syn=None, exact_sin_theta=None)
    else:
        raise DomainError(f"unknown scenario {args.scenario!r}")
    _write_data_csv(args.out_ref, ref)
    _write_data_csv(args.out_syn, syn)
    sys.stdout.write(_closed_forms_json(forms))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.scenario.replace("-", "_") != "eigengap":
        raise DomainError("sweep supports only the eigengap scenario")
    grid = _parse_grid(args.eps)
    rows = []
    for idx, eps in enumerate(grid):
        pair = make_eigengap_pair(float(eps), 2, derive(args.seed, idx))
        div = pair.closed_forms.d_sigma
        exact = pair.closed_forms.exact_sin_theta
        bound = davis_kahan_bound(div, 2.0)
        # Common random numbers: one normal draw pushed through both
        # populations' factors, so the eps = 0 row is exactly zero.
        z = Stream(derive(args.seed, idx), 0).normals(args.n * 2).reshape(args.n, 2)
        x_ref = DataMatrix(z @ cholesky_factor(pair.population_cov_ref).T)
        x_syn = DataMatrix(z @ cholesky_factor(pair.population_cov_syn).T)
        es_ref = sym_eigendecompose(estimate_covariance(x_ref))
        es_syn = sym_eigendecompose(estimate_covariance(x_syn))
        sample_angle = subspace_sin_theta(
            principal_subspace(es_ref, 1), principal_subspace(es_syn, 1)
        )
        rows.append(
            [
                f"{eps:.10g}",
                f"{div:.10g}",
                f"{bound.value:.10g}",
                "true" if bound.vacuous else "false",
                f"{exact:.10g}",
                f"{sample_angle:.10g}",
            ]
        )
    _write_csv(
        args.out,
        ["epsilon", "d_sigma", "dk_bound", "vacuous", "exact_sin_theta", "sample_sin_theta"],
        rows,
    )
    return 0


def cmd_tail(args: argparse.Namespace) -> int:
    if not args.nu > 2.0:
        raise DomainError("tail comparison requires nu > 2")
    grid = _parse_grid(args.u)
    gauss = sample_gaussian_copula(args.rho, args.n, derive(args.seed, 1))
    tcop = sample_t_copula(args.rho, args.nu, args.n, derive(args.seed, 2))
    rows = []
    for u in grid:
        p_gauss = joint_tail_probability(gauss, 0, 1, float(u))
        p_t = joint_tail_probability(tcop, 0, 1, float(u))
        ratio = "inf" if p_gauss == 0.0 else f"{p_t / p_gauss:.10g}"
        rows.append([f"{u:.10g}", f"{p_gauss:.10g}", f"{p_t:.10g}", ratio])
    _write_csv(args.out, ["u", "p_gaussian", "p_tcopula", "ratio"], rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depfid",
        description="Audit covariance-level dependence fidelity of a synthetic dataset",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    audit = sub.add_parser("audit", help="run the full diagnostic suite on two CSV files")
    audit.add_argument("--real", required=True, help="reference dataset CSV")
    audit.add_argument("--syn", required=True, help="synthetic dataset CSV")
    audit.add_argument("--pca-dims", type=int, default=None)
    audit.add_argument(
        "--subspace-dims", default=",".join(str(r) for r in DEFAULT_SUBSPACE_DIMS)
    )
    audit.add_argument("--bootstrap", type=int, default=DEFAULT_BOOTSTRAP_B)
    audit.add_argument("--subsets", type=int, default=None)
    audit.add_argument("--subset-size", type=int, default=None)
    audit.add_argument("--mmd", action="store_true")
    audit.add_argument("--copula-mmd", action="store_true")
    audit.add_argument("--slope-target", type=int, default=0)
    audit.add_argument("--slope-predictors", default=None)
    audit.add_argument("--cov-mode", choices=["empirical", "ledoit-wolf"], default="empirical")
    audit.add_argument("--seed", type=int, default=DEFAULT_SEED)
    audit.add_argument("--format", choices=["json", "md"], default="json")
    audit.add_argument("--out", default=None)
    audit.add_argument("--fail-on-unstable", action="store_true")
    audit.set_defaults(func=_cmd_audit)

    synth = sub.add_parser("synth", help="generate a closed-form scenario pair as CSV")
    synth.add_argument(
        "--scenario",
        required=True,
        choices=["sign-flip", "eigengap", "gaussian-copula", "t-copula", "diagonal-collapse"],
    )
    synth.add_argument("--rho", type=float, default=0.5)
    synth.add_argument("--sigma2", type=float, default=1.0)
    synth.add_argument("--eps", type=float, default=0.5)
    synth.add_argument("--nu", type=float, default=3.0)
    synth.add_argument("--n", type=int, default=1000)
    synth.add_argument("--d", type=int, default=2)
    synth.add_argument("--seed", type=int, default=DEFAULT_SEED)
    synth.add_argument("--out-ref", required=True)
    synth.add_argument("--out-syn", required=True)
    synth.set_defaults(func=cmd_synth)

    sweep = sub.add_parser("sweep", help="emit the eigengap sweep table as CSV")
    sweep.add_argument("--scenario", default="eigengap")
    sweep.add_argument("--eps", required=True, help="grid as START:STOP:STEP")
    sweep.add_argument("--n", type=int, default=100_000)
    sweep.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(func=cmd_sweep)

    tail = sub.add_parser("tail", help="emit joint tail probabilities for both copulas")
    tail.add_argument("--rho", type=float, default=0.5)
    tail.add_argument("--nu", type=float, default=3.0)
    tail.add_argument("--u", required=True, help="grid as START:STOP:STEP")
    tail.add_argument("--n", type=int, default=100_000)
    tail.add_argument("--seed", type=int, default=DEFAULT_SEED)
    tail.add_argument("--out", required=True)
    tail.set_defaults(func=cmd_tail)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DepfidError as exc:
        print(f"depfid: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
