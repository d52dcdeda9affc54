"""Command-line front end for the studies and verification suite.

Subcommands mirror the studies (``rank-sweep``, ``regular-vs-singular``,
``dict-compare``, ``estimate-rlct``) plus ``evidence`` for inspecting one
configuration's evidence curve and ``verify`` for the brute-force oracle
checks.  Effective configuration is resolved as: built-in defaults, then the
``--config`` JSON file, then ``--overrides``; the output directory honors
``--output-dir``, else the RANKEVIDENCE_OUTPUT_DIR environment variable, else
the config value.  Every run writes ``effective_config.json`` next to its
outputs so the run can be reproduced by pointing ``--config`` at it.

Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure that
aborted a study.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from ._linalg import NumericalError
from .evidence import exact_log_evidence, full_laplace_log_evidence
from .experiments import (
    ConfigError,
    ExperimentConfig,
    StudyResult,
    records_csv_text,
    run_study,
    summarize,
    write_atomic,
    write_study_outputs,
)
from .oracle import (
    OracleError,
    importance_log_evidence,
    importance_log_weights,
    quadrature_log_evidence,
    random_problem,
)
from .svgplot import line_chart

OUTPUT_DIR_ENV = "RANKEVIDENCE_OUTPUT_DIR"

_STUDY_BY_COMMAND = {
    "rank-sweep": "rank_sweep",
    "regular-vs-singular": "regular_vs_singular",
    "dict-compare": "dict_compare",
    "estimate-rlct": "estimate_rlct",
}

_OVERRIDABLE_LIST_FIELDS = {"ranks", "n_grid", "seeds"}
_OVERRIDABLE_SCALAR_FIELDS = {"d": int, "p": int, "sigma2": float, "tau2": float}


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits 1 (not 2) on usage errors."""

    def error(self, message: str) -> None:  # noqa: A003 - argparse API
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _parse_int_list(text: str) -> list[int]:
    """Value grammar for list fields: ``a..b`` (inclusive, step 1),
    ``a..bxK`` (geometric, factor K), ``v1+v2+...``, or a single integer."""
    if ".." in text:
        lo_text, rest = text.split("..", 1)
        if "x" in rest:
            hi_text, factor_text = rest.split("x", 1)
            lo, hi, factor = int(lo_text), int(hi_text), int(factor_text)
            if factor < 2 or lo < 1 or hi < lo:
                raise ValueError(f"bad geometric range {text!r}")
            values = []
            v = lo
            while v <= hi:
                values.append(v)
                v *= factor
            return values
        lo, hi = int(lo_text), int(rest)
        if hi < lo:
            raise ValueError(f"bad range {text!r}")
        return list(range(lo, hi + 1))
    if "+" in text:
        return [int(v) for v in text.split("+")]
    return [int(text)]


def parse_overrides(chunks: list[str]) -> dict:
    """Parse ``--overrides`` strings (comma-separated key=value pairs)."""
    out: dict = {}
    for chunk in chunks:
        for item in chunk.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise ConfigError(f"override {item!r} is not of the form key=value")
            key, value = item.split("=", 1)
            key = key.strip()
            try:
                if key in _OVERRIDABLE_LIST_FIELDS:
                    out[key] = _parse_int_list(value)
                elif key in _OVERRIDABLE_SCALAR_FIELDS:
                    out[key] = _OVERRIDABLE_SCALAR_FIELDS[key](value)
                else:
                    raise ConfigError(
                        f"unknown override field {key!r}; valid fields: "
                        f"{sorted(_OVERRIDABLE_LIST_FIELDS | set(_OVERRIDABLE_SCALAR_FIELDS))}"
                    )
            except ValueError as exc:
                raise ConfigError(f"bad override value for {key!r}: {value!r} ({exc})")
    return out


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return data


def build_config(study: str, args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, then config file, then overrides, then the output-dir flag/env."""
    cfg = ExperimentConfig.default_for(study)
    if args.config:
        file_values = _load_config_file(args.config)
        file_values["study"] = study
        merged = cfg.to_dict()
        merged.update(file_values)
        cfg = ExperimentConfig.from_dict(merged)
    for key, value in parse_overrides(args.overrides).items():
        setattr(cfg, key, value)
    cfg.study = study
    if args.output_dir:
        cfg.output_dir = args.output_dir
    elif os.environ.get(OUTPUT_DIR_ENV):
        cfg.output_dir = os.environ[OUTPUT_DIR_ENV]
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# Plot-data emission
# ---------------------------------------------------------------------------

def _tsv(columns: list[str], rows: list[list]) -> str:
    def fmt(v) -> str:
        return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)

    lines = ["\t".join(columns)]
    lines.extend("\t".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _mean_error_curve(result: StudyResult, rank: int) -> list[list]:
    rows = [rec for rec in result.records if rec.rank == rank]
    ns = sorted({rec.n for rec in rows})
    out = []
    for n in ns:
        cell = [rec for rec in rows if rec.n == n]
        out.append([
            n,
            math.log(n),
            float(np.mean([rec.delta_bic for rec in cell])),
            float(np.mean([rec.delta_rlct for rec in cell])),
        ])
    return out


def emit_plot_data(result: StudyResult, out_dir: str | Path, plot: bool = False) -> list[Path]:
    """Write one TSV per figure; with ``plot`` also a rendered SVG for each.

    Raises ValueError on an empty result before touching the filesystem, and
    writes atomically, so no partial file set is left behind.
    """
    out = Path(out_dir)
    files: list[tuple[str, str]] = []          # (name, text)
    charts: list[tuple[str, str]] = []         # (name, svg)

    if result.study in ("rank_sweep", "estimate_rlct"):
        if not result.records:
            raise ValueError("cannot emit plot data for an empty study result")
        summaries = sorted(result.rank_summaries, key=lambda s: s.rank)
        rows = [
            [s.rank, s.fit_delta_bic.slope, s.fit_delta_rlct.slope,
             s.fit_delta_bic.stderr_slope, s.fit_delta_rlct.stderr_slope]
            for s in summaries
        ]
        files.append((
            "fig1_rank_sweep.tsv",
            _tsv(["rank", "slope_bic", "slope_rlct", "stderr_bic", "stderr_rlct"], rows),
        ))
        ranks = [float(s.rank) for s in summaries]
        charts.append((
            "fig1_rank_sweep.svg",
            line_chart(
                [
                    ("BIC error slope", ranks, [s.fit_delta_bic.slope for s in summaries]),
                    ("corrected error slope", ranks, [s.fit_delta_rlct.slope for s in summaries]),
                ],
                title="Approximation error slopes vs intrinsic rank",
                xlabel="intrinsic rank r",
                ylabel="slope vs log n",
            ),
        ))
        if result.study == "estimate_rlct":
            rows = [[s.rank, s.lambda_hat, s.lambda_analytic] for s in summaries]
            files.append((
                "lambda_vs_rank.tsv",
                _tsv(["rank", "lambda_hat", "lambda_analytic"], rows),
            ))
            charts.append((
                "lambda_vs_rank.svg",
                line_chart(
                    [
                        ("slope estimate", ranks, [s.lambda_hat for s in summaries]),
                        ("analytic r/2", ranks, [s.lambda_analytic for s in summaries]),
                    ],
                    title="Effective dimension from evidence slopes",
                    xlabel="intrinsic rank r",
                    ylabel="lambda",
                ),
            ))
    elif result.study == "regular_vs_singular":
        if not result.records:
            raise ValueError("cannot emit plot data for an empty study result")
        d = result.config.d
        regular = max(result.config.ranks)
        singular = min(result.config.ranks)
        for name, rank, fig in (
            ("fig2_regular_error.tsv", regular, "fig2_regular_error.svg"),
            ("fig3_singular_error.tsv", singular, "fig3_singular_error.svg"),
        ):
            rows = _mean_error_curve(result, rank)
            files.append((name, _tsv(["n", "log_n", "delta_bic_mean", "delta_rlct_mean"], rows)))
            charts.append((
                fig,
                line_chart(
                    [
                        ("BIC error", [r[1] for r in rows], [r[2] for r in rows]),
                        ("corrected error", [r[1] for r in rows], [r[3] for r in rows]),
                    ],
                    title=f"Approximation error vs log n (d={d}, r={rank})",
                    xlabel="log n",
                    ylabel="approximate - exact log evidence",
                ),
            ))
    elif result.study == "dict_compare":
        if not result.dict_rows:
            raise ValueError("cannot emit plot data for an empty study result")
        by_n: dict[int, list] = {}
        for c in result.dict_rows:
            by_n.setdefault(c.n, []).append(c)
        gap_rows = []
        for n in sorted(by_n):
            cell = by_n[n]
            gap_rows.append([
                n,
                math.log(n),
                float(np.mean([c.exact_minimal - c.exact_overcomplete for c in cell])),
                float(np.mean([c.bic_minimal - c.bic_overcomplete for c in cell])),
            ])
        files.append((
            "fig4_dict_evidence_gap.tsv",
            _tsv(["n", "log_n", "exact_gap_mean", "bic_gap_mean"], gap_rows),
        ))
        eig_min, eig_over = result.spectra
        depth = max(len(eig_min), len(eig_over))
        spec_rows = [
            [i,
             float(eig_min[i]) if i < len(eig_min) else "",
             float(eig_over[i]) if i < len(eig_over) else ""]
            for i in range(depth)
        ]
        files.append((
            "fig5_eigenspectra.tsv",
            _tsv(["index", "eig_minimal", "eig_overcomplete"], spec_rows),
        ))
        charts.append((
            "fig4_dict_evidence_gap.svg",
            line_chart(
                [
                    ("exact gap", [r[1] for r in gap_rows], [r[2] for r in gap_rows]),
                    ("BIC gap", [r[1] for r in gap_rows], [r[3] for r in gap_rows]),
                ],
                title="Minimal minus overcomplete scores vs log n",
                xlabel="log n",
                ylabel="score gap",
            ),
        ))
        charts.append((
            "fig5_eigenspectra.svg",
            line_chart(
                [
                    ("minimal", list(range(len(eig_min))), [float(v) for v in eig_min]),
                    ("overcomplete", list(range(len(eig_over))), [float(v) for v in eig_over]),
                ],
                title="Gram matrix eigenvalue spectra",
                xlabel="eigenvalue index",
                ylabel="eigenvalue",
            ),
        ))
    else:
        raise ValueError(f"no plot data defined for study {result.study!r}")

    written = []
    for name, text in files:
        write_atomic(out / name, text)
        written.append(out / name)
    if plot:
        for name, svg in charts:
            write_atomic(out / name, svg)
            written.append(out / name)
    return written


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _run_study_command(command: str, args: argparse.Namespace) -> int:
    cfg = build_config(_STUDY_BY_COMMAND[command], args)
    result = run_study(cfg)
    out = Path(cfg.output_dir)
    write_study_outputs(result, out)
    emit_plot_data(result, out, plot=args.plot)
    write_atomic(out / "effective_config.json", json.dumps(cfg.to_dict(), indent=2) + "\n")
    sys.stdout.write(summarize(result))
    sys.stdout.write(f"outputs written to {out}\n")
    return 0


def _run_evidence_command(args: argparse.Namespace) -> int:
    cfg = build_config("rank_sweep", args)
    cfg.ranks = cfg.ranks[:1]
    cfg.seeds = cfg.seeds[:1]
    cfg.validate()
    result = run_study(cfg)
    rank, seed = cfg.ranks[0], cfg.seeds[0]
    sys.stdout.write(
        f"evidence for d={cfg.d} p={cfg.p} r={rank} seed={seed} "
        f"sigma2={cfg.sigma2!r} tau2={cfg.tau2!r}\n"
    )
    sys.stdout.write(
        f"{'n':>7}  {'log_z_exact':>14}  {'log_lik_mle':>14}  {'log_z_bic':>14}  "
        f"{'log_z_rlct':>14}  {'delta_bic':>10}  {'delta_rlct':>10}\n"
    )
    for rec in sorted(result.records, key=lambda r: r.n):
        sys.stdout.write(
            f"{rec.n:>7}  {rec.log_z_exact:>14.4f}  {rec.log_lik_mle:>14.4f}  "
            f"{rec.log_z_bic:>14.4f}  {rec.log_z_rlct:>14.4f}  "
            f"{rec.delta_bic:>10.4f}  {rec.delta_rlct:>10.4f}\n"
        )
    if args.output_dir:
        out = Path(args.output_dir)
        write_atomic(out / "evidence_records.csv", records_csv_text(result.records))
        write_atomic(out / "effective_config.json", json.dumps(cfg.to_dict(), indent=2) + "\n")
        sys.stdout.write(f"records written to {out}\n")
    return 0


def run_verification(seed: int = 2024) -> list[tuple[str, float, float, bool]]:
    """Deterministic oracle sweep: (name, worst value, tolerance, passed)."""
    rng = np.random.default_rng(seed)
    quad_worst = 0.0
    for _ in range(100):
        prob = random_problem(rng, max_d=2, max_n=50)
        quad_worst = max(
            quad_worst, abs(exact_log_evidence(prob) - quadrature_log_evidence(prob))
        )
    lap_worst = 0.0
    for _ in range(200):
        prob = random_problem(rng, max_d=20, max_n=1000, min_n=5)
        exact = exact_log_evidence(prob)
        lap_worst = max(
            lap_worst, abs(full_laplace_log_evidence(prob) - exact) / abs(exact)
        )
    weight_var_worst = 0.0
    is_dev_worst = 0.0
    for i in range(20):
        prob = random_problem(rng, max_d=5, max_n=200, min_n=5)
        logw = importance_log_weights(prob, 2000, seed=seed + i)
        weight_var_worst = max(weight_var_worst, float(np.var(logw)))
        est, stderr = importance_log_evidence(prob, 2000, seed=seed + i)
        is_dev_worst = max(
            is_dev_worst, abs(est - exact_log_evidence(prob)) - 3.0 * stderr
        )
    return [
        ("quadrature vs closed form (100 problems, d<=2, n<=50)", quad_worst, 1e-6,
         quad_worst < 1e-6),
        ("MAP-Laplace vs closed form, relative (200 problems, d<=20)", lap_worst, 1e-8,
         lap_worst < 1e-8),
        ("importance log-weight variance, conjugate proposal (20 problems)",
         weight_var_worst, 1e-18, weight_var_worst < 1e-18),
        ("importance |estimate - exact| beyond 3*stderr (20 problems)",
         max(is_dev_worst, 0.0), 1e-9, is_dev_worst < 1e-9),
    ]


def _run_verify_command(args: argparse.Namespace) -> int:
    del args
    checks = run_verification()
    all_ok = True
    for name, worst, tol, ok in checks:
        status = "PASS" if ok else "FAIL"
        sys.stdout.write(f"{status}  {name}: max discrepancy {worst:.3e} (tol {tol:.0e})\n")
        all_ok = all_ok and ok
    return 0 if all_ok else 2


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="rankevidence",
        description="Exact vs approximate evidence studies for rank-deficient "
        "linear-Gaussian models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser) -> None:
        p.add_argument("--config", help="JSON config file mirroring ExperimentConfig")
        p.add_argument(
            "--overrides",
            action="append",
            default=[],
            metavar="K=V[,K=V...]",
            help="config overrides; list values accept a..b, a..bxK, or v1+v2",
        )
        p.add_argument("--output-dir", help=f"output directory (else ${OUTPUT_DIR_ENV})")
        p.add_argument("--plot", action="store_true", help="also render SVG charts")

    for command, study in _STUDY_BY_COMMAND.items():
        sp = sub.add_parser(command, help=f"run the {study} study")
        add_common(sp)
    sp = sub.add_parser("evidence", help="print the evidence curve for one configuration")
    add_common(sp)
    sub.add_parser("verify", help="run the brute-force oracle verification suite")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify":
            return _run_verify_command(args)
        if args.command == "evidence":
            return _run_evidence_command(args)
        return _run_study_command(args.command, args)
    except SystemExit as exc:  # argparse usage errors and --help
        code = exc.code
        return code if isinstance(code, int) else 1
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 1
    except (NumericalError, OracleError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
