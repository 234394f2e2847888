"""Experiment orchestration: validate, sweep, asymptote, compare.

Every output file is a pure function of (resolved config, tool version):
floats are written with shortest round-trip formatting, rows in sweep order,
and all randomness flows from the config's master seed.  The run manifest
records checksums so reruns can be byte-verified.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .asymptotics import (
    LimitParams,
    ase_slope_bounds,
    evaluate_mean_limit,
    mean_sinr_bounds,
    sample_limit_sinr,
)
from .config import ExperimentConfig
from .pathloss import DivergenceError, validate
from .simulator import DensityPointEstimate, PointFailure, SimConfig, sweep
from .streams import substream

__all__ = [
    "SWEEP_COLUMNS",
    "cmd_validate",
    "cmd_sweep",
    "cmd_asymptote",
    "cmd_compare",
    "convergence_verdict",
    "CompareVerdict",
]

SWEEP_COLUMNS = [
    "lambda_per_km2",
    "n_antennas",
    "trials",
    "mean_sinr",
    "sinr_ci",
    "median_sinr",
    "mean_se_bps_hz",
    "se_ci",
    "ase_bps_hz_m2",
    "seed",
]

PLOT_COLUMNS = [
    "density_exponent",
    "lambda_per_km2",
    "log10_lambda",
    "mean_sinr",
    "mean_se_bps_hz",
    "ase_bps_hz_m2",
    "log10_ase",
]


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header_lines: list[str], columns: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(config: ExperimentConfig, echo=print) -> int:
    """Check path-loss feasibility and echo the scaling constants.

    Exit code 0 only when the model is feasible.
    """
    report = validate(config.model)
    echo(f"path loss: {type(config.model).__name__}")
    echo(f"feasible: {report.is_feasible}")
    if math.isfinite(report.gain_integral):
        echo(f"gain_integral_model_units: {report.gain_integral!r}")
        echo(f"gain_integral_km2: {report.gain_integral * 1e-6!r}")
    for violation in report.violations:
        where = "" if violation.radius_m is None else f" (at r={violation.radius_m:g} m)"
        echo(f"violation: {violation.name}{where}")

    scaling = config.scaling_for(1.0)
    echo(f"antenna family: {config.antenna_family}")
    echo(f"antennas_per_density: {config.antennas_per_density!r}")
    echo(f"gain_ratio_slope: {scaling.gain_ratio_slope!r}")
    echo(f"beamwidth_scale: {scaling.beamwidth_scale!r}")
    echo(f"density_exponents: {config.density_exponents}")
    if report.is_feasible:
        params = LimitParams.from_scaling(config.model, scaling, config.link_fading)
        lo, hi = mean_sinr_bounds(params)
        alo, ahi = ase_slope_bounds(params)
        echo(f"mean_sinr_limit_bounds: [{lo!r}, {hi!r}]")
        echo(f"ase_per_bs_bounds_bps_hz: [{alo!r}, {ahi!r}]")
    return 0 if report.is_feasible else 1


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _regime_tag(exponent: float) -> str:
    return f"eps{exponent:g}".replace(".", "p")


def cmd_sweep(config: ExperimentConfig, echo=print) -> int:
    """Run every scaling regime, emit one CSV each plus plot data + manifest."""
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    manifest_files: dict[str, dict] = {}
    runtimes: dict[str, float] = {}
    failures: list[dict] = []
    plot_rows: list[list] = []

    for regime_index, exponent in enumerate(config.density_exponents):
        started = time.perf_counter()
        sim = SimConfig(
            model=config.model,
            scaling=config.scaling_for(exponent),
            fading=config.link_fading,
            window=config.window,
            sigma2=config.sigma2,
            trials=config.trials,
            master_seed=config.master_seed,
            seed_path=(regime_index,),
            block_trials=config.block_trials,
        )
        results = sweep(config.densities, sim)
        rows = []
        for result in results:
            if isinstance(result, PointFailure):
                failures.append(
                    {
                        "density_exponent": exponent,
                        "lambda_per_km2": result.density_per_km2,
                        "message": result.message,
                    }
                )
                echo(
                    f"[eps={exponent:g}] point {result.density_per_km2:g}/km^2 "
                    f"failed: {result.message}"
                )
                continue
            rows.append(_sweep_row(result))
            plot_rows.append(
                [
                    exponent,
                    result.density_per_km2,
                    math.log10(result.density_per_km2),
                    result.mean_sinr,
                    result.mean_se_bps_hz,
                    result.ase_bps_hz_m2,
                    math.log10(result.ase_bps_hz_m2) if result.ase_bps_hz_m2 > 0 else math.nan,
                ]
            )
        name = f"sweep_{_regime_tag(exponent)}.csv"
        _write_csv(
            out / name,
            [
                f"densify {__version__}",
                f"config_hash={config.config_hash(exponent)}",
                f"density_exponent={exponent!r}",
            ],
            SWEEP_COLUMNS,
            rows,
        )
        manifest_files[name] = {"sha256": _sha256(out / name)}
        runtimes[name] = round(time.perf_counter() - started, 3)
        echo(f"[eps={exponent:g}] wrote {out / name} ({len(rows)} points)")

    plot_name = "plotdata.csv"
    _write_csv(
        out / plot_name,
        [f"densify {__version__}", f"config_hash={config.config_hash()}"],
        PLOT_COLUMNS,
        plot_rows,
    )
    manifest_files[plot_name] = {"sha256": _sha256(out / plot_name)}

    if "gnuplot" in config.formats:
        script = _gnuplot_script(config)
        (out / "sweep.gp").write_text(script, encoding="utf-8")
        manifest_files["sweep.gp"] = {"sha256": _sha256(out / "sweep.gp")}

    manifest = {
        "tool": "densify",
        "version": __version__,
        "config_hash": config.config_hash(),
        "files": manifest_files,
        "runtime_s": runtimes,
        "failures": failures,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    echo(f"wrote {out / 'manifest.json'}")
    return 1 if failures else 0


def _sweep_row(est: DensityPointEstimate) -> list:
    return [
        est.density_per_km2,
        est.n_antennas,
        est.trials,
        est.mean_sinr,
        est.sinr_ci,
        est.median_sinr,
        est.mean_se_bps_hz,
        est.se_ci,
        est.ase_bps_hz_m2,
        est.master_seed,
    ]


def _gnuplot_script(config: ExperimentConfig) -> str:
    lines = [
        "set datafile separator ','",
        "set logscale x",
        "set xlabel 'BS density (per km^2)'",
        "set terminal pngcairo size 900,600",
        "set output 'sinr_vs_density.png'",
        "set ylabel 'mean SINR'",
        "set logscale y",
    ]
    plots = []
    for exponent in config.density_exponents:
        plots.append(
            f"'plotdata.csv' using 2:($1=={exponent!r}?$4:1/0) with linespoints "
            f"title 'exponent {exponent:g}'"
        )
    lines.append("plot " + ", ".join(plots))
    lines += ["set output 'ase_vs_density.png'", "set ylabel 'ASE (bps/Hz/m^2)'"]
    plots = [p.replace("?$4:", "?$6:") for p in plots]
    lines.append("plot " + ", ".join(plots))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# asymptote
# ---------------------------------------------------------------------------


def cmd_asymptote(
    config: ExperimentConfig, mc_draws: int | None = None, echo=print
) -> int:
    """Evaluate the linear-scaling limit and its bounds; write a JSON report."""
    try:
        params = LimitParams.from_scaling(
            config.model, config.scaling_for(1.0), config.link_fading
        )
        mean_limit = evaluate_mean_limit(params)
    except DivergenceError as exc:
        echo(f"divergence: {exc}")
        return 1
    lo, hi = mean_sinr_bounds(params)
    alo, ahi = ase_slope_bounds(params)
    report = {
        "tool": "densify",
        "version": __version__,
        "config_hash": config.config_hash(1.0),
        "gain_integral": params.gain_integral,
        "gain_ratio_slope": params.gain_ratio_slope,
        "beamwidth_scale": params.beamwidth_scale,
        "antennas_per_density": params.antennas_per_density,
        "mean_sinr_limit": mean_limit,
        "mean_sinr_lower": lo,
        "mean_sinr_upper": hi,
        "ase_slope_lower_bps_hz": alo,
        "ase_slope_upper_bps_hz": ahi,
    }
    if mc_draws:
        draws = sample_limit_sinr(params, substream(config.master_seed, 0xA5), int(mc_draws))
        stderr = float(draws.std(ddof=1)) / math.sqrt(draws.size)
        report["mc_draws"] = int(mc_draws)
        report["mc_mean"] = float(draws.mean())
        report["mc_z_score"] = (report["mc_mean"] - mean_limit) / stderr
    config.out_dir.mkdir(parents=True, exist_ok=True)
    path = config.out_dir / "asymptote.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    for key in sorted(report):
        echo(f"{key}: {report[key]}")
    echo(f"wrote {path}")
    if mc_draws and abs(report["mc_z_score"]) >= 3.0:
        echo("monte-carlo cross-check FAILED (|z| >= 3)")
        return 1
    return 0


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompareVerdict:
    status: str  # PASS | FAIL | INCONCLUSIVE
    reasons: tuple[str, ...]
    gaps: tuple[float, ...]

    @property
    def exit_code(self) -> int:
        return {"PASS": 0, "FAIL": 1, "INCONCLUSIVE": 2}[self.status]


def convergence_verdict(
    rows: list[dict],
    mean_limit: float,
    se_lower: float,
    se_upper: float,
) -> CompareVerdict:
    """Pure verdict logic for sweep-vs-limit convergence.

    PASS requires: the gap to the limit shrinks between the two largest
    densities, the final gap is within max(3 CI, 10% of the limit), and the
    final mean spectral efficiency lies in the per-station bounds widened by
    its confidence half-width.  Fewer than 3 points or under two decades of
    span is INCONCLUSIVE.
    """
    reasons = []
    rows = sorted(rows, key=lambda r: r["lambda_per_km2"])
    gaps = tuple(abs(r["mean_sinr"] - mean_limit) for r in rows)
    if len(rows) < 3 or rows[-1]["lambda_per_km2"] / rows[0]["lambda_per_km2"] < 100.0:
        return CompareVerdict("INCONCLUSIVE", ("density span under 3 points or 2 decades",), gaps)

    if not gaps[-1] < gaps[-2]:
        reasons.append(
            f"gap did not shrink at the two largest densities ({gaps[-2]:g} -> {gaps[-1]:g})"
        )
    allowance = max(3.0 * rows[-1]["sinr_ci"], 0.10 * mean_limit)
    if not gaps[-1] <= allowance:
        reasons.append(f"final gap {gaps[-1]:g} exceeds allowance {allowance:g}")
    se, se_ci = rows[-1]["mean_se_bps_hz"], rows[-1]["se_ci"]
    if not (se_lower - se_ci <= se <= se_upper + se_ci):
        reasons.append(
            f"final mean SE {se:g} outside [{se_lower:g}, {se_upper:g}] widened by {se_ci:g}"
        )
    return CompareVerdict("FAIL" if reasons else "PASS", tuple(reasons), gaps)


def read_sweep_csv(path) -> tuple[dict, list[dict]]:
    """Parse an emitted sweep CSV back into header metadata and rows."""
    meta: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    body = []
    for line in lines:
        if line.startswith("# "):
            text = line[2:].strip()
            if "=" in text:
                key, value = text.split("=", 1)
                meta[key] = value
        else:
            body.append(line)
    rows = []
    for record in csv.DictReader(body):
        rows.append(
            {
                key: (float(record[key]) if key != "n_antennas" else int(record[key]))
                for key in record
            }
        )
    return meta, rows


def cmd_compare(sweep_csv, report_json, echo=print) -> int:
    """Check a finished sweep against its asymptote report; 0 iff PASS."""
    meta, rows = read_sweep_csv(sweep_csv)
    report = json.loads(Path(report_json).read_text())
    if "config_hash" not in meta or meta["config_hash"] != report.get("config_hash"):
        echo(
            "refusing to compare: config hash mismatch "
            f"(sweep {meta.get('config_hash')}, report {report.get('config_hash')}); "
            "the report applies to the linear regime of the same config"
        )
        return 3
    if not rows:
        echo("refusing to compare: sweep holds no successful points")
        return 3
    verdict = convergence_verdict(
        rows,
        report["mean_sinr_limit"],
        report["ase_slope_lower_bps_hz"],
        report["ase_slope_upper_bps_hz"],
    )
    for row, gap in zip(rows, verdict.gaps):
        echo(
            f"lambda={row['lambda_per_km2']:g}: mean_sinr={row['mean_sinr']:.6g} "
            f"gap={gap:.6g} ci={row['sinr_ci']:.3g}"
        )
    top = [r for r in rows if r["lambda_per_km2"] >= rows[-1]["lambda_per_km2"] / 10.0]
    top_gaps = verdict.gaps[len(rows) - len(top):]
    monotone = all(b <= a for a, b in zip(top_gaps, top_gaps[1:]))
    echo(f"top-decade gap monotone: {monotone}")
    for reason in verdict.reasons:
        echo(f"reason: {reason}")
    echo(f"verdict: {verdict.status}")
    return verdict.exit_code
