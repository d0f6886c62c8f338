"""CSV / JSON / plot-data serialization of sweep results.

Column orders are frozen (documented in FORMATS.md) so downstream plotting
scripts can rely on them.  Floats are rendered with ``repr`` (shortest
round-trip), which makes file bodies byte-identical across reruns; no
timestamps ever enter a file body.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict

from .errors import ConfigError
from .fitting import FitResult, PeakMetrics
from .scenarios import SweepResult

CSV_COLUMNS = {
    "rabi": ["duration_ns", "click_sum", "click_sem", "g2", "coincidence",
             "p0", "p1", "p2"],
    "area-scan": ["chirp_rate_u", "area_pi", "omega2_scale", "click_sum",
                  "click_sem", "g2", "coincidence", "p0", "p1", "p2"],
    "chirp-summary": ["chirp_rate_u", "peak_position_pi", "peak_value",
                      "width80_pi", "robustness_vs_0", "g2_at_peak",
                      "oscillation_dip", "width80_clamped", "edge_peak",
                      "fit_converged"],
    "detuning-scan": ["scheme", "delta1_mhz", "click_sum", "click_sem", "g2",
                      "coincidence", "p0", "p1", "p2"],
    "adiabaticity": ["time_ns", "omega1_rad_us", "omega2_rad_us",
                     "omega_n_rad_us", "delta_rad_us", "adiabaticity_ratio"],
}


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_csv(scenario: str, records: list[dict]) -> str:
    if not records:
        raise ConfigError("refusing to serialize an empty sweep")
    columns = CSV_COLUMNS[scenario]
    lines = [",".join(columns)]
    for rec in records:
        lines.append(",".join(_cell(rec[col]) for col in columns))
    return "\n".join(lines) + "\n"


def _fit_payload(fit: FitResult | None) -> dict | None:
    if fit is None:
        return None
    return {
        "model": fit.model,
        "params": fit.as_dict(),
        "residual_norm": fit.residual_norm,
        "converged": fit.converged,
        "degenerate": fit.degenerate,
        "iterations": fit.iterations,
        "covariance": None if fit.covariance is None else
                      [[float(v) for v in row] for row in fit.covariance],
    }


def _peak_payload(peak: PeakMetrics | None) -> dict | None:
    return None if peak is None else asdict(peak)


def sweep_summary(sweep: SweepResult) -> dict:
    return {
        "scenario": sweep.scenario,
        "axis_name": sweep.axis_name,
        "axis": sweep.axis,
        "fit": _fit_payload(sweep.fit),
        "peak": _peak_payload(sweep.peak),
        "extras": sweep.extras,
        "provenance": sweep.provenance,
    }


def dump_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# plot-ready data files: x, y, yerr with '#' provenance headers


def _plot_file(sweep: SweepResult, x_key: str, y_key: str, err_key: str | None) -> str:
    head = [
        f"# scenario: {sweep.scenario}",
        f"# config: {sweep.provenance.get('config_hash', '')}",
        f"# seed: {sweep.provenance.get('seed', '')}",
        f"# columns: {x_key} {y_key}" + (f" {err_key}" if err_key else ""),
    ]
    rows = []
    for rec in sweep.records:
        cells = [_cell(rec[x_key]), _cell(rec[y_key])]
        if err_key:
            cells.append(_cell(rec[err_key]))
        rows.append(" ".join(cells))
    return "\n".join(head + rows) + "\n"


def _rate_tag(rate: float) -> str:
    return f"rate{rate:+g}u"


def plot_file_set(result) -> dict[str, str]:
    """Plot data files plus a manifest for one scenario result."""
    files: dict[str, str] = {}
    manifest: dict = {}
    if isinstance(result, SweepResult):
        sweeps = {result.scenario.replace("-", "_"): [result]}
    else:
        sweeps = result
    for group in sweeps.values():
        for sweep in group:
            if not sweep.records:
                raise ConfigError("refusing to emit plot data for an empty sweep")
            if sweep.scenario == "area-scan":
                name = f"area_scan.{_rate_tag(sweep.extras['chirp_rate_u'])}.dat"
                cols = ("area_pi", "click_sum", "click_sem")
            elif sweep.scenario == "detuning-scan":
                name = f"detuning_scan.{sweep.extras['scheme']}.dat"
                cols = ("delta1_mhz", "click_sum", "click_sem")
            elif sweep.scenario == "rabi":
                name = "rabi.curve.dat"
                cols = ("duration_ns", "click_sum", "click_sem")
            elif sweep.scenario == "adiabaticity":
                name = "adiabaticity.ratio.dat"
                cols = ("time_ns", "adiabaticity_ratio", None)
            else:
                continue
            files[name] = _plot_file(sweep, cols[0], cols[1], cols[2])
            manifest[name] = {
                "scenario": sweep.scenario,
                "columns": [c for c in cols if c],
                "provenance": sweep.provenance,
            }
    if files:
        files[_manifest_name(result, sweeps)] = dump_json(manifest)
    return files


def _manifest_name(result, sweeps: dict) -> str:
    if isinstance(result, SweepResult):
        return f"{result.scenario.replace('-', '_')}.plot-manifest.json"
    if len(sweeps) == 1:
        return f"{next(iter(sweeps))}.plot-manifest.json"
    return "plot-manifest.json"


def emit_plot_data(result, directory: str) -> list[str]:
    """Write the plot-ready files for ``result`` into ``directory``."""
    files = plot_file_set(result)
    if not files:
        raise ConfigError("result produced no plot data")
    return write_files(files, directory)


# ---------------------------------------------------------------------------
# complete file sets per scenario


def scenario_files(scenario: str, result) -> dict[str, str]:
    """All output file bodies (CSV + summary JSON + plot data) for a run."""
    files: dict[str, str] = {}
    if scenario == "rabi":
        files["rabi.csv"] = records_csv("rabi", result.records)
        files["rabi.summary.json"] = dump_json(sweep_summary(result))
        files.update(plot_file_set(result))
    elif scenario == "area-scan":
        records = [rec for sweep in result for rec in sweep.records]
        files["area_scan.csv"] = records_csv("area-scan", records)
        files["area_scan.summary.json"] = dump_json({
            "scenario": "area-scan",
            "curves": [sweep_summary(s) for s in result],
        })
        files.update(plot_file_set({"area_scan": result}))
    elif scenario == "chirp-summary":
        summary = result["summary"]
        files["chirp_summary.csv"] = records_csv("chirp-summary", summary["rows"])
        files["chirp_summary.summary.json"] = dump_json(summary)
        files.update(scenario_files("area-scan", result["area_results"]))
    elif scenario == "detuning-scan":
        sweeps = [result["chirped"], result["pi_pulse"]]
        records = [rec for sweep in sweeps for rec in sweep.records]
        files["detuning_scan.csv"] = records_csv("detuning-scan", records)
        files["detuning_scan.summary.json"] = dump_json({
            "scenario": "detuning-scan",
            "comparison": result["comparison"],
            "curves": [sweep_summary(s) for s in sweeps],
        })
        files.update(plot_file_set({"detuning_scan": sweeps}))
    elif scenario == "adiabaticity":
        files["adiabaticity.csv"] = records_csv("adiabaticity", result.records)
        files["adiabaticity.summary.json"] = dump_json(sweep_summary(result))
        files.update(plot_file_set(result))
    else:
        raise ConfigError(f"unknown scenario: {scenario}")
    return files


def write_files(files: dict[str, str], directory: str) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, body in sorted(files.items()):
        path = os.path.join(directory, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(body)
        paths.append(path)
    return paths
