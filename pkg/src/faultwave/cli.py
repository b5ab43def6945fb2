"""Command-line front end: generate records, run detectors, dump plot data.

Exit codes: 0 = ran to completion (detection outcome is report data, not
status), 2 = unreadable/invalid inputs or configuration, 3 = a transform
failed while running a detector.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .detect import (
    DetectionReport,
    EnergyTable,
    energy_table,
    ica_detect,
    wavelet_detect,
    energy_detect,
)
from .errors import ConfigError, DegenerateInputError, FaultwaveError
from .io import (
    RunConfig,
    atomic_write_text,
    build_record,
    fault_to_dict,
    load_run_config,
    load_suite,
    parse_run_config,
    read_record_csv,
    write_record_csv,
    write_series_csv,
)
from .signal_model import ThreePhaseRecord, select_channel

_SERIES_HEADER = {"wavelet": "detail_abs", "ica": "pi"}


def _fail(message: str, code: int) -> None:
    click.echo(f"faultwave: error: {message}", err=True)
    sys.exit(code)


def _load_config(config_path: str) -> RunConfig:
    try:
        return load_run_config(Path(config_path))
    except (ConfigError, OSError) as exc:
        _fail(str(exc), 2)


def run_detector(record: ThreePhaseRecord, config: RunConfig) -> DetectionReport:
    """Dispatch to the configured detector."""
    method = config.detector.method
    if method == "ica":
        return ica_detect(record, config.detector, config.spans, config.ica)
    trace = select_channel(record, config.channel)
    if method == "wavelet":
        return wavelet_detect(trace, config.detector)
    return energy_detect(
        trace, method, config.detector, config.spans,
        fundamental_hz=config.waveform.fundamental_hz,
    )


@click.group()
@click.version_option(version=__version__, prog_name="faultwave")
def main() -> None:
    """Synthesize three-phase fault records and run fault detectors."""


@main.command("generate")
@click.option("--config", "config_path", required=True, type=click.Path(), help="Run config JSON.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output trace CSV.")
def cmd_generate(config_path: str, out_path: str) -> None:
    """Write a trace CSV plus its JSON metadata sidecar."""
    config = _load_config(config_path)
    try:
        record = build_record(config)
        write_record_csv(Path(out_path), record)
    except FaultwaveError as exc:
        _fail(str(exc), 2)
    click.echo(f"wrote {record.n_samples}-sample record to {out_path}")


@main.command("detect")
@click.option("--in", "in_path", required=True, type=click.Path(), help="Input trace CSV.")
@click.option("--config", "config_path", required=True, type=click.Path(), help="Run config JSON.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Report JSON path.")
def cmd_detect(in_path: str, config_path: str, out_path: str) -> None:
    """Run the configured detector; write a report JSON and an index CSV."""
    config = _load_config(config_path)
    record = _read_record(in_path)
    report = _run_or_fail(record, config)

    out = Path(out_path)
    payload = report.to_json_dict(config=config.to_dict(), scenario=_scenario_info(record))
    atomic_write_text(out, json.dumps(payload, indent=2) + "\n")
    header = _SERIES_HEADER.get(report.method, "index")
    write_series_csv(out.with_suffix(".csv"), report.index_times_s, report.index_series, header)

    verdict = "detected" if report.detected else "no fault"
    at = f" at {report.onset_time_s:.6g} s" if report.detected else ""
    click.echo(f"{report.method}: {verdict}{at} (threshold {report.threshold_used:.6g})")


@main.command("energy-table")
@click.option("--config", "suite_path", required=True, type=click.Path(), help="Scenario suite JSON.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output CSV.")
def cmd_energy_table(suite_path: str, out_path: str) -> None:
    """Evaluate the FT/STFT/WT energy indices over a scenario suite."""
    try:
        _, scenarios = load_suite(Path(suite_path))
    except (ConfigError, OSError) as exc:
        _fail(str(exc), 2)

    rows = []
    for name, merged in scenarios:
        try:
            config = parse_run_config(merged)
            table = energy_table(
                [config.fault], cfg=config.detector, waveform=config.waveform,
                noise=config.noise, spans=config.spans,
            )
            rows.append((name, table.rows[0]))
        except FaultwaveError as exc:
            rows.append((name, f"{type(exc).__name__}: {exc}"))

    lines = [EnergyTable.CSV_HEADER + ",error"]
    succeeded = 0
    for name, row in rows:
        error = row if isinstance(row, str) else row.error
        if error is not None:
            lines.append(f"{name},,,,,,,{error}")
        else:
            succeeded += 1
            lines.append(
                f"{name},{row.e_ft:.12g},{row.e_stft:.12g},{row.e_wt:.12g},"
                f"{row.detected_ft},{row.detected_stft},{row.detected_wt},"
            )
    atomic_write_text(Path(out_path), "\n".join(lines) + "\n")

    _echo_table(rows)
    if rows and succeeded == 0:
        _fail("every scenario in the suite failed", 3)


def _echo_table(rows) -> None:
    header = f"{'scenario':<12} {'e_ft':>12} {'e_stft':>12} {'e_wt':>12}  detected"
    click.echo(header)
    click.echo("-" * len(header))
    for name, row in rows:
        error = row if isinstance(row, str) else row.error
        if error is not None:
            click.echo(f"{name:<12} {'error':>12} {'':>12} {'':>12}  {error}")
        else:
            flags = "/".join(
                "y" if f else "n"
                for f in (row.detected_ft, row.detected_stft, row.detected_wt)
            )
            click.echo(
                f"{name:<12} {row.e_ft:>12.5g} {row.e_stft:>12.5g} {row.e_wt:>12.5g}  {flags}"
            )


@main.command("plot-data")
@click.option("--in", "in_path", required=True, type=click.Path(), help="Input trace CSV.")
@click.option("--config", "config_path", required=True, type=click.Path(), help="Run config JSON.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
def cmd_plot_data(in_path: str, config_path: str, out_dir: str) -> None:
    """Emit paired CSVs (voltage vs. time, detector index vs. time)."""
    config = _load_config(config_path)
    record = _read_record(in_path)
    report = _run_or_fail(record, config)

    out = Path(out_dir)
    write_record_csv(out / "voltage.csv", record)
    header = _SERIES_HEADER.get(report.method, "index")
    write_series_csv(out / "index.csv", report.index_times_s, report.index_series, header)
    extras = _write_transform_dumps(out, record, config)
    click.echo(f"wrote voltage.csv, index.csv{extras} to {out_dir}")


def _write_transform_dumps(out: Path, record: ThreePhaseRecord, config: RunConfig) -> str:
    """Method-specific transform dumps next to the plot pair."""
    method = config.detector.method
    trace = select_channel(record, config.channel)
    if method == "wavelet":
        write_tree_csv(out / "coefficients.csv",
                       dwt.dwt_decompose(trace, config.detector.level))
        return ", coefficients.csv"
    if method == "energy_ft":
        write_spectrum_csv(out / "spectrum.csv", spectral.dft(trace))
        return ", spectrum.csv"
    if method == "energy_stft":
        write_spectrogram_csv(out / "spectrogram.csv", spectral.stft(trace))
        return ", spectrogram.csv"
    return ""


def _read_record(in_path: str) -> ThreePhaseRecord:
    try:
        return read_record_csv(Path(in_path))
    except (FileNotFoundError, OSError) as exc:
        _fail(f"cannot read trace: {exc}", 2)
    except (DegenerateInputError, ConfigError, ValueError) as exc:
        _fail(f"invalid trace file {in_path}: {exc}", 2)


def _run_or_fail(record: ThreePhaseRecord, config: RunConfig) -> DetectionReport:
    try:
        return run_detector(record, config)
    except FaultwaveError as exc:
        _fail(f"{config.detector.method} detector failed: {exc}", 3)


def _scenario_info(record: ThreePhaseRecord) -> dict:
    return {
        "n_samples": record.n_samples,
        "sample_rate_hz": record.sample_rate_hz,
        "fault": fault_to_dict(record.labels),
    }


if __name__ == "__main__":
    main()
