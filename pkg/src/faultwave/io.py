"""File formats and run configuration.

Trace records travel as CSV (`t,va,vb,vc`, time in seconds with 12
significant digits) plus a JSON sidecar holding the sample rate and the
ground-truth fault, if any. Reports are JSON; index series, spectra, and
coefficient dumps are small CSVs. All writes are atomic (temp file + rename).

A run configuration is one JSON document; omitted sections fall back to
defaults and the fully resolved dictionary is embedded in outputs for
provenance.
"""

from __future__ import annotations

import dataclasses
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .detect import AdaptiveThreshold, DetectorConfig, FixedThreshold, Spans
from .errors import ConfigError, DegenerateInputError
from .ica import IcaConfig
from .signal_model import (
    FaultSpec,
    FaultType,
    NoiseSpec,
    ThreePhaseRecord,
    WaveformConfig,
    add_noise,
    generate_baseline,
    inject_fault,
)

FLOAT_FMT = "{:.12g}"


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sidecar_path(csv_path: Path) -> Path:
    return Path(csv_path).with_suffix(".meta.json")


def write_record_csv(path: Path, record: ThreePhaseRecord) -> None:
    """Write `t,va,vb,vc` CSV plus the JSON sidecar with sampling metadata."""
    t = record.time_axis()
    lines = ["t,va,vb,vc"]
    for i in range(record.n_samples):
        lines.append(
            ",".join(
                FLOAT_FMT.format(v)
                for v in (t[i], record.samples[0, i], record.samples[1, i], record.samples[2, i])
            )
        )
    atomic_write_text(Path(path), "\n".join(lines) + "\n")

    meta = {"sample_rate_hz": record.sample_rate_hz, "fault": fault_to_dict(record.labels)}
    atomic_write_text(sidecar_path(path), json.dumps(meta, indent=2) + "\n")


def read_record_csv(path: Path) -> ThreePhaseRecord:
    """Reconstruct a record from CSV, using the sidecar when present.

    Without a sidecar the sample rate is recovered from the time column.
    """
    path = Path(path)
    raw = path.read_text().strip().splitlines()
    if not raw or not raw[0].startswith("t,"):
        raise DegenerateInputError(f"{path} is not a trace CSV (missing 't,...' header)")
    body = raw[1:]
    if len(body) < 2:
        raise DegenerateInputError(f"{path} holds fewer than 2 samples")

    data = np.array([[float(v) for v in line.split(",")] for line in body])
    if data.shape[1] != 4:
        raise DegenerateInputError(f"{path} must have 4 columns (t,va,vb,vc)")

    labels = None
    meta = sidecar_path(path)
    if meta.exists():
        meta_obj = json.loads(meta.read_text())
        fs = float(meta_obj["sample_rate_hz"])
        labels = fault_from_dict(meta_obj.get("fault"))
    else:
        t = data[:, 0]
        fs = (len(t) - 1) / (t[-1] - t[0])
    return ThreePhaseRecord(sample_rate_hz=fs, samples=data[:, 1:].T, labels=labels)


def write_series_csv(path: Path, times: np.ndarray, values: np.ndarray, value_header: str) -> None:
    lines = [f"t,{value_header}"]
    for t, v in zip(times, values):
        lines.append(f"{FLOAT_FMT.format(t)},{FLOAT_FMT.format(v)}")
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


def write_tree_csv(path: Path, tree) -> None:
    """Coefficient dump: `level,k,value` with levels d1..dJ then aJ."""
    lines = ["level,k,value"]
    for j, detail in enumerate(tree.details, start=1):
        for k, v in enumerate(detail):
            lines.append(f"d{j},{k},{FLOAT_FMT.format(v)}")
    for k, v in enumerate(tree.approx):
        lines.append(f"a{tree.levels},{k},{FLOAT_FMT.format(v)}")
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


def write_spectrum_csv(path: Path, spectrum) -> None:
    """Spectrum dump: `bin_hz,magnitude`."""
    lines = ["bin_hz,magnitude"]
    for f, m in zip(spectrum.frequencies(), spectrum.magnitudes):
        lines.append(f"{FLOAT_FMT.format(f)},{FLOAT_FMT.format(m)}")
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


def write_spectrogram_csv(path: Path, spectrogram) -> None:
    """Spectrogram dump: `frame_time_s,bin_hz,magnitude`, frame-major."""
    lines = ["frame_time_s,bin_hz,magnitude"]
    freqs = spectrogram.frequencies()
    for t, frame in zip(spectrogram.frame_times_s, spectrogram.frames):
        for f, m in zip(freqs, frame):
            lines.append(f"{FLOAT_FMT.format(t)},{FLOAT_FMT.format(f)},{FLOAT_FMT.format(m)}")
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


def write_ica_model_json(path: Path, model, whitening) -> None:
    """Model dump: mean, projection, unmixing (row-major), contrast, seed, flag."""
    payload = {
        "mean": whitening.mean.tolist(),
        "projection": whitening.projection.tolist(),
        "unmixing": model.unmixing.tolist(),
        "contrast": model.contrast,
        "seed": model.seed,
        "converged": bool(model.converged),
        "iterations_used": int(model.iterations_used),
    }
    atomic_write_text(Path(path), json.dumps(payload, indent=2) + "\n")


def fault_to_dict(fault: FaultSpec | None) -> dict | None:
    if fault is None:
        return None
    d = dataclasses.asdict(fault)
    d["fault_type"] = fault.fault_type.value
    return d


def fault_from_dict(obj: dict | None) -> FaultSpec | None:
    if obj is None:
        return None
    kwargs = dict(obj)
    _check_keys(kwargs, {f.name for f in dataclasses.fields(FaultSpec)}, "fault")
    try:
        kwargs["fault_type"] = FaultType(kwargs.get("fault_type", "NONE"))
    except ValueError as exc:
        raise ConfigError(f"invalid fault_type {kwargs.get('fault_type')!r}") from exc
    return FaultSpec(**kwargs)


@dataclass
class RunConfig:
    """Everything one CLI invocation needs, with defaults materialized."""

    waveform: WaveformConfig
    fault: FaultSpec
    noise: NoiseSpec
    detector: DetectorConfig
    ica: IcaConfig
    spans: Spans
    channel: str = "a"

    def to_dict(self) -> dict:
        policy = self.detector.threshold_policy
        if isinstance(policy, FixedThreshold):
            policy_dict = {"fixed": policy.value}
        else:
            policy_dict = {"k_sigma": policy.k_sigma,
                           "calibration_span": policy.calibration_span}
        return {
            "waveform": dataclasses.asdict(self.waveform),
            "fault": fault_to_dict(self.fault),
            "noise": dataclasses.asdict(self.noise),
            "detector": {
                "method": self.detector.method,
                "threshold": policy_dict,
                "level": self.detector.level,
                "cutoff_hz": self.detector.cutoff_hz,
                "min_consecutive": self.detector.min_consecutive,
            },
            "ica": dataclasses.asdict(self.ica),
            "spans": {
                "prefault": list(self.spans.prefault),
                "calibration": list(self.spans.calibration),
                "analysis": list(self.spans.analysis),
            },
            "channel": self.channel,
        }


_SECTION_KEYS = {"waveform", "fault", "noise", "detector", "ica", "spans", "channel"}


def _parse_threshold(det_obj: dict) -> FixedThreshold | AdaptiveThreshold:
    """Accept a bare number, {"fixed": v}, or adaptive keys (also inline)."""
    threshold = det_obj.get("threshold")
    if isinstance(threshold, (int, float)):
        return FixedThreshold(float(threshold))
    if isinstance(threshold, dict):
        _check_keys(threshold, {"fixed", "k_sigma", "calibration_span"}, "detector.threshold")
        if "fixed" in threshold:
            return FixedThreshold(float(threshold["fixed"]))
        span = threshold.get("calibration_span")
        return AdaptiveThreshold(
            k_sigma=threshold.get("k_sigma", 5.0),
            calibration_span=tuple(span) if span is not None else None,
        )
    span = det_obj.get("calibration_span")
    return AdaptiveThreshold(
        k_sigma=det_obj.get("k_sigma", 5.0),
        calibration_span=tuple(span) if span is not None else None,
    )


def _check_keys(obj: dict, allowed: set[str], context: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r} in {context}")


def _build_section(obj: dict, allowed: set[str], context: str, builder, **extra):
    _check_keys(obj, allowed, context)
    try:
        return builder(**obj, **extra)
    except TypeError as exc:
        raise ConfigError(f"invalid {context} section: {exc}") from exc


def parse_run_config(obj: dict) -> RunConfig:
    """Build a RunConfig from a parsed JSON document, validating keys.

    Raises:
        ConfigError: unknown keys or invalid values (the message names the
            offending key).
    """
    if not isinstance(obj, dict):
        raise ConfigError("run config must be a JSON object")
    _check_keys(obj, _SECTION_KEYS, "run config")

    waveform_obj = dict(obj.get("waveform", {}))
    waveform_obj.setdefault("duration_s", 0.2)
    if "phase_offsets_rad" in waveform_obj:
        waveform_obj["phase_offsets_rad"] = tuple(waveform_obj["phase_offsets_rad"])
    waveform = _build_section(
        waveform_obj,
        {"duration_s", "sample_rate_hz", "fundamental_hz", "amplitude_pu", "phase_offsets_rad"},
        "waveform", WaveformConfig,
    )

    fault = fault_from_dict(obj.get("fault")) or FaultSpec.none()

    noise = _build_section(dict(obj.get("noise", {})), {"snr_db", "seed"}, "noise", NoiseSpec)

    det_obj = dict(obj.get("detector", {}))
    _check_keys(det_obj, {"method", "threshold", "k_sigma", "calibration_span",
                          "level", "cutoff_hz", "min_consecutive"}, "detector")
    policy = _parse_threshold(det_obj)
    detector = DetectorConfig(
        method=det_obj.get("method", "wavelet"),
        threshold_policy=policy,
        level=det_obj.get("level", 1),
        cutoff_hz=det_obj.get("cutoff_hz", 150.0),
        min_consecutive=det_obj.get("min_consecutive", 3),
    )

    ica_obj = dict(obj.get("ica", {}))
    ica_obj.setdefault("fundamental_hz", waveform.fundamental_hz)
    ica = _build_section(
        ica_obj,
        {"contrast", "seed", "max_iter", "tol", "embedding_dim", "fundamental_hz", "retain"},
        "ica", IcaConfig,
    )

    n = waveform.n_samples
    spans_obj = dict(obj.get("spans", {}))
    _check_keys(spans_obj, {"prefault", "calibration", "analysis"}, "spans")
    head = max(2, int(0.3 * n))
    spans = Spans(
        prefault=tuple(spans_obj.get("prefault", (0, head))),
        calibration=tuple(spans_obj.get("calibration", (0, head))),
        analysis=tuple(spans_obj.get("analysis", (0, n))),
    )
    for name, (lo, hi) in (("prefault", spans.prefault),
                           ("calibration", spans.calibration),
                           ("analysis", spans.analysis)):
        if not (0 <= lo < hi <= n):
            raise ConfigError(f"span {name}=({lo}, {hi}) lies outside the record (N={n})")

    channel = obj.get("channel", "a")
    if channel not in ("a", "b", "c"):
        raise ConfigError(f"channel must be 'a', 'b' or 'c', got {channel!r}")

    return RunConfig(waveform=waveform, fault=fault, noise=noise,
                     detector=detector, ica=ica, spans=spans, channel=channel)


def load_run_config(path: Path) -> RunConfig:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return parse_run_config(obj)


def build_record(config: RunConfig) -> ThreePhaseRecord:
    """Generate, fault, and add noise per the run configuration."""
    record = inject_fault(generate_baseline(config.waveform), config.fault)
    return add_noise(record, config.noise)


def load_suite(path: Path) -> tuple[RunConfig, list[tuple[str, dict]]]:
    """Parse a scenario suite: a base run config plus named partial overrides.

    Returns the base config and a list of (name, merged config dict) pairs.

    Raises:
        ConfigError: malformed document or duplicate scenario names.
    """
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("suite must be a JSON object")
    _check_keys(obj, {"base", "scenarios"}, "suite")

    base_dict = obj.get("base", {})
    base = parse_run_config(base_dict)

    merged: list[tuple[str, dict]] = []
    seen = set()
    for i, scenario in enumerate(obj.get("scenarios", [])):
        if not isinstance(scenario, dict) or "name" not in scenario:
            raise ConfigError(f"scenario #{i} must be an object with a 'name'")
        name = scenario["name"]
        if name in seen:
            raise ConfigError(f"duplicate scenario name {name!r}")
        seen.add(name)
        delta = {k: v for k, v in scenario.items() if k != "name"}
        merged.append((name, _deep_merge(base_dict, delta)))
    return base, merged


def _deep_merge(base: dict, delta: dict) -> dict:
    out = dict(base)
    for key, value in delta.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out
