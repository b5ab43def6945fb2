"""Tests for threshold calibration and the detector front ends."""

from __future__ import annotations

import numpy as np
import pytest

from faultwave import (
    ConfigError,
    DegenerateInputError,
    DetectorConfig,
    FaultSpec,
    FaultType,
    FixedThreshold,
    IcaConfig,
    Spans,
    Trace,
    calibrate_threshold,
    energy_detect,
    energy_table,
    ica_detect,
    select_channel,
    wavelet_detect,
)
from faultwave.detect import ENERGY_METHODS, REFERENCE_ENERGY_CONTENT
from conftest import FAULT_ONSET_SAMPLE, make_record

SPANS = Spans(prefault=(0, 120), calibration=(0, 120), analysis=(0, 400))


class TestCalibrateThreshold:
    def test_constant_series_returns_the_constant(self):
        series = np.full(100, 4.2)
        assert calibrate_threshold(series, (0, 100), 5.0) == pytest.approx(4.2)

    def test_standard_normal_lands_near_k(self):
        series = np.random.default_rng(0).standard_normal(10000)
        threshold = calibrate_threshold(series, (0, 10000), 5.0)
        assert 4.8 <= threshold <= 5.2

    def test_zero_k_returns_mean(self):
        series = np.arange(10.0)
        assert calibrate_threshold(series, (0, 10), 0.0) == pytest.approx(series.mean())

    def test_empty_span_rejected(self):
        with pytest.raises(DegenerateInputError):
            calibrate_threshold(np.ones(10), (5, 5), 5.0)


class TestWaveletDetect:
    def test_ag_onset_inside_stated_window(self, ag_record):
        report = wavelet_detect(select_channel(ag_record, "a"))
        assert report.detected
        assert 0.060 <= report.onset_time_s <= 0.070

    def test_clean_baseline_not_detected(self, baseline_record):
        report = wavelet_detect(select_channel(baseline_record, "a"))
        assert not report.detected
        assert report.onset_sample is None and report.onset_time_s is None

    def test_three_phase_fault_visible_on_every_channel(self):
        record = make_record("ABCG")
        for phase in "abc":
            assert wavelet_detect(select_channel(record, phase)).detected

    def test_onset_never_early_beyond_debounce(self):
        for seed in range(5):
            record = make_record("AG", snr_db=20.0, seed=seed)
            report = wavelet_detect(select_channel(record, "a"))
            cfg = DetectorConfig()
            assert report.detected
            assert report.onset_sample >= FAULT_ONSET_SAMPLE - cfg.min_consecutive
            assert report.onset_sample <= FAULT_ONSET_SAMPLE + 80  # two cycles

    def test_fixed_threshold_override(self, ag_record):
        report = wavelet_detect(
            select_channel(ag_record, "a"),
            DetectorConfig(threshold_policy=FixedThreshold(1e9)),
        )
        assert not report.detected
        assert report.threshold_used == 1e9

    def test_deviated_frequency_clean_record_quiet(self):
        record = make_record("NONE", fundamental_hz=50.5)
        assert not wavelet_detect(select_channel(record, "a")).detected
        record = make_record("NONE", fundamental_hz=49.5)
        assert not wavelet_detect(select_channel(record, "a")).detected


class TestIcaDetect:
    def test_noisy_ag_fault_detected_within_ten_ms(self):
        record = make_record("AG", snr_db=20.0, seed=0)
        report = ica_detect(record, DetectorConfig(method="ica"), SPANS, IcaConfig(seed=0))
        assert report.detected
        assert abs(report.onset_time_s - 0.065) <= 0.010

    def test_phase_to_phase_fault_detected(self):
        record = make_record("AB")
        report = ica_detect(record, spans=SPANS)
        assert report.detected

    def test_clean_deviated_frequency_not_detected(self):
        record = make_record("NONE", fundamental_hz=50.5)
        report = ica_detect(
            record, spans=SPANS, ica_cfg=IcaConfig(fundamental_hz=50.5)
        )
        assert not report.detected

    def test_calibration_span_must_fit_analysis(self):
        record = make_record("AG")
        bad = Spans(prefault=(0, 120), calibration=(0, 500), analysis=(0, 400))
        with pytest.raises(DegenerateInputError):
            ica_detect(record, spans=bad)


class TestEnergyDetect:
    def test_zero_trace_reports_zero_energy(self):
        trace = Trace(np.zeros(400), 2000.0)
        for method in ENERGY_METHODS:
            report = energy_detect(trace, method)
            assert report.metadata["analysis_index"] == 0.0
            assert not report.detected

    def test_ag_fault_detected_by_all_methods(self, ag_record):
        trace = select_channel(ag_record, "a")
        for method in ENERGY_METHODS:
            assert energy_detect(trace, method).detected, method

    @pytest.mark.parametrize("method", ENERGY_METHODS)
    def test_index_strictly_grows_with_severity(self, method):
        values = []
        for retained in (0.9, 0.7, 0.5, 0.3, 0.1):
            record = make_record("AG", retained_voltage_pu=retained)
            report = energy_detect(select_channel(record, "a"), method)
            values.append(report.metadata["analysis_index"])
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_homogeneity_and_stable_decision(self, ag_record):
        trace = select_channel(ag_record, "a")
        scaled = Trace(4.0 * trace.samples, trace.sample_rate_hz)
        for method in ENERGY_METHODS:
            base = energy_detect(trace, method)
            big = energy_detect(scaled, method)
            assert big.metadata["analysis_index"] == pytest.approx(
                16.0 * base.metadata["analysis_index"], rel=1e-9
            )
            assert base.detected == big.detected
            assert base.onset_sample == big.onset_sample

    def test_unknown_method_rejected(self):
        with pytest.raises(ConfigError):
            energy_detect(Trace(np.zeros(400), 2000.0), "energy_cwt")


class TestEnergyTable:
    FAULT_NAMES = ("AG", "BG", "CG", "AB", "BC", "ABC")

    def scenarios(self):
        return [
            FaultSpec(fault_type=FaultType(name), onset_s=0.065)
            for name in self.FAULT_NAMES
        ]

    def test_six_faults_all_detected_by_all_methods(self):
        table = energy_table(self.scenarios())
        assert [row.scenario_name for row in table.rows] == list(self.FAULT_NAMES)
        for row in table.rows:
            assert row.detected_ft and row.detected_stft and row.detected_wt
            assert row.e_ft >= 0 and row.e_stft >= 0 and row.e_wt >= 0

    def test_empty_scenario_list(self):
        table = energy_table([])
        assert table.rows == []
        assert table.to_csv().strip() == table.CSV_HEADER

    def test_failing_scenario_becomes_error_row(self):
        scenarios = self.scenarios()[:2] + [
            FaultSpec(fault_type=FaultType.CG, onset_s=0.5)  # beyond the record
        ]
        table = energy_table(scenarios)
        assert table.rows[2].error is not None
        assert table.rows[0].error is None and table.rows[1].error is None

    def test_reference_values_are_ordering_metadata(self):
        # transcription sanity: six rows, each ordered FT < STFT < WT
        assert set(REFERENCE_ENERGY_CONTENT) == set(self.FAULT_NAMES)
        for ft, stft_, wt in REFERENCE_ENERGY_CONTENT.values():
            assert ft < stft_ < wt

    def test_csv_layout(self):
        table = energy_table(self.scenarios()[:1])
        lines = table.to_csv().strip().splitlines()
        assert lines[0] == "scenario,e_ft,e_stft,e_wt,det_ft,det_stft,det_wt"
        assert lines[1].startswith("AG,")


class TestNoFaultSpecificity:
    def test_one_hundred_clean_records_no_detections(self):
        """Every detector stays quiet on 100 fault-free records."""
        conditions = [
            dict(),
            dict(snr_db=20.0),
            dict(fundamental_hz=49.5),
            dict(fundamental_hz=50.5),
            dict(snr_db=20.0, fundamental_hz=50.5),
        ]
        count = 0
        for seed in range(20):
            for cond in conditions:
                record = make_record("NONE", seed=seed, **cond)
                f0 = cond.get("fundamental_hz", 50.0)
                trace = select_channel(record, "a")
                assert not wavelet_detect(trace).detected
                assert not ica_detect(
                    record, spans=SPANS,
                    ica_cfg=IcaConfig(fundamental_hz=f0, seed=seed),
                ).detected
                for method in ENERGY_METHODS:
                    assert not energy_detect(trace, method, fundamental_hz=f0).detected
                count += 1
        assert count == 100

    def test_sensitivity_all_faults_all_conditions(self):
        """Default-severity faults are caught in every operating condition."""
        for name in ("AG", "BG", "CG", "AB", "BC", "ABC"):
            for cond in (dict(), dict(snr_db=20.0), dict(fundamental_hz=50.5)):
                record = make_record(name, seed=1, **cond)
                f0 = cond.get("fundamental_hz", 50.0)
                for method in ENERGY_METHODS:
                    hit = any(
                        energy_detect(
                            select_channel(record, phase), method, fundamental_hz=f0
                        ).detected
                        for phase in "abc"
                    )
                    assert hit, (name, cond, method)
