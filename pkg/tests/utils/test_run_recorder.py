import json
import time

from spps.exceptions import ToleranceFailure
from spps.utils.run_recorder import RunRecorder


class TestRunRecorder:
    def test_start_and_end_stage(self):
        recorder = RunRecorder("hill")
        recorder.start_stage("hill")
        time.sleep(0.01)
        recorder.end_stage("hill", {"edges": 11, "lambda0": -0.455})
        report = recorder.get_report()
        assert "hill" in report["stages"]
        stage = report["stages"]["hill"]
        assert stage["metrics"]["edges"] == 11
        assert stage["duration_ms"] >= 10

    def test_end_without_start(self):
        recorder = RunRecorder("zs")
        recorder.end_stage("zs", {"eigenvalues": 1})
        assert recorder.get_report()["stages"]["zs"]["metrics"] == {"eigenvalues": 1}

    def test_record_event(self):
        recorder = RunRecorder("layer")
        recorder.record_event("evanescent_angles", {"theta_deg": [70.0]})
        report = recorder.get_report()
        assert len(report["events"]) == 1
        assert report["events"][0]["name"] == "evanescent_angles"

    def test_record_failure_keeps_error_code(self):
        recorder = RunRecorder("reproduce")
        recorder.record_failure("reproduce", ToleranceFailure("table 4.1 failed"))
        report = recorder.get_report()
        assert recorder.failed
        assert report["failures"][0]["code"] == "tolerance_failure"

    def test_save_json(self, tmp_path):
        recorder = RunRecorder("sl")
        recorder.start_stage("sl")
        recorder.end_stage("sl", {"eigenvalues": 5})
        out = tmp_path / "out" / "run_report.json"
        recorder.save(out)
        loaded = json.loads(out.read_text())
        assert loaded["name"] == "sl"
        assert "sl" in loaded["stages"]

    def test_summary_counts(self):
        recorder = RunRecorder("well")
        recorder.record_failure("well", "err1")
        recorder.record_failure("well", "err2")
        recorder.record_event("suspect_eigenvalue", {})
        report = recorder.get_report()
        assert report["summary"]["total_failures"] == 2
        assert report["summary"]["total_events"] == 1
