import io
import json

import pytest

from feederkit.cli import (
    EXIT_ENGINE,
    EXIT_OK,
    EXIT_VALIDATION,
    main,
)
from feederkit.mcp import EngineSession


def run_cli(argv):
    out = io.StringIO()
    import contextlib

    with contextlib.redirect_stdout(out):
        code = main(argv)
    return code, out.getvalue()


class TestSolve:
    def test_solve_ieee13_table(self):
        code, output = run_cli(["solve", "ieee13"])
        assert code == EXIT_OK
        assert "converged" in output
        # golden check: table values equal a direct dispatch
        session = EngineSession()
        session.dispatch("load_library_circuit", {"name": "ieee13"})
        session.dispatch("solve_power_flow")
        volts = session.dispatch("get_all_bus_voltages").data["voltages"]
        for bus, entry in volts.items():
            assert f"{entry['per_unit']:.4f}" in output
            assert bus in output
        assert "rg60" in output
        assert "OVER" in output  # rg60 above the limit in the bundled feeder

    def test_solve_package_directory(self, tmp_path):
        pkg = tmp_path / "tiny"
        pkg.mkdir()
        (pkg / "master.dss").write_text(
            "New Circuit.tiny bus1=src basekv=4.16 pu=1.0\n"
            "New Line.l1 bus1=src.1.2.3 bus2=end.1.2.3 "
            "rmatrix=(0.1 | 0.02 0.1 | 0.02 0.02 0.1) "
            "xmatrix=(0.3 | 0.08 0.3 | 0.08 0.08 0.3)\n"
            "New Load.end bus1=end.1.2.3 phases=3 kw=100 kvar=40\n"
        )
        code, output = run_cli(["solve", str(pkg)])
        assert code == EXIT_OK
        assert "end" in output

    def test_unknown_package_fails(self):
        code, output = run_cli(["solve", "atlantis"])
        assert code == EXIT_ENGINE

    def test_json_mode_emits_envelopes(self):
        code, output = run_cli(["--json", "solve", "ieee13"])
        assert code == EXIT_OK
        envelopes = json.loads(output)
        assert [e["tool"] for e in envelopes] == [
            "load_library_circuit", "solve_power_flow", "get_all_bus_voltages",
        ]
        for e in envelopes:
            assert set(e) >= {"success", "tool", "data", "elapsed_ms"}
            assert e["success"]
        # output is the canonical envelope serialization, byte for byte
        assert output.strip() == json.dumps(envelopes, indent=2)


class TestQsts:
    def test_flat_profile_no_violations_on_small_package(self, tmp_path):
        pkg = tmp_path / "tiny"
        pkg.mkdir()
        (pkg / "master.dss").write_text(
            "New Circuit.tiny bus1=src basekv=4.16 pu=1.0\n"
            "New Line.l1 bus1=src.1.2.3 bus2=end.1.2.3 "
            "rmatrix=(0.05 | 0.01 0.05 | 0.01 0.01 0.05) "
            "xmatrix=(0.15 | 0.04 0.15 | 0.04 0.04 0.15)\n"
            "New Load.end bus1=end.1.2.3 phases=3 kw=100 kvar=40\n"
            "New Loadshape.flat npts=4 interval=1 mult=(1.0 1.0 1.0 1.0)\n"
        )
        code, output = run_cli(
            ["qsts", str(pkg), "--steps", "4", "--profile", "flat"]
        )
        assert code == EXIT_OK
        assert "violations: 0 across 0 steps" in output

    def test_qsts_summary_printed(self):
        code, output = run_cli(
            ["qsts", "ieee13_stressed", "--steps", "6", "--profile", "residential"]
        )
        assert code == EXIT_OK
        assert "min" in output and "max" in output
        assert "energy losses" in output

    def test_bad_profile_validation_exit(self):
        code, output = run_cli(
            ["--strict", "qsts", "ieee13", "--steps", "2", "--profile", "nope"]
        )
        assert code in (EXIT_VALIDATION, EXIT_ENGINE)


class TestSkill:
    def test_seeded_runs_identical(self):
        _, out1 = run_cli(
            ["skill", "voltage_violation_analysis", "ieee13_stressed", "--seed", "42"]
        )
        _, out2 = run_cli(
            ["skill", "voltage_violation_analysis", "ieee13_stressed", "--seed", "42"]
        )
        assert out1 == out2

    def test_json_report_identical_for_same_seed(self):
        def report_of(output):
            envelopes = json.loads(output)
            return envelopes[-1]["data"]["report"]

        _, o1 = run_cli(["--json", "skill", "voltage_violation_analysis",
                         "ieee13_stressed", "--seed", "42"])
        _, o2 = run_cli(["--json", "skill", "voltage_violation_analysis",
                         "ieee13_stressed", "--seed", "42"])
        assert report_of(o1) == report_of(o2)

    def test_mitigation_via_cli(self):
        code, output = run_cli(["skill", "overvoltage_mitigation", "ieee13"])
        assert code == EXIT_OK
        assert "overvoltage_mitigation" in output
        assert "completed" in output


class TestChat:
    def test_scripted_chat(self, tmp_path):
        script = tmp_path / "script.json"
        script.write_text(json.dumps([
            {"tool_calls": [{"tool": "solve_power_flow", "args": {}}]},
            {"tool_calls": [{"tool": "get_all_bus_voltages", "args": {}}]},
            {"text": "All voltages reported."},
        ]))
        code, output = run_cli(
            ["chat", "--script", str(script), "--package", "ieee13"]
        )
        assert code == EXIT_OK
        assert "solve_power_flow" in output
        assert "All voltages reported." in output

    def test_chat_json_trace(self, tmp_path):
        script = tmp_path / "script.json"
        script.write_text(json.dumps([{"text": "nothing to do"}]))
        code, output = run_cli(
            ["--json", "chat", "--script", str(script), "--package", "ieee13"]
        )
        assert code == EXIT_OK
        trace = json.loads(output[output.index("{"):])
        assert trace["status"] == "completed"
        assert trace["final_text"] == "nothing to do"

    def test_missing_script_file(self):
        code, _ = run_cli(["chat", "--script", "/nonexistent.json"])
        assert code == EXIT_VALIDATION


class TestExport:
    def test_csv_to_stdout(self):
        code, output = run_cli(
            ["export", "ieee13", "--steps", "2", "--format", "csv"]
        )
        assert code == EXIT_OK
        assert output.startswith("step,bus,voltage_pu")

    def test_json_roundtrip(self):
        code, output = run_cli(
            ["export", "ieee13", "--steps", "2", "--format", "json"]
        )
        assert code == EXIT_OK
        data = json.loads(output)
        assert data["summary"]["steps"] == 2
