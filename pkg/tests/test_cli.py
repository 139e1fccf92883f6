import json
import math

import pytest
from click.testing import CliRunner

from luryecycle import (
    EmptyResultError,
    FileFormatError,
    LuryecycleError,
    NoIntersectionError,
    PhaseConditionError,
    PlantValidationError,
    SelfVerifyError,
    freq_response,
)
from luryecycle.cli import cli, exit_code_for


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def static_plant_file(tmp_path):
    path = tmp_path / "static.json"
    path.write_text(json.dumps({"num": [0.5], "den": [1.0]}))
    return path


@pytest.fixture
def anchor_file(tmp_path):
    w = math.pi / 10
    path = tmp_path / "anchor.json"
    path.write_text(json.dumps({"anchor": {
        "omega": math.pi / 5,
        "re": -math.cos(w), "im": -math.sin(w)}}))
    return path


def test_exit_code_table():
    assert exit_code_for(PlantValidationError("x")) == 2
    assert exit_code_for(FileFormatError("x")) == 2
    assert exit_code_for(EmptyResultError("x")) == 3
    assert exit_code_for(PhaseConditionError("x")) == 4
    assert exit_code_for(NoIntersectionError("x")) == 5
    assert exit_code_for(SelfVerifyError("x")) == 6
    assert exit_code_for(LuryecycleError("x")) == 1


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "luryecycle" in result.output


class TestNyquist:
    def test_reports_gain(self, runner, plant_file):
        result = runner.invoke(cli, ["nyquist", str(plant_file)])
        assert result.exit_code == 0
        assert "k_N = 3.60999" in result.output

    def test_no_crossing_message(self, runner, static_plant_file):
        result = runner.invoke(cli, ["nyquist", str(static_plant_file),
                                     "--kmax", "50"])
        assert result.exit_code == 0
        assert "no instability" in result.output

    def test_invalid_plant_exits_2(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("not json")
        result = runner.invoke(cli, ["nyquist", str(bad)])
        assert result.exit_code == 2

    def test_anchor_plant_rejected(self, runner, anchor_file):
        result = runner.invoke(cli, ["nyquist", str(anchor_file)])
        assert result.exit_code == 2


class TestPhaseSweep:
    def test_csv_lists_best_pair_first(self, runner, plant_file):
        result = runner.invoke(cli, ["phase-sweep", str(plant_file),
                                     "--beta-max", "8"])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0] == "alpha,beta,T,omega,re,im,phase,kbar,feasible"
        first = lines[1].split(",")
        assert (first[0], first[1]) == ("2", "7")
        assert first[-1] == "true"

    def test_json_rows(self, runner, plant_file):
        result = runner.invoke(cli, ["phase-sweep", str(plant_file),
                                     "--beta-max", "6", "--format", "json"])
        assert result.exit_code == 0
        rows = json.loads(result.output)
        assert rows[0]["alpha"] == 1 and rows[0]["beta"] == 3
        assert rows[0]["kbar"] == pytest.approx(1.35754098360656)
        assert all(isinstance(r["feasible"], bool) for r in rows)

    def test_no_feasible_pair_exits_3(self, runner, static_plant_file):
        result = runner.invoke(cli, ["phase-sweep", str(static_plant_file),
                                     "--beta-max", "6"])
        assert result.exit_code == 3
        # the table is still printed before the failure is reported
        assert "alpha,beta" in result.output

    def test_infeasible_rows_have_empty_kbar(self, runner,
                                             static_plant_file):
        result = runner.invoke(cli, ["phase-sweep", str(static_plant_file),
                                     "--beta-max", "3"])
        for line in result.output.splitlines()[1:]:
            if line.startswith("error"):
                continue
            fields = line.split(",")
            assert fields[-2] == ""
            assert fields[-1] == "false"


class TestConstruct:
    def test_writes_phi_and_signals(self, runner, plant_file, tmp_path):
        out = tmp_path / "phi.json"
        sig = tmp_path / "sig.csv"
        result = runner.invoke(cli, [
            "construct", str(plant_file), "--alpha", "2", "--beta", "7",
            "--slope", "1.31", "--out", str(out), "--signals", str(sig)])
        assert result.exit_code == 0, result.output
        assert "variant slope_k" in result.output
        assert "xi" in result.output
        assert out.exists() and sig.exists()
        doc = json.loads(out.read_text())
        assert doc["slope_bound"] == 1.31

    def test_monotone_default_slope(self, runner, plant_file, tmp_path):
        result = runner.invoke(cli, [
            "construct", str(plant_file), "--alpha", "1", "--beta", "3",
            "--odd", "--out", str(tmp_path / "p.json"),
            "--signals", str(tmp_path / "s.csv")])
        assert result.exit_code == 0, result.output
        assert "variant odd_inf" in result.output
        doc = json.loads((tmp_path / "p.json").read_text())
        assert doc["slope_bound"] == "inf"
        assert doc["odd"] is True

    def test_phase_failure_exits_4(self, runner, plant_file, tmp_path):
        result = runner.invoke(cli, [
            "construct", str(plant_file), "--alpha", "1", "--beta", "5",
            "--out", str(tmp_path / "p.json"),
            "--signals", str(tmp_path / "s.csv")])
        assert result.exit_code == 4

    def test_non_coprime_pair_is_usage_error(self, runner, plant_file):
        result = runner.invoke(cli, [
            "construct", str(plant_file), "--alpha", "2", "--beta", "4"])
        assert result.exit_code == 2
        assert "coprime" in result.output

    def test_bad_slope_text_is_usage_error(self, runner, plant_file):
        result = runner.invoke(cli, [
            "construct", str(plant_file), "--alpha", "2", "--beta", "7",
            "--slope", "fast"])
        assert result.exit_code == 2

    def test_report_is_deterministic_up_to_timestamp(self, runner,
                                                     plant_file, tmp_path):
        rep = tmp_path / "rep.json"
        args = ["construct", str(plant_file), "--alpha", "2", "--beta", "7",
                "--out", str(tmp_path / "p.json"),
                "--signals", str(tmp_path / "s.csv"),
                "--report", str(rep)]
        docs = []
        for _ in range(2):
            result = runner.invoke(cli, args)
            assert result.exit_code == 0, result.output
            doc = json.loads(rep.read_text())
            assert doc.pop("timestamp")
            docs.append(doc)
        assert docs[0] == docs[1]
        assert docs[0]["tool"] == "luryecycle"
        assert docs[0]["results"]["variant"] == "monotone_inf"


class TestVerify:
    @pytest.fixture
    def artifacts(self, runner, plant_file, tmp_path):
        out = tmp_path / "phi.json"
        sig = tmp_path / "sig.csv"
        result = runner.invoke(cli, [
            "construct", str(plant_file), "--alpha", "2", "--beta", "7",
            "--slope", "1.31", "--out", str(out), "--signals", str(sig)])
        assert result.exit_code == 0, result.output
        return out, sig

    def test_pass(self, runner, plant_file, artifacts):
        out, sig = artifacts
        result = runner.invoke(cli, ["verify", str(plant_file),
                                     str(out), str(sig)])
        assert result.exit_code == 0
        assert "PASS" in result.output

    def test_trace_written_for_single_valued(self, runner, plant_file,
                                             artifacts, tmp_path):
        out, sig = artifacts
        trace = tmp_path / "traj.csv"
        result = runner.invoke(cli, [
            "verify", str(plant_file), str(out), str(sig),
            "--periods", "3", "--trace", str(trace)])
        assert result.exit_code == 0
        rows = trace.read_text().splitlines()
        assert rows[0] == "k,y,u"
        assert len(rows) == 1 + 3 * 7

    def test_tampered_signals_exit_6(self, runner, plant_file, artifacts,
                                     tmp_path):
        out, sig = artifacts
        rows = sig.read_text().splitlines()
        first = rows[1].split(",")
        first[2] = repr(float(first[2]) + 0.05)
        rows[1] = ",".join(first)
        bad = tmp_path / "tampered.csv"
        bad.write_text("\n".join(rows) + "\n")
        result = runner.invoke(cli, ["verify", str(plant_file),
                                     str(out), str(bad)])
        assert result.exit_code == 6
        assert "FAIL" in result.output

    def test_multivalued_trace_skipped(self, runner, tmp_path):
        # 1/z sits exactly on the T = 3 window edge at omega = 2*pi/3, so
        # the (2, 3) construction is genuinely multivalued: the verdict
        # still passes but no trajectory can be simulated.
        delay = tmp_path / "delay.json"
        delay.write_text(json.dumps({"num": [0.0, 1.0], "den": [1.0, 0.0]}))
        out = tmp_path / "phi.json"
        sig = tmp_path / "sig.csv"
        result = runner.invoke(cli, [
            "construct", str(delay), "--alpha", "2", "--beta", "3",
            "--out", str(out), "--signals", str(sig)])
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())["breakpoints"][0]["v_lo"] != \
            json.loads(out.read_text())["breakpoints"][0]["v_hi"]
        trace = tmp_path / "traj.csv"
        result = runner.invoke(cli, [
            "verify", str(delay), str(out), str(sig),
            "--trace", str(trace)])
        assert result.exit_code == 0
        assert "PASS" in result.output
        assert "trace skipped" in result.output
        assert not trace.exists()


class TestFigureData:
    def test_carrier_points(self, runner, plant_file, tmp_path):
        out = tmp_path / "vt.csv"
        result = runner.invoke(cli, [
            "figure-data", str(plant_file), "--alpha", "1", "--beta", "5",
            "--which", "vt", "--out", str(out)])
        assert result.exit_code == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "re,im"
        assert len(rows) == 11
        pts = [complex(*map(float, r.split(","))) for r in rows[1:]]
        assert all(abs(abs(p) - 1.0) < 1e-12 for p in pts)

    def test_response_points(self, runner, plant_file, tmp_path,
                             example_plant):
        out = tmp_path / "gvt.csv"
        result = runner.invoke(cli, [
            "figure-data", str(plant_file), "--alpha", "2", "--beta", "7",
            "--which", "gvt", "--out", str(out)])
        assert result.exit_code == 0
        rows = out.read_text().splitlines()[1:]
        assert len(rows) == 7
        resp = freq_response(example_plant, 2 * math.pi / 7)
        first = complex(*map(float, rows[0].split(",")))
        assert first == pytest.approx(resp, abs=1e-12)

    def test_phi_stair(self, runner, anchor_file, tmp_path):
        out = tmp_path / "stair.csv"
        result = runner.invoke(cli, [
            "figure-data", str(anchor_file), "--alpha", "1", "--beta", "5",
            "--which", "phi", "--odd", "--out", str(out)])
        assert result.exit_code == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "y,v_lo,v_hi"
        assert len(rows) == 6
        widths = [(lambda f: f[2] - f[1])(list(map(float, r.split(","))))
                  for r in rows[1:]]
        assert max(widths) > 0.1
