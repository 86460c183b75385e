import hashlib
import json

import pytest

from repsel.cli import main
from repsel.report import validate_report


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture()
def constant_trace(tmp_path):
    path = tmp_path / "const.trace"
    code = main(
        ["synth", "--mode", "constant", "--T", "24", "--d", "12", "--L", "5",
         "--clusters", "4", "--spread", "0.1", "--seed", "3", "--out", str(path)]
    )
    assert code == 0
    return path


@pytest.fixture()
def collapse_trace(tmp_path):
    path = tmp_path / "collapse.trace"
    code = main(
        ["synth", "--mode", "opt-collapse", "--T", "32", "--d", "48", "--L", "6",
         "--spread", "0.01", "--seed", "3", "--out", str(path)]
    )
    assert code == 0
    return path


class TestSynthCommand:
    def test_deterministic_output(self, tmp_path, capsys):
        argv = ["synth", "--T", "16", "--d", "8", "--L", "3", "--seed", "9"]
        p1, p2 = tmp_path / "a.trace", tmp_path / "b.trace"
        assert main(argv + ["--out", str(p1)]) == 0
        assert main(argv + ["--out", str(p2)]) == 0
        capsys.readouterr()
        assert hashlib.sha256(p1.read_bytes()).hexdigest() == \
            hashlib.sha256(p2.read_bytes()).hexdigest()

    def test_header_reflects_dims(self, tmp_path, capsys):
        path = tmp_path / "dims.trace"
        assert main(["synth", "--T", "64", "--d", "16", "--L", "8", "--out", str(path)]) == 0
        capsys.readouterr()
        from repsel.trace import read_trace

        tr = read_trace(path)
        assert (tr.seq_len, tr.hidden_dim, tr.num_layers) == (64, 16, 8)


class TestSelectCommand:
    def test_constant_trace_single_rep(self, constant_trace, capsys):
        code, out, _ = run_cli(capsys, "select", str(constant_trace), "--layer", "0")
        assert code == 0
        # 4 clusters with small spread: r=4 at tau=0.30; tighten tau for r=1
        code, out, _ = run_cli(capsys, "select", str(constant_trace), "--tau", "0.99")
        assert "r=1 " in out or "r=1," in out or " r=1" in out

    def test_identical_rows_print_full_compression(self, tmp_path, capsys):
        path = tmp_path / "one.trace"
        assert main(["synth", "--mode", "constant", "--T", "24", "--d", "12", "--L", "2",
                     "--clusters", "1", "--spread", "0", "--seed", "1",
                     "--out", str(path)]) == 0
        code, out, _ = run_cli(capsys, "select", str(path))
        assert code == 0
        assert "r=1" in out and "compression=24.0x" in out

    def test_collapse_layer0_no_compression(self, collapse_trace, capsys):
        code, out, _ = run_cli(capsys, "select", str(collapse_trace), "--layer", "0")
        assert code == 0
        assert "r=32" in out and "compression=1.0x" in out

    def test_json_matches_printed(self, collapse_trace, tmp_path, capsys):
        jpath = tmp_path / "sel.json"
        code, out, _ = run_cli(
            capsys, "select", str(collapse_trace), "--layer", "1", "--json", str(jpath)
        )
        assert code == 0
        doc = json.loads(jpath.read_text())
        assert f"r={doc['r']}" in out
        assert f"r/T={doc['ratio']:.3f}" in out
        assert f"compression={doc['compression']:.1f}x" in out
        assert len(doc["indices"]) == doc["r"]

    def test_layer_out_of_range(self, constant_trace, capsys):
        code, _, err = run_cli(capsys, "select", str(constant_trace), "--layer", "99")
        assert code == 2


class TestCascadeCommand:
    def test_constant_trace_report(self, constant_trace, tmp_path, capsys):
        jpath = tmp_path / "rep.json"
        code, out, _ = run_cli(
            capsys, "cascade", str(constant_trace), "--json", str(jpath)
        )
        assert code == 0
        report = json.loads(jpath.read_text())
        validate_report(report)
        T, L = 24, 5
        r = report["per_layer"][0]["r_cascade"]
        expected = 1.0 - (T * T + (L - 1) * T * r) / (L * T * T)
        assert abs(report["summary"]["savings"] - expected) <= 1e-9
        for rec in report["per_layer"][1:]:
            assert rec["turnover"] == 0.0
        assert out.count("0.0%") >= L - 1

    def test_single_layer_savings_zero(self, tmp_path, capsys):
        path = tmp_path / "l1.trace"
        assert main(["synth", "--T", "16", "--d", "8", "--L", "1", "--out", str(path)]) == 0
        jpath = tmp_path / "l1.json"
        code, _, _ = run_cli(capsys, "cascade", str(path), "--json", str(jpath))
        assert code == 0
        assert json.loads(jpath.read_text())["summary"]["savings"] == 0.0

    def test_generated_trace_flows_through(self, tmp_path, capsys):
        path = tmp_path / "pipe.trace"
        assert main(["synth", "--T", "48", "--d", "16", "--L", "6",
                     "--lambda", "0.05", "--out", str(path)]) == 0
        code, out, _ = run_cli(capsys, "cascade", str(path))
        assert code == 0 and "savings" in out


class TestCostmodelCommand:
    def test_default_prints_reported_gflop_lines(self, capsys):
        code, out, _ = run_cli(capsys, "costmodel")
        assert code == 0
        assert "(30.1 GFLOP)" in out
        assert "(14.7 GFLOP)" in out

    def test_attention_line_at_reported_r(self, capsys):
        code, out, _ = run_cli(capsys, "costmodel", "--r-bar", "205")
        assert code == 0
        assert "(19.3 GFLOP)" in out

    def test_scaling_speedups(self, capsys):
        code, out, _ = run_cli(capsys, "costmodel")
        for s in ("2.1x", "3.7x", "6.4x", "10.8x", "18.2x"):
            assert s in out

    def test_full_compression_row(self, capsys):
        code, out, _ = run_cli(capsys, "costmodel", "--scaling-rows", "512:512")
        assert code == 0
        assert "1.0x" in out and "0.0%" in out


class TestReportCommand:
    def test_rerenders_saved_report_identically(self, constant_trace, tmp_path, capsys):
        jpath = tmp_path / "rep.json"
        code, direct, _ = run_cli(capsys, "cascade", str(constant_trace), "--json", str(jpath))
        assert code == 0
        code, rerendered, _ = run_cli(capsys, "report", str(jpath))
        assert code == 0
        assert rerendered == direct


class TestExitCodes:
    def test_missing_file_is_data_error(self, capsys):
        code, _, err = run_cli(capsys, "select", "/nonexistent/file.trace")
        assert code == 3

    def test_corrupt_file_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.trace"
        bad.write_bytes(b"garbage")
        code, _, _ = run_cli(capsys, "cascade", str(bad))
        assert code == 3

    def test_bad_tau_is_usage_error(self, constant_trace, capsys):
        code, _, _ = run_cli(capsys, "select", str(constant_trace), "--tau", "1.5")
        assert code == 2

    def test_zero_norm_row_is_data_error(self, tmp_path, capsys):
        import numpy as np

        from repsel.trace import ActivationTrace, LayerActivation, write_trace

        data = np.ones((4, 3), dtype=np.float32)
        data[2] = 0.0  # degenerate token: finite, so it writes, but unselectable
        trace = ActivationTrace(
            model_name="degenerate", num_layers=1, seq_len=4, hidden_dim=3,
            layers=[LayerActivation(layer_index=0, data=data)],
        )
        path = tmp_path / "zero.trace"
        write_trace(trace, path)
        code, _, err = run_cli(capsys, "cascade", str(path))
        assert code == 3
        assert "norm" in err
