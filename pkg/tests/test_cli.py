"""CLI thin client: exit codes, formats, env-seed override."""

import json
import os

import pytest

from lie_prelim.cli import main


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("LIE_PRELIM_SEED", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDerive:
    def test_builtin(self, capsys):
        code, out, _ = run(capsys, "derive", "--class", "gen-diff")
        assert code == 0
        assert out.count("= 0") == 7

    def test_class_file(self, capsys, tmp_path, gen_diff):
        path = tmp_path / "cls.json"
        path.write_text(json.dumps({
            "name": "heat", "delta": "u_t - u_xx", "solved_for": "u_t",
            "rhs": "u_xx", "arbitrary_elements": {}, "auxiliary": [],
            "nonvanishing": []}))
        code, out, _ = run(capsys, "derive", "--class", str(path),
                           "--ansatz", "Q = 2*t*dt + x*dx")
        assert code == 0
        assert "ansatz is a symmetry" in out

    def test_failing_ansatz_exit_1(self, capsys):
        code, _, err = run(capsys, "derive", "--class", "heat", "--ansatz", "u*dx")
        assert code == 1

    def test_empty_ansatz_exit_2(self, capsys):
        code, _, err = run(capsys, "derive", "--class", "gen-diff", "--ansatz", "")
        assert code == 2

    def test_missing_class_file_exit_2(self, capsys):
        code, _, err = run(capsys, "derive", "--class", "no-such-file.json")
        assert code == 2

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "--format", "json", "derive", "--class", "gen-diff")
        assert code == 0
        body = json.loads(out)
        assert len(body["equations"]) == 7

    def test_latex_format(self, capsys):
        code, out, _ = run(capsys, "--format", "latex", "derive", "--class", "gen-diff")
        assert code == 0
        assert out.startswith("\\begin{align*}")


class TestVerify:
    def test_all_exit_0(self, capsys):
        code, out, _ = run(capsys, "verify", "--table", "all")
        assert code == 0
        assert "17/17 rows pass" in out

    def test_uncorrected_flags_anomalies(self, capsys):
        code, out, _ = run(capsys, "verify", "--table", "2", "--uncorrected")
        assert code == 0
        assert "detected" in out and "3a" in out

    def test_bad_table_exit_2(self, capsys):
        code, _, err = run(capsys, "verify", "--table", "9")
        assert code == 2

    def test_deterministic_json(self, capsys):
        code1, out1, _ = run(capsys, "--format", "json", "--seed", "7",
                             "verify", "--table", "1")
        code2, out2, _ = run(capsys, "--format", "json", "--seed", "7",
                             "verify", "--table", "1")
        assert code1 == code2 == 0 and out1 == out2

    def test_env_seed_override(self, capsys, monkeypatch):
        monkeypatch.setenv("LIE_PRELIM_SEED", "99")
        code, out, _ = run(capsys, "--format", "json", "verify", "--table", "1")
        assert code == 0
        monkeypatch.setenv("LIE_PRELIM_SEED", "not-a-number")
        code, _, err = run(capsys, "verify", "--table", "1")
        assert code == 2


class TestClassify:
    def test_inline_basis(self, capsys):
        code, out, _ = run(capsys, "classify", "--basis",
                           '[{"a1": "1", "a2": "3", "a3": "5"}]')
        assert code == 0
        assert "1D-1" in out and "a=3" in out

    def test_input_file(self, capsys, tmp_path):
        path = tmp_path / "basis.json"
        path.write_text(json.dumps({"basis": [{"h": "1"}, {"h": "u"}]}))
        code, out, _ = run(capsys, "classify", "--input", str(path))
        assert code == 0
        assert "2D-8" in out

    def test_appropriateness_failure_exit_1(self, capsys):
        code, out, _ = run(capsys, "classify", "--basis",
                           '[{"h": "1"}, {"h": "u"}, {"h": "u^2"}]')
        assert code == 1
        assert "m=3" in out

    def test_not_closed_exit_3(self, capsys):
        code, _, err = run(capsys, "classify", "--basis",
                           '[{"h": "1"}, {"h": "u^2"}]')
        assert code == 3

    def test_both_inputs_rejected(self, capsys):
        code, _, err = run(capsys, "classify", "--basis", "[]", "--input", "x.json")
        assert code == 2


class TestOtherCommands:
    def test_check_equiv_pass(self, capsys):
        code, out, _ = run(capsys, "check-equiv", "--class", "gen-diff",
                           "--field", "h*du - (Diff(h,u)*f + Diff(h,u,u)*g)*df",
                           "--fn", "h:u")
        assert code == 0 and "PASS" in out

    def test_check_equiv_fail(self, capsys):
        code, out, _ = run(capsys, "check-equiv", "--class", "gen-diff",
                           "--field", "b*du", "--fn", "b:x")
        assert code == 1 and "FAIL" in out

    def test_transform(self, capsys):
        code, out, _ = run(capsys, "transform", "--u-rule", "exp(u)",
                           "--u-inverse", "ln(u)", "--f", "1", "--g", "1")
        assert code == 0
        assert "f -> 0" in out and "g -> 1" in out

    def test_commutator(self, capsys):
        code, out, _ = run(capsys, "commutator", "--v", "dx",
                           "--w", "x^2*dx - 3*x*u*du")
        assert code == 0
        assert "(-3*u)*d_u" in out and "(2*x)*d_x" in out

    def test_adjoint(self, capsys):
        code, out, _ = run(capsys, "adjoint", "--v", '{"a3": "1"}',
                           "--w", '{"a1": "1"}', "--method", "series")
        assert code == 0
        body = json.loads(out)
        assert body["result"]["a3"] == "-eps"

    def test_admissible(self, capsys):
        code, out, _ = run(capsys, "admissible", "--class", "gen-diff")
        assert code == 0
        assert "Diff(T,t,t)" in out

    def test_kernel(self, capsys):
        code, out, _ = run(capsys, "kernel", "--class", "gen-diff",
                           "--candidate", "dt")
        assert code == 0 and "PASS" in out

    def test_report(self, capsys):
        code, out, _ = run(capsys, "report")
        assert code == 0
        assert "17/17 rows pass" in out
