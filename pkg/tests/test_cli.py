import json

import pytest

from hoggsat.cli import main
from hoggsat.spin_sim import MEASURED_PREP_DIAG, MEASURED_SEARCH_DIAGS


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolve:
    def test_unique_solution(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "v1 & v2 & v3")
        assert code == 0
        assert "top assignment: 111" in out
        assert "probability 1.000000000000" in out
        assert "verdict: SAT" in out

    def test_contradiction_is_unsat(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "v1 & !v1")
        assert code == 0
        assert "verdict: UNSAT" in out
        assert "conflicts of top assignment: 1" in out

    def test_single_clause_with_padding(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "!v2", "--n", "3")
        assert code == 0
        assert out.count(" : 0.250000000000") == 4

    def test_bit_order_flag_reverses_display(self, capsys):
        _, msb, _ = run_cli(capsys, "solve", "v1 & v2 & !v3")
        _, lsb, _ = run_cli(capsys, "solve", "v1 & v2 & !v3", "--bit-order", "lsb-v1")
        assert "top assignment: 110" in msb
        assert "top assignment: 011" in lsb

    def test_parse_error_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "solve", "v1 & nonsense")
        assert code == 2
        assert "error" in err

    def test_deterministic_output(self, capsys):
        _, first, _ = run_cli(capsys, "solve", "!v1 & v3", "--json")
        _, second, _ = run_cli(capsys, "solve", "!v1 & v3", "--json")
        assert first == second
        report = json.loads(first)
        assert report["verdict"] == "SAT"
        assert report["tool"]["name"] == "hoggsat"


class TestVerify:
    def test_single_pair(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "3", "3")
        assert code == 0
        assert "all passed" in out

    def test_sweep(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--all", "--max-n", "5")
        assert code == 0
        assert out.count("-> pass") == 15

    def test_json_report(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "1", "1", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["all_passed"] is True
        assert report["checks"][0]["wgw_error"] <= 1e-12


class TestPrep:
    def test_builtin_three_spin(self, capsys):
        code, out, _ = run_cli(capsys, "prep", "3")
        assert code == 0
        assert "4I1zI2zI3z + 2I2zI3z - I3z" in out
        assert "2I1zI2z + 2I1zI3z + I3z" in out
        assert "max residual vs pseudo-pure target: 0 " in out

    def test_builtin_four_spin(self, capsys):
        code, out, _ = run_cli(capsys, "prep", "4")
        assert code == 0
        assert "pass" in out

    def test_identity_scheme_fails_residual(self, capsys, tmp_path):
        scheme = tmp_path / "identity.scheme"
        scheme.write_text("E\n")
        code, out, _ = run_cli(capsys, "prep", "3", "--scheme", str(scheme))
        assert code == 1
        assert "max residual vs pseudo-pure target: 2 " in out

    def test_lint_flags_slow_gate(self, capsys, tmp_path):
        scheme = tmp_path / "slow.scheme"
        scheme.write_text("CN13\n")
        code, out, _ = run_cli(capsys, "prep", "3", "--scheme", str(scheme))
        assert "lint: CN13" in out

    def test_json_report(self, capsys):
        _, out, _ = run_cli(capsys, "prep", "3", "--json")
        report = json.loads(out)
        assert report["passed"] is True
        assert report["experiments"][1]["coefficients"] == {"123": 1.0, "23": 1.0, "3": -1.0}


class TestCompare:
    @pytest.fixture
    def prep_csv(self, tmp_path):
        path = tmp_path / "prep.csv"
        path.write_text("\n".join(str(v) for v in MEASURED_PREP_DIAG))
        return str(path)

    def test_pass_at_six_percent(self, capsys, prep_csv):
        code, out, _ = run_cli(capsys, "compare", prep_csv,
                               "--ideal-index", "000", "--threshold", "0.06")
        assert code == 0
        assert "max deviation: 0.0535" in out
        assert "PASS" in out

    def test_fail_at_five_percent(self, capsys, prep_csv):
        code, out, _ = run_cli(capsys, "compare", prep_csv,
                               "--ideal-index", "000", "--threshold", "0.05")
        assert code == 1
        assert "FAIL" in out

    def test_ideal_formula_with_reversed_bit_order(self, capsys, tmp_path):
        path = tmp_path / "search.csv"
        path.write_text(",".join(str(v) for v in MEASURED_SEARCH_DIAGS["v1 & v2 & v3"]))
        code, out, _ = run_cli(capsys, "compare", str(path),
                               "--ideal-formula", "v1 & v2 & v3",
                               "--bit-order", "lsb-v1", "--threshold", "0.09")
        assert code == 0
        assert "max deviation: 0.08" in out

    def test_ideal_vs_itself(self, capsys, prep_csv):
        code, out, _ = run_cli(capsys, "compare", prep_csv, "--ideal-file", prep_csv)
        assert code == 0
        assert "max deviation: 0" in out

    def test_malformed_csv(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1, 2, three, 4")
        code, _, err = run_cli(capsys, "compare", str(path), "--ideal-index", "0")
        assert code == 2
        assert "malformed" in err


class TestPulse:
    def test_verify_catalog_row(self, capsys):
        code, out, _ = run_cli(capsys, "pulse", "verify", "v1 & v2 & v3",
                               "(XY~X)1(XY~X)2(XY~X)3")
        assert code == 0
        assert "action on |000>: equivalent" in out

    def test_verify_empty_sequence_fails(self, capsys):
        code, out, _ = run_cli(capsys, "pulse", "verify", "v1", "")
        assert code == 1
        assert "NOT equivalent" in out

    def test_compile_r(self, capsys):
        code, out, _ = run_cli(capsys, "pulse", "compile-R", "v1 & v2 & v3")
        assert code == 0
        assert "Z~1 Z~2 Z~3" in out

    def test_compile_gamma(self, capsys):
        code, out, _ = run_cli(capsys, "pulse", "compile-gamma", "3", "--n", "3")
        assert code == 0
        assert "Z1 Z2 Z3" in out

    def test_compile_r_even_m_falls_back(self, capsys):
        code, out, _ = run_cli(capsys, "pulse", "compile-r", "v1 & v2")
        assert code == 1
        assert "fall back to dense simulation" in out

    def test_lower(self, capsys):
        code, out, _ = run_cli(capsys, "pulse", "lower")
        assert code == 0
        assert "delay[1/(2*J12)]" in out
        assert out.count("(pass)") == 3


class TestSpectrum:
    def test_pseudo_pure_line(self, capsys):
        code, out, _ = run_cli(capsys, "spectrum", "pseudo-pure", "--spin", "2")
        assert code == 0
        assert "44.3750" in out

    def test_thermal_multiplet_json(self, capsys):
        code, out, _ = run_cli(capsys, "spectrum", "thermal", "--spin", "1", "--json")
        assert code == 0
        report = json.loads(out)
        assert len(report["lines"]) == 4

    def test_params_file(self, capsys, tmp_path):
        path = tmp_path / "two.spins"
        path.write_text("n 2\nshift 1 0.0\nshift 2 100.0\nj 1 2 10.0\n")
        code, out, _ = run_cli(capsys, "spectrum", "thermal", "--spin", "1",
                               "--params", str(path))
        assert code == 0
        assert "5.0000" in out and "-5.0000" in out

    def test_prepared_state_matches_ideal_target(self, capsys):
        # the built-in scheme prepares the exact pseudo-pure state, so its
        # spectrum equals the ideal one
        _, prepared, _ = run_cli(capsys, "spectrum", "prep", "--spin", "2")
        _, ideal, _ = run_cli(capsys, "spectrum", "pseudo-pure", "--spin", "2")
        assert prepared.splitlines()[1:] == ideal.splitlines()[1:]


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "hoggsat" in capsys.readouterr().out
