"""End-to-end command-line behavior: formats, files, determinism, errors."""

import json

import pytest

from irskg.cli import build_parser, main

TINY_COMPARE = ["compare", "--trials", "2", "--seed", "7",
                "--set", "p_dbm_values=0,20"]
TINY_PPP = ["ppp", "--trials", "2", "--seed", "7", "--set", "n_values=20",
            "--set", "rounds=40", "--set", "ppp_block_rounds=8"]


def _read_all(stem, names):
    return {name: (stem.parent / name).read_bytes() for name in names}


class TestParser:
    def test_subcommands_registered(self):
        parser = build_parser()
        args = parser.parse_args(["compare", "--seed", "3", "--format", "json"])
        assert args.command == "compare" and args.seed == 3

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_bad_format_rejected(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["compare", "--format", "yaml"])


class TestStdoutModes:
    def test_csv_to_stdout(self, capsys):
        assert main(TINY_COMPARE) == 0
        out = capsys.readouterr().out
        assert out.startswith("# ")
        assert "# seed=7" in out and "# trials=2" in out
        header = next(line for line in out.splitlines() if not line.startswith("#"))
        assert "scheme" in header and "c_edt" in header

    def test_json_to_stdout(self, capsys):
        assert main(TINY_COMPARE + ["--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["seed"] == 7 and doc["driver"] == "compare"
        assert doc["config"]["trials"] == 2
        assert len(doc["rows"]) == 2 * 2 * 3


class TestReportPath:
    def test_compare_writes_csv_json_figure(self, tmp_path, capsys):
        stem = tmp_path / "fig2" / "run"
        assert main(TINY_COMPARE + ["--out", str(stem)]) == 0
        assert (tmp_path / "fig2" / "run.csv").exists()
        assert (tmp_path / "fig2" / "run.json").exists()
        assert (tmp_path / "fig2" / "run_compare.png").exists()
        wrote = [line for line in capsys.readouterr().out.splitlines()
                 if line.startswith("wrote ")]
        assert len(wrote) == 3

    def test_out_suffix_is_stripped(self, tmp_path):
        stem = tmp_path / "run.csv"
        assert main(TINY_COMPARE + ["--out", str(stem), "--no-plot"]) == 0
        assert (tmp_path / "run.csv").exists() and (tmp_path / "run.json").exists()

    def test_no_plot_skips_figure(self, tmp_path):
        stem = tmp_path / "run"
        assert main(TINY_COMPARE + ["--out", str(stem), "--no-plot"]) == 0
        assert not list(tmp_path.glob("*.png"))

    def test_allocate_writes_curve_and_figure(self, tmp_path):
        args = ["allocate", "--trials", "2", "--seed", "5",
                "--set", "l_values=500", "--set", "p_dbm_values=0,20",
                "--out", str(tmp_path / "run")]
        assert main(args) == 0
        assert (tmp_path / "run_curve.csv").exists()
        assert (tmp_path / "run_allocate.png").exists()

    def test_ppp_report(self, tmp_path):
        assert main(TINY_PPP + ["--out", str(tmp_path / "run")]) == 0
        assert (tmp_path / "run.csv").exists()
        assert (tmp_path / "run_ppp.png").exists()

    def test_json_format_report_embeds_rows(self, tmp_path):
        stem = tmp_path / "run"
        assert main(TINY_COMPARE + ["--out", str(stem), "--format", "json",
                                    "--no-plot"]) == 0
        doc = json.loads((tmp_path / "run.json").read_text())
        assert len(doc["rows"]) == 12
        assert not (tmp_path / "run.csv").exists()


class TestDeterminism:
    def test_same_seed_byte_identical(self, tmp_path):
        names = ["run.csv", "run.json", "run_compare.png"]
        a_stem, b_stem = tmp_path / "a" / "run", tmp_path / "b" / "run"
        assert main(TINY_COMPARE + ["--out", str(a_stem)]) == 0
        assert main(TINY_COMPARE + ["--out", str(b_stem)]) == 0
        assert _read_all(a_stem, names) == _read_all(b_stem, names)

    def test_different_seed_differs(self, tmp_path):
        a_stem, b_stem = tmp_path / "a" / "run", tmp_path / "b" / "run"
        base = ["compare", "--trials", "2", "--set", "p_dbm_values=0,20",
                "--no-plot"]
        assert main(base + ["--seed", "7", "--out", str(a_stem)]) == 0
        assert main(base + ["--seed", "8", "--out", str(b_stem)]) == 0
        assert (a_stem.parent / "run.csv").read_bytes() != \
            (b_stem.parent / "run.csv").read_bytes()

    def test_default_override_is_a_no_op(self, tmp_path):
        a_stem, b_stem = tmp_path / "a" / "run", tmp_path / "b" / "run"
        assert main(TINY_PPP + ["--out", str(a_stem), "--no-plot"]) == 0
        assert main(TINY_PPP + ["--set", "P_dbm=20", "--out", str(b_stem),
                                "--no-plot"]) == 0
        assert (a_stem.parent / "run.csv").read_bytes() == \
            (b_stem.parent / "run.csv").read_bytes()

    def test_config_file_equals_set_flags(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("p_dbm_values = 0, 20\ntrials = 2\nseed = 7\n")
        assert main(["compare", "--config", str(cfg)]) == 0
        from_file = capsys.readouterr().out
        assert main(TINY_COMPARE) == 0
        assert capsys.readouterr().out == from_file


class TestValidateCommand:
    def test_reports_counts(self, capsys):
        assert main(["validate", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert "passed 12/12 checks" in out
        assert out.count("ok  ") == 12 and "FAIL" not in out

    def test_writes_report(self, tmp_path, capsys):
        assert main(["validate", "--seed", "1", "--out",
                     str(tmp_path / "report")]) == 0
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["passed"] == doc["total"] == 12
        assert len(doc["checks"]) == 12


class TestErrorHandling:
    def test_malformed_set(self, capsys):
        assert main(["compare", "--set", "trials"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_key(self, capsys):
        assert main(["compare", "--set", "power=20"]) == 1
        assert "unknown config key 'power'" in capsys.readouterr().err

    def test_bad_value(self, capsys):
        assert main(["compare", "--set", "trials=many"]) == 1
        assert "'trials'" in capsys.readouterr().err

    def test_domain_error_from_driver(self, capsys):
        assert main(["allocate", "--trials", "1", "--set", "l_values=150"]) == 1
        assert "too small" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert main(["compare", "--config", "/nonexistent/x.cfg"]) == 1
        assert "error:" in capsys.readouterr().err
