import logging

import pytest

from gsinclusion import __version__
from gsinclusion.app import EXIT_USAGE, apply_overrides, main, parse_arguments
from gsinclusion.core.config import create_default_config
from gsinclusion.core.data.io import CERTIFICATE_FILE, SUMMARY_FILE
from gsinclusion.core.logging_config import ROOT_LOGGER_NAME


@pytest.fixture(autouse=True)
def quiet_application(isolated_home):
    """Keep the user config out of reach and restore the package logger afterwards."""
    logger = logging.getLogger(ROOT_LOGGER_NAME)
    saved = list(logger.handlers), logger.level, logger.propagate
    yield isolated_home
    for handler in logger.handlers:
        handler.close()
    logger.handlers[:] = saved[0]
    logger.setLevel(saved[1])
    logger.propagate = saved[2]


def run(*argv):
    return main([*argv, "--no-log-file"])


class TestArguments:
    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert __version__ in capsys.readouterr().out

    def test_missing_command(self, capsys):
        assert main([]) == EXIT_USAGE
        assert "usage" in capsys.readouterr().err

    def test_overrides(self):
        args = parse_arguments(["verify", "--qmax", "32", "--grid", "8,3", "--seed", "5"])
        config = apply_overrides(create_default_config(), args)
        assert config.sequences.q_max == 32
        assert (config.spaces.half_width_1d, config.spaces.spacing_exponent_1d) == (8, 3)
        assert config.advanced.seed == 5

    @pytest.mark.parametrize("flags", [["--grid", "8"], ["--grid", "a,b"], ["--qmax", "2"]])
    def test_bad_overrides(self, flags, capsys):
        assert run("report", *flags) == EXIT_USAGE
        assert capsys.readouterr().err.startswith("error:")


class TestConditions:
    def test_function_system(self, capsys):
        assert run("conditions", "fromomega(pow(rho=0.5))", "--as", "function-system") == 0
        out = capsys.readouterr().out
        assert "W [wM]" in out
        assert "witnessed: 2" in out

    def test_parse_error_is_positioned(self, capsys):
        assert run("conditions", "gevrey(s=1", "--as", "sequence") == EXIT_USAGE
        assert "line 1, column 11" in capsys.readouterr().err


class TestComparisons:
    def test_sequences(self):
        assert run("compare-sequences", "gevrey(s=0.5)", "gevrey(s=1)") == 0
        assert run("compare-sequences", "gevrey(s=1)", "gevrey(s=0.5)") == 1

    def test_functions(self):
        assert run("compare-functions", "pow(rho=0.5)", "pow(rho=1/3)") == 0
        assert run("compare-functions", "pow(rho=1/3)", "pow(rho=0.5)") == 1

    def test_sampled_growth_on_the_right(self):
        assert run("compare-functions", "logpow(a=2)", "growth-table:[(0,0),(10,1),(10000,1)]") == 0

    def test_spec_file_references(self, tmp_path, capsys):
        spec_file = tmp_path / "specs.txt"
        spec_file.write_text("fine = gevrey(s=0.5)\ncoarse = gevrey(s=1)\n", encoding="utf-8")
        assert run("compare-sequences", "@fine", "@coarse", "--spec-file", str(spec_file)) == 0
        assert run("compare-sequences", "@fine", "@missing", "--spec-file", str(spec_file)) == EXIT_USAGE
        assert "unknown spec reference '@missing'" in capsys.readouterr().err

    def test_reference_errors_point_into_the_file(self, tmp_path, capsys):
        spec_file = tmp_path / "specs.txt"
        spec_file.write_text("# pair\nbroken = gevrey(s=1,x=2)\n", encoding="utf-8")
        assert run("compare-sequences", "@broken", "gevrey(s=1)", "--spec-file", str(spec_file)) == EXIT_USAGE
        assert "line 2, column 23" in capsys.readouterr().err


class TestReports:
    def test_empty_report(self, capsys):
        assert run("report") == 0
        assert "no records" in capsys.readouterr().out

    def test_verify_then_report(self, tmp_path, capsys):
        out = tmp_path / "run"
        assert run("verify", "--suite", "parametrix", "--out", str(out)) == 0
        assert (out / CERTIFICATE_FILE).exists()
        assert (out / SUMMARY_FILE).exists()
        capsys.readouterr()
        assert run("report", str(out), "--out", str(tmp_path / "combined")) == 0
        assert "[verify parametrix (seed 42)]" in capsys.readouterr().out
        assert (tmp_path / "combined" / CERTIFICATE_FILE).read_bytes() == (out / CERTIFICATE_FILE).read_bytes()

    def test_unknown_suite(self, capsys):
        assert run("verify", "--suite", "bogus") == EXIT_USAGE
        assert "bogus" in capsys.readouterr().err

    def test_missing_report(self, tmp_path):
        assert run("report", str(tmp_path / "nowhere")) == EXIT_USAGE


@pytest.mark.slow
def test_decide_inclusion(capsys):
    code = run(
        "decide-inclusion",
        "gs(M=gevrey(s=0.5),A=gevrey(s=0.5))",
        "gs(M=gevrey(s=1),A=gevrey(s=1))",
        "--no-cross-check",
        "--workers",
        "4",
    )
    assert code == 0
    assert "included" in capsys.readouterr().out
