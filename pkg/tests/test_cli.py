import os

import pytest
from click.testing import CliRunner

from ternbound import cli
from ternbound.interval import Interval


@pytest.fixture
def runner():
    return CliRunner()


def test_ladder_passes_and_writes_report(runner, results_dir):
    r = runner.invoke(cli.main, ["verify", "ladder"])
    assert r.exit_code == 0, r.output
    path = results_dir / "ladder.txt"
    text = path.read_text()
    assert "status = pass" in text and "summary: ladder: 3/3 checks pass" in text
    assert "wall_time" not in text  # timing goes to stdout only
    assert "wall_time" in r.output


def test_reports_are_byte_deterministic(runner, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert runner.invoke(cli.main, ["verify", "ladder", "--out", str(a)]).exit_code == 0
    assert runner.invoke(cli.main, ["verify", "ladder", "--out", str(b)]).exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_failed_verification_exits_one(runner, tmp_path, results_dir):
    t = tmp_path / "gap.txt"
    t.write_text("#!height 3.061e10\n25.32844 28314000 base\n300 307908668 far\n")
    r = runner.invoke(cli.main, ["verify", "ladder", "--delta-table", str(t)])
    assert r.exit_code == 1
    assert "uncovered" in (results_dir / "ladder.txt").read_text()


def test_custom_delta_table_passes(runner, results_dir):
    from ternbound import zeros
    path = os.path.join(zeros.DATA_DIR, zeros.DELTA_TABLES[2.419e11])
    r = runner.invoke(cli.main, ["verify", "ladder", "--delta-table", path])
    assert r.exit_code == 0, r.output
    assert "6.15697e+28" in r.output


@pytest.mark.parametrize("args", [
    ["verify", "nonsense"],
    ["verify", "ladder", "--qmax", "0"],
    ["verify", "ladder", "--qmax", "many"],
    ["verify", "ladder", "--config", "/nonexistent/cfg"],
])
def test_usage_errors_exit_two(runner, args, results_dir):
    assert runner.invoke(cli.main, args).exit_code == 2


def test_bad_config_exits_two(runner, tmp_path, results_dir):
    c = tmp_path / "c.cfg"
    c.write_text("qmax = 10\ncolour = blue\n")
    assert runner.invoke(cli.main, ["verify", "ladder", "--config", str(c)]).exit_code == 2
    c.write_text("full-scale = maybe\n")
    assert runner.invoke(cli.main, ["verify", "ladder", "--config", str(c)]).exit_code == 2


def test_config_file_parsing(tmp_path):
    c = tmp_path / "c.cfg"
    c.write_text("# comment\nqmax = 2e3\ntables-limit = 5000  # trailing\n"
                 "full_scale = yes\ncertificates = false\ntolerance = 1e-6\n")
    cfg = cli.RunConfig.from_file(str(c))
    assert cfg.qmax == 2000 and cfg.tables_limit == 5000
    assert cfg.full_scale and not cfg.certificates and cfg.tolerance == 1e-6
    c.write_text("qmax 5\n")
    with pytest.raises(cli.ConfigError):
        cli.RunConfig.from_file(str(c))


def test_results_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.RESULTS_ENV, str(tmp_path / "elsewhere"))
    rep = cli.Report("demo")
    rep.add("x", "<=", "1", Interval(0.5))
    path = cli.write_report(rep)
    assert path == str(tmp_path / "elsewhere" / "demo.txt")
    assert os.path.exists(path)


def test_check_directions():
    v = Interval(1.0, 2.0)
    assert cli.Check("a", "<=", "2", v).status == "pass"
    assert cli.Check("a", "<=", "1.9", v).status == "fail"
    assert cli.Check("a", ">=", "1", v).status == "pass"
    assert cli.Check("a", "within", "0.5,2", v).status == "pass"
    assert cli.Check("a", "within", "1.1,2", v).status == "fail"
    assert cli.Check("a", "contains", "1.5", v).status == "pass"
    assert cli.Check("a", "<=", "2").status == "fail"  # nothing computed


def test_truncated_decimal_reading():
    # "6.798779..." means a value in [6.798779, 6.798780]
    assert cli.digits_consistent("6.798779", Interval(6.7987795, 6.7987796), "1e-5")
    assert not cli.digits_consistent("6.798779", Interval(6.79877, 6.7987785))
    assert not cli.digits_consistent("6.798779", Interval(6.7987, 6.7988), "1e-5")


def test_conclude_refuses_failed_subreport():
    bad = cli.Report("minor-chain")
    bad.add("Z", "<=", "0.5", Interval(0.9))
    with pytest.raises(cli.ChainError):
        cli.conclude(sub_reports=[bad])


def test_conclude_passes():
    rep = cli.run("conclude")
    assert rep.passed, rep.failing()
    assert rep.values["final"].lo >= 0.000422
