import json

import pytest

from sequiv.cli import EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, main, read_config_file, resolve_config, build_parser


def run(capsys, *argv, environ=None):
    code = main(list(argv), environ=environ or {})
    out, err = capsys.readouterr()
    return code, out, err


def test_wpoly_table(capsys):
    code, out, _ = run(capsys, "wpoly")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0] == "n,polynomial,coefficients,recurrence_ok"
    assert lines[5] == "4,16x^4 - 56x^2 + 9,9 0 -56 0 16,true"
    assert len(lines) == 6


def test_wpoly_single_row(capsys):
    code, out, _ = run(capsys, "wpoly", "--n-max", "0")
    assert out.splitlines()[1:] == ["0,1,1,true"]


def test_wpoly_recurrence_replay(capsys):
    code, out, _ = run(capsys, "wpoly", "--n-max", "6")
    assert code == EXIT_OK
    assert all(line.endswith("true") for line in out.splitlines()[1:])


def test_gram_defaults_pass(capsys):
    code, out, err = run(capsys, "gram")
    assert code == EXIT_OK
    assert "PASS: 81/81" in err


def test_gram_single_entry(capsys):
    code, out, _ = run(capsys, "gram", "--n-max", "0")
    assert out.splitlines()[1].startswith("0,0,1.0000000000000000e+00")


def test_gram_below_floor_exits_two(capsys):
    code, out, err = run(capsys, "gram", "--tol", "1e-15")
    assert code == EXIT_TOLERANCE
    assert "false" in out
    assert "err_estimate" in out.splitlines()[0]


def test_trajectory_cosine(capsys):
    code, out, _ = run(capsys, "trajectory", "--model", "alternative", "--t-end", "1.4")
    assert code == EXIT_OK
    last = out.splitlines()[-1].split(",")
    assert abs(float(last[1]) - 0.16996714290024104) < 1e-6


def test_trajectory_singularity_row(capsys):
    code, out, err = run(capsys, "trajectory", "--t-end", "3")
    assert code == EXIT_OK
    assert out.splitlines()[-1].startswith("# SingularityStop,")
    assert "last valid t" in err


def test_trajectory_is_byte_stable(capsys):
    _, a, _ = run(capsys, "trajectory", "--t-end", "0.2")
    _, b, _ = run(capsys, "trajectory", "--t-end", "0.2")
    assert a == b


def test_master_and_json(capsys):
    code, out, _ = run(capsys, "master", "--x", "2", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["columns"][0] == "p_prime"
    assert max(row[-1] for row in doc["rows"]) < 1e-6


def test_eigencheck_range(capsys):
    code, out, _ = run(capsys, "eigencheck", "--gamma", "0.5")
    rows = out.splitlines()[1:]
    assert code == EXIT_OK
    assert len(rows) == 9
    assert "lambda=-7.5" in rows[0] and "lambda=8.5" in rows[-1]


def test_parseval_single_term_reports_defect(capsys):
    code, out, err = run(capsys, "parseval", "--terms", "1")
    assert code == EXIT_TOLERANCE
    defect = float(out.splitlines()[-1].split(",")[-1])
    assert defect > 1e-3


def test_fourier_passes(capsys):
    code, out, _ = run(capsys, "fourier")
    assert code == EXIT_OK
    assert len(out.splitlines()) == 1 + 7 * 25


def test_report_all_green(capsys):
    code, out, err = run(capsys, "report", "--parallel")
    assert code == EXIT_OK
    assert err.startswith("PASS")
    suites = [line.split(",")[0] for line in out.splitlines()[1:]]
    assert suites[0] == "wpoly" and suites[-1] == "master"


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == EXIT_USAGE
    code, _, _ = run(capsys, "gram", "--n-max", "13")
    assert code == EXIT_USAGE
    code, _, _ = run(capsys, "gram", "--tol", "-1")
    assert code == EXIT_USAGE


def test_out_file(tmp_path, capsys):
    target = tmp_path / "w.csv"
    code, out, _ = run(capsys, "wpoly", "--out", str(target))
    assert out == ""
    assert target.read_text().startswith("n,polynomial")


def test_config_env_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nn-max = 2\nformat = json\ntol=1e-3\n")
    assert read_config_file(cfg) == {"n_max": "2", "format": "json", "tol": "1e-3"}
    parser = build_parser()
    args = parser.parse_args(["wpoly", "--config", str(cfg)])
    assert resolve_config(args, {}).n_max == 2
    assert resolve_config(args, {"SEQUIV_N_MAX": "5"}).n_max == 5
    args = parser.parse_args(["wpoly", "--config", str(cfg), "--n-max", "7"])
    rc = resolve_config(args, {"SEQUIV_N_MAX": "5"})
    assert (rc.n_max, rc.format, rc.tol) == (7, "json", 1e-3)


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "wpoly", "--config", str(cfg))
    assert code == EXIT_USAGE
    assert "unknown key" in err


def test_help_documents_env_prefix(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out, _ = capsys.readouterr()
    assert "SEQUIV_TOL" in out
