"""Command-line interface: subcommands, flags, exit codes, report files."""

import json

import pytest

from oddchern.cli import main

DEG_SCENARIO = """\
scenario = deg
geometry.sphere = 1
map.kind = circle_winding
map.m = 2
"""


def write(tmp_path, text, name="scenario.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_deg_subcommand_json(tmp_path, capsys):
    cfg = write(tmp_path, DEG_SCENARIO)
    code = main(["deg", "--config", cfg])
    out = capsys.readouterr().out
    payload = json.loads(out)
    assert code == 0
    assert payload["values"]["deg"]["rounded"] == -2


def test_deg_subcommand_writes_report_file(tmp_path, capsys):
    cfg = write(tmp_path, DEG_SCENARIO)
    out_path = tmp_path / "report.json"
    code = main(["deg", "--config", cfg, "--out", str(out_path)])
    assert code == 0
    payload = json.loads(out_path.read_text(encoding="utf-8"))
    assert payload["values"]["deg"]["rounded"] == -2
    assert "ok" in capsys.readouterr().out


def test_csv_format(tmp_path):
    cfg = write(tmp_path, DEG_SCENARIO)
    out_path = tmp_path / "report.csv"
    code = main(["deg", "--config", cfg, "--out", str(out_path),
                 "--format", "csv"])
    assert code == 0
    first = out_path.read_text(encoding="utf-8").splitlines()[0]
    assert first == "section,name,re,im,extra"


def test_missing_config_is_usage_error(tmp_path, capsys):
    code = main(["deg", "--config", str(tmp_path / "absent.txt")])
    assert code == 64
    assert "error:" in capsys.readouterr().err


def test_malformed_config_is_usage_error(tmp_path, capsys):
    cfg = write(tmp_path, "scenario deg\n")
    assert main(["deg", "--config", cfg]) == 64


def test_subcommand_scenario_mismatch(tmp_path, capsys):
    cfg = write(tmp_path, DEG_SCENARIO)
    assert main(["flz-point", "--config", cfg]) == 64


def test_unknown_generator_is_usage_error(tmp_path, capsys):
    cfg = write(tmp_path, "scenario = deg\nmap.kind = mystery\n")
    assert main(["deg", "--config", cfg]) == 64


def test_flz_point_subcommand(tmp_path, capsys):
    cfg = write(tmp_path, """\
scenario = flz-point
geometry.n = 1
map.kind = circle_winding
map.m = 1
""")
    code = main(["flz-point", "--config", cfg])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["values"]["point_contribution"] == [-1.0, 0.0]


def test_verify_subcommand_named_checks(tmp_path, capsys):
    cfg = write(tmp_path, """\
scenario = verify
verify.only = gaussian moment, point case
""")
    code = main(["verify", "--config", cfg])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    names = {c["name"] for c in payload["checks"]}
    assert names == {"gaussian moment", "point case"}
    assert all(c["passed"] for c in payload["checks"])


@pytest.mark.slow
def test_deg_star_split_example(tmp_path, capsys):
    cfg = write(tmp_path, """\
scenario = deg-star
geometry.p = 2
geometry.q = 1
map.f.kind = circle_winding
map.f.m = 3
map.h.kind = su2_identity
""")
    code = main(["deg-star", "--config", cfg, "--resolution-scale", "0.75"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["values"]["deg_star"]["rounded"] == -1
    assert payload["values"]["deg_h_oracle"]["rounded"] == -1


@pytest.mark.slow
def test_localize_subcommand(tmp_path, capsys):
    cfg = write(tmp_path, """\
scenario = localize
geometry.p = 2
geometry.q = 1
map.h.kind = su2_identity
""")
    code = main(["localize", "--config", cfg, "--resolution-scale", "0.75"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["values"]["localized_value"] == [1.0, 0.0]
