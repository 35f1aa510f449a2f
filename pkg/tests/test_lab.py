"""Scenario parsing, the check runner, report/CSV emission, and the CLI."""

import json
from pathlib import Path

import numpy as np
import pytest

from skewlab.cli import main as cli_main
from skewlab.report import Report, content_hash, emit_plotdata, strip_meta, write_grid_csv
from skewlab.runner import run_scenario
from skewlab.scenario import (
    DEFAULT_GRIDS,
    DEFAULT_TOLERANCES,
    KNOWN_CHECKS,
    ScenarioError,
    parse_scenario,
)

SMALL_COBOUNDARY = """
[scenario]
name = small-coboundary
matrix = 2 1 1 1
order = 50
checks = obstruction solve splitting tangency foliation invariant-form frobenius contact charfol
seed = 0
m-max = 3
blocks = 2
theta-grid = 8
samples = 500
newton-seeds = 32

[grids]
base = 64 64
volume = 32 32 16
plot = 16 16 8

[transfer]
1 0 0.0 0.1

[surface]
0 1 0.2 0.0

[expect]
obstruction = all-zero
solve = solved
splitting = converged
tangency = tangent
foliation = invariant
invariant-form = invariant
frobenius = integrable
contact = not-contact
charfol = not-contact
"""


def write_scenario(tmp_path, text, name="case.scn"):
    p = tmp_path / name
    p.write_text(text)
    return p


@pytest.fixture(scope="module")
def small_report(tmp_path_factory):
    path = write_scenario(tmp_path_factory.mktemp("scn"), SMALL_COBOUNDARY)
    return run_scenario(parse_scenario(path))


# ----------------------------------------------------------------------
# parsing


def test_parse_bundled_scenario():
    from importlib import resources

    path = resources.files("skewlab") / "scenarios" / "coboundary-catmap.scn"
    sc = parse_scenario(path)
    assert sc.name == "coboundary-catmap"
    assert sc.matrix == [[2, 1], [1, 1]]
    assert sc.transfer is not None and sc.gamma is None
    assert sc.tolerances == DEFAULT_TOLERANCES
    assert set(sc.expect) <= set(sc.checks)


def test_parse_defaults(tmp_path):
    path = write_scenario(
        tmp_path,
        "[scenario]\nname = d\nmatrix = 2 1 1 1\nchecks = obstruction\n[gamma]\n1 0 0.1 0.0\n",
    )
    sc = parse_scenario(path)
    assert sc.order == 50 and sc.m_max == 8 and sc.blocks == 3
    assert sc.grids == DEFAULT_GRIDS


def test_parse_error_reports_line_number(tmp_path):
    path = write_scenario(tmp_path, "[scenario]\nname = x\nmatrix = 2 1 1 1\nbogus line\n")
    with pytest.raises(ScenarioError, match="line 4"):
        parse_scenario(path)


def test_parse_rejects_unknown_check(tmp_path):
    path = write_scenario(
        tmp_path, "[scenario]\nname = x\nmatrix = 2 1 1 1\nchecks = wibble\n"
    )
    with pytest.raises(ScenarioError, match="unknown check 'wibble'"):
        parse_scenario(path)


def test_parse_rejects_missing_dependency(tmp_path):
    path = write_scenario(
        tmp_path,
        "[scenario]\nname = x\nmatrix = 2 1 1 1\nchecks = tangency\n[transfer]\n1 0 0.0 0.1\n",
    )
    with pytest.raises(ScenarioError, match="requires check"):
        parse_scenario(path)


def test_parse_rejects_transfer_and_gamma_together(tmp_path):
    path = write_scenario(
        tmp_path,
        "[scenario]\nname = x\nmatrix = 2 1 1 1\nchecks = solve\n"
        "[transfer]\n1 0 0.0 0.1\n[gamma]\n1 0 0.1 0.0\n",
    )
    with pytest.raises(ScenarioError, match="mutually exclusive"):
        parse_scenario(path)


def test_parse_rejects_malformed_field_row(tmp_path):
    path = write_scenario(
        tmp_path,
        "[scenario]\nname = x\nmatrix = 2 1 1 1\nchecks = solve\n[gamma]\n1 0 0.1\n",
    )
    with pytest.raises(ScenarioError, match="line 6"):
        parse_scenario(path)


def test_parse_rejects_unknown_section(tmp_path):
    path = write_scenario(tmp_path, "[scenario]\nname = x\n[wat]\n")
    with pytest.raises(ScenarioError, match="unknown section"):
        parse_scenario(path)


def test_parse_requires_surface_for_charfol(tmp_path):
    path = write_scenario(
        tmp_path,
        "[scenario]\nname = x\nmatrix = 2 1 1 1\nchecks = solve charfol\n"
        "[transfer]\n1 0 0.0 0.1\n",
    )
    with pytest.raises(ScenarioError, match="surface"):
        parse_scenario(path)


# ----------------------------------------------------------------------
# runner


def test_full_chain_report(small_report):
    r = small_report
    assert list(r.checks) == [c for c in KNOWN_CHECKS if c in r.checks]
    assert all(v["as_expected"] for v in r.checks.values())
    assert r.overall["verdict"] == "as-expected"
    assert r.overall["exit_status"] == 0
    assert r.checks["solve"]["verdict"] == "solved"
    assert r.checks["charfol"]["divergence_l1"] == 0.0
    assert len(r.checks["charfol"]["singular_points"]) >= 2


def test_report_hash_excludes_meta(small_report):
    doc = json.loads(small_report.to_json())
    assert "timestamp" in doc["meta"]
    body = {k: v for k, v in doc.items() if k not in ("meta", "report_hash")}
    assert content_hash(body) == doc["report_hash"]
    assert "meta" not in strip_meta(doc)


def test_runs_are_deterministic(tmp_path):
    path = write_scenario(tmp_path, SMALL_COBOUNDARY)
    sc = parse_scenario(path)
    a, b = run_scenario(sc), run_scenario(sc)
    da, db = json.loads(a.to_json()), json.loads(b.to_json())
    da.pop("meta"), db.pop("meta")
    assert da == db


def test_unexpected_verdict_sets_exit_one(tmp_path):
    text = SMALL_COBOUNDARY.replace("frobenius = integrable", "frobenius = not-integrable")
    sc = parse_scenario(write_scenario(tmp_path, text))
    r = run_scenario(sc)
    assert r.checks["frobenius"]["as_expected"] is False
    assert r.overall == {
        "verdict": "violated-expectation",
        "exit_status": 1,
        "chain": r.overall["chain"],
    }


def test_obstructed_scenario_end_to_end():
    from importlib import resources

    sc = parse_scenario(resources.files("skewlab") / "scenarios" / "obstructed-catmap.scn")
    r = run_scenario(sc)
    assert r.overall["exit_status"] == 0
    entries = r.checks["obstruction"]["blocks"]["1"]["entries"]
    fixed = [e for e in entries if e["period"] == 1]
    assert fixed[0]["value"] == pytest.approx(0.35, abs=1e-12)
    assert r.checks["solve"]["verdict"] == "unsolvable-in-class"
    assert {w["kind"] for w in r.checks["solve"]["witnesses"]} == {"mean", "orbit"}
    assert r.checks["foliation"]["verdict"] == "not-invariant"


def test_forms_only_scenario_end_to_end():
    from importlib import resources

    sc = parse_scenario(resources.files("skewlab") / "scenarios" / "standard-contact-form.scn")
    r = run_scenario(sc)
    assert r.overall["exit_status"] == 0
    assert r.checks["contact"]["verdict"] == "contact"
    assert r.checks["frobenius"]["max_abs"] == pytest.approx(2 * np.pi, abs=1e-10)
    assert r.checks["reeb"]["verdict"] == "verified"


# ----------------------------------------------------------------------
# CSV / plot emission


def test_emit_plotdata_writes_grid_files(small_report, tmp_path):
    paths = emit_plotdata(small_report, "frobenius", tmp_path)
    assert [p.name for p in paths] == ["frobenius_coefficient.csv"]
    lines = paths[0].read_text().splitlines()
    assert lines[0] == "x,y,t,value"
    vals = np.loadtxt(paths[0], delimiter=",", skiprows=1)
    assert np.max(np.abs(vals[:, 3])) < 1e-9


def test_emit_plotdata_unknown_check(small_report, tmp_path):
    with pytest.raises(KeyError):
        emit_plotdata(small_report, "solve", tmp_path)  # verdict-only check


def test_empty_grid_writes_header_only(tmp_path):
    from skewlab.forms import GridData

    path = write_grid_csv(tmp_path / "empty.csv", GridData(columns=("x", "value"), data=np.empty((0, 2))))
    assert path.read_text() == "x,value\n"


def test_singular_point_table_round_trips(small_report, tmp_path):
    paths = emit_plotdata(small_report, "charfol", tmp_path)
    table = [p for p in paths if p.name.endswith("singular-points.csv")][0]
    lines = table.read_text().splitlines()
    assert lines[0] == "x,y,divergence,classification"
    assert len(lines) - 1 == len(small_report.checks["charfol"]["singular_points"])


# ----------------------------------------------------------------------
# CLI


def test_cli_run_and_plot(tmp_path, capsys):
    scn = write_scenario(tmp_path, SMALL_COBOUNDARY)
    out = tmp_path / "out"
    status = cli_main(["run", str(scn), "--out", str(out)])
    captured = capsys.readouterr().out
    assert status == 0
    assert (out / "report.json").is_file()
    assert (out / "frobenius_coefficient.csv").is_file()
    for name in ("obstruction", "solve", "charfol"):
        assert name in captured
    figs = tmp_path / "figs"
    assert cli_main(["plot", str(out / "report.json"), "frobenius", "--out", str(figs)]) == 0
    assert (figs / "frobenius_coefficient.png").is_file()


def test_cli_list_scenarios(capsys):
    assert cli_main(["list-scenarios"]) == 0
    names = capsys.readouterr().out.split()
    assert {"coboundary-catmap", "obstructed-catmap", "standard-contact-form"} <= set(names)


def test_cli_unknown_scenario(capsys):
    assert cli_main(["run", "no-such-scenario"]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_plot_unknown_check(tmp_path, capsys):
    scn = write_scenario(tmp_path, SMALL_COBOUNDARY)
    out = tmp_path / "out"
    cli_main(["run", str(scn), "--out", str(out)])
    capsys.readouterr()
    assert cli_main(["plot", str(out / "report.json"), "wibble"]) == 2
