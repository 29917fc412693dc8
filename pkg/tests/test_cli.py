import json

import pytest

from cnmdesign.cli import main
from cnmdesign.fixtures import fixture_text


@pytest.fixture
def fixture_file(tmp_path):
    path = tmp_path / "nsfnet.json"
    assert main(["fixture", "--out", str(path)]) == 0
    assert path.read_text() == fixture_text()
    return path


@pytest.fixture
def design_file(fixture_file, tmp_path):
    out = tmp_path / "design.json"
    code = main(["solve", str(fixture_file), "--objective", "min-risk", "--controllers", "3", "--out", str(out)])
    assert code == 0
    return out


def test_solve_three_controllers(design_file):
    data = json.loads(design_file.read_text())
    assert len(data["controllers"]) == 3
    assert data["proof"] == "optimal"


def test_solve_infeasible(fixture_file, capsys):
    assert main(["solve", str(fixture_file), "--controllers", "1"]) == 2
    assert "C1" in capsys.readouterr().err


def test_solve_budget(fixture_file, tmp_path):
    out = tmp_path / "d.json"
    code = main(["solve", str(fixture_file), "--controllers", "4", "--budget", "50", "--out", str(out)])
    assert code == 3
    assert json.loads(out.read_text())["proof"] == "budget-exhausted"


def test_garbage_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("this is not an instance")
    assert main(["solve", str(bad)]) == 1


def test_missing_file(tmp_path):
    assert main(["solve", str(tmp_path / "absent.json")]) == 1


def test_bad_flags(fixture_file):
    assert main(["solve", str(fixture_file), "--controllers", "x"]) == 1
    assert main(["nonsense"]) == 1


def test_check_accepts_solver_output(fixture_file, design_file, capsys):
    assert main(["check", str(fixture_file), str(design_file)]) == 0
    assert json.loads(capsys.readouterr().out)["feasible"] is True


def test_check_reports_overload(fixture_file, design_file, tmp_path, capsys):
    data = json.loads(design_file.read_text())
    target = data["controllers"][0]
    others = set(data["controllers"][1:])
    data["assignment"] = [[i, i if i in others else target] for i, _ in data["assignment"]]
    # every channel on its first catalog path keeps the file well formed
    data["s2c_mapping"] = [
        {"switch": i, "controller": f, "path": 0} for i, f in data["assignment"] if i != f
    ]
    edited = tmp_path / "edited.json"
    edited.write_text(json.dumps(data))
    assert main(["check", str(fixture_file), str(edited)]) == 2
    report = json.loads(capsys.readouterr().out)
    assert "C3" in report["violated"]


def test_check_reports_c19(tmp_path, capsys):
    instance = {
        "format": "cnm-instance/1",
        "nodes": [{"id": i, "datacenter": i in (1, 3, 4)} for i in range(1, 6)],
        "links": [[1, 2], [2, 3], [3, 4], [4, 5], [5, 1]],
        "disasters": [{"id": "cut", "failed_links": [[1, 2]], "p_occurrence": "0.5", "p_conditional": "0.5"}],
        "params": {"k": 1, "q": 1, "B": 5, "latency_hops": 3, "catalog_K": 3},
    }
    design = {
        "format": "cnm-design/1",
        "controllers": [1, 3, 4],
        "virtual_links": [[1, 3], [1, 4], [3, 4]],
        "assignment": [[1, 1], [2, 3], [3, 3], [4, 4], [5, 4]],
        "c2c_mapping": [
            {"link": [1, 3], "path": 0, "nodes": [1, 2, 3]},
            {"link": [1, 4], "path": 1, "nodes": [1, 2, 3, 4]},
            {"link": [3, 4], "path": 0, "nodes": [3, 4]},
        ],
        "s2c_mapping": [
            {"switch": 2, "controller": 3, "path": 0},
            {"switch": 5, "controller": 4, "path": 0},
        ],
    }
    (tmp_path / "i.json").write_text(json.dumps(instance))
    (tmp_path / "d.json").write_text(json.dumps(design))
    assert main(["check", str(tmp_path / "i.json"), str(tmp_path / "d.json")]) == 2
    report = json.loads(capsys.readouterr().out)
    assert report["violated"] == ["C19"]
    assert {v["elements"][0] for v in report["violations"]} == {"cut"}


def test_simulate(fixture_file, design_file, capsys):
    assert main(["simulate", str(fixture_file), str(design_file), "--disaster", "emp"]) == 0
    (report,) = json.loads(capsys.readouterr().out)
    assert report["failed_controllers"] == []
    assert report["islanded"] is False
    assert main(["simulate", str(fixture_file), str(design_file), "--disaster", "zzz"]) == 1


def test_sweep_and_plot(fixture_file, tmp_path, capsys):
    csv_path, svg_path = tmp_path / "s.csv", tmp_path / "s.svg"
    code = main(["sweep", str(fixture_file), "--controllers", "2..6", "--out", str(csv_path), "--figure", str(svg_path)])
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("objective,controllers,disaster_id")
    assert 1 < len(lines) <= 11
    assert capsys.readouterr().err.count("absent:") == 2
    assert svg_path.read_text().startswith("<?xml")
    plotted = tmp_path / "p.svg"
    assert main(["plot", str(csv_path), "--out", str(plotted)]) == 0
    assert plotted.read_text() == svg_path.read_text()


def test_sweep_all_infeasible(fixture_file):
    assert main(["sweep", str(fixture_file), "--controllers", "1"]) == 2


def test_export_and_import(fixture_file, tmp_path, capsys):
    lp = tmp_path / "m.lp"
    assert main(["export-lp", str(fixture_file), "--controllers", "3", "--out", str(lp)]) == 0
    text = lp.read_text()
    assert "\nBinary\n" in text and text.rstrip().endswith("End")
    sol = tmp_path / "sol.txt"
    sol.write_text("C_1 0\n")
    assert main(["import-solution", str(fixture_file), str(sol)]) == 1
