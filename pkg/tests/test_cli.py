import json

import pytest

from qmaps.cli import main
from qmaps.dsl import format_presentation
from qmaps.presentations import builtin_presentation


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_verify_sqo3(capsys):
    code, doc = run_json(capsys, "verify", "--preset", "sqo3", "--q", "0.5", "--dim", "32", "--checks", "relations")
    assert code == 0 and doc["passed"]
    assert doc["schema"] == 1 and doc["command"] == "verify"
    names = [e["name"] for e in doc["report"]["entries"]]
    assert len(names) == 20 and names[0] == "relation:P1"


def test_output_is_deterministic(capsys):
    argv = ("classify", "--action", "circle", "--state-seed", "7")
    first = run_json(capsys, *argv)
    assert first == run_json(capsys, *argv)
    assert first[1]["details"]["q"] == 0.0


def test_counterexample_ck(capsys):
    code, doc = run_json(capsys, "counterexample", "ck")
    assert code == 0
    assert doc["details"]["q"] == pytest.approx(0.7861513777574233, rel=1e-15)


def test_file_presentation_gets_symbolic_checks(tmp_path, capsys):
    pres = builtin_presentation("qmap-m2")
    path = tmp_path / "m.qm"
    path.write_text(format_presentation(pres).replace("NAME qmap-m2", "NAME custom"))
    code, doc = run_json(capsys, "verify", "--file", str(path))
    assert code == 0
    statuses = {e["status"] for e in doc["report"]["entries"]}
    assert statuses <= {"PassSymbolic", "NotApplicable"}


def test_list_checks(capsys):
    code, out, _ = run(capsys, "list-checks")
    assert code == 0
    rows = [l for l in out.splitlines() if l.strip()]
    assert len(rows) > 100
    assert any("relation:P1" in r for r in rows)


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--preset", "sqo3"),
        ("verify", "--preset", "nope", "--q", "0.5"),
        ("verify", "--preset", "sqo3", "--q", "1.5"),
        ("frobnicate",),
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(list(argv)))
    assert exc.value.code == 2


def test_parse_error_exit_two(tmp_path, capsys):
    path = tmp_path / "bad.qm"
    path.write_text("GENERATORS a\nRELATIONS\nr: a * m\n")
    code, _, err = run(capsys, "verify", "--file", str(path))
    assert code == 2
    assert "line 3, column 8" in err
