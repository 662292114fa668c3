import json

import pytest

from zslab.cli import main, parse_and_run
from zslab.reports import strip_timing, validate_report


def run(argv):
    return parse_and_run(argv)


def seq_file(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


# -- exit code contract -----------------------------------------------------------


def test_exit_zero_on_success():
    code, report = run(["c0", "--group", "3,3"])
    assert code == 0
    assert report["result"]["c0"] == 5


def test_exit_one_on_mathematical_no(tmp_path):
    p = seq_file(tmp_path, "irregular.json", {"group": "3,15", "multiplicity": {"3": 15}})
    code, report = run(["regular", "--group", "3,15", "--seq", p])
    assert code == 1
    assert not report["result"]["regular"]
    assert report["result"]["violating_subgroup"]["order"] == 15


def test_exit_two_on_usage_error(tmp_path):
    p = seq_file(tmp_path, "empty.json", {"group": "3,15", "terms": []})
    assert run(["sigma", "--group", "3,15", "--seq", p]) == (2, None)
    assert run(["sigma", "--group", "3,15", "--seq", str(tmp_path / "missing.json")]) == (2, None)
    assert run(["no-such-command"]) == (2, None)
    assert run(["davenport", "--group", "2,2,2"]) == (2, None)


def test_exit_three_on_budget():
    assert run(["c0", "--group", "3,15"]) == (3, None)
    assert run(["davenport", "--group", "3,15", "--mode", "bruteforce"]) == (3, None)


# -- subcommand payloads ---------------------------------------------------------------


def test_group_info_payload():
    code, report = run(["group-info", "--group", "15,3"])
    assert code == 0
    assert report["result"] == {
        "group": "3,15",
        "invariant_factors": [3, 15],
        "order": 45,
        "exponent": 15,
        "rank": 2,
        "subgroup_count": 12,
    }


def test_sigma_and_basis_payloads(tmp_path):
    extremal = {"group": "3,15", "multiplicity": {"3": 13, "43": 4}}
    p = seq_file(tmp_path, "extremal.json", extremal)
    code, report = run(["sigma", "--group", "3,15", "--seq", p])
    assert code == 0
    assert report["result"]["sigma_cardinality"] == 44
    assert [2, 12] not in report["result"]["sigma"]

    code, report = run(["basis", "--group", "3,15", "--seq", p])
    assert code == 1
    assert report["result"]["missing"] == [[2, 12]]

    code, report = run(["regular", "--group", "3,15", "--seq", p])
    assert code == 0


def test_sequence_terms_form_accepted(tmp_path):
    p = seq_file(tmp_path, "t.json", {"group": "3,3", "terms": [[1, 0], [1, 0], [0, 1], [0, 1]]})
    code, report = run(["algebra-cover", "--group", "3,3", "--seq", p])
    assert code == 0
    assert report["result"]["found"] is False


def test_algebra_cover_found(tmp_path):
    p = seq_file(tmp_path, "t.json", {"group": "3,3", "terms": [[1, 0]] * 2 + [[0, 1]] * 2 + [[1, 1]]})
    code, report = run(["algebra-cover", "--group", "3,3", "--seq", p])
    assert code == 0
    res = report["result"]
    assert res["found"] is True
    assert len(res["assignment"]) == 5
    kinds = {("kill_exponent" in e) or ("free" in e) for e in res["assignment"]}
    assert kinds == {True}


def test_algebra_dwitness():
    code, report = run(["algebra-dwitness", "--group", "2,4", "--len", "4"])
    assert code == 0 and report["result"]["found"]
    code, report = run(["algebra-dwitness", "--group", "2,4", "--len", "5"])
    assert code == 0 and not report["result"]["found"]


def test_stabilizer_subcommand_inline_and_file(tmp_path):
    code, report = run(["stabilizer", "--group", "3,15", "--set", "[[0,0],[0,5],[0,10]]"])
    assert code == 0
    assert report["result"]["order"] == 3
    p = tmp_path / "set.json"
    p.write_text("[[0,0],[0,5],[0,10]]")
    code2, report2 = run(["stabilizer", "--group", "3,15", "--set", str(p)])
    assert report2["result"] == report["result"]


def test_kneser_fuzz_small():
    code, report = run(["kneser-fuzz", "--trials", "300", "--seed", "5"])
    assert code == 0
    assert report["result"]["holds"]
    assert report["result"]["trials"] == 300


def test_verify_paper_payload():
    code, report = run(["verify-paper", "--q", "5"])
    assert code == 0
    res = report["result"]
    assert res["lower_bound_length"] == 17
    assert res["missing"] == [[2, 12]]
    assert res["target_missing"] and res["regular"] and res["ok"]
    assert res["c0_lower_bound"] == 18
    assert res["stabilizer_check"]["holds"]
    assert report["claim"]


def test_verify_paper_rejects_composite_q():
    assert run(["verify-paper", "--q", "9"]) == (2, None)


def test_monte_carlo_cli_with_plant():
    code, report = run(
        ["monte-carlo", "--q", "5", "--trials", "25", "--seed", "42", "--length", "17", "--plant-extremal"]
    )
    assert code == 0
    assert report["result"]["planted"]["is_counterexample"]


def test_search_extremal_payload():
    code, report = run(["search-extremal", "--group", "3,3"])
    assert code == 0
    res = report["result"]
    assert res["value"] == 4 and not res["cap_hit"]
    assert res["witness"]["length"] == 4


# -- report invariants ---------------------------------------------------------------------


CORPUS = [
    ["group-info", "--group", "3,15"],
    ["c0", "--group", "2,2"],
    ["davenport", "--group", "3,12", "--mode", "both"],
    ["kneser-fuzz", "--trials", "50", "--seed", "2"],
    ["verify-paper", "--q", "5"],
    ["monte-carlo", "--q", "5", "--trials", "30", "--seed", "1"],
    ["algebra-dwitness", "--group", "3,3", "--len", "4"],
]


@pytest.mark.parametrize("argv", CORPUS, ids=lambda a: a[0])
def test_every_report_validates_against_schema(argv):
    code, report = run(argv)
    assert report is not None
    validate_report(report)
    assert list(report) == ["tool", "version", "command", "claim", "config", "result", "timing"]


@pytest.mark.parametrize("argv", CORPUS, ids=lambda a: a[0])
def test_reports_are_deterministic_modulo_timing(argv):
    _, a = run(argv)
    _, b = run(argv)
    assert json.dumps(strip_timing(a)) == json.dumps(strip_timing(b))


def test_workers_do_not_change_the_payload():
    _, a = run(["monte-carlo", "--q", "5", "--trials", "60", "--seed", "3", "--workers", "1"])
    _, b = run(["monte-carlo", "--q", "5", "--trials", "60", "--seed", "3", "--workers", "4"])
    assert strip_timing(a)["result"] == strip_timing(b)["result"]


def test_cli_budget_exhaustion_writes_resumable_checkpoint(tmp_path, capsys):
    ck = tmp_path / "c55.jsonl"
    code, report = run(
        ["search-extremal", "--group", "5,5", "--budget-seconds", "0.000001", "--checkpoint", str(ck)]
    )
    assert code == 3 and report is None
    assert ck.exists()
    code, report = run(["search-extremal", "--group", "5,5", "--checkpoint", str(ck)])
    assert code == 0
    assert report["result"]["value"] == 8


def test_main_writes_json_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["group-info", "--group", "6", "--json", str(out)])
    assert code == 0
    assert capsys.readouterr().out == ""
    report = json.loads(out.read_text())
    assert report["result"]["order"] == 6


def test_main_prints_to_stdout(capsys):
    code = main(["group-info", "--group", "6"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["result"]["order"] == 6


def test_workers_env_fallback(monkeypatch):
    monkeypatch.setenv("ZSLAB_WORKERS", "3")
    _, report = run(["group-info", "--group", "6"])
    assert report["config"]["workers"] == 3
    _, report = run(["group-info", "--group", "6", "--workers", "2"])
    assert report["config"]["workers"] == 2
    monkeypatch.setenv("ZSLAB_WORKERS", "junk")
    _, report = run(["group-info", "--group", "6"])
    assert report["config"]["workers"] == 1
