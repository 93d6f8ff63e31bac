import json
import shutil
import subprocess

import pytest

from ocelforge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_writes_a_snapshot(tmp_path, capsys):
    out = tmp_path / "snap"
    code, stdout, _ = run(capsys, "gen", "--out", str(out), "--orders", "5", "--seed", "9")
    assert code == 0
    assert "wrote 12 tables" in stdout
    assert (out / "EKKO.csv").is_file()
    assert (out / "manifest.json").is_file()


def test_gen_rejects_a_bad_item_range(tmp_path, capsys):
    code, _, stderr = run(capsys, "gen", "--out", str(tmp_path / "s"), "--items", "5:2")
    assert code == 1
    assert "items_min" in stderr


def test_gor_prints_the_graph(plain_snapshot, tmp_path, capsys):
    out, _ = plain_snapshot
    graph_file = tmp_path / "gor.json"
    code, stdout, _ = run(
        capsys, "gor", "--snapshot", str(out), "--master", "EKKO", "--out", str(graph_file)
    )
    assert code == 0
    doc = json.loads(stdout)
    assert doc["master"] == "EKKO"
    assert any(node["name"] == "EKPO" for node in doc["nodes"])
    assert json.loads(graph_file.read_text()) == doc


def test_gor_unknown_master_fails_with_one(plain_snapshot, capsys):
    out, _ = plain_snapshot
    code, _, stderr = run(capsys, "gor", "--snapshot", str(out), "--master", "NOPE")
    assert code == 1
    assert "NOPE" in stderr


def test_missing_snapshot_directory_is_a_usage_error(tmp_path, capsys):
    code, _, stderr = run(
        capsys, "gor", "--snapshot", str(tmp_path / "absent"), "--master", "EKKO"
    )
    assert code == 1


def test_classify_lists_categories_and_links(plain_snapshot, capsys):
    out, _ = plain_snapshot
    code, stdout, _ = run(capsys, "classify", "--snapshot", str(out), "--master", "EKKO")
    assert code == 0
    lines = stdout.splitlines()
    table_lines = [l for l in lines if not l.startswith("#")]
    cells = {l.split("\t")[0]: l.split("\t")[1] for l in table_lines}
    assert cells["EKKO"] == "record"
    assert cells["EKPO"] == "detail"
    assert cells["BKPF"] == "transaction"
    assert "# BSEG -> BKPF via MANDT,BELNR,GJAHR" in lines


def test_classify_override_changes_a_category(plain_snapshot, capsys):
    out, _ = plain_snapshot
    code, stdout, _ = run(
        capsys,
        "classify",
        "--snapshot",
        str(out),
        "--master",
        "EKKO",
        "--override",
        "EKPA=record",
    )
    assert code == 0
    assert "EKPA\trecord\tuser override" in stdout


def test_classify_rejects_an_unknown_category(plain_snapshot, capsys):
    out, _ = plain_snapshot
    code, _, stderr = run(
        capsys,
        "classify",
        "--snapshot",
        str(out),
        "--master",
        "EKKO",
        "--override",
        "EKPA=nonsense",
    )
    assert code == 1
    assert "--override" in stderr


def test_extract_needs_exactly_one_of_plan_and_master(plain_snapshot, tmp_path, capsys):
    out, _ = plain_snapshot
    target = tmp_path / "log.json"
    code, _, stderr = run(capsys, "extract", "--snapshot", str(out), "--out", str(target))
    assert code == 1
    assert "exactly one" in stderr

    plan_file = tmp_path / "plan.json"
    plan_file.write_text("{}")
    code, _, stderr = run(
        capsys,
        "extract",
        "--snapshot",
        str(out),
        "--plan",
        str(plan_file),
        "--master",
        "EKKO",
        "--out",
        str(target),
    )
    assert code == 1
    assert "exactly one" in stderr


def test_extract_end_to_end_with_report_and_plan_round_trip(plain_snapshot, tmp_path, capsys):
    out, _ = plain_snapshot
    target = tmp_path / "log.json"
    plan_file = tmp_path / "plan.json"
    code, stdout, stderr = run(
        capsys,
        "extract",
        "--snapshot",
        str(out),
        "--master",
        "EKKO",
        "--out",
        str(target),
        "--plan-out",
        str(plan_file),
    )
    assert code == 0
    assert "wrote" in stdout
    assert "events so far" in stderr
    first = target.read_bytes()
    assert first.startswith(b'{"ocel:events"')

    report = json.loads((tmp_path / "log.json.report.json").read_text())
    assert report["status"] == "ok"
    assert report["counts"]["events"] > 0
    assert report["tables"]["EKKO"] == "record"
    assert report["elapsed_seconds"] >= 0

    # replaying the saved plan reproduces the log byte for byte
    second_target = tmp_path / "log2.json"
    code, _, _ = run(
        capsys,
        "extract",
        "--snapshot",
        str(out),
        "--plan",
        str(plan_file),
        "--out",
        str(second_target),
    )
    assert code == 0
    assert second_target.read_bytes() == first


def test_extract_can_flatten_in_the_same_run(plain_snapshot, tmp_path, capsys):
    out, _ = plain_snapshot
    target = tmp_path / "log.json"
    flat = tmp_path / "flat.csv"
    stats_file = tmp_path / "stats.json"
    code, stdout, _ = run(
        capsys,
        "extract",
        "--snapshot",
        str(out),
        "--master",
        "EKKO",
        "--out",
        str(target),
        "--flatten",
        "EBELN-EBELN",
        "--flat-out",
        str(flat),
        "--stats-out",
        str(stats_file),
    )
    assert code == 0
    stats = json.loads(stats_file.read_text())
    assert stats["case_type"] == "EBELN-EBELN"
    assert stats["cases"] > 0
    assert stats["convergence"]["duplication_factor"] >= 1.0
    assert flat.read_bytes().startswith(b"case:concept:name,")
    # the stats echoed to stdout match the file
    assert json.loads(stdout[stdout.index("{") :]) == stats


def test_extract_bad_filter_field_fails_before_running(plain_snapshot, tmp_path, capsys):
    out, _ = plain_snapshot
    target = tmp_path / "log.json"
    code, _, stderr = run(
        capsys,
        "extract",
        "--snapshot",
        str(out),
        "--master",
        "EKKO",
        "--filter",
        "MATNR=MAT00001",
        "--out",
        str(target),
    )
    assert code == 1
    assert "MATNR" in stderr
    assert not target.exists()


def test_extract_broken_data_exits_two_and_reports(plain_snapshot, tmp_path, capsys):
    source, _ = plain_snapshot
    broken = tmp_path / "broken"
    shutil.copytree(source, broken)
    with (broken / "EKPO.csv").open("a", encoding="utf-8") as fh:
        fh.write("800,too,short\n")
    target = tmp_path / "log.json"
    code, _, stderr = run(
        capsys,
        "extract",
        "--snapshot",
        str(broken),
        "--master",
        "EKKO",
        "--out",
        str(target),
    )
    assert code == 2
    assert "EKPO" in stderr
    report = json.loads((tmp_path / "log.json.report.json").read_text())
    assert report["status"] == "failed"
    assert report["error"]["type"] == "RowArityMismatch"
    assert not target.exists()


def test_extract_semantic_rule_parsing(plain_snapshot, tmp_path, capsys):
    out, _ = plain_snapshot
    code, _, stderr = run(
        capsys,
        "extract",
        "--snapshot",
        str(out),
        "--master",
        "EKKO",
        "--out",
        str(tmp_path / "log.json"),
        "--change-strategy",
        "semantic",
        "--semantic-rule",
        "EKET:EINDT",
    )
    assert code == 1
    assert "TABLE:FIELD:PREDICATE:NAME" in stderr


def test_flatten_command_round_trip(plain_snapshot, tmp_path, capsys):
    out, _ = plain_snapshot
    target = tmp_path / "log.json"
    run(capsys, "extract", "--snapshot", str(out), "--master", "EKKO", "--out", str(target))
    flat = tmp_path / "orders.csv"
    code, stdout, _ = run(
        capsys,
        "flatten",
        "--ocel",
        str(target),
        "--case-type",
        "EBELN-EBELN",
        "--out",
        str(flat),
    )
    assert code == 0
    stats = json.loads(stdout)
    header, *rows = flat.read_text().splitlines()
    assert header == "case:concept:name,concept:name,time:timestamp,event:id"
    case_ids = {line.split(",")[0] for line in rows}
    assert len(case_ids) == stats["cases"]


def test_flatten_unknown_case_type_exits_one(plain_snapshot, tmp_path, capsys):
    out, _ = plain_snapshot
    target = tmp_path / "log.json"
    run(capsys, "extract", "--snapshot", str(out), "--master", "EKKO", "--out", str(target))
    code, _, stderr = run(
        capsys, "flatten", "--ocel", str(target), "--case-type", "BOGUS-BOGUS"
    )
    assert code == 1
    assert "BOGUS" in stderr


def test_console_script_is_installed():
    proc = subprocess.run(
        ["ocelforge", "--help"], capture_output=True, text=True, timeout=60
    )
    assert proc.returncode == 0
    assert "extract" in proc.stdout
    assert "serve" in proc.stdout
