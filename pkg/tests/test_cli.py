import csv
import io
import json

import pytest

from corpusqual import cli
from corpusqual.ingest import write_corpus

from conftest import make_record

GROUPS = ["QJ", "mid", "WoS"]


def toy_corpus(path, editorials=0, n=4):
    recs = []
    for gi, g in enumerate(GROUPS):
        for i in range(n):
            recs.append(make_record(
                f"{g}{i}", g,
                doi=f"10.9/{g}{i}",
                abstract=" ".join(["word"] * (20 + 40 * gi + i)) + ".",
                full_text=f"Participants ({10 + i}) gave informed consent. t(20) = {1 + gi + i / 10:.2f}, p = .{gi + 1}.",
            ))
    recs += [make_record(f"ed{i}", "QJ", title="Editorial: new volume") for i in range(editorials)]
    write_corpus(recs, path)
    return path


def test_help_lists_every_flag(capsys):
    with pytest.raises(SystemExit):
        cli.main(["run", "--help"])
    out = capsys.readouterr().out
    for flag in ("--alpha", "--tails", "--correction", "--force-pairwise", "--offline", "--workers",
                 "--warn-threshold", "--config", "--svg", "--window-years"):
        assert flag in out


def test_ingest_summary(tmp_path, capsys):
    path = tmp_path / "c.jsonl"
    recs = [make_record(str(i), GROUPS[i % 3]) for i in range(8)]
    recs += [make_record(f"e{i}", "QJ", title="Editorial comment") for i in range(2)]
    write_corpus(recs, path)
    assert cli.main(["ingest", "--corpus", str(path), "--groups", *GROUPS, "--export", str(tmp_path / "kept.jsonl")]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "kept 8, excluded 2 (editorial)"
    assert len((tmp_path / "kept.jsonl").read_text().splitlines()) == 8


def test_ingest_empty_and_bad_path(tmp_path, capsys):
    empty = tmp_path / "e.jsonl"
    empty.write_text("")
    assert cli.main(["ingest", "--corpus", str(empty), "--groups", *GROUPS]) == 0
    assert capsys.readouterr().out.startswith("kept 0")
    assert cli.main(["ingest", "--corpus", str(tmp_path / "missing.jsonl"), "--groups", *GROUPS]) == 2
    assert "error" in capsys.readouterr().err


def test_statcheck_outputs(tmp_path, capsys):
    f = tmp_path / "a.txt"
    f.write_text("We found t(28) = 1.50, p < .05.")
    assert cli.main(["statcheck", str(f)]) == 0
    [section] = json.loads(capsys.readouterr().out)
    assert [t["status"] for t in section["tests"]] == ["decision_error"]
    out = tmp_path / "o.csv"
    assert cli.main(["statcheck", str(f), "--format", "csv", "--output", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1 and rows[0]["status"] == "decision_error"


def test_statcheck_directory_and_empty(tmp_path, capsys):
    d = tmp_path / "docs"
    d.mkdir()
    (d / "1.txt").write_text("No numbers.")
    (d / "2.txt").write_text("z = 2.5, p = .01")
    (d / "3.txt").write_text("F(1, 10) = 2, p = .19")
    assert cli.main(["statcheck", str(d)]) == 0
    sections = json.loads(capsys.readouterr().out)
    assert len(sections) == 3 and sections[0]["tests"] == []
    assert cli.main(["statcheck", str(d / "1.txt"), "--alpha", "0.01"]) == 0
    assert json.loads(capsys.readouterr().out)[0]["tests"] == []


def test_statcheck_unreadable_file(tmp_path, capsys):
    assert cli.main(["statcheck", str(tmp_path / "gone.txt")]) == 1
    [section] = json.loads(capsys.readouterr().out)
    assert section["error"]


def test_run_writes_artifacts(tmp_path, capsys):
    corpus = toy_corpus(tmp_path / "c.jsonl", editorials=1)
    out = tmp_path / "out"
    code = cli.main(["run", "--corpus", str(corpus), "--groups", *GROUPS, "--output-dir", str(out),
                     "--workers", "1", "--svg", "--statcheck-dump"])
    assert code == 0
    doc = json.loads((out / "report.json").read_text())
    assert doc["metadata"]["groups"] == GROUPS
    assert len((out / "indicators.jsonl").read_text().splitlines()) == 12
    assert (out / "plots" / "abstract_words.svg").exists()
    assert len((out / "statcheck.jsonl").read_text().splitlines()) == 12
    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["counts"]["excluded"] == {"editorial": 1}
    # the report subcommand regenerates identical reports
    again = tmp_path / "again"
    assert cli.main(["report", "--indicators", str(out / "indicators.jsonl"), "--groups", *GROUPS,
                     "--output-dir", str(again), "--no-plots"]) == 0
    for name in ("report.json", "report.csv", "report.md"):
        assert (again / name).read_bytes() == (out / name).read_bytes()


def test_alpha_flag_reaches_pairwise_gating(tmp_path):
    corpus = toy_corpus(tmp_path / "c.jsonl")

    def run(alpha):
        out = tmp_path / repr(alpha)
        cli.main(["run", "--corpus", str(corpus), "--groups", *GROUPS, "--output-dir", str(out),
                  "--alpha", repr(alpha), "--workers", "1", "--no-plots"])
        doc = json.loads((out / "report.json").read_text())
        assert doc["metadata"]["alpha"] == alpha
        return {c["indicator"]: c for c in doc["comparisons"]}["abstract_words"]

    loose = run(0.05)
    p = loose["omnibus"]["p_value"]
    assert p < 0.05 and len(loose["pairwise"]) == 3
    assert run(p / 2)["pairwise"] == []


def test_config_file_and_flag_precedence(tmp_path):
    corpus = toy_corpus(tmp_path / "c.jsonl")
    conf = tmp_path / "run.toml"
    conf.write_text(f'corpus = "{corpus}"\ngroups = {json.dumps(GROUPS)}\nalpha = 0.2\nworkers = 1\nplots = false\n')
    out = tmp_path / "out"
    assert cli.main(["run", "--config", str(conf), "--output-dir", str(out), "--alpha", "0.01"]) == 0
    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["config"]["alpha"] == 0.01 and meta["config"]["plots"] is False


def test_bad_config_exits_2(tmp_path, capsys):
    corpus = toy_corpus(tmp_path / "c.jsonl")
    assert cli.main(["run", "--corpus", str(corpus), "--groups", *GROUPS, "--alpha", "1.5"]) == 2
    assert "alpha" in capsys.readouterr().err


def test_offline_enrichment_cold_cache(tmp_path, capsys):
    corpus = toy_corpus(tmp_path / "c.jsonl")
    out = tmp_path / "out"
    code = cli.main(["run", "--corpus", str(corpus), "--groups", *GROUPS, "--output-dir", str(out),
                     "--enrich", "--offline", "--cache-dir", str(tmp_path / "cache"), "--workers", "1",
                     "--no-plots"])
    assert code == 0
    err = capsys.readouterr().err
    assert err.count("offline and not cached") == 12
    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["enrichment"]["errors"] == 12 and meta["enrichment"]["network_calls"] == 0
    assert (out / "report.json").exists()


def test_warn_threshold_exit_code(tmp_path):
    corpus = toy_corpus(tmp_path / "c.jsonl")
    with open(corpus, "a") as fh:
        fh.write("{broken\n")
    args = ["run", "--corpus", str(corpus), "--groups", *GROUPS, "--output-dir", str(tmp_path / "o"),
            "--workers", "1", "--no-plots"]
    assert cli.main(args + ["--warn-threshold", "0.01"]) == 1
    assert cli.main(args + ["--warn-threshold", "0.5"]) == 0
