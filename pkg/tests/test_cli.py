import json

import pytest

from shopbench.cli import main

from .test_server import free_port_block


def report_without_runtime(path):
    def strip(x):
        if isinstance(x, dict):
            return {k: strip(v) for k, v in x.items() if k not in ("runtime", "runtime_seconds")}
        if isinstance(x, list):
            return [strip(v) for v in x]
        return x
    return strip(json.loads(path.read_text()))


@pytest.fixture(scope="module")
def demo_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    assert main(["run", "--out", str(out), "--interface", "all"]) == 0
    assert main(["report", "--out", str(out)]) == 0
    return out


def test_run_and_report(demo_run, capsys):
    rows = [json.loads(line) for line in (demo_run / "results.jsonl").read_text().splitlines()]
    assert len(rows) == 48 and all(r["cr"] == 1 for r in rows)
    assert (demo_run / "transcripts" / "html" / "S1.jsonl").is_file()
    md = (demo_run / "report.md").read_text()
    assert "| html | gpt-4.1 | 12 | 1.00 | 1.00 |" in md
    assert (demo_run / "scatter.csv").read_text().startswith("interface,model,cost,f1\n")


def test_report_is_reproducible(demo_run, tmp_path):
    assert main(["run", "--out", str(tmp_path), "--parallel", "4"]) == 0
    assert main(["report", "--out", str(tmp_path)]) == 0
    assert report_without_runtime(tmp_path / "report.json") == report_without_runtime(demo_run / "report.json")


def test_score_rescores_transcripts(demo_run, tmp_path):
    out = tmp_path
    (out / "transcripts").symlink_to(demo_run / "transcripts")
    assert main(["score", "--out", str(out), "--model", "gpt-5"]) == 0
    rows = [json.loads(line) for line in (out / "results.jsonl").read_text().splitlines()]
    assert len(rows) == 48 and {r["model"] for r in rows} == {"gpt-5"}


def test_index_is_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert main(["index", "--out", str(tmp_path / d)]) == 0
    assert "60/60 offers covered" in capsys.readouterr().out
    for name in ("rag_index.jsonl", "offers_shop1.jsonl", "offers_shop4.jsonl"):
        assert (tmp_path / "a" / "index" / name).read_bytes() == (tmp_path / "b" / "index" / name).read_bytes()


def test_run_with_saved_index(tmp_path):
    assert main(["index", "--out", str(tmp_path)]) == 0
    assert main(["run", "--out", str(tmp_path), "--interface", "rag", "--index",
                 str(tmp_path / "index" / "rag_index.jsonl")]) == 0


@pytest.mark.parametrize("argv", [
    ["run", "--catalog", "/nonexistent.jsonl"],
    ["run", "--tasks", "/nonexistent.jsonl"],
    ["run", "--model", "no-such-model"],
    ["run", "--policy", "bogus"],
    ["run", "--parallel", "0"],
    ["run", "--remote"],
    ["report", "--results", "/nonexistent.jsonl"],
])
def test_config_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.delenv("SHOPBENCH_ADMIN_TOKEN", raising=False)
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_live_without_endpoint_exits_2(tmp_path, monkeypatch):
    monkeypatch.delenv("LLM_BASE_URL", raising=False)
    assert main(["run", "--policy", "live", "--out", str(tmp_path)]) == 2


def test_missing_scripts_exit_2(tmp_path):
    assert main(["run", "--policy", f"script:{tmp_path}", "--out", str(tmp_path)]) == 2


def test_bad_task_file_exits_2(tmp_path):
    f = tmp_path / "t.jsonl"
    f.write_text("{broken\n")
    assert main(["run", "--tasks", str(f), "--out", str(tmp_path)]) == 2


def test_bad_pricing_file_exits_2(tmp_path):
    f = tmp_path / "p.json"
    f.write_text("[]")
    assert main(["run", "--pricing", str(f), "--out", str(tmp_path)]) == 2


def test_unreachable_shops_exit_3(tmp_path):
    base = free_port_block()
    assert main(["run", "--remote", "--admin-token", "t", "--ports-base", str(base), "--out", str(tmp_path)]) == 3


def test_empty_results_exit_4(tmp_path):
    (tmp_path / "results.jsonl").write_text("")
    assert main(["report", "--out", str(tmp_path)]) == 4


def test_unknown_interface_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["run", "--interface", "ftp"])
    assert info.value.code == 2
