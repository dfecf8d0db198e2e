import pytest

from shopbench.backend import Backend
from shopbench.cli import sample_tasks_path
from shopbench.evaluation import load_tasks
from shopbench.harness import (ConfigError, NetworkError, ShopsConnection, check_scripts, demo_scripts_dir, rescore,
                               run_tasks, script_policy_factory)

from .conftest import ADMIN


@pytest.fixture(scope="module")
def tasks():
    return load_tasks(sample_tasks_path())


def test_sessions_and_snapshots(conn):
    a, b = conn.create_session(), conn.create_session()
    assert a != b
    assert conn.snapshot(a).carts == {}
    conn.check_health()


def test_wrong_admin_token(backend):
    bad = ShopsConnection(ShopsConnection.in_process(backend).transport, backend.catalog.shops, "wrong")
    with pytest.raises(ConfigError):
        bad.create_session()


def test_unreachable_shops(catalog):
    conn = ShopsConnection.network(catalog.shops, 1, ADMIN)  # nothing listens on port 1
    with pytest.raises(NetworkError):
        conn.check_health()
    with pytest.raises(NetworkError):
        conn.create_session()


def test_check_scripts(tasks, tmp_path):
    check_scripts(demo_scripts_dir(), tasks, ["html", "rag", "mcp", "nlweb"])
    with pytest.raises(ConfigError, match="missing scripts"):
        check_scripts(tmp_path, tasks, ["mcp"])


def test_demo_scripts_complete_every_task(catalog, tasks, rag_index, tmp_path):
    conn = ShopsConnection.in_process(Backend.create(catalog, seed=0, admin_token=ADMIN))
    out = run_tasks(conn, tasks, ["mcp", "nlweb"], script_policy_factory("demo"), "gpt-5", rag_index=rag_index,
                    out_dir=tmp_path, parallel=3)
    assert [(r.interface, r.task_id) for r in out.results] == [(i, t.task_id) for i in ("mcp", "nlweb")
                                                                for t in tasks]
    assert all(r.cr == 1 and r.error is None for r in out.results)
    t3 = next(t for t in out.transcripts if t.task_id == "T3")
    assert t3.final_state["orders"] == {"shop1": [{"D-006": 1}], "shop4": [{"D-051": 1}]}
    again = rescore(tasks, tmp_path / "transcripts")
    assert [(r.task_id, r.cr, r.f1, r.cost) for r in again] == [(r.task_id, r.cr, r.f1, r.cost) for r in out.results]


def test_parallel_run_matches_serial(catalog, tasks, rag_index):
    def run(parallel):
        conn = ShopsConnection.in_process(Backend.create(catalog, seed=0, admin_token=ADMIN))
        out = run_tasks(conn, tasks, ["rag"], script_policy_factory("demo"), "gpt-4.1", rag_index=rag_index,
                        parallel=parallel)
        return [{k: v for k, v in r.to_dict().items() if k != "runtime_seconds"} for r in out.results]
    assert run(1) == run(4)


def test_missing_script_is_recorded(conn, tasks, tmp_path):
    out = run_tasks(conn, tasks[:1], ["mcp"], script_policy_factory(tmp_path), "gpt-5")
    assert out.results[0].cr == 0 and out.results[0].error


def test_run_tasks_validation(conn, tasks):
    with pytest.raises(ConfigError):
        run_tasks(conn, tasks, ["mcp"], script_policy_factory("demo"), "gpt-5", parallel=0)


def test_rescore_errors(tasks, tmp_path):
    with pytest.raises(ConfigError):
        rescore(tasks, tmp_path / "nothing")


def test_scripted_answers_were_observed(catalog, tasks, rag_index):
    conn = ShopsConnection.in_process(Backend.create(catalog, seed=0, admin_token=ADMIN))
    out = run_tasks(conn, tasks, ["html", "rag", "mcp", "nlweb"], script_policy_factory("demo"), "gpt-5",
                    rag_index=rag_index)
    for tr in out.transcripts:
        assert set(tr.answer) <= set(tr.observed_urls), (tr.interface, tr.task_id)
