import json
import math
from collections import Counter

import pytest

from shopbench.agents import Step, Transcript
from shopbench.commerce import StateSnapshot
from shopbench.evaluation import (NON_RETRIEVED, RETRIEVED, EvaluationError, GoldState, PricingTable, TaskFileError,
                                  TaskResult, TaskSpec, aggregate, classify_false_negatives, compute_cost, load_results,
                                  load_tasks, parse_report_json, render_report, save_results, score_retrieval,
                                  score_task, score_transaction, transaction_elements, write_report)

U = [f"http://shop1.local/product/D-00{i}" for i in range(1, 6)]


def test_retrieval_metrics():
    s = score_retrieval(U[:3], U[1:4])
    assert (s.cr, s.precision, s.recall) == (0, 2 / 3, 2 / 3)
    assert math.isclose(s.f1, 2 / 3)
    assert score_retrieval([U[0].replace("shop1", "SHOP1") + "/"], [U[0]]).cr == 1
    assert score_retrieval([U[0].replace("product", "PRODUCT")], [U[0]]).cr == 0  # paths are case-sensitive
    assert score_retrieval(U[:2] + U[:2], U[:2]).precision == 1.0  # duplicates ignored


def test_empty_conventions():
    assert score_retrieval([], []).f1 == 1.0 and score_retrieval([], []).cr == 1
    s = score_retrieval([], U[:1])
    assert (s.precision, s.recall, s.f1, s.cr) == (0.0, 0.0, 0.0, 0)
    s = score_retrieval(U[:1], [])
    assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)


def test_transaction_scoring():
    gold = GoldState(None, {"shop1": [{"D-006": 1}], "shop4": [{"D-051": 1}]})
    snap = StateSnapshot.from_dict({"carts": {"shop2": {"D-017": 1}}, "orders": gold.orders})
    s = score_transaction(snap, gold)
    assert s.cr == 1 and s.f1 == 1.0  # carts unchecked
    half = StateSnapshot.from_dict({"orders": {"shop1": [{"D-006": 1}]}})
    s = score_transaction(half, gold)
    assert (s.cr, s.precision, s.recall) == (0, 1.0, 0.5)
    wrong_qty = StateSnapshot.from_dict({"orders": {"shop1": [{"D-006": 2}], "shop4": [{"D-051": 1}]}})
    assert score_transaction(wrong_qty, gold).cr == 0
    split = StateSnapshot.from_dict({"orders": {"shop1": [{"D-006": 1}, {"D-006": 1}], "shop4": [{"D-051": 1}]}})
    assert score_transaction(split, gold).cr == 0


def test_cart_goals():
    gold = GoldState({"shop1": {"D-003": 1}}, {})
    assert score_transaction(StateSnapshot.from_dict({"carts": {"shop1": {"D-003": 1}}}), gold).cr == 1
    extra = StateSnapshot.from_dict({"carts": {"shop1": {"D-003": 1}, "shop2": {"D-017": 1}}})
    s = score_transaction(extra, gold)
    assert (s.cr, s.precision, s.recall) == (0, 0.5, 1.0)
    ordered = StateSnapshot.from_dict({"orders": {"shop1": [{"D-003": 1}]}})
    assert score_transaction(ordered, gold).cr == 0
    assert transaction_elements(extra, True) == Counter({("cart", "shop1", "D-003", 1): 1,
                                                         ("cart", "shop2", "D-017", 1): 1})


def test_cost():
    assert compute_cost(100_000, 10_000, "gpt-4.1") == pytest.approx(0.28, abs=1e-12)
    assert compute_cost(0, 0, "gpt-5") == 0.0
    assert compute_cost(1_000_000, 0, "claude-sonnet-4-20250514") == 3.0
    with pytest.raises(EvaluationError):
        compute_cost(1, 1, "unknown-model")


def test_pricing_file(tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"local-model": {"input": 0.5, "output": 1.0}}))
    table = PricingTable.from_file(f)
    assert compute_cost(2_000_000, 1_000_000, "local-model", table) == 2.0
    assert table.rate("gpt-5").input == 1.25
    for bad in ("[1]", "{\"m\": {\"input\": 1}}", "{\"m\": {\"input\": 0, \"output\": 1}}", "nope"):
        f.write_text(bad)
        with pytest.raises(EvaluationError):
            PricingTable.from_file(f)
    with pytest.raises(EvaluationError):
        PricingTable.from_file(tmp_path / "missing.json")


def tr_with(answer, step_urls=(), observed=()):
    return Transcript("S", "mcp", "gpt-5", [Step(0, "", {}, "", 1000, 100, None, list(step_urls))],
                      list(observed), list(answer), False, None, 2.0)


def test_false_negative_classification():
    t = tr_with([U[0]], step_urls=[U[1]], observed=[U[0], U[1]])
    got = classify_false_negatives([U[1], U[2]], t)
    assert got == {U[1]: RETRIEVED, U[2]: NON_RETRIEVED}


def test_score_task_retrieval():
    task = TaskSpec("S", "specific", "p", tuple(U[:3]))
    r = score_task(task, tr_with([U[0], U[4]], observed=[U[1]]), "gpt-5")
    assert r.cr == 0 and r.precision == 0.5 and r.recall == pytest.approx(1 / 3)
    assert r.fn_classification == {U[1]: RETRIEVED, U[2]: NON_RETRIEVED}
    assert r.cost == pytest.approx((1000 * 1.25 + 100 * 10) / 1e6)
    assert r.steps == 1 and r.runtime_seconds == 2.0


def test_score_task_transactional_needs_state():
    task = TaskSpec("T", "transactional", "p", gold_state=GoldState(None, {"shop1": [{"D-006": 1}]}))
    with pytest.raises(EvaluationError):
        score_task(task, tr_with([]), "gpt-5")
    t = tr_with([])
    t.final_state = {"carts": {}, "orders": {"shop1": [{"D-006": 1}]}}
    assert score_task(task, t, "gpt-5").cr == 1


def test_task_spec_validation():
    with pytest.raises(EvaluationError):
        TaskSpec("x", "specific", "p")
    with pytest.raises(EvaluationError):
        TaskSpec("x", "specific", "p", ())
    assert TaskSpec("x", "specific", "p", (), empty_answer=True).gold_urls == ()
    t = TaskSpec("x", "transactional", "p", gold_state=GoldState({"shop1": {"D-1": 1}}, {}))
    assert TaskSpec.from_dict(json.loads(json.dumps(t.to_dict()))) == t


@pytest.mark.parametrize("line, msg", [
    ("not json", "line 2"),
    ('{"task_id": "a"}', "missing field"),
    ('{"task_id": "a", "category": "x", "prompt": "p", "gold": {}}', "exactly one"),
    ('{"task_id": "a", "category": "", "prompt": "p", "gold": {"urls": ["u"]}}', "category"),
    ('{"task_id": "a", "category": "x", "prompt": "p", "gold": {"urls": [1]}}', "list of strings"),
    ('{"task_id": "S1", "category": "x", "prompt": "p", "gold": {"urls": ["u"]}}', "duplicate"),
    ('{"task_id": "a", "category": "x", "prompt": "p", "gold": {"state": {"orders": {"s": [{"o": "q"}]}}}}',
     "malformed"),
])
def test_task_file_errors(tmp_path, line, msg):
    f = tmp_path / "t.jsonl"
    f.write_text('{"task_id": "S1", "category": "specific", "prompt": "p", "gold": {"urls": ["u"]}}\n' + line + "\n")
    with pytest.raises(TaskFileError, match=msg) as info:
        load_tasks(f)
    assert info.value.line == 2


def test_custom_categories_are_kept(tmp_path):
    f = tmp_path / "t.jsonl"
    f.write_text('{"task_id": "a", "category": "comparison", "prompt": "p", "gold": {"urls": ["u"]}}\n')
    assert load_tasks(f)[0].category == "comparison"


def result(iface, model, f1, cr=1, cost=0.01, cat="specific", fn=None):
    return TaskResult("t", iface, model, cat, [], False, cr, f1, f1, f1, 100, 10, cost, 1.0, fn or {})


def test_micro_then_macro():
    rs = [result("rag", "a", 1.0), result("rag", "a", 0.5), result("rag", "b", 0.0, cr=0),
          result("html", "a", 0.25, cat="vague", fn={"u": NON_RETRIEVED})]
    rep = aggregate(rs)
    cells = {(c.interface, c.model): c for c in rep.overall.cells}
    assert cells[("rag", "a")].f1 == 0.75 and cells[("rag", "a")].n_tasks == 2
    summ = {s.interface: s for s in rep.overall.interfaces}
    assert summ["rag"].f1 == pytest.approx(0.375) and summ["rag"].cr == 0.5 and summ["rag"].n_models == 2
    assert [s.interface for s in rep.overall.interfaces] == ["html", "rag"]
    assert list(rep.categories) == ["specific", "vague"]
    assert cells[("html", "a")].fn_non_retrieved == 1
    with pytest.raises(EvaluationError):
        aggregate([])


def test_report_rendering(tmp_path):
    rep = aggregate([result("mcp", "gpt-5", 0.9), result("nlweb", "gpt-5", 0.8, cat="transactional")])
    assert parse_report_json(render_report(rep, "json")) == rep
    md = render_report(rep, "md")
    assert "| mcp | gpt-5 | 1 | 1.00 | 0.90 |" in md and "## Task set: transactional" in md
    csv_text = render_report(rep, "csv")
    assert csv_text.splitlines() == ["interface,model,cost,f1", "mcp,gpt-5,0.01,0.9", "nlweb,gpt-5,0.01,0.8"]
    with pytest.raises(EvaluationError):
        render_report(rep, "xml")
    paths = write_report(rep, tmp_path)
    assert sorted(p.name for p in paths.values()) == ["report.json", "report.md", "scatter.csv"]


def test_results_round_trip(tmp_path):
    rs = [result("mcp", "gpt-5", 0.9, fn={"u": RETRIEVED})]
    save_results(rs, tmp_path / "r.jsonl")
    assert load_results(tmp_path / "r.jsonl") == rs
    (tmp_path / "bad.jsonl").write_text('{"task_id": "t"}\n')
    with pytest.raises(EvaluationError, match=":1:"):
        load_results(tmp_path / "bad.jsonl")


def test_macro_average_is_permutation_invariant():
    import random
    rs = [result("mcp", m, f1, cost=c) for m, f1, c in
          [("a", 0.1, 0.3), ("b", 0.7, 0.01), ("c", 0.33, 0.2), ("d", 0.9, 0.05), ("a", 0.4, 0.1)]]
    base = aggregate(rs).overall.interfaces
    rng = random.Random(3)
    for _ in range(20):
        rng.shuffle(rs)
        assert aggregate(rs).overall.interfaces == base
