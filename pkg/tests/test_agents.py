import json

import httpx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shopbench.agents import (AgentConfig, AgentEnv, BrowseClick, BrowseFill, BrowseGoto, CallbackPolicy, Finish,
                              Invalid, LiveChatPolicy, Observation, PolicyContext, PolicyDecision, PolicyError,
                              Remember, ScriptedPolicy, Search, Step, ToolCall, Transcript, Usage,
                              action_from_dict, action_to_dict, run_agent)
from shopbench.agents.actions import ActionError
from shopbench.agents.runners import product_urls


def script(*actions):
    return ScriptedPolicy([{"action": a, "usage": {"input_tokens": 10, "output_tokens": 2}} for a in actions])


def env_for(conn, rag_index=None):
    return AgentEnv(conn.transport, conn.shops, conn.create_session(), rag_index)


# --- actions and transcripts ---------------------------------------------------------


@pytest.mark.parametrize("action", [
    BrowseGoto("http://shop1.local/"), BrowseClick(3), BrowseFill(0, {"q": "x"}), Remember("n"),
    Search("ssd", 5), ToolCall("shop1", "add_item", {"a": [1]}), Finish(("u",), True), Invalid("why"),
])
def test_action_round_trip(action):
    d = action_to_dict(action)
    assert json.loads(json.dumps(d)) == d
    assert action_from_dict(d) == action


@pytest.mark.parametrize("bad", [None, {}, {"type": "fly"}, {"type": "goto"}, {"type": "click", "index": "x"},
                                 {"type": "tool_call", "tool": "t", "args": [1]}])
def test_bad_actions(bad):
    with pytest.raises(ActionError):
        action_from_dict(bad)


def test_finish_accepts_single_string():
    assert action_from_dict({"type": "finish", "answer": "u"}) == Finish(("u",))


def test_usage():
    assert Usage(1, 2) + Usage(3, 4) == Usage(4, 6)
    with pytest.raises(ValueError):
        Usage(-1, 0)


def test_transcript_round_trip(tmp_path):
    tr = Transcript("S1", "mcp", "gpt-5", [Step(0, "o", {"type": "finish"}, "r", 5, 1, None, ["u"])],
                    ["u"], ["u"], True, None, 1.5, {"carts": {}, "orders": {}})
    tr.save(tmp_path / "t.jsonl")
    back = Transcript.load(tmp_path / "t.jsonl")
    assert back == tr
    assert (back.input_tokens, back.output_tokens) == (5, 1)
    assert "wall_seconds" not in tr.dumps(include_time=False)


def test_transcript_rejects_bad_totals():
    lines = Transcript("S1", "mcp", "m", [Step(0, "o", {}, "r", 5, 1)]).to_lines()
    lines[-1]["input_tokens"] = 6
    with pytest.raises(ValueError):
        Transcript.loads("\n".join(json.dumps(x) for x in lines))
    with pytest.raises(ValueError):
        Transcript.loads(json.dumps(lines[0]))


def test_product_urls(catalog):
    got = product_urls(catalog.shops, ["http://SHOP1.local/product/D-001/", "http://shop1.local/product/D-001",
                                       "http://evil.local/product/D-001", "http://shop1.local/cart", "text", 5])
    assert got == ["http://shop1.local/product/D-001"]


# --- scripted policy -----------------------------------------------------------------


def test_scripted_policy_substitutes_and_exhausts():
    p = ScriptedPolicy([{"action": {"type": "tool_call", "shop": "s", "tool": "t", "args": {"x": ["${session}"]}},
                         "usage": {"input_tokens": 3, "output_tokens": 4}}])
    p.start(PolicyContext("T", "mcp", "", "", session="abc"))
    d = p.decide(Observation(""))
    assert d.action == ToolCall("s", "t", {"x": ["abc"]}) and d.usage == Usage(3, 4)
    with pytest.raises(PolicyError):
        p.decide(Observation(""))


def test_scripted_policy_file_errors(tmp_path):
    f = tmp_path / "s.jsonl"
    f.write_text('{"action": {"type": "finish"}}\n\nnot json\n')
    with pytest.raises(PolicyError, match=":3:"):
        ScriptedPolicy.from_file(f)
    p = ScriptedPolicy([{"nope": 1}, {"action": {"type": "bogus"}}])
    p.start(PolicyContext("T", "mcp", "", ""))
    for _ in range(2):
        with pytest.raises(PolicyError):
            p.decide(Observation(""))


# --- runners --------------------------------------------------------------------------


def test_html_agent_click_by_href_and_fill(conn):
    env = env_for(conn)
    pol = script({"type": "goto", "url": "http://shop2.local/search?q=990+pro"},
                 {"type": "click", "href": "http://shop2.local/product/D-017"},
                 {"type": "fill", "action": "http://shop2.local/cart/add", "values": {"quantity": "2"}},
                 {"type": "remember", "note": "added"},
                 {"type": "finish", "done": True})
    tr = run_agent("T", "p", pol, env, AgentConfig("html"), "gpt-4.1")
    assert tr.error is None and tr.done and [s.error for s in tr.steps] == [None] * 5
    assert "http://shop2.local/product/D-017" in tr.observed_urls
    assert conn.snapshot(env.session).carts == {"shop2": {"D-017": 2}}
    assert tr.input_tokens == 50 and tr.model == "gpt-4.1"


def test_html_agent_rejections(conn):
    pol = script({"type": "click", "index": 0}, {"type": "goto", "url": "http://evil.local/"},
                 {"type": "search", "query": "x"}, {"type": "goto", "url": "http://shop1.local/"},
                 {"type": "click", "index": 999}, {"type": "fill", "form": 7}, {"type": "invalid", "reason": "junk"},
                 {"type": "finish", "answer": ["http://shop1.local/product/D-001"]})
    tr = run_agent("T", "p", pol, env_for(conn), AgentConfig("html"))
    errs = [s.error for s in tr.steps]
    assert errs[0] == "no page is open"
    assert "outside the shops" in errs[1]
    assert "not available" in errs[2]
    assert errs[3] is None
    assert "no link number" in errs[4] and "no form number" in errs[5] and errs[6] == "junk"
    assert tr.answer == ["http://shop1.local/product/D-001"]


def test_budget_exhaustion_gives_empty_answer(conn):
    pol = CallbackPolicy(lambda obs: PolicyDecision(Remember("x"), Usage(1, 1)))
    tr = run_agent("T", "p", pol, env_for(conn), AgentConfig("html", max_steps=3))
    assert len(tr.steps) == 3 and tr.answer == [] and not tr.done and tr.error is None


def test_default_budgets():
    assert AgentConfig("html").max_steps == 40
    assert AgentConfig("rag").max_steps == 20
    with pytest.raises(ValueError):
        AgentConfig("ftp")
    with pytest.raises(ValueError):
        AgentConfig("mcp", max_steps=0)


def test_policy_error_is_recorded(conn):
    tr = run_agent("T", "p", script(), env_for(conn), AgentConfig("mcp"))
    assert "exhausted" in tr.error and tr.steps == []


def test_rag_agent(conn, rag_index):
    env = env_for(conn, rag_index)
    pol = script({"type": "search", "query": "Sony WH-1000XM5 noise cancelling headphones", "k": 50},
                 {"type": "tool_call", "tool": "add_to_cart", "args": {"url": "http://shop4.local/product/D-051"}},
                 {"type": "tool_call", "tool": "view_cart", "args": {"shop": "shop4"}},
                 {"type": "tool_call", "tool": "add_to_cart", "args": {"url": "http://nowhere.local/product/X"}},
                 {"type": "tool_call", "tool": "checkout", "args": {"shop": "shop9"}},
                 {"type": "tool_call", "tool": "drop_table", "args": {}},
                 {"type": "tool_call", "tool": "checkout", "args": {"shop": "shop4", "shipping": {}, "payment": {}}},
                 {"type": "goto", "url": "http://shop4.local/"},
                 {"type": "finish", "answer": []})
    tr = run_agent("T", "p", pol, env, AgentConfig("rag"))
    first = tr.steps[0]
    assert first.error is None and first.result.startswith("20 hits")  # k capped at 20
    assert "http://shop4.local/product/D-051" in first.urls
    errs = [s.error for s in tr.steps[1:8]]
    assert errs[:2] == [None, None]
    assert "not a shop URL" in errs[2] and "unknown shop" in errs[3] and "unknown function" in errs[4]
    assert errs[5] and "not available" in errs[6]
    assert conn.snapshot(env.session).carts == {"shop4": {"D-051": 1}}


def test_rag_agent_needs_index(conn):
    tr = run_agent("T", "p", script(), env_for(conn), AgentConfig("rag"))
    assert "crawled index" in tr.error


def test_mcp_agent(conn):
    env = env_for(conn)
    pol = script({"type": "tool_call", "shop": "shop2", "tool": "find_offers", "args": {"q": "990 PRO", "top_k": 2}},
                 {"type": "tool_call", "shop": "shop2", "tool": "find_offers", "args": {"bogus": 1}},
                 {"type": "tool_call", "shop": "shop7", "tool": "x", "args": {}},
                 {"type": "tool_call", "shop": "shop1", "tool": "add_item",
                  "args": {"session": "${session}", "product_id": "D-017"}},
                 {"type": "search", "query": "x"},
                 {"type": "finish", "answer": ["http://shop2.local/product/D-017"]})
    tr = run_agent("T", "p", pol, env, AgentConfig("mcp"))
    assert tr.steps[0].error is None and "http://shop2.local/product/D-017" in tr.steps[0].urls
    assert "-32602" in tr.steps[1].error
    assert "unknown shop" in tr.steps[2].error
    assert "not sold by" in tr.steps[3].error
    assert "not available" in tr.steps[4].error


def test_nlweb_agent_only_exposes_nlweb_tools(conn):
    env = env_for(conn)
    pol = script({"type": "tool_call", "shop": "shop3", "tool": "search_catalog", "args": {"query": "x"}},
                 {"type": "tool_call", "shop": "shop3", "tool": "ask", "args": {"query": "DDR5 memory", "limit": 5}},
                 {"type": "finish", "answer": []})
    tr = run_agent("T", "p", pol, env, AgentConfig("nlweb"))
    assert "not an NLWeb tool" in tr.steps[0].error
    assert tr.steps[1].error is None and tr.steps[1].urls


def test_mcp_unreachable_shop_is_interface_error(catalog):
    def down(request):
        raise httpx.ConnectError("refused", request=request)
    env = AgentEnv(httpx.MockTransport(down), catalog.shops, "s")
    tr = run_agent("T", "p", script({"type": "finish"}), env, AgentConfig("mcp"))
    assert "unreachable" in tr.error


def test_policy_context_exposes_tools(conn):
    seen = {}

    class Spy(CallbackPolicy):
        def start(self, ctx):
            seen["ctx"] = ctx

    run_agent("T", "task", Spy(lambda o: PolicyDecision(Finish())), env_for(conn), AgentConfig("mcp"))
    ctx = seen["ctx"]
    names = [t["name"] for t in ctx.tools]
    assert "shop1__search_products" in names and names[-1] == "finish"
    assert ctx.parse_call("shop4__lookup_items", {"q": "x"}) == ToolCall("shop4", "lookup_items", {"q": "x"})
    assert isinstance(ctx.parse_call("nounderscore", {}), Invalid)
    assert "shop1" in ctx.system and ctx.prompt == "task"


# --- live policy ---------------------------------------------------------------------


def chat_reply(message, usage=(100, 20)):
    return {"choices": [{"message": message}], "usage": {"prompt_tokens": usage[0], "completion_tokens": usage[1]}}


def live(handler, **kw):
    client = httpx.Client(transport=httpx.MockTransport(handler))
    return LiveChatPolicy("http://llm.local/v1", "key", "gpt-5", backoff=0, client=client, **kw)


def ctx():
    return PolicyContext("T", "html", "find x", "system", [{"name": "goto", "parameters": {}}],
                         parse_call=lambda n, a: action_from_dict({"type": n, **a}))


def test_live_tool_call_then_text():
    bodies = []
    replies = [
        chat_reply({"tool_calls": [{"id": "c1", "function": {"name": "goto",
                                                              "arguments": '{"url": "http://shop1.local/"}'}}]}),
        chat_reply({"content": "Found http://shop1.local/product/D-001. and http://shop2.local/product/D-016"}, (5, 6)),
    ]

    def handler(request):
        bodies.append(json.loads(request.content))
        assert request.headers["authorization"] == "Bearer key"
        return httpx.Response(200, json=replies[len(bodies) - 1])

    p = live(handler)
    p.start(ctx())
    d1 = p.decide(Observation("start", 0))
    assert d1.action == BrowseGoto("http://shop1.local/") and d1.usage == Usage(100, 20)
    d2 = p.decide(Observation("page text", 1))
    assert d2.action == Finish(("http://shop1.local/product/D-001", "http://shop2.local/product/D-016"))
    assert d2.usage == Usage(5, 6)
    assert bodies[0]["tools"][0]["function"]["name"] == "goto"
    assert bodies[1]["messages"][-1] == {"role": "tool", "tool_call_id": "c1", "content": "page text"}


def test_live_text_without_urls_means_done():
    p = live(lambda r: httpx.Response(200, json=chat_reply({"content": "Added it."})))
    p.start(ctx())
    assert p.decide(Observation("", 0)).action == Finish((), True)


def test_live_bad_arguments_become_invalid():
    p = live(lambda r: httpx.Response(200, json=chat_reply(
        {"tool_calls": [{"function": {"name": "goto", "arguments": "{not json"}}]})))
    p.start(ctx())
    assert isinstance(p.decide(Observation("", 0)).action, Invalid)


def test_live_retries_then_succeeds():
    codes = iter([500, 429])

    def handler(request):
        code = next(codes, 200)
        return httpx.Response(code, json=chat_reply({"content": "ok"}) if code == 200 else {})

    p = live(handler)
    p.start(ctx())
    assert isinstance(p.decide(Observation("", 0)).action, Finish)


def test_live_gives_up():
    p = live(lambda r: httpx.Response(503), max_retries=2)
    p.start(ctx())
    with pytest.raises(PolicyError, match="after 2 attempts"):
        p.decide(Observation("", 0))
    p = live(lambda r: httpx.Response(401, text="bad key"))
    p.start(ctx())
    with pytest.raises(PolicyError, match="401"):
        p.decide(Observation("", 0))


def test_live_requires_configuration(monkeypatch):
    monkeypatch.delenv("LLM_BASE_URL", raising=False)
    with pytest.raises(PolicyError):
        LiveChatPolicy(model="m")
    with pytest.raises(PolicyError):
        LiveChatPolicy(base_url="http://x", model="")


def test_live_usage_variants():
    assert LiveChatPolicy._usage({"usage": {"input_tokens": 3, "output_tokens": 4}}) == Usage(3, 4)
    assert LiveChatPolicy._usage({}) == Usage(0, 0)


ANY_ACTION = st.sampled_from([
    {"type": "goto", "url": "http://shop1.local/"},
    {"type": "click", "index": 0},
    {"type": "fill", "form": 0, "values": {}},
    {"type": "remember", "note": "n"},
    {"type": "search", "query": "ssd", "k": 3},
    {"type": "tool_call", "shop": "shop1", "tool": "search_products", "args": {"query": "ssd"}},
    {"type": "tool_call", "shop": "shop1", "tool": "ask", "args": {"query": "ssd"}},
    {"type": "tool_call", "shop": "", "tool": "view_cart", "args": {"shop": "shop1"}},
    {"type": "invalid", "reason": "x"},
])
ALLOWED = {"html": {"goto", "click", "fill", "remember"}, "rag": {"search", "tool_call"},
           "mcp": {"tool_call"}, "nlweb": {"tool_call"}}


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["html", "rag", "mcp", "nlweb"]), st.lists(ANY_ACTION, max_size=8))
def test_interface_confinement(catalog, rag_index, iface, actions):
    from shopbench.backend import Backend
    from shopbench.harness import ShopsConnection
    conn = ShopsConnection.in_process(Backend.create(catalog, seed=0, admin_token="t"))
    tr = run_agent("T", "p", script(*actions, {"type": "finish"}), env_for(conn, rag_index), AgentConfig(iface))
    assert tr.error is None
    for step in tr.steps[:-1]:
        kind = step.action["type"]
        if kind not in ALLOWED[iface]:
            assert step.error and step.urls == []  # rejected without touching the shops
    assert tr.input_tokens == sum(s.input_tokens for s in tr.steps)


def test_scripted_runs_are_deterministic(catalog, rag_index):
    from shopbench.backend import Backend
    from shopbench.harness import ShopsConnection, demo_scripts_dir

    def once(iface):
        conn = ShopsConnection.in_process(Backend.create(catalog, seed=0, admin_token="t"))
        pol = ScriptedPolicy.from_file(demo_scripts_dir() / iface / "T3.jsonl")
        return run_agent("T3", "p", pol, env_for(conn, rag_index), AgentConfig(iface), "m").dumps(include_time=False)
    for iface in ("html", "rag", "mcp", "nlweb"):
        assert once(iface) == once(iface)
