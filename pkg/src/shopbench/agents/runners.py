"""The four agent loops.

Every run follows the same contract: observe, ask the policy for one
decision, check the action is allowed for the interface, act, record the
step.  A run ends on ``Finish``, when the step budget is spent (the answer
is then empty), or when the policy fails (the transcript carries the error).
Interfaces talk to the shops over HTTP only, through an ``httpx`` transport
that may be in-process or real sockets.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Iterable
from urllib.parse import urlencode, urlsplit

import httpx

from ..catalog import Shop, UrlError, is_under, normalize_url, parse_offer_id_from_path
from ..search_index import Index
from ..shop_html import SESSION_COOKIE, PageModel, extract_page_model
from .actions import (AgentAction, BrowseClick, BrowseFill, BrowseGoto, Finish, Invalid, PolicyDecision,
                      Remember, Search, ToolCall, action_from_dict, action_to_dict)
from .policy import Observation, Policy, PolicyContext, PolicyError
from .transcript import Step, Transcript, digest

INTERFACES = ("html", "rag", "mcp", "nlweb")
DEFAULT_MAX_STEPS = {"html": 40, "rag": 20, "mcp": 20, "nlweb": 20}
NLWEB_TOOLS = ("ask", "create_session", "add_to_cart", "view_cart", "checkout")
RAG_TOOLS = ("add_to_cart", "view_cart", "checkout")

CHECKOUT_DETAILS = {
    "name": "Jordan Lee", "street": "12 Market Street", "city": "Springfield", "postal_code": "12345",
    "country": "US", "card_number": "4111111111111111", "expiry": "12/30",
}

FINISH_SPEC = {
    "name": "finish",
    "description": "End the task. answer: product URLs for search tasks; done: true for cart/checkout tasks.",
    "parameters": {"type": "object", "properties": {
        "answer": {"type": "array", "items": {"type": "string"}}, "done": {"type": "boolean"}}},
}


class InterfaceError(RuntimeError):
    """A shop could not be reached while setting up or running an agent."""


@dataclass
class AgentConfig:
    interface: str
    max_steps: int | None = None
    max_search_k: int = 20
    memory_size: int = 20
    timeout: float = 30.0

    def __post_init__(self):
        if self.interface not in INTERFACES:
            raise ValueError(f"unknown interface {self.interface!r}")
        if self.max_steps is None:
            self.max_steps = DEFAULT_MAX_STEPS[self.interface]
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass
class AgentEnv:
    """What an agent can reach: the shops, its session, and (RAG only) the crawled index."""

    transport: httpx.BaseTransport
    shops: tuple[Shop, ...]
    session: str
    rag_index: Index | None = None

    def client(self, timeout: float = 30.0, **kwargs) -> httpx.Client:
        return httpx.Client(transport=self.transport, timeout=timeout, **kwargs)


@dataclass
class StepResult:
    text: str
    urls: list[str] = field(default_factory=list)
    page: PageModel | None = None
    error: str | None = None


def load_prompt(interface: str) -> str:
    return (resources.files("shopbench") / "data" / "prompts" / f"{interface}.txt").read_text(encoding="utf-8")


def _shop_list(shops: Iterable[Shop]) -> str:
    return "\n".join(f"- {s.shop_id}: {s.display_name} at {s.base_url}" for s in shops)


def product_urls(shops: Iterable[Shop], candidates: Iterable[Any]) -> list[str]:
    """Normalized product-page URLs among ``candidates``, first-seen order."""
    out: dict[str, None] = {}
    shops = tuple(shops)
    for c in candidates:
        if not isinstance(c, str) or "://" not in c:
            continue
        try:
            u = normalize_url(c)
        except UrlError:
            continue
        if any(is_under(u, s.base_url) for s in shops) and parse_offer_id_from_path(urlsplit(u).path):
            out.setdefault(u)
    return list(out)


def _strings(value: Any) -> Iterable[str]:
    if isinstance(value, str):
        yield value
    elif isinstance(value, dict):
        for v in value.values():
            yield from _strings(v)
    elif isinstance(value, list):
        for v in value:
            yield from _strings(v)


class _Interface:
    kind = ""
    allowed: tuple[type, ...] = ()

    def __init__(self, env: AgentEnv, config: AgentConfig):
        self.env = env
        self.config = config
        self.shops = {s.shop_id: s for s in env.shops}

    def system_prompt(self) -> str:
        details = ", ".join(f"{k}={v}" for k, v in CHECKOUT_DETAILS.items())
        return load_prompt(self.kind).format(shops=_shop_list(self.env.shops), session=self.env.session,
                                             checkout_details=details)

    def reset(self) -> Observation:
        raise NotImplementedError

    def tool_specs(self) -> list[dict]:
        raise NotImplementedError

    def parse_call(self, name: str, args: dict) -> AgentAction:
        raise NotImplementedError

    def execute(self, action: AgentAction) -> StepResult:
        raise NotImplementedError

    def shop_of(self, url: str) -> Shop | None:
        try:
            return next((s for s in self.env.shops if is_under(url, s.base_url)), None)
        except UrlError:
            return None


# --- HTML ---------------------------------------------------------------------------


class HtmlInterface(_Interface):
    kind = "html"
    allowed = (BrowseGoto, BrowseClick, BrowseFill, Remember, Finish)

    def __init__(self, env: AgentEnv, config: AgentConfig):
        super().__init__(env, config)
        self.http = env.client(config.timeout, follow_redirects=True)
        for s in env.shops:
            self.http.cookies.set(SESSION_COOKIE, env.session, domain=urlsplit(s.base_url).hostname, path="/")
        self.page: PageModel | None = None
        self.status = 0
        self.memory: deque[str] = deque(maxlen=config.memory_size)

    def _render(self, note: str = "") -> str:
        parts = [note] if note else []
        if self.page is None:
            parts.append("No page is open. Shop home pages:\n" + _shop_list(self.env.shops))
        else:
            if self.status != 200:
                parts.append(f"HTTP status {self.status}")
            parts.append(self.page.digest())
        if self.memory:
            parts.append("Memory:\n" + "\n".join(f"- {m}" for m in self.memory))
        return "\n".join(parts)

    def reset(self) -> Observation:
        return Observation(self._render(), 0)

    def tool_specs(self) -> list[dict]:
        def obj(props, req):
            return {"type": "object", "properties": props, "required": req}

        return [
            {"name": "goto", "description": "Open a URL in one of the shops.",
             "parameters": obj({"url": {"type": "string"}}, ["url"])},
            {"name": "click", "description": "Follow the link with the given number on the current page.",
             "parameters": obj({"index": {"type": "integer"}}, ["index"])},
            {"name": "fill", "description": "Fill the numbered form with field values and submit it.",
             "parameters": obj({"form": {"type": "integer"},
                                "values": {"type": "object", "additionalProperties": {"type": "string"}}},
                               ["form"])},
            {"name": "remember", "description": "Store a short note that stays visible on later pages.",
             "parameters": obj({"note": {"type": "string"}}, ["note"])},
            FINISH_SPEC,
        ]

    def parse_call(self, name: str, args: dict) -> AgentAction:
        if name not in ("goto", "click", "fill", "remember", "finish"):
            return Invalid(f"unknown tool {name!r}")
        return action_from_dict({"type": name, **args})

    def _load(self, method: str, url: str, data: dict | None = None) -> StepResult:
        if self.shop_of(url) is None:
            return StepResult(self._render(), error=f"navigation outside the shops is not allowed: {url}")
        try:
            resp = self.http.request(method, url, data=data)
        except httpx.HTTPError as exc:
            return StepResult(self._render(), error=f"could not load {url}: {exc}")
        self.status = resp.status_code
        self.page = extract_page_model(resp.text, str(resp.url))
        urls = product_urls(self.env.shops, [self.page.url] + [l.href for l in self.page.links if l.region != "nav"])
        err = f"HTTP {resp.status_code}" if resp.status_code >= 400 else None
        return StepResult(self._render(), urls, self.page, err)

    def execute(self, action: AgentAction) -> StepResult:
        if isinstance(action, BrowseGoto):
            return self._load("GET", action.url)
        if isinstance(action, Remember):
            self.memory.append(action.note)
            return StepResult(self._render("Noted."), page=self.page)
        if self.page is None:
            return StepResult(self._render(), error="no page is open")
        if isinstance(action, BrowseClick):
            if not 0 <= action.index < len(self.page.links):
                return StepResult(self._render(), page=self.page, error=f"no link number {action.index}")
            return self._load("GET", self.page.links[action.index].href)
        assert isinstance(action, BrowseFill)
        if not 0 <= action.form < len(self.page.forms):
            return StepResult(self._render(), page=self.page, error=f"no form number {action.form}")
        form = self.page.forms[action.form]
        names = {f.name for f in form.fields}
        unknown = sorted(set(action.values) - names)
        if unknown:
            return StepResult(self._render(), page=self.page, error=f"form has no field(s) {unknown}")
        values = {f.name: f.value for f in form.fields}
        values.update(action.values)
        if form.method == "GET":
            sep = "&" if "?" in form.action else "?"
            return self._load("GET", form.action + sep + urlencode(values))
        return self._load("POST", form.action, values)


# --- RAG ----------------------------------------------------------------------------


class RagInterface(_Interface):
    kind = "rag"
    allowed = (Search, ToolCall, Finish)

    def __init__(self, env: AgentEnv, config: AgentConfig):
        super().__init__(env, config)
        if env.rag_index is None:
            raise InterfaceError("the RAG agent needs a crawled index")
        self.http = env.client(config.timeout)

    def reset(self) -> Observation:
        return Observation(f"The search index holds {len(self.env.rag_index)} pages from:\n"
                           + _shop_list(self.env.shops), 0)

    def tool_specs(self) -> list[dict]:
        shipping = {"type": "object", "properties": {k: {"type": "string"} for k in
                                                    ("name", "street", "city", "postal_code", "country")}}
        payment = {"type": "object", "properties": {"card_number": {"type": "string"}, "expiry": {"type": "string"}}}
        return [
            {"name": "search", "description": f"Search the index. k is the number of hits (max {self.config.max_search_k}).",
             "parameters": {"type": "object", "properties": {"query": {"type": "string"}, "k": {"type": "integer"}},
                            "required": ["query"]}},
            {"name": "add_to_cart", "description": "Add the product at a product URL to that shop's cart.",
             "parameters": {"type": "object", "properties": {"url": {"type": "string"},
                                                             "quantity": {"type": "integer"}}, "required": ["url"]}},
            {"name": "view_cart", "description": "Show the cart of one shop.",
             "parameters": {"type": "object", "properties": {"shop": {"type": "string"}}, "required": ["shop"]}},
            {"name": "checkout", "description": "Place the order for one shop's cart.",
             "parameters": {"type": "object", "properties": {"shop": {"type": "string"}, "shipping": shipping,
                                                             "payment": payment},
                            "required": ["shop", "shipping", "payment"]}},
            FINISH_SPEC,
        ]

    def parse_call(self, name: str, args: dict) -> AgentAction:
        if name == "search":
            return action_from_dict({"type": "search", **args})
        if name == "finish":
            return action_from_dict({"type": "finish", **args})
        if name in RAG_TOOLS:
            return ToolCall(str(args.get("shop", "")), name, args)
        return Invalid(f"unknown tool {name!r}")

    def execute(self, action: AgentAction) -> StepResult:
        if isinstance(action, Search):
            k = max(0, min(action.k, self.config.max_search_k))
            hits = self.env.rag_index.search(action.query, k)
            lines = [f"[{i}] score={h.score:.4f} shop={h.doc.shop_id} url={h.doc.source_url}\n    "
                     + digest(h.doc.text, 300) for i, h in enumerate(hits)]
            text = f"{len(hits)} hits for {action.query!r}" + ("\n" + "\n".join(lines) if lines else "")
            return StepResult(text, product_urls(self.env.shops, [h.doc.source_url for h in hits]))
        assert isinstance(action, ToolCall)
        if action.tool not in RAG_TOOLS:
            return StepResult("", error=f"unknown function {action.tool!r}")
        args = action.args
        if action.tool == "add_to_cart":
            url = str(args.get("url", ""))
            shop = self.shop_of(url)
            if shop is None:
                return StepResult("", error=f"not a shop URL: {url}")
            body = {"session": self.env.session, "url": url, "quantity": args.get("quantity", 1)}
            return self._call("POST", f"{shop.base_url}/api/cart/add", body)
        shop = self.shops.get(str(args.get("shop") or action.shop))
        if shop is None:
            return StepResult("", error=f"unknown shop {args.get('shop') or action.shop!r}")
        if action.tool == "view_cart":
            return self._call("GET", f"{shop.base_url}/api/cart?" + urlencode({"session": self.env.session}))
        body = {"session": self.env.session, "shipping": args.get("shipping"), "payment": args.get("payment")}
        return self._call("POST", f"{shop.base_url}/api/checkout", body)

    def _call(self, method: str, url: str, body: dict | None = None) -> StepResult:
        try:
            resp = self.http.request(method, url, json=body)
        except httpx.HTTPError as exc:
            return StepResult("", error=f"request failed: {exc}")
        text = resp.text
        try:
            data = resp.json()
        except ValueError:
            data = None
        if resp.status_code >= 400:
            msg = data.get("error") if isinstance(data, dict) else text
            return StepResult(text, error=str(msg))
        return StepResult(text, product_urls(self.env.shops, _strings(data)))


# --- MCP / NLWeb --------------------------------------------------------------------


class McpInterface(_Interface):
    kind = "mcp"
    allowed = (ToolCall, Finish)
    path = "/mcp"

    def __init__(self, env: AgentEnv, config: AgentConfig):
        super().__init__(env, config)
        self.http = env.client(config.timeout)
        self.descriptors: dict[str, list[dict]] = {}
        self._id = 0

    def _rpc(self, shop: Shop, method: str, params: dict | None = None) -> dict:
        self._id += 1
        msg = {"jsonrpc": "2.0", "id": self._id, "method": method}
        if params is not None:
            msg["params"] = params
        resp = self.http.post(shop.base_url + self.path, json=msg)
        return resp.json()

    def reset(self) -> Observation:
        lines = ["Available tools (call them as <shop>__<tool>):"]
        for s in self.env.shops:
            try:
                resp = self._rpc(s, "tools/list")
            except (httpx.HTTPError, ValueError) as exc:
                raise InterfaceError(f"shop {s.shop_id} unreachable: {exc}") from None
            tools = (resp.get("result") or {}).get("tools") or []
            self.descriptors[s.shop_id] = tools
            for t in tools:
                params = ", ".join((t.get("inputSchema") or {}).get("properties", {}))
                lines.append(f"- {s.shop_id}__{t['name']}({params}): {t.get('description', '')}")
        return Observation("\n".join(lines), 0)

    def tool_specs(self) -> list[dict]:
        specs = []
        for s in self.env.shops:
            for t in self.descriptors.get(s.shop_id, []):
                specs.append({"name": f"{s.shop_id}__{t['name']}",
                              "description": f"[{s.display_name}] {t.get('description', '')}",
                              "parameters": t.get("inputSchema") or {"type": "object", "properties": {}}})
        return specs + [FINISH_SPEC]

    def parse_call(self, name: str, args: dict) -> AgentAction:
        if name == "finish":
            return action_from_dict({"type": "finish", **args})
        shop, sep, tool = name.partition("__")
        if not sep:
            return Invalid(f"unknown tool {name!r}; use <shop>__<tool>")
        return ToolCall(shop, tool, args)

    def check(self, action: ToolCall) -> str | None:
        return None

    def execute(self, action: AgentAction) -> StepResult:
        assert isinstance(action, ToolCall)
        shop = self.shops.get(action.shop)
        if shop is None:
            return StepResult("", error=f"unknown shop {action.shop!r}")
        problem = self.check(action)
        if problem:
            return StepResult("", error=problem)
        try:
            resp = self._rpc(shop, "tools/call", {"name": action.tool, "arguments": action.args})
        except (httpx.HTTPError, ValueError) as exc:
            return StepResult("", error=f"call to {shop.shop_id} failed: {exc}")
        if "error" in resp:
            err = resp["error"]
            text = f"JSON-RPC error {err.get('code')}: {err.get('message')}"
            return StepResult(text, error=text)
        result = resp.get("result") or {}
        content = result.get("content") or []
        text = "\n".join(c.get("text", "") for c in content if isinstance(c, dict))
        urls = product_urls(self.env.shops, _strings(result.get("structuredContent")))
        return StepResult(text, urls, error=text if result.get("isError") else None)


class NlwebInterface(McpInterface):
    kind = "nlweb"
    path = "/nlweb"

    def check(self, action: ToolCall) -> str | None:
        if action.tool not in NLWEB_TOOLS:
            return f"tool {action.tool!r} is not an NLWeb tool; use one of {list(NLWEB_TOOLS)}"
        return None


_INTERFACE_TYPES = {"html": HtmlInterface, "rag": RagInterface, "mcp": McpInterface, "nlweb": NlwebInterface}


def make_interface(env: AgentEnv, config: AgentConfig) -> _Interface:
    return _INTERFACE_TYPES[config.interface](env, config)


# --- the loop -----------------------------------------------------------------------


def run_agent(task_id: str, prompt: str, policy: Policy, env: AgentEnv, config: AgentConfig,
              model: str = "") -> Transcript:
    started = time.monotonic()
    tr = Transcript(task_id, config.interface, model or getattr(policy, "name", ""))
    try:
        iface = make_interface(env, config)
        obs = iface.reset()
        policy.start(PolicyContext(task_id, config.interface, prompt, iface.system_prompt(), iface.tool_specs(),
                                   env.session, iface.parse_call))
        while len(tr.steps) < config.max_steps:
            decision: PolicyDecision = policy.decide(obs)
            action = decision.action
            step = Step(len(tr.steps), digest(obs.text), action_to_dict(action), "",
                        decision.usage.input_tokens, decision.usage.output_tokens)
            tr.steps.append(step)
            if isinstance(action, Finish):
                tr.answer = list(action.answer)
                tr.done = action.done
                step.result = "finished"
                break
            if isinstance(action, Invalid) or not isinstance(action, iface.allowed):
                reason = action.reason if isinstance(action, Invalid) else \
                    f"action {type(action).__name__} is not available to the {config.interface} agent"
                step.error = reason
                step.result = reason
                obs = Observation(f"Invalid action: {reason}", len(tr.steps), getattr(iface, "page", None), reason)
                continue
            res = iface.execute(action)
            step.result = digest(res.text)
            step.error = res.error
            step.urls = res.urls
            tr.observe(res.urls)
            text = res.text if res.error is None or res.error == res.text else f"Error: {res.error}\n{res.text}"
            obs = Observation(text, len(tr.steps), res.page, res.error)
    except (PolicyError, InterfaceError) as exc:
        tr.error = str(exc)
    tr.wall_seconds = time.monotonic() - started
    return tr


def run_html_agent(task_id: str, prompt: str, policy: Policy, env: AgentEnv, max_steps: int | None = None,
                   model: str = "") -> Transcript:
    return run_agent(task_id, prompt, policy, env, AgentConfig("html", max_steps), model)


def run_rag_agent(task_id: str, prompt: str, policy: Policy, env: AgentEnv, max_steps: int | None = None,
                  model: str = "") -> Transcript:
    return run_agent(task_id, prompt, policy, env, AgentConfig("rag", max_steps), model)


def run_mcp_agent(task_id: str, prompt: str, policy: Policy, env: AgentEnv, max_steps: int | None = None,
                  model: str = "") -> Transcript:
    return run_agent(task_id, prompt, policy, env, AgentConfig("mcp", max_steps), model)


def run_nlweb_agent(task_id: str, prompt: str, policy: Policy, env: AgentEnv, max_steps: int | None = None,
                    model: str = "") -> Transcript:
    return run_agent(task_id, prompt, policy, env, AgentConfig("nlweb", max_steps), model)

