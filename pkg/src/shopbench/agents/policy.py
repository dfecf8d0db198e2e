"""Decision policies: the interface between an agent loop and whatever picks actions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Protocol

from ..catalog import UrlError, normalize_url
from ..shop_html import PageModel
from .actions import ActionError, AgentAction, PolicyDecision, Usage, action_from_dict


class PolicyError(RuntimeError):
    """The policy could not produce a decision; the run is aborted."""


@dataclass
class Observation:
    text: str
    step: int = 0
    page: PageModel | None = None
    error: str | None = None


@dataclass
class PolicyContext:
    task_id: str
    interface: str
    prompt: str  # task text
    system: str  # rendered interface instructions
    tools: list[dict] = field(default_factory=list)  # function specs: name, description, parameters
    session: str = ""
    parse_call: Callable[[str, dict], AgentAction] | None = None


class Policy(Protocol):
    name: str

    def start(self, ctx: PolicyContext) -> None: ...

    def decide(self, obs: Observation) -> PolicyDecision: ...


def _substitute(value: Any, env: dict[str, str]) -> Any:
    if isinstance(value, str):
        for k, v in env.items():
            value = value.replace("${" + k + "}", v)
        return value
    if isinstance(value, list):
        return [_substitute(v, env) for v in value]
    if isinstance(value, dict):
        return {k: _substitute(v, env) for k, v in value.items()}
    return value


def _same_url(a: str, b: str) -> bool:
    try:
        return normalize_url(a) == normalize_url(b)
    except UrlError:
        return a == b


class ScriptedPolicy:
    """Replays a fixed list of decisions.

    Each record is ``{"action": {...}, "usage": {"input_tokens": n, "output_tokens": m}}``.
    ``${session}`` anywhere in an action is replaced by the run's session token.
    Browse actions may name their target instead of an index: a click with
    ``href`` picks the first link on the current page with that URL (content
    links before navigation links), a fill with ``action`` picks the form
    posting to that URL.  Running out of records raises :class:`PolicyError`.
    """

    name = "scripted"

    def __init__(self, records: list[dict]):
        self.records = list(records)
        self._pos = 0
        self._env: dict[str, str] = {}

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedPolicy":
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise PolicyError(f"cannot read script {path}: {exc.strerror or exc}") from None
        records = []
        for i, line in enumerate(lines, 1):
            if line.strip():
                try:
                    records.append(json.loads(line))
                except ValueError as exc:
                    raise PolicyError(f"{path}:{i}: invalid JSON ({exc})") from None
        return cls(records)

    def start(self, ctx: PolicyContext) -> None:
        self._pos = 0
        self._env = {"session": ctx.session}

    def _resolve(self, raw: dict, page: PageModel | None) -> dict:
        raw = dict(raw)
        if raw.get("type") == "click" and "index" not in raw and "href" in raw:
            links = page.links if page else []
            order = [i for i, l in enumerate(links) if l.region != "nav"] + \
                    [i for i, l in enumerate(links) if l.region == "nav"]
            raw["index"] = next((i for i in order if _same_url(links[i].href, raw["href"])), -1)
        if raw.get("type") == "fill" and "form" not in raw and "action" in raw:
            forms = page.forms if page else []
            raw["form"] = next((i for i, f in enumerate(forms) if _same_url(f.action, raw["action"])), -1)
        return raw

    def decide(self, obs: Observation) -> PolicyDecision:
        if self._pos >= len(self.records):
            raise PolicyError("script exhausted before the run finished")
        rec = self.records[self._pos]
        self._pos += 1
        if not isinstance(rec, dict) or "action" not in rec:
            raise PolicyError(f"script record {self._pos} has no action")
        raw = self._resolve(_substitute(rec["action"], self._env), obs.page)
        try:
            action = action_from_dict(raw)
        except ActionError as exc:
            raise PolicyError(f"script record {self._pos}: {exc}") from None
        u = rec.get("usage") or {}
        return PolicyDecision(action, Usage(int(u.get("input_tokens", 0)), int(u.get("output_tokens", 0))))


class CallbackPolicy:
    """Wraps a plain function ``obs -> PolicyDecision`` (handy in tests)."""

    name = "callback"

    def __init__(self, fn: Callable[[Observation], PolicyDecision]):
        self.fn = fn

    def start(self, ctx: PolicyContext) -> None:
        self.ctx = ctx

    def decide(self, obs: Observation) -> PolicyDecision:
        return self.fn(obs)

