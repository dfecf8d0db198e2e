"""Agent actions and policy decisions, with a plain-dict wire form."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Union


@dataclass(frozen=True)
class BrowseGoto:
    url: str


@dataclass(frozen=True)
class BrowseClick:
    index: int


@dataclass(frozen=True)
class BrowseFill:
    """Fill the form at ``form`` with ``values`` and submit it."""

    form: int
    values: dict[str, str] = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class Remember:
    note: str


@dataclass(frozen=True)
class Search:
    query: str
    k: int = 10


@dataclass(frozen=True)
class ToolCall:
    shop: str
    tool: str
    args: dict[str, Any] = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class Finish:
    answer: tuple[str, ...] = ()
    done: bool = False


@dataclass(frozen=True)
class Invalid:
    """A model reply that could not be turned into an action; always rejected."""

    reason: str


AgentAction = Union[BrowseGoto, BrowseClick, BrowseFill, Remember, Search, ToolCall, Finish, Invalid]

_TYPES: dict[str, type] = {
    "goto": BrowseGoto, "click": BrowseClick, "fill": BrowseFill, "remember": Remember,
    "search": Search, "tool_call": ToolCall, "finish": Finish, "invalid": Invalid,
}
_NAMES = {v: k for k, v in _TYPES.items()}


class ActionError(ValueError):
    pass


def action_to_dict(action: AgentAction) -> dict:
    d = asdict(action)
    if isinstance(action, Finish):
        d["answer"] = list(action.answer)
    return {"type": _NAMES[type(action)], **d}


def action_from_dict(d: Any) -> AgentAction:
    if not isinstance(d, dict) or d.get("type") not in _TYPES:
        raise ActionError(f"not an action: {d!r}")
    kind = d["type"]
    try:
        if kind == "goto":
            return BrowseGoto(str(d["url"]))
        if kind == "click":
            return BrowseClick(int(d["index"]))
        if kind == "fill":
            return BrowseFill(int(d["form"]), {str(k): str(v) for k, v in (d.get("values") or {}).items()})
        if kind == "remember":
            return Remember(str(d["note"]))
        if kind == "search":
            return Search(str(d["query"]), int(d.get("k", 10)))
        if kind == "invalid":
            return Invalid(str(d.get("reason", "")))
        if kind == "tool_call":
            args = d.get("args") or {}
            if not isinstance(args, dict):
                raise ActionError("tool_call args must be an object")
            return ToolCall(str(d.get("shop", "")), str(d["tool"]), args)
        answer = d.get("answer") or []
        if isinstance(answer, str):
            answer = [answer]
        return Finish(tuple(str(u) for u in answer), bool(d.get("done", False)))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ActionError(f"malformed {kind} action: {exc}") from None


@dataclass(frozen=True)
class Usage:
    input_tokens: int = 0
    output_tokens: int = 0

    def __post_init__(self):
        if self.input_tokens < 0 or self.output_tokens < 0:
            raise ValueError("token counts must be non-negative")

    def __add__(self, other: "Usage") -> "Usage":
        return Usage(self.input_tokens + other.input_tokens, self.output_tokens + other.output_tokens)


@dataclass(frozen=True)
class PolicyDecision:
    action: AgentAction
    usage: Usage = Usage()
