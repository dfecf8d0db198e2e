"""Policy backed by a chat-completion HTTP endpoint with function calling."""

from __future__ import annotations

import json
import os
import re
import time

import httpx

from .actions import ActionError, Finish, Invalid, PolicyDecision, Usage
from .policy import Observation, PolicyContext, PolicyError

_URL = re.compile(r"https?://[^\s\"'<>)\],]+")


class LiveChatPolicy:
    """Drives a chat model; each decision is one completion request.

    The model sees the interface instructions, the task, and every previous
    observation.  A tool call becomes the next action; a plain text reply is
    read as a final answer and any URLs in it become the answer list.
    Usage is taken from the response's ``usage`` block and never estimated.
    """

    name = "live"

    def __init__(self, base_url: str | None = None, api_key: str | None = None, model: str | None = None,
                 max_retries: int = 3, timeout: float = 120.0, backoff: float = 1.0,
                 client: httpx.Client | None = None, temperature: float | None = None):
        self.base_url = (base_url or os.environ.get("LLM_BASE_URL", "")).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get("LLM_API_KEY", "")
        self.model = model or os.environ.get("LLM_MODEL", "")
        if not self.base_url:
            raise PolicyError("LLM_BASE_URL is not set")
        if not self.model:
            raise PolicyError("no model configured (set LLM_MODEL or pass --model)")
        self.max_retries = max_retries
        self.backoff = backoff
        self.temperature = temperature
        self.client = client or httpx.Client(timeout=timeout)
        self.messages: list[dict] = []
        self.ctx: PolicyContext | None = None
        self._pending_call: str | None = None

    def start(self, ctx: PolicyContext) -> None:
        self.ctx = ctx
        self.messages = [{"role": "system", "content": ctx.system}, {"role": "user", "content": ctx.prompt}]
        self._pending_call = None

    def _request_body(self) -> dict:
        body = {"model": self.model, "messages": self.messages}
        if self.ctx.tools:
            body["tools"] = [{"type": "function", "function": t} for t in self.ctx.tools]
            body["tool_choice"] = "auto"
        if self.temperature is not None:
            body["temperature"] = self.temperature
        return body

    def _complete(self) -> dict:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last = "no attempt made"
        for attempt in range(self.max_retries):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                r = self.client.post(f"{self.base_url}/chat/completions", json=self._request_body(), headers=headers)
            except httpx.HTTPError as exc:
                last = f"transport error: {exc}"
                continue
            if r.status_code == 429 or r.status_code >= 500:
                last = f"HTTP {r.status_code}"
                continue
            if r.status_code >= 400:
                raise PolicyError(f"chat endpoint rejected the request: HTTP {r.status_code} {r.text[:200]}")
            try:
                data = r.json()
                message = data["choices"][0]["message"]
                if not isinstance(message, dict):
                    raise TypeError("message is not an object")
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                last = f"malformed response: {exc}"
                continue
            return data
        raise PolicyError(f"chat endpoint failed after {self.max_retries} attempts ({last})")

    @staticmethod
    def _usage(data: dict) -> Usage:
        u = data.get("usage") or {}
        inp = u.get("prompt_tokens", u.get("input_tokens", 0)) or 0
        out = u.get("completion_tokens", u.get("output_tokens", 0)) or 0
        return Usage(int(inp), int(out))

    def decide(self, obs: Observation) -> PolicyDecision:
        if self.ctx is None:
            raise PolicyError("start() was not called")
        if obs.step > 0 or obs.text:
            if self._pending_call:
                self.messages.append({"role": "tool", "tool_call_id": self._pending_call, "content": obs.text})
            else:
                self.messages.append({"role": "user", "content": obs.text})
        self._pending_call = None
        data = self._complete()
        usage = self._usage(data)
        message = data["choices"][0]["message"]
        calls = message.get("tool_calls") or []
        if calls:
            call = calls[0]
            fn = call.get("function") or {}
            name = fn.get("name", "")
            raw = fn.get("arguments") or "{}"
            call_id = call.get("id") or f"call_{len(self.messages)}"
            # keep only the call we act on so the next tool message pairs with it
            self.messages.append({"role": "assistant", "content": message.get("content"),
                                  "tool_calls": [{"id": call_id, "type": "function",
                                                  "function": {"name": name, "arguments": raw}}]})
            self._pending_call = call_id
            try:
                args = json.loads(raw) if isinstance(raw, str) else raw
                if not isinstance(args, dict):
                    raise ValueError("arguments are not an object")
                action = self.ctx.parse_call(name, args)
            except (ValueError, ActionError) as exc:
                # rejected by the runner and reported back on the next turn
                action = Invalid(f"could not use call to {name!r}: {exc}")
            return PolicyDecision(action, usage)
        content = message.get("content") or ""
        self.messages.append({"role": "assistant", "content": content})
        urls = tuple(dict.fromkeys(u.rstrip(".") for u in _URL.findall(content)))
        return PolicyDecision(Finish(urls, done=not urls), usage)
