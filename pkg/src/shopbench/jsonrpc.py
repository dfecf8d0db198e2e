"""JSON-RPC 2.0 dispatch with MCP ``tools/list`` and ``tools/call``.

Every reply is a JSON-RPC 2.0 envelope: ``result`` xor ``error`` with the
request id echoed (``null`` when the id could not be read).  Handler
exceptions never escape; they become ``-32603`` errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

import jsonschema

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603

PROTOCOL_VERSION = "2025-06-18"


class RPCError(Exception):
    def __init__(self, code: int, message: str, data: Any = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.data = data

    def to_dict(self) -> dict:
        err = {"code": self.code, "message": self.message}
        if self.data is not None:
            err["data"] = self.data
        return err


class ToolError(Exception):
    """Domain failure inside a tool; reported as an ``isError`` result."""


@dataclass
class Tool:
    name: str
    description: str
    input_schema: dict
    handler: Callable[[dict], Any]

    def descriptor(self) -> dict:
        return {"name": self.name, "description": self.description, "inputSchema": self.input_schema}


def object_schema(properties: dict, required: list[str] | tuple[str, ...] = ()) -> dict:
    return {"type": "object", "properties": properties, "required": list(required), "additionalProperties": False}


def _valid_id(v: Any) -> bool:
    return v is None or isinstance(v, str) or (isinstance(v, int) and not isinstance(v, bool))


def error_response(id_: Any, err: RPCError) -> dict:
    return {"jsonrpc": "2.0", "id": id_, "error": err.to_dict()}


def tool_result(payload: Any, is_error: bool = False) -> dict:
    text = payload if isinstance(payload, str) else json.dumps(payload, ensure_ascii=False)
    result = {"content": [{"type": "text", "text": text}], "isError": is_error}
    if isinstance(payload, dict):
        result["structuredContent"] = payload
    return result


@dataclass
class MCPServer:
    name: str
    tools: list[Tool]
    version: str = "1.0.0"
    _by_name: dict[str, Tool] = field(init=False, repr=False)

    def __post_init__(self):
        self._by_name = {}
        for t in self.tools:
            if t.name in self._by_name:
                raise ValueError(f"duplicate tool name {t.name!r}")
            jsonschema.Draft202012Validator.check_schema(t.input_schema)
            self._by_name[t.name] = t
        self._validators = {t.name: jsonschema.Draft202012Validator(t.input_schema) for t in self.tools}

    def list_tools(self) -> list[dict]:
        return [t.descriptor() for t in self.tools]

    def call_tool(self, name: Any, arguments: Any) -> dict:
        """Run a tool; raises :class:`RPCError` for protocol-level failures."""
        if not isinstance(name, str):
            raise RPCError(INVALID_PARAMS, "tool name must be a string")
        tool = self._by_name.get(name)
        if tool is None:
            raise RPCError(METHOD_NOT_FOUND, f"unknown tool: {name}")
        if arguments is None:
            arguments = {}
        if not isinstance(arguments, dict):
            raise RPCError(INVALID_PARAMS, "arguments must be an object")
        errors = sorted(self._validators[name].iter_errors(arguments), key=lambda e: list(e.path))
        if errors:
            raise RPCError(INVALID_PARAMS, f"invalid arguments for {name}: {errors[0].message}",
                           [e.message for e in errors])
        try:
            return tool_result(tool.handler(arguments))
        except ToolError as exc:
            return tool_result({"error": str(exc)}, is_error=True)

    # --- JSON-RPC ---

    def _dispatch(self, method: str, params: Any) -> Any:
        if method == "initialize":
            return {"protocolVersion": PROTOCOL_VERSION, "capabilities": {"tools": {"listChanged": False}},
                    "serverInfo": {"name": self.name, "version": self.version}}
        if method == "ping":
            return {}
        if method == "notifications/initialized":
            return None
        if method == "tools/list":
            if params is not None and not isinstance(params, dict):
                raise RPCError(INVALID_PARAMS, "params must be an object")
            return {"tools": self.list_tools()}
        if method == "tools/call":
            if not isinstance(params, dict):
                raise RPCError(INVALID_PARAMS, "params must be an object with 'name' and 'arguments'")
            if "name" not in params:
                raise RPCError(INVALID_PARAMS, "missing 'name'")
            extra = set(params) - {"name", "arguments", "_meta"}
            if extra:
                raise RPCError(INVALID_PARAMS, f"unexpected params: {sorted(extra)}")
            return self.call_tool(params["name"], params.get("arguments"))
        raise RPCError(METHOD_NOT_FOUND, f"method not found: {method}")

    def handle_message(self, msg: Any) -> dict | None:
        """Handle one decoded request object; ``None`` for notifications."""
        if not isinstance(msg, dict):
            return error_response(None, RPCError(INVALID_REQUEST, "request must be an object"))
        id_ = msg.get("id")
        has_id = "id" in msg
        if has_id and not _valid_id(id_):
            return error_response(None, RPCError(INVALID_REQUEST, "invalid id"))
        if msg.get("jsonrpc") != "2.0":
            return error_response(id_, RPCError(INVALID_REQUEST, "jsonrpc must be '2.0'"))
        method = msg.get("method")
        if not isinstance(method, str):
            return error_response(id_, RPCError(INVALID_REQUEST, "method must be a string"))
        if set(msg) - {"jsonrpc", "method", "params", "id"}:
            return error_response(id_, RPCError(INVALID_REQUEST, "unexpected members in request"))
        params = msg.get("params")
        if "params" in msg and not isinstance(params, (dict, list)):
            return error_response(id_, RPCError(INVALID_REQUEST, "params must be an object or array"))
        try:
            result = self._dispatch(method, params)
        except RPCError as err:
            return error_response(id_, err) if has_id else None
        except Exception as exc:  # a bug in a tool must not take the server down
            return error_response(id_, RPCError(INTERNAL_ERROR, f"internal error: {type(exc).__name__}")) \
                if has_id else None
        if not has_id:
            return None
        return {"jsonrpc": "2.0", "id": id_, "result": result if result is not None else {}}

    def handle_bytes(self, body: bytes) -> dict | list | None:
        """Handle a raw HTTP body (single request or batch)."""
        try:
            msg = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, ValueError, RecursionError):
            return error_response(None, RPCError(PARSE_ERROR, "parse error"))
        if isinstance(msg, list):
            if not msg:
                return error_response(None, RPCError(INVALID_REQUEST, "empty batch"))
            out = [r for r in (self.handle_message(m) for m in msg) if r is not None]
            return out or None
        return self.handle_message(msg)


def is_valid_envelope(resp: Any) -> bool:
    """Check the JSON-RPC 2.0 response envelope shape."""
    if not isinstance(resp, dict) or resp.get("jsonrpc") != "2.0" or "id" not in resp:
        return False
    if not _valid_id(resp["id"]):
        return False
    if ("result" in resp) == ("error" in resp):
        return False
    if "error" in resp:
        err = resp["error"]
        if not isinstance(err, dict) or not isinstance(err.get("code"), int) or not isinstance(err.get("message"), str):
            return False
    return set(resp) <= {"jsonrpc", "id", "result", "error"}
