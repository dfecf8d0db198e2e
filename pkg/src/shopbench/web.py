"""Minimal request/response types and a WSGI adapter."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from http import HTTPStatus
from http.cookies import SimpleCookie
from typing import Callable
from urllib.parse import parse_qs

MAX_BODY = 2 * 1024 * 1024


@dataclass
class Request:
    method: str
    path: str
    query: dict[str, list[str]] = field(default_factory=dict)
    headers: dict[str, str] = field(default_factory=dict)  # lower-case keys
    body: bytes = b""
    host: str = ""

    @property
    def cookies(self) -> dict[str, str]:
        c = SimpleCookie()
        try:
            c.load(self.headers.get("cookie", ""))
        except Exception:
            return {}
        return {k: m.value for k, m in c.items()}

    def arg(self, name: str, default: str = "") -> str:
        vals = self.query.get(name)
        return vals[0] if vals else default

    def form(self) -> dict[str, str]:
        try:
            parsed = parse_qs(self.body.decode("utf-8"), keep_blank_values=True)
        except UnicodeDecodeError:
            return {}
        return {k: v[0] for k, v in parsed.items()}


@dataclass
class Response:
    status: int = 200
    body: bytes = b""
    content_type: str = "text/html; charset=utf-8"
    headers: list[tuple[str, str]] = field(default_factory=list)

    @classmethod
    def html(cls, text: str, status: int = 200) -> "Response":
        return cls(status, text.encode("utf-8"))

    @classmethod
    def json(cls, data, status: int = 200) -> "Response":
        return cls(status, json.dumps(data, ensure_ascii=False).encode("utf-8"), "application/json")

    @classmethod
    def redirect(cls, location: str, status: int = 303) -> "Response":
        return cls(status, b"", "text/plain; charset=utf-8", [("Location", location)])

    def set_cookie(self, name: str, value: str) -> None:
        self.headers.append(("Set-Cookie", f"{name}={value}; Path=/; HttpOnly; SameSite=Lax"))


Handler = Callable[[Request], Response]


def wsgi_app(handler: Handler):
    """Wrap ``handler`` as a WSGI application."""

    def app(environ, start_response):
        try:
            length = int(environ.get("CONTENT_LENGTH") or 0)
        except ValueError:
            length = 0
        if length > MAX_BODY:
            resp = Response.json({"error": "request body too large"}, 413)
        else:
            body = environ["wsgi.input"].read(length) if length > 0 else b""
            headers = {k[5:].replace("_", "-").lower(): v for k, v in environ.items() if k.startswith("HTTP_")}
            if "CONTENT_TYPE" in environ:
                headers["content-type"] = environ["CONTENT_TYPE"]
            path = environ.get("PATH_INFO", "") or "/"
            try:
                # WSGI hands PATH_INFO over as latin-1 decoded bytes
                path = path.encode("latin-1").decode("utf-8")
            except (UnicodeEncodeError, UnicodeDecodeError):
                pass
            req = Request(
                method=environ.get("REQUEST_METHOD", "GET").upper(),
                path=path,
                query=parse_qs(environ.get("QUERY_STRING", ""), keep_blank_values=True),
                headers=headers,
                body=body,
                host=(headers.get("host") or environ.get("SERVER_NAME", "")).lower(),
            )
            try:
                resp = handler(req)
            except Exception as exc:  # keep the server alive on handler bugs
                resp = Response.json({"error": f"internal error: {type(exc).__name__}"}, 500)
        reason = HTTPStatus(resp.status).phrase if resp.status in HTTPStatus._value2member_map_ else ""
        headers = [("Content-Type", resp.content_type), ("Content-Length", str(len(resp.body)))]
        headers.extend(resp.headers)
        start_response(f"{resp.status} {reason}", headers)
        return [resp.body]

    return app
