"""Write docs/shop_schemas.md from the live MCP and NLWeb tool lists.

    python3 tools/gen_schema_docs.py           # rewrite the file
    python3 tools/gen_schema_docs.py --check   # exit 1 if it is out of date
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "docs" / "shop_schemas.md"
sys.path.insert(0, str(ROOT / "src"))

from shopbench.backend import Backend  # noqa: E402
from shopbench.catalog import load_demo_catalog  # noqa: E402
from shopbench.shop_mcp import SEARCH_TOOLS, build_mcp_server, search_args  # noqa: E402
from shopbench.shop_nlweb import build_nlweb_server  # noqa: E402

PRICE_NOTES = {
    "shop1": "`price_usd`, decimal dollars as a JSON number",
    "shop2": "`cost_cents`, integer cents, with a separate `currency`",
    "shop3": "`price`, a decimal string such as `\"199.00\"`",
    "shop4": "`price`, an object `{\"amount\": 199.0, \"currency\": \"USD\"}`",
}
EXAMPLE_QUERY = "Samsung 990 PRO 2TB"


def _block(obj) -> list[str]:
    return ["```json", json.dumps(obj, indent=2, sort_keys=True), "```"]


def _call(server, name, args):
    resp = server.handle_message({"jsonrpc": "2.0", "id": 1, "method": "tools/call",
                                  "params": {"name": name, "arguments": args}})
    return resp["result"]["structuredContent"]


def render() -> str:
    backend = Backend.create(load_demo_catalog(), seed=0, admin_token="docs")
    out = ["# Shop tool schemas", "",
           "Generated by `tools/gen_schema_docs.py`; do not edit by hand.", "",
           "Every shop serves JSON-RPC 2.0 at `POST /mcp` (its own tool vocabulary) and at",
           "`POST /nlweb` (the same five tools everywhere).  Both answer `initialize`, `ping`,",
           "`tools/list` and `tools/call`.  Arguments are validated against `inputSchema`;",
           "a violation returns error -32602.  Business failures such as an unknown product",
           "or an empty cart come back as a normal result with `isError: true`.", ""]
    for shop in backend.catalog.shops:
        server = build_mcp_server(backend, shop.shop_id)
        search, _, _, key, _ = SEARCH_TOOLS[shop.shop_id]
        out += [f"## {shop.shop_id}: {shop.display_name} (`{shop.base_url}/mcp`)", "",
                f"Price field: {PRICE_NOTES[shop.shop_id]}.", ""]
        for tool in server.list_tools():
            out += [f"### `{tool['name']}`", "", tool["description"], ""] + _block(tool["inputSchema"]) + [""]
        name, args = search_args(shop.shop_id, EXAMPLE_QUERY, 1)
        out += [f"Example: `{name}` with `{json.dumps(args)}` returns", ""]
        out += _block(_call(server, name, args)) + [""]
    nl = build_nlweb_server(backend, "shop1")
    out += ["## NLWeb (`/nlweb`, identical on every shop)", "",
            "`ask` runs the same shop-restricted search as the MCP search tools and returns",
            "schema.org `Product` items.  Cart tools take product page URLs.", ""]
    for tool in nl.list_tools():
        out += [f"### `{tool['name']}`", "", tool["description"], ""] + _block(tool["inputSchema"]) + [""]
    out += [f"Example: `ask` on shop1 with `{json.dumps({'query': EXAMPLE_QUERY, 'limit': 1})}` returns", ""]
    out += _block(_call(nl, "ask", {"query": EXAMPLE_QUERY, "limit": 1}))
    return "\n".join(out) + "\n"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    text = render()
    if args.check:
        if not OUT.is_file() or OUT.read_text(encoding="utf-8") != text:
            print(f"{OUT} is out of date; run tools/gen_schema_docs.py", file=sys.stderr)
            return 1
        print(f"{OUT} is up to date")
        return 0
    OUT.parent.mkdir(exist_ok=True)
    OUT.write_text(text, encoding="utf-8")
    print(f"wrote {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
