"""Regenerate the bundled demo data: catalog, manifest, sample tasks and golden scripts.

Run from the repository root:

    python3 tools/build_demo_data.py            # write and verify
    python3 tools/build_demo_data.py --check    # verify the files already in place

Verification replays every script in-process and requires CR = 1 on each
(task, interface) pair with every answer URL observed during the run.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path
from urllib.parse import urlencode

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "shopbench" / "data"
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tools"))

from demo_offers import OFFERS  # noqa: E402

from shopbench.agents import CHECKOUT_DETAILS  # noqa: E402
from shopbench.shop_mcp import SEARCH_TOOLS  # noqa: E402

BASE = {f"shop{i}": f"http://shop{i}.local" for i in range(1, 5)}
SHOP_OF = {o[0]: o[1] for o in OFFERS}


def url(offer_id: str) -> str:
    return f"{BASE[SHOP_OF[offer_id]]}/product/{offer_id}"


# task_id, category, prompt, gold, html queries, semantic queries
TASKS = [
    ("S1", "specific", "Find all offers for the AMD Ryzen 9 5900X processor.",
     ["D-001", "D-016", "D-031", "D-046"], ["5900X"], ["AMD Ryzen 9 5900X processor"]),
    ("S2", "specific", "Find all offers for the Samsung 990 PRO 2TB NVMe SSD.",
     ["D-003", "D-017", "D-047"], ["990 PRO"], ["Samsung 990 PRO 2TB NVMe SSD"]),
    ("S3", "specific", "Find all offers for the Sony WH-1000XM5 headphones.",
     ["D-007", "D-051"], ["WH-1000XM5"], ["Sony WH-1000XM5 noise cancelling headphones"]),
    ("V1", "vague", "Find offers for compact keyboards that are easy to take on trips.",
     ["D-004", "D-020", "D-034", "D-049"], ["keyboard"], ["compact wireless keyboard for travel"]),
    ("V2", "vague", "Find all offers for CPUs that fit the motherboard at http://shop2.local/product/D-025.",
     ["D-001", "D-002", "D-016", "D-026", "D-031", "D-032", "D-046", "D-056"], ["AM4"],
     ["AMD Ryzen processor socket AM4", "Ryzen 5 5600X AM4", "Ryzen 7 5800X AM4"]),
    ("V3", "vague", "Find offers for a game console that works both on the TV and as a handheld.",
     ["D-024", "D-039", "D-054"], ["switch oled"], ["Nintendo Switch OLED handheld and TV console"]),
    ("C1", "cheapest", "Find the cheapest offer for a white Xbox Series S with at least 512GB of storage.",
     ["D-036"], ["xbox"], ["Xbox Series S 512GB white console"]),
    ("C2", "cheapest", "Find the cheapest offer for the Samsung 990 PRO 2TB SSD.",
     ["D-017"], ["990 PRO"], ["Samsung 990 PRO 2TB NVMe SSD"]),
    ("C3", "cheapest", "Find the cheapest 32GB DDR5 memory kit.",
     ["D-038"], ["DDR5"], ["32GB DDR5 memory kit"]),
]

# task_id, prompt, offers to add, checkout?, semantic query used to find them (None if given)
TRANSACTIONS = [
    ("T1", "Add the product at http://shop1.local/product/D-003 to the shopping cart.", ["D-003"], False, None),
    ("T2", "Add every offer for the ASUS Dual GeForce RTX 4070 SUPER OC White graphics card to the cart.",
     ["D-018", "D-033"], False, "ASUS Dual RTX 4070 SUPER OC White graphics card"),
    ("T3", "Buy the products at http://shop1.local/product/D-006 and http://shop4.local/product/D-051. "
           "Complete the checkout for each shop.", ["D-006", "D-051"], True, None),
]


def catalog_lines() -> list[dict]:
    return [{"offer_id": oid, "shop_id": shop, "name": name, "description": desc, "category": cat,
             "price": price, "priceCurrency": "USD", "attributes": attrs}
            for oid, shop, name, desc, cat, price, attrs in OFFERS]


def task_records() -> list[dict]:
    out = []
    for tid, cat, prompt, gold, _, _ in TASKS:
        out.append({"task_id": tid, "category": cat, "prompt": prompt, "gold": {"urls": [url(g) for g in gold]}})
    for tid, prompt, offers, buy, _ in TRANSACTIONS:
        per_shop: dict[str, dict[str, int]] = {}
        for o in offers:
            per_shop.setdefault(SHOP_OF[o], {})[o] = 1
        state = {"orders": {s: [c] for s, c in per_shop.items()}} if buy else {"carts": per_shop}
        out.append({"task_id": tid, "category": "transactional", "prompt": prompt, "gold": {"state": state}})
    return out


# --- golden scripts -----------------------------------------------------------------

# (input tokens at step 0, growth per step, output tokens per step); the HTML
# observations are page digests and grow fastest.
USAGE = {"html": (2400, 850, 70), "rag": (1300, 900, 60), "mcp": (2100, 600, 80), "nlweb": (1500, 450, 55)}


def with_usage(iface: str, actions: list[dict]) -> list[dict]:
    base, growth, out = USAGE[iface]
    return [{"action": a, "usage": {"input_tokens": base + growth * i, "output_tokens": out + 7 * (i % 3)}}
            for i, a in enumerate(actions)]


def finish(answer=(), done=False) -> dict:
    return {"type": "finish", "answer": list(answer), "done": done}


def html_retrieval(gold: list[str], queries: list[str]) -> list[dict]:
    acts = []
    for shop in BASE:
        for q in queries:
            acts.append({"type": "goto", "url": f"{BASE[shop]}/search?" + urlencode({"q": q})})
        mine = [g for g in gold if SHOP_OF[g] == shop]
        for i, g in enumerate(mine):
            if i:  # back to the results before opening the next hit
                acts.append({"type": "goto", "url": f"{BASE[shop]}/search?" + urlencode({"q": queries[0]})})
            acts.append({"type": "click", "href": url(g)})
            acts.append({"type": "remember", "note": f"candidate {url(g)}"})
    return acts + [finish(url(g) for g in gold)]


CHECKOUT_FORM = {k: CHECKOUT_DETAILS[k] for k in
                 ("name", "street", "city", "postal_code", "country", "card_number", "expiry")}


def html_transaction(offers: list[str], buy: bool) -> list[dict]:
    acts = []
    for shop in BASE:
        mine = [o for o in offers if SHOP_OF[o] == shop]
        for o in mine:
            acts.append({"type": "goto", "url": url(o)})
            acts.append({"type": "fill", "action": f"{BASE[shop]}/cart/add", "values": {"quantity": "1"}})
        if buy and mine:
            acts.append({"type": "fill", "action": f"{BASE[shop]}/checkout", "values": CHECKOUT_FORM})
    return acts + [finish(done=True)]


SHIPPING = {k: CHECKOUT_DETAILS[k] for k in ("name", "street", "city", "postal_code", "country")}
PAYMENT = {"card_number": CHECKOUT_DETAILS["card_number"], "expiry": CHECKOUT_DETAILS["expiry"]}


def rag_retrieval(gold: list[str], queries: list[str]) -> list[dict]:
    acts = [{"type": "search", "query": q, "k": 20} for q in queries]
    return acts + [finish(url(g) for g in gold)]


def rag_transaction(offers: list[str], buy: bool, query: str | None) -> list[dict]:
    acts = [{"type": "search", "query": query, "k": 20}] if query else []
    acts += [{"type": "tool_call", "shop": SHOP_OF[o], "tool": "add_to_cart", "args": {"url": url(o), "quantity": 1}}
             for o in offers]
    if buy:
        for shop in dict.fromkeys(SHOP_OF[o] for o in offers):
            acts.append({"type": "tool_call", "shop": shop, "tool": "checkout",
                         "args": {"shop": shop, "shipping": SHIPPING, "payment": PAYMENT}})
    return acts + [finish(done=True)]


def mcp_search(shop: str, query: str) -> dict:
    tool, qarg, karg, _, _ = SEARCH_TOOLS[shop]
    return {"type": "tool_call", "shop": shop, "tool": tool, "args": {qarg: query, karg: 10}}


def mcp_add(offer: str) -> dict:
    shop = SHOP_OF[offer]
    s = "${session}"
    args = {"shop1": ("add_item", {"session": s, "product_id": offer, "qty": 1}),
            "shop2": ("put_in_cart", {"cart": s, "id": offer, "count": 1}),
            "shop3": ("cart_add", {"sid": s, "sku": offer, "n": 1}),
            "shop4": ("add", {"token": s, "ref": offer, "qty": 1})}[shop]
    return {"type": "tool_call", "shop": shop, "tool": args[0], "args": args[1]}


def mcp_checkout(shop: str) -> dict:
    d, s = CHECKOUT_DETAILS, "${session}"
    month, year = d["expiry"].split("/")
    tool, args = {
        "shop1": ("checkout", {"session": s, "shipping": {"name": d["name"], "street": d["street"], "city": d["city"],
                                                          "zip": d["postal_code"], "country": d["country"]},
                               "card": {"number": d["card_number"], "expiry": d["expiry"]}}),
        "shop2": ("purchase", {"cart": s, "ship_to": {"recipient": d["name"], "address_line": d["street"],
                                                      "city": d["city"], "postal_code": d["postal_code"],
                                                      "country": d["country"]},
                               "payment": {"card_number": d["card_number"], "exp_month": int(month),
                                           "exp_year": 2000 + int(year)}}),
        "shop3": ("finalize", {"sid": s, "address": {"full_name": d["name"], "line1": d["street"], "town": d["city"],
                                                     "postcode": d["postal_code"], "country": d["country"]},
                               "card_no": d["card_number"]}),
        "shop4": ("complete_order", {"token": s, "delivery": {"addressee": d["name"], "address": d["street"],
                                                              "town": d["city"], "zip_code": d["postal_code"],
                                                              "country": d["country"]},
                                     "pay": {"pan": d["card_number"], "expiry": d["expiry"]}}),
    }[shop]
    return {"type": "tool_call", "shop": shop, "tool": tool, "args": args}


def mcp_retrieval(gold: list[str], queries: list[str]) -> list[dict]:
    acts = [mcp_search(shop, q) for q in queries for shop in BASE]
    return acts + [finish(url(g) for g in gold)]


def mcp_transaction(offers: list[str], buy: bool, query: str | None) -> list[dict]:
    acts = [mcp_search(shop, query) for shop in BASE] if query else []
    acts += [mcp_add(o) for o in offers]
    if buy:
        acts += [mcp_checkout(shop) for shop in dict.fromkeys(SHOP_OF[o] for o in offers)]
    return acts + [finish(done=True)]


def nlweb_ask(shop: str, query: str) -> dict:
    return {"type": "tool_call", "shop": shop, "tool": "ask", "args": {"query": query, "limit": 10}}


def nlweb_retrieval(gold: list[str], queries: list[str]) -> list[dict]:
    acts = [nlweb_ask(shop, q) for q in queries for shop in BASE]
    return acts + [finish(url(g) for g in gold)]


def nlweb_transaction(offers: list[str], buy: bool, query: str | None) -> list[dict]:
    acts = [nlweb_ask(shop, query) for shop in BASE] if query else []
    acts += [{"type": "tool_call", "shop": SHOP_OF[o], "tool": "add_to_cart",
              "args": {"session": "${session}", "url": url(o), "quantity": 1}} for o in offers]
    if buy:
        acts += [{"type": "tool_call", "shop": shop, "tool": "checkout",
                  "args": {"session": "${session}", "shipping": SHIPPING,
                           "payment": {**PAYMENT, "holder": CHECKOUT_DETAILS["name"]}}}
                 for shop in dict.fromkeys(SHOP_OF[o] for o in offers)]
    return acts + [finish(done=True)]


def scripts() -> dict[tuple[str, str], list[dict]]:
    out = {}
    for tid, _, _, gold, hq, sq in TASKS:
        out["html", tid] = html_retrieval(gold, hq)
        out["rag", tid] = rag_retrieval(gold, sq)
        out["mcp", tid] = mcp_retrieval(gold, sq)
        out["nlweb", tid] = nlweb_retrieval(gold, sq)
    for tid, _, offers, buy, q in TRANSACTIONS:
        out["html", tid] = html_transaction(offers, buy)
        out["rag", tid] = rag_transaction(offers, buy, q)
        out["mcp", tid] = mcp_transaction(offers, buy, q)
        out["nlweb", tid] = nlweb_transaction(offers, buy, q)
    return {k: with_usage(k[0], v) for k, v in out.items()}


def dump_jsonl(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records), encoding="utf-8")


def write_all() -> None:
    lines = catalog_lines()
    dump_jsonl(DATA / "demo_catalog.jsonl", lines)
    counts = Counter(r["shop_id"] for r in lines)
    manifest = {"offers": len(lines), "offers_per_shop": dict(sorted(counts.items())),
                "tasks": len(TASKS) + len(TRANSACTIONS)}
    (DATA / "demo_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    dump_jsonl(DATA / "sample_tasks.jsonl", task_records())
    for (iface, tid), recs in scripts().items():
        dump_jsonl(DATA / "scripts" / iface / f"{tid}.jsonl", recs)


def verify() -> int:
    import httpx

    from shopbench.backend import Backend
    from shopbench.catalog import load_catalog, normalize_url
    from shopbench.crawler import build_rag_index, crawl
    from shopbench.evaluation import load_tasks
    from shopbench.harness import ShopsConnection, run_tasks, script_policy_factory

    backend = Backend.create(load_catalog(DATA / "demo_catalog.jsonl"), seed=0)
    conn = ShopsConnection.in_process(backend)
    index = build_rag_index(crawl(httpx.Client(transport=conn.transport), conn.shops))
    tasks = load_tasks(DATA / "sample_tasks.jsonl")
    out = run_tasks(conn, tasks, ["html", "rag", "mcp", "nlweb"], script_policy_factory(DATA / "scripts"),
                    "gpt-4.1", rag_index=index)
    bad = 0
    for res, tr in zip(out.results, out.transcripts):
        seen = {normalize_url(u) for u in tr.observed_urls}
        unseen = [u for u in res.answer if normalize_url(u) not in seen]
        errors = [st.error for st in tr.steps if st.error]
        ok = res.cr == 1 and not unseen and not tr.error and not errors
        bad += not ok
        print(f"{'ok ' if ok else 'BAD'} {res.interface:6} {res.task_id:3} cr={res.cr} f1={res.f1:.3f} "
              f"steps={res.steps}" + (f" unseen={unseen}" if unseen else "") + (f" error={tr.error or errors}" if tr.error or errors else ""))
    return bad


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="only verify the files already written")
    args = ap.parse_args()
    if not args.check:
        write_all()
    bad = verify()
    print("all scripts verified" if not bad else f"{bad} script(s) failed")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
