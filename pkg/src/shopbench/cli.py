"""Command line entry point: ``shopbench {serve,index,run,score,report}``.

Exit codes: 0 success, 1 unexpected failure, 2 configuration error,
3 network failure, 4 scoring failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import signal
import sys
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import httpx

from .agents import INTERFACES, PolicyError
from .backend import Backend
from .catalog import Catalog, CatalogError, demo_catalog_path, load_catalog, normalize_url
from .crawler import CrawlError, build_rag_index, crawl
from .evaluation import (EvaluationError, PricingTable, TaskFileError, aggregate, load_results, load_tasks,
                         save_results, write_report)
from .harness import (ConfigError, NetworkError, ShopsConnection, check_scripts, live_policy_factory, rescore,
                      run_tasks, script_policy_factory)
from .search_index import (DocInput, EmbeddingError, Index, IndexBuildError, index_docs, offer_document_text,
                           provider_from_name)
from .server import serve

log = logging.getLogger("shopbench")

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_NETWORK, EXIT_SCORING = 0, 1, 2, 3, 4
DEFAULT_PORTS_BASE = 8701
DEFAULT_MODEL = "gpt-4.1"
DEFAULT_EMBEDDER = "hashing-v1/256/unsigned"
RAG_INDEX_FILE = "rag_index.jsonl"


def sample_tasks_path() -> Path:
    return Path(str(resources.files("shopbench") / "data" / "sample_tasks.jsonl"))


@dataclass
class RunConfig:
    catalog: Path
    tasks: Path
    interfaces: list[str]
    policy: str
    model: str
    pricing: Path | None
    out: Path
    parallel: int
    ports_base: int
    seed: int
    remote: bool
    admin_token: str | None
    host: str
    index: Path | None
    embedder: str
    max_steps: int | None

    def validate(self) -> None:
        for label, path in (("catalog", self.catalog), ("task file", self.tasks), ("pricing file", self.pricing),
                            ("index file", self.index)):
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{label} not found: {path}")
        if self.parallel < 1:
            raise ConfigError("--parallel must be at least 1")
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigError("--max-steps must be at least 1")
        if not (self.policy == "live" or self.policy.startswith("script:")):
            raise ConfigError(f"--policy must be 'live' or 'script:<path>', got {self.policy!r}")
        if self.remote and not self.admin_token:
            raise ConfigError("--remote needs the shops' admin token (--admin-token or SHOPBENCH_ADMIN_TOKEN)")


def _interfaces(value: str) -> list[str]:
    if value == "all":
        return list(INTERFACES)
    parts = [p.strip() for p in value.split(",") if p.strip()]
    bad = [p for p in parts if p not in INTERFACES]
    if bad or not parts:
        raise argparse.ArgumentTypeError(f"unknown interface(s) {bad or value!r}; choose from "
                                         f"{', '.join(INTERFACES)} or all")
    return parts


def _config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        catalog=Path(args.catalog) if args.catalog else demo_catalog_path(),
        tasks=Path(getattr(args, "tasks", None) or sample_tasks_path()),
        interfaces=getattr(args, "interface", None) or list(INTERFACES),
        policy=getattr(args, "policy", "script:demo"),
        model=getattr(args, "model", None) or DEFAULT_MODEL,
        pricing=Path(args.pricing) if getattr(args, "pricing", None) else None,
        out=Path(getattr(args, "out", None) or "out"),
        parallel=getattr(args, "parallel", 1),
        ports_base=args.ports_base,
        seed=args.seed,
        remote=getattr(args, "remote", False),
        admin_token=args.admin_token or os.environ.get("SHOPBENCH_ADMIN_TOKEN") or None,
        host=args.host,
        index=Path(args.index) if getattr(args, "index", None) else None,
        embedder=args.embedder,
        max_steps=getattr(args, "max_steps", None),
    )
    cfg.validate()
    return cfg


def _catalog(cfg: RunConfig) -> Catalog:
    return load_catalog(cfg.catalog)


def _backend(cfg: RunConfig) -> Backend:
    return Backend.create(_catalog(cfg), seed=cfg.seed, provider=provider_from_name(cfg.embedder),
                          admin_token=cfg.admin_token)


def _connection(cfg: RunConfig) -> ShopsConnection:
    if cfg.remote:
        conn = ShopsConnection.network(_catalog(cfg).shops, cfg.ports_base, cfg.admin_token, cfg.host)
        conn.check_health()
        return conn
    return ShopsConnection.in_process(_backend(cfg))


def _crawl_index(conn: ShopsConnection, cfg: RunConfig) -> Index:
    with httpx.Client(transport=conn.transport, timeout=30.0) as client:
        pages = crawl(client, conn.shops)
    log.info("crawled %d pages", len(pages))
    return build_rag_index(pages, provider_from_name(cfg.embedder))


# --- subcommands --------------------------------------------------------------------


def cmd_serve(args: argparse.Namespace) -> int:
    cfg = _config(args)
    token = cfg.admin_token
    generated = token is None
    backend = Backend.create(_catalog(cfg), seed=cfg.seed, provider=provider_from_name(cfg.embedder),
                             admin_token=token)
    try:
        handle = serve(backend, cfg.ports_base, cfg.host)
    except OSError as exc:
        raise NetworkError(f"cannot bind ports {cfg.ports_base}-{cfg.ports_base + len(backend.catalog.shops) - 1} "
                           f"on {cfg.host}: {exc}") from None
    for shop in backend.catalog.shops:
        port = handle.ports[shop.shop_id]
        print(f"{shop.shop_id} ({shop.display_name}) {shop.base_url} -> http://{cfg.host}:{port}  "
              "[/ html, /mcp, /nlweb, /health]", flush=True)
    if generated:
        print(f"admin token: {backend.admin_token}", flush=True)
    print("ready", flush=True)
    stop = threading.Event()
    for sig in (signal.SIGINT, signal.SIGTERM):
        signal.signal(sig, lambda *_: stop.set())
    try:
        stop.wait()
    finally:
        handle.stop()
    return EXIT_OK


def cmd_index(args: argparse.Namespace) -> int:
    cfg = _config(args)
    conn = _connection(cfg)
    rag = _crawl_index(conn, cfg)
    out = cfg.out / "index"
    out.mkdir(parents=True, exist_ok=True)
    rag.save(out / RAG_INDEX_FILE)
    catalog = _catalog(cfg)
    provider = provider_from_name(cfg.embedder)
    for shop in catalog.shop_ids:
        docs = (DocInput(o.offer_id, o.shop_id, normalize_url(o.url), offer_document_text(o), o.offer_id)
                for o in catalog.offers_in(shop))
        index_docs(docs, provider).save(out / f"offers_{shop}.jsonl")
    covered = {d.offer_id for d in rag.docs if d.offer_id}
    print(f"RAG index: {len(rag)} pages, {len(covered)}/{len(catalog.offers)} offers covered -> {out / RAG_INDEX_FILE}")
    print(f"offer indexes: {', '.join(f'offers_{s}.jsonl' for s in catalog.shop_ids)}")
    return EXIT_OK


def _probe_llm() -> None:
    base = os.environ.get("LLM_BASE_URL", "").rstrip("/")
    if not base:
        raise ConfigError("--policy live needs LLM_BASE_URL")
    try:
        httpx.get(base + "/models", timeout=10.0,
                  headers={"Authorization": f"Bearer {os.environ.get('LLM_API_KEY', '')}"})
    except httpx.HTTPError as exc:
        raise NetworkError(f"chat endpoint {base} unreachable: {exc}") from None


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _config(args)
    tasks = load_tasks(cfg.tasks)
    if not tasks:
        raise ConfigError(f"no tasks in {cfg.tasks}")
    try:
        pricing = PricingTable.from_file(cfg.pricing) if cfg.pricing else PricingTable.default()
        pricing.rate(cfg.model)  # unknown models fail before any agent runs
    except EvaluationError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.policy == "live":
        _probe_llm()
        factory = live_policy_factory(cfg.model)
    else:
        factory = script_policy_factory(cfg.policy.split(":", 1)[1])
        check_scripts(factory.root, tasks, cfg.interfaces)
    conn = _connection(cfg)
    index = None
    if "rag" in cfg.interfaces:
        index = Index.load(cfg.index) if cfg.index else _crawl_index(conn, cfg)
    steps = {i: cfg.max_steps for i in cfg.interfaces} if cfg.max_steps else None
    out = run_tasks(conn, tasks, cfg.interfaces, factory, cfg.model, pricing, index, cfg.out, cfg.parallel, steps)
    save_results(out.results, cfg.out / "results.jsonl")
    ok = sum(r.cr for r in out.results)
    errors = sum(1 for r in out.results if r.error)
    print(f"{len(out.results)} results ({ok} completed, {errors} with errors) -> {cfg.out / 'results.jsonl'}")
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    cfg = _config(args)
    tasks = load_tasks(cfg.tasks)
    try:
        pricing = PricingTable.from_file(cfg.pricing) if cfg.pricing else PricingTable.default()
    except EvaluationError as exc:
        raise ConfigError(str(exc)) from None
    results = rescore(tasks, cfg.out / "transcripts", args.model, pricing)
    save_results(results, cfg.out / "results.jsonl")
    print(f"rescored {len(results)} transcripts -> {cfg.out / 'results.jsonl'}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    out = Path(args.out or "out")
    path = Path(args.results) if args.results else out / "results.jsonl"
    if not path.is_file():
        raise ConfigError(f"results file not found: {path}")
    paths = write_report(aggregate(load_results(path)), out)
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    return EXIT_OK


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", help="line-JSON catalog (default: bundled 60-offer demo)")
    common.add_argument("--ports-base", type=int, default=DEFAULT_PORTS_BASE,
                        help="shop i listens on ports-base + i - 1 (default %(default)s)")
    common.add_argument("--host", default="127.0.0.1", help="bind or connect address (default %(default)s)")
    common.add_argument("--seed", type=int, default=0, help="seed for session and order ids")
    common.add_argument("--admin-token", help="shop admin token (default: $SHOPBENCH_ADMIN_TOKEN)")
    common.add_argument("--embedder", default=DEFAULT_EMBEDDER,
                        help="embedding provider: hashing-v1/<dim>/<signed|unsigned> or remote/<model>")
    common.add_argument("-v", "--verbose", action="store_true")

    remote = argparse.ArgumentParser(add_help=False)
    remote.add_argument("--remote", action="store_true",
                        help="talk to shops started with 'shopbench serve' instead of in-process ones")
    remote.add_argument("--out", help="output directory (default: out)")

    p = argparse.ArgumentParser(prog="shopbench", description="Agent-interface testbed for four simulated shops.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("serve", parents=[common], help="serve the four shops over HTTP")
    s.set_defaults(func=cmd_serve)

    s = sub.add_parser("index", parents=[common, remote], help="crawl the shops and write the search indexes")
    s.set_defaults(func=cmd_index)

    s = sub.add_parser("run", parents=[common, remote], help="run agents over a task file")
    s.add_argument("--tasks", help="line-JSON task file (default: bundled sample tasks)")
    s.add_argument("--interface", type=_interfaces, default=list(INTERFACES),
                   help="html, rag, mcp, nlweb, a comma list, or all (default)")
    s.add_argument("--policy", default="script:demo", help="live or script:<dir> (default script:demo)")
    s.add_argument("--model", default=DEFAULT_MODEL, help="model id for live runs and pricing")
    s.add_argument("--pricing", help="JSON pricing table overriding the defaults")
    s.add_argument("--parallel", type=int, default=1)
    s.add_argument("--index", help="saved RAG index to use instead of crawling")
    s.add_argument("--max-steps", type=int, help="step budget for every interface")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("score", parents=[common], help="rescore saved transcripts")
    s.add_argument("--tasks", help="line-JSON task file (default: bundled sample tasks)")
    s.add_argument("--model", help="override the model recorded in the transcripts")
    s.add_argument("--pricing", help="JSON pricing table overriding the defaults")
    s.add_argument("--out", help="directory holding transcripts/ (default: out)")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("report", help="aggregate results into report.json, report.md and scatter.csv")
    s.add_argument("--out", help="output directory (default: out)")
    s.add_argument("--results", help="results file (default: <out>/results.jsonl)")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, CatalogError, TaskFileError, IndexBuildError, PolicyError) as exc:
        print(f"shopbench: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NetworkError, CrawlError, EmbeddingError) as exc:
        print(f"shopbench: network error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except EvaluationError as exc:
        print(f"shopbench: scoring error: {exc}", file=sys.stderr)
        return EXIT_SCORING
    except Exception as exc:  # noqa: BLE001 - last-resort reporting for the CLI
        log.debug("unexpected failure", exc_info=True)
        print(f"shopbench: unexpected error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
