"""Runs task sets against the shops and collects scored results."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

import httpx

from .agents import AgentConfig, AgentEnv, LiveChatPolicy, Policy, PolicyError, ScriptedPolicy, Transcript, run_agent
from .backend import Backend
from .catalog import Shop
from .commerce import StateSnapshot
from .evaluation import INTERFACE_ORDER, PricingTable, TaskResult, TaskSpec, score_task
from .search_index import Index
from .server import HostRewriteTransport, make_wsgi_app, shop_routes

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class NetworkError(RuntimeError):
    pass


class ShopsConnection:
    """HTTP access to the four shops, including the admin session hooks."""

    def __init__(self, transport: httpx.BaseTransport, shops: tuple[Shop, ...], admin_token: str,
                 timeout: float = 30.0):
        self.transport = transport
        self.shops = tuple(shops)
        self.admin_token = admin_token
        self.http = httpx.Client(transport=transport, timeout=timeout)

    @classmethod
    def in_process(cls, backend: Backend) -> "ShopsConnection":
        return cls(httpx.WSGITransport(app=make_wsgi_app(backend)), backend.catalog.shops, backend.admin_token)

    @classmethod
    def network(cls, shops, ports_base: int, admin_token: str, host: str = "127.0.0.1") -> "ShopsConnection":
        return cls(HostRewriteTransport(shop_routes(shops, ports_base, host)), tuple(shops), admin_token)

    def _admin(self, method: str, path: str) -> dict:
        url = self.shops[0].base_url + path
        try:
            r = self.http.request(method, url, headers={"Authorization": f"Bearer {self.admin_token}"})
        except httpx.HTTPError as exc:
            raise NetworkError(f"admin request to {url} failed: {exc}") from None
        if r.status_code == 401:
            raise ConfigError("admin token rejected by the shop server")
        if r.status_code != 200:
            raise NetworkError(f"admin request to {url} returned HTTP {r.status_code}")
        return r.json()

    def create_session(self) -> str:
        return self._admin("POST", "/admin/session")["session"]

    def snapshot(self, session_id: str) -> StateSnapshot:
        return StateSnapshot.from_dict(self._admin("GET", f"/admin/session/{session_id}/snapshot"))

    def check_health(self) -> None:
        for s in self.shops:
            try:
                r = self.http.get(s.base_url + "/health")
            except httpx.HTTPError as exc:
                raise NetworkError(f"shop {s.shop_id} unreachable: {exc}") from None
            if r.status_code != 200:
                raise NetworkError(f"shop {s.shop_id} unhealthy: HTTP {r.status_code}")


def demo_scripts_dir() -> Path:
    return Path(str(resources.files("shopbench") / "data" / "scripts"))


PolicyFactory = Callable[[TaskSpec, str], Policy]


def script_policy_factory(root: str | Path) -> PolicyFactory:
    """Scripts are looked up as ``root/{interface}/{task_id}.jsonl``."""
    root = demo_scripts_dir() if str(root) == "demo" else Path(root)

    def factory(task: TaskSpec, interface: str) -> Policy:
        return ScriptedPolicy.from_file(root / interface / f"{task.task_id}.jsonl")
    factory.root = root  # type: ignore[attr-defined]
    return factory


def check_scripts(root: Path, tasks: list[TaskSpec], interfaces: list[str]) -> None:
    missing = [f"{i}/{t.task_id}.jsonl" for i in interfaces for t in tasks
               if not (root / i / f"{t.task_id}.jsonl").is_file()]
    if missing:
        raise ConfigError(f"missing scripts under {root}: {', '.join(missing[:5])}"
                          + (" ..." if len(missing) > 5 else ""))


def live_policy_factory(model: str) -> PolicyFactory:
    def factory(task: TaskSpec, interface: str) -> Policy:
        return LiveChatPolicy(model=model)
    return factory


@dataclass
class RunOutput:
    results: list[TaskResult]
    transcripts: list[Transcript]


def run_tasks(conn: ShopsConnection, tasks: list[TaskSpec], interfaces: list[str], make_policy: PolicyFactory,
              model: str, pricing: PricingTable | None = None, rag_index: Index | None = None,
              out_dir: str | Path | None = None, parallel: int = 1,
              max_steps: dict[str, int] | None = None) -> RunOutput:
    """Run every task on every interface, each in a fresh session.

    Sessions are created up front in task order so ids do not depend on
    thread scheduling.  Results come back in (interface, task) order.
    """
    if parallel < 1:
        raise ConfigError("parallelism must be at least 1")
    jobs = [(iface, task) for iface in interfaces for task in tasks]
    sessions = [conn.create_session() for _ in jobs]
    pricing = pricing or PricingTable.default()

    def one(i: int) -> tuple[TaskResult, Transcript]:
        iface, task = jobs[i]
        env = AgentEnv(conn.transport, conn.shops, sessions[i], rag_index if iface == "rag" else None)
        started = time.monotonic()
        try:
            policy = make_policy(task, iface)
        except PolicyError as exc:
            tr = Transcript(task.task_id, iface, model, error=str(exc))
        else:
            tr = run_agent(task.task_id, task.prompt, policy, env,
                           AgentConfig(iface, (max_steps or {}).get(iface)), model)
        tr.model = model
        snap = conn.snapshot(sessions[i])
        tr.final_state = snap.to_dict()
        tr.wall_seconds = time.monotonic() - started
        if tr.error:
            log.warning("%s/%s: %s", iface, task.task_id, tr.error)
        return score_task(task, tr, model, pricing, snap), tr

    if parallel == 1:
        pairs = [one(i) for i in range(len(jobs))]
    else:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            pairs = list(pool.map(one, range(len(jobs))))
    if out_dir is not None:
        for _, tr in pairs:
            tr.save(Path(out_dir) / "transcripts" / tr.interface / f"{tr.task_id}.jsonl")
    return RunOutput([p[0] for p in pairs], [p[1] for p in pairs])


def rescore(tasks: list[TaskSpec], transcripts_dir: str | Path, model: str | None = None,
            pricing: PricingTable | None = None) -> list[TaskResult]:
    """Score saved transcripts again (``transcripts/{interface}/{task_id}.jsonl``)."""
    by_id = {t.task_id: t for t in tasks}
    root = Path(transcripts_dir)
    results = []
    ifaces = [p for p in sorted(root.iterdir()) if p.is_dir()] if root.is_dir() else []
    if not ifaces:
        raise ConfigError(f"no transcripts under {root}")
    ifaces.sort(key=lambda p: (INTERFACE_ORDER.index(p.name) if p.name in INTERFACE_ORDER else 99, p.name))
    order = {t.task_id: i for i, t in enumerate(tasks)}
    for d in ifaces:
        trs = [Transcript.load(f) for f in d.glob("*.jsonl")]
        for tr in sorted(trs, key=lambda t: order.get(t.task_id, len(order))):
            task = by_id.get(tr.task_id)
            if task is None:
                raise ConfigError(f"transcript for unknown task {tr.task_id!r} in {d}")
            results.append(score_task(task, tr, model or tr.model, pricing))
    return results
