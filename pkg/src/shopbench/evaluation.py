"""Task loading, scoring, aggregation and report rendering."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .catalog import UrlError, normalize_url
from .commerce import StateSnapshot

CATEGORIES = ("specific", "vague", "cheapest", "transactional")
INTERFACE_ORDER = ("html", "rag", "mcp", "nlweb")
RETRIEVED = "retrieved"
NON_RETRIEVED = "non-retrieved"


class EvaluationError(ValueError):
    pass


class TaskFileError(EvaluationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _norm(url: str) -> str:
    try:
        return normalize_url(url)
    except UrlError:
        return url


# --- tasks ----------------------------------------------------------------------------


@dataclass(frozen=True)
class GoldState:
    """Expected end state.  ``carts=None`` means carts are not checked."""

    carts: dict[str, dict[str, int]] | None = None
    orders: dict[str, list[dict[str, int]]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"orders": self.orders}
        if self.carts is not None:
            d["carts"] = self.carts
        return d


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    category: str
    prompt: str
    gold_urls: tuple[str, ...] | None = None
    gold_state: GoldState | None = None
    empty_answer: bool = False

    def __post_init__(self):
        if (self.gold_urls is None) == (self.gold_state is None):
            raise EvaluationError(f"task {self.task_id}: exactly one of gold urls or gold state is required")
        if self.gold_urls is not None and not self.gold_urls and not self.empty_answer:
            raise EvaluationError(f"task {self.task_id}: empty gold url set without empty_answer")

    @property
    def is_transactional(self) -> bool:
        return self.gold_state is not None

    def to_dict(self) -> dict:
        gold = {"urls": list(self.gold_urls)} if self.gold_urls is not None else {"state": self.gold_state.to_dict()}
        d = {"task_id": self.task_id, "category": self.category, "prompt": self.prompt, "gold": gold}
        if self.empty_answer:
            d["empty_answer"] = True
        return d

    @classmethod
    def from_dict(cls, d: Any) -> "TaskSpec":
        if not isinstance(d, dict):
            raise EvaluationError("task record must be an object")
        for key in ("task_id", "category", "prompt", "gold"):
            if key not in d:
                raise EvaluationError(f"missing field {key!r}")
        gold = d["gold"]
        if not isinstance(gold, dict) or len({"urls", "state"} & set(gold)) != 1:
            raise EvaluationError("gold must contain exactly one of 'urls' or 'state'")
        if not isinstance(d["category"], str) or not d["category"]:
            raise EvaluationError("category must be a non-empty string")
        if "urls" in gold:
            urls = gold["urls"]
            if not isinstance(urls, list) or not all(isinstance(u, str) for u in urls):
                raise EvaluationError("gold.urls must be a list of strings")
            return cls(str(d["task_id"]), d["category"], str(d["prompt"]), tuple(urls),
                       empty_answer=bool(d.get("empty_answer", False)))
        st = gold["state"]
        if not isinstance(st, dict):
            raise EvaluationError("gold.state must be an object")
        try:
            carts = None if st.get("carts") is None else \
                {s: {o: int(q) for o, q in c.items()} for s, c in st["carts"].items() if c}
            orders = {s: [{o: int(q) for o, q in order.items()} for order in os_]
                      for s, os_ in (st.get("orders") or {}).items() if os_}
        except (AttributeError, TypeError, ValueError) as exc:
            raise EvaluationError(f"malformed gold state: {exc}") from None
        return cls(str(d["task_id"]), d["category"], str(d["prompt"]), gold_state=GoldState(carts, orders))


def load_tasks(path: str | Path) -> list[TaskSpec]:
    """Read a line-JSON task file.  Categories are not assumed to partition the set."""
    tasks, seen = [], set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                task = TaskSpec.from_dict(json.loads(line))
            except ValueError as exc:
                raise TaskFileError(str(exc), lineno) from None
            if task.task_id in seen:
                raise TaskFileError(f"duplicate task_id {task.task_id!r}", lineno)
            seen.add(task.task_id)
            tasks.append(task)
    return tasks


# --- metrics --------------------------------------------------------------------------


@dataclass(frozen=True)
class Score:
    cr: int
    precision: float
    recall: float
    f1: float


def _prf(inter: int, n_pred: int, n_gold: int) -> tuple[float, float, float]:
    if n_pred == 0 and n_gold == 0:
        return 1.0, 1.0, 1.0
    p = inter / n_pred if n_pred else 0.0
    r = inter / n_gold if n_gold else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def score_retrieval(returned: Iterable[str], gold: Iterable[str]) -> Score:
    """CR and set-based P/R/F1 over normalized URLs; duplicates are dropped."""
    ret = {_norm(u) for u in returned}
    gs = {_norm(u) for u in gold}
    inter = len(ret & gs)
    p, r, f = _prf(inter, len(ret), len(gs))
    return Score(int(ret == gs), p, r, f)


def transaction_elements(snapshot: StateSnapshot, include_carts: bool) -> Counter:
    """Multiset of (kind, shop, offer_id, qty) line items."""
    c: Counter = Counter()
    if include_carts:
        for shop, items in snapshot.carts.items():
            for oid, q in items.items():
                c[("cart", shop, oid, q)] += 1
    for shop, orders in snapshot.orders.items():
        for order in orders:
            for oid, q in order.items():
                c[("order", shop, oid, q)] += 1
    return c


def _order_multiset(orders: Mapping[str, list[dict[str, int]]]) -> dict[str, Counter]:
    return {s: Counter(tuple(sorted(o.items())) for o in os_) for s, os_ in orders.items() if os_}


def score_transaction(snapshot: StateSnapshot, gold: GoldState) -> Score:
    """Target-state completion plus partial credit over line items.

    CR is 1 when every expected order exists exactly (per shop, as a
    multiset of orders), there are no other orders, and, if the gold state
    specifies carts, the carts match exactly.
    """
    gold_snap = StateSnapshot.from_dict({"carts": gold.carts or {}, "orders": gold.orders})
    carts_ok = gold.carts is None or gold_snap.carts == {s: c for s, c in snapshot.carts.items() if c}
    orders_ok = _order_multiset(snapshot.orders) == _order_multiset(gold_snap.orders)
    pred = transaction_elements(snapshot, gold.carts is not None)
    want = transaction_elements(gold_snap, gold.carts is not None)
    inter = sum((pred & want).values())
    p, r, f = _prf(inter, sum(pred.values()), sum(want.values()))
    return Score(int(carts_ok and orders_ok), p, r, f)


# --- cost -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Rate:
    input: float  # $ per million input tokens
    output: float  # $ per million output tokens


DEFAULT_RATES = {
    "gpt-4.1": Rate(2.00, 8.00),
    "gpt-5": Rate(1.25, 10.00),
    "gpt-5-mini": Rate(0.25, 2.00),
    "claude-sonnet-4": Rate(3.00, 15.00),
}
DEFAULT_ALIASES = {
    "gpt-4.1-2025-04-14": "gpt-4.1",
    "gpt-5-2025-08-07": "gpt-5",
    "gpt-5-mini-2025-08-07": "gpt-5-mini",
    "claude-sonnet-4-20250514": "claude-sonnet-4",
    "sonnet-4": "claude-sonnet-4",
}


class PricingTable:
    def __init__(self, rates: Mapping[str, Rate], aliases: Mapping[str, str] | None = None):
        for model, r in rates.items():
            if not (r.input > 0 and r.output > 0):
                raise EvaluationError(f"rates for {model!r} must be positive")
        self.rates = dict(rates)
        self.aliases = dict(aliases or {})

    @classmethod
    def default(cls) -> "PricingTable":
        return cls(DEFAULT_RATES, DEFAULT_ALIASES)

    @classmethod
    def from_file(cls, path: str | Path) -> "PricingTable":
        """JSON map ``{model: {"input": $/MTok, "output": $/MTok}}``, layered over the defaults."""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            rates = {str(m): Rate(float(v["input"]), float(v["output"])) for m, v in data.items()}
        except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
            raise EvaluationError(f"bad pricing file {path}: {exc}") from None
        return cls({**DEFAULT_RATES, **rates}, DEFAULT_ALIASES)

    def rate(self, model: str) -> Rate:
        key = model if model in self.rates else self.aliases.get(model, model)
        if key not in self.rates:
            raise EvaluationError(f"no pricing for model {model!r}")
        return self.rates[key]


def compute_cost(input_tokens: int, output_tokens: int, model: str, pricing: PricingTable | None = None) -> float:
    """Dollar cost; never rounded here."""
    r = (pricing or PricingTable.default()).rate(model)
    return (input_tokens * r.input + output_tokens * r.output) / 1e6


# --- false negatives ----------------------------------------------------------------


def classify_false_negatives(missed: Iterable[str], transcript) -> dict[str, str]:
    """Label each missed gold URL by whether it ever showed up during the run."""
    seen = {_norm(u) for u in transcript.observed_urls}
    for step in transcript.steps:
        seen.update(_norm(u) for u in step.urls)
    return {u: RETRIEVED if _norm(u) in seen else NON_RETRIEVED for u in missed}


# --- per-task results -----------------------------------------------------------------


@dataclass
class TaskResult:
    task_id: str
    interface: str
    model: str
    category: str
    answer: list[str]
    done: bool
    cr: int
    precision: float
    recall: float
    f1: float
    input_tokens: int
    output_tokens: int
    cost: float
    runtime_seconds: float
    fn_classification: dict[str, str] = field(default_factory=dict)
    steps: int = 0
    error: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "TaskResult":
        try:
            return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})
        except TypeError as exc:
            raise EvaluationError(f"malformed result record: {exc}") from None


def score_task(task: TaskSpec, transcript, model: str, pricing: PricingTable | None = None,
               snapshot: StateSnapshot | None = None) -> TaskResult:
    if task.is_transactional:
        if snapshot is None:
            if transcript.final_state is None:
                raise EvaluationError(f"task {task.task_id}: no final state recorded for a transactional task")
            snapshot = StateSnapshot.from_dict(transcript.final_state)
        s = score_transaction(snapshot, task.gold_state)
        fn: dict[str, str] = {}
    else:
        s = score_retrieval(transcript.answer, task.gold_urls)
        returned = {_norm(u) for u in transcript.answer}
        missed = sorted({_norm(u) for u in task.gold_urls} - returned)
        fn = classify_false_negatives(missed, transcript)
    return TaskResult(
        task.task_id, transcript.interface, model, task.category, list(transcript.answer), transcript.done,
        s.cr, s.precision, s.recall, s.f1, transcript.input_tokens, transcript.output_tokens,
        compute_cost(transcript.input_tokens, transcript.output_tokens, model, pricing),
        transcript.wall_seconds, fn, len(transcript.steps), transcript.error)


def save_results(results: Iterable[TaskResult], path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(r.to_dict(), sort_keys=True, ensure_ascii=False) + "\n")


def load_results(path: str | Path) -> list[TaskResult]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                try:
                    out.append(TaskResult.from_dict(json.loads(line)))
                except ValueError as exc:
                    raise EvaluationError(f"{path}:{lineno}: {exc}") from None
    return out


# --- aggregation ----------------------------------------------------------------------


def _mean(values: Iterable[float]) -> float:
    vals = list(values)
    return math.fsum(vals) / len(vals)


@dataclass
class Cell:
    """Micro-averages over the tasks of one interface x model combination."""

    interface: str
    model: str
    n_tasks: int
    cr: float
    f1: float
    precision: float
    recall: float
    input_tokens: float
    output_tokens: float
    tokens: float
    cost: float
    runtime: float
    fn_retrieved: int = 0
    fn_non_retrieved: int = 0


@dataclass
class InterfaceSummary:
    """Unweighted means of the model cells of one interface."""

    interface: str
    n_models: int
    cr: float
    f1: float
    tokens: float
    cost: float
    runtime: float


@dataclass
class ScatterPoint:
    interface: str
    model: str
    cost: float
    f1: float


@dataclass
class Breakdown:
    cells: list[Cell]
    interfaces: list[InterfaceSummary]


@dataclass
class Report:
    overall: Breakdown
    categories: dict[str, Breakdown]
    scatter: list[ScatterPoint]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Report":
        def bd(x):
            return Breakdown([Cell(**c) for c in x["cells"]], [InterfaceSummary(**i) for i in x["interfaces"]])
        return cls(bd(d["overall"]), {k: bd(v) for k, v in d["categories"].items()},
                   [ScatterPoint(**p) for p in d["scatter"]])


def _iface_key(name: str) -> tuple:
    return (INTERFACE_ORDER.index(name), "") if name in INTERFACE_ORDER else (len(INTERFACE_ORDER), name)


def make_cell(interface: str, model: str, rs: list[TaskResult]) -> Cell:
    fns = Counter(v for r in rs for v in r.fn_classification.values())
    return Cell(
        interface, model, len(rs),
        cr=_mean(r.cr for r in rs), f1=_mean(r.f1 for r in rs),
        precision=_mean(r.precision for r in rs), recall=_mean(r.recall for r in rs),
        input_tokens=_mean(r.input_tokens for r in rs), output_tokens=_mean(r.output_tokens for r in rs),
        tokens=_mean(r.input_tokens + r.output_tokens for r in rs),
        cost=_mean(r.cost for r in rs), runtime=_mean(r.runtime_seconds for r in rs),
        fn_retrieved=fns[RETRIEVED], fn_non_retrieved=fns[NON_RETRIEVED])


def macro_average(cells: list[Cell]) -> list[InterfaceSummary]:
    """Per interface, the unweighted mean of its model cells (summed in model order)."""
    by_iface: dict[str, list[Cell]] = {}
    for c in cells:
        by_iface.setdefault(c.interface, []).append(c)
    out = []
    for iface in sorted(by_iface, key=_iface_key):
        cs = sorted(by_iface[iface], key=lambda c: c.model)
        out.append(InterfaceSummary(iface, len(cs), _mean(c.cr for c in cs), _mean(c.f1 for c in cs),
                                    _mean(c.tokens for c in cs), _mean(c.cost for c in cs),
                                    _mean(c.runtime for c in cs)))
    return out


def _breakdown(results: list[TaskResult]) -> Breakdown:
    groups: dict[tuple[str, str], list[TaskResult]] = {}
    for r in results:
        groups.setdefault((r.interface, r.model), []).append(r)
    cells = [make_cell(i, m, groups[(i, m)]) for i, m in sorted(groups, key=lambda k: (_iface_key(k[0]), k[1]))]
    return Breakdown(cells, macro_average(cells))


def aggregate(results: Iterable[TaskResult]) -> Report:
    results = list(results)
    if not results:
        raise EvaluationError("no results to aggregate")
    overall = _breakdown(results)
    cats = sorted({r.category for r in results},
                  key=lambda c: (CATEGORIES.index(c), "") if c in CATEGORIES else (len(CATEGORIES), c))
    categories = {c: _breakdown([r for r in results if r.category == c]) for c in cats}
    scatter = [ScatterPoint(c.interface, c.model, c.cost, c.f1) for c in overall.cells]
    return Report(overall, categories, scatter)


# --- rendering ------------------------------------------------------------------------


REPORT_FORMATS = ("json", "md", "csv")


def _md_cells(cells: list[Cell]) -> list[str]:
    lines = ["| Agent | Model | Tasks | CR | F1 | Tokens | Cost | Runtime |",
             "|---|---|---:|---:|---:|---:|---:|---:|"]
    for c in cells:
        lines.append(f"| {c.interface} | {c.model} | {c.n_tasks} | {c.cr:.2f} | {c.f1:.2f} | {c.tokens:,.0f} "
                     f"| ${c.cost:.4f} | {c.runtime:.1f} s |")
    return lines


def _md_interfaces(rows: list[InterfaceSummary]) -> list[str]:
    lines = ["| Agent | Models | CR | F1 | Tokens | Cost | Runtime |", "|---|---:|---:|---:|---:|---:|---:|"]
    for s in rows:
        lines.append(f"| {s.interface} | {s.n_models} | {s.cr:.2f} | {s.f1:.2f} | {s.tokens:,.0f} | ${s.cost:.4f} "
                     f"| {s.runtime:.1f} s |")
    return lines


def render_markdown(report: Report) -> str:
    out = ["# Benchmark report", "", "## Average performance per agent (macro over models)", ""]
    out += _md_interfaces(report.overall.interfaces)
    out += ["", "## Results per agent and model", ""] + _md_cells(report.overall.cells)
    for cat, bd in report.categories.items():
        out += ["", f"## Task set: {cat}", ""] + _md_cells(bd.cells)
    out += ["", "## Missed items (false negatives)", "",
            "| Agent | Model | Retrieved | Non-retrieved |", "|---|---|---:|---:|"]
    out += [f"| {c.interface} | {c.model} | {c.fn_retrieved} | {c.fn_non_retrieved} |" for c in report.overall.cells]
    return "\n".join(out) + "\n"


def render_scatter_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["interface", "model", "cost", "f1"])
    for p in report.scatter:
        w.writerow([p.interface, p.model, repr(p.cost), repr(p.f1)])
    return buf.getvalue()


def render_report(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "md":
        return render_markdown(report)
    if fmt == "csv":
        return render_scatter_csv(report)
    raise EvaluationError(f"unsupported report format {fmt!r}; choose from {', '.join(REPORT_FORMATS)}")


def parse_report_json(text: str) -> Report:
    return Report.from_dict(json.loads(text))


def write_report(report: Report, out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"json": out / "report.json", "md": out / "report.md", "csv": out / "scatter.csv"}
    for fmt, p in paths.items():
        p.write_text(render_report(report, fmt), encoding="utf-8")
    return paths
