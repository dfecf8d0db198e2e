"""Run transcripts, stored as line-JSON: a header, one line per step, a totals footer."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

DIGEST_CHARS = 400


def digest(text: str, limit: int = DIGEST_CHARS) -> str:
    text = " ".join(text.split())
    return text if len(text) <= limit else text[:limit] + " ..."


@dataclass
class Step:
    index: int
    observation: str
    action: dict
    result: str
    input_tokens: int = 0
    output_tokens: int = 0
    error: str | None = None
    urls: list[str] = field(default_factory=list)  # offer URLs surfaced by this step's result

    def to_dict(self) -> dict:
        return {"record": "step", "index": self.index, "observation": self.observation, "action": self.action,
                "result": self.result, "input_tokens": self.input_tokens, "output_tokens": self.output_tokens,
                "error": self.error, "urls": self.urls}


@dataclass
class Transcript:
    task_id: str
    interface: str
    model: str
    steps: list[Step] = field(default_factory=list)
    observed_urls: list[str] = field(default_factory=list)
    answer: list[str] = field(default_factory=list)
    done: bool = False
    error: str | None = None
    wall_seconds: float = 0.0
    final_state: dict | None = None

    @property
    def input_tokens(self) -> int:
        return sum(s.input_tokens for s in self.steps)

    @property
    def output_tokens(self) -> int:
        return sum(s.output_tokens for s in self.steps)

    def observe(self, urls) -> None:
        seen = set(self.observed_urls)
        for u in urls:
            if u not in seen:
                seen.add(u)
                self.observed_urls.append(u)

    def totals(self) -> dict:
        return {"record": "totals", "input_tokens": self.input_tokens, "output_tokens": self.output_tokens,
                "wall_seconds": self.wall_seconds, "answer": self.answer, "done": self.done,
                "error": self.error, "observed_urls": self.observed_urls, "final_state": self.final_state}

    def to_lines(self, include_time: bool = True) -> list[dict]:
        totals = self.totals()
        if not include_time:
            totals.pop("wall_seconds")
        return ([{"record": "header", "task_id": self.task_id, "interface": self.interface, "model": self.model}]
                + [s.to_dict() for s in self.steps] + [totals])

    def dumps(self, include_time: bool = True) -> str:
        return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n"
                       for r in self.to_lines(include_time))

    def save(self, path: str | Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str) -> "Transcript":
        records: list[dict[str, Any]] = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not records or records[0].get("record") != "header" or records[-1].get("record") != "totals":
            raise ValueError("transcript must start with a header and end with a totals record")
        h, t = records[0], records[-1]
        steps = [Step(**{k: v for k, v in r.items() if k != "record"}) for r in records[1:-1]]
        tr = cls(h["task_id"], h["interface"], h["model"], steps, list(t.get("observed_urls", [])),
                 list(t.get("answer", [])), bool(t.get("done")), t.get("error"),
                 float(t.get("wall_seconds", 0.0)), t.get("final_state"))
        if (t.get("input_tokens"), t.get("output_tokens")) != (tr.input_tokens, tr.output_tokens):
            raise ValueError("transcript totals do not match the step sums")
        return tr

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        return cls.loads(Path(path).read_text(encoding="utf-8"))
