"""Completion-log parsing, answer grading, and run persistence.

File formats (all JSON Lines, UTF-8, "\n" line endings):

  per-completion log   {"model": str, "task": str, "sample_index": int,
                        "correct": bool?, "answer": str?}
  aggregated log       {"model": str, "task": str, "n": int, "c": int}
  gold answers         {"task": str, "answer": str}
  persisted run        manifest object on line 1 ({"kind": "manifest", ...}),
                       aggregated lines after

A file holds either per-completion lines or aggregated lines, never both.
Persisted runs are canonical JSON (sorted keys, no spaces), so re-saving
unchanged data is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .metrics import aggregate
from .records import GoldAnswer, SampleRecord, TaskCounts

FORMAT_NAME = "covertau-run-v1"

# optional sign, digits with optional fraction part (or bare ".5"), optional
# exponent; no fraction bars, no thousands separators
_NUMBER_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_WS_RE = re.compile(r"\s+")


class ParseError(ValueError):
    """Malformed log content, annotated with the offending line number."""


@dataclass(frozen=True)
class ParsedLog:
    """Result of parsing one log file: exactly one of the two forms."""

    records: tuple[SampleRecord, ...] | None
    counts: dict[str, list[TaskCounts]] | None

    @property
    def kind(self) -> str:
        return "samples" if self.records is not None else "aggregated"


@dataclass(frozen=True)
class RunManifest:
    """Header block of a persisted run."""

    run_id: str
    source_digests: dict[str, str]
    record_count: int
    models: tuple[str, ...]
    tasks: tuple[str, ...]
    trials: dict[str, dict[str, int]]
    verdict_source: str

    def to_json_obj(self) -> dict:
        return {
            "kind": "manifest",
            "format": FORMAT_NAME,
            "run_id": self.run_id,
            "source_digests": dict(sorted(self.source_digests.items())),
            "record_count": self.record_count,
            "models": list(self.models),
            "tasks": list(self.tasks),
            "trials": {m: dict(sorted(t.items())) for m, t in sorted(self.trials.items())},
            "verdict_source": self.verdict_source,
        }


def parse_records(lines: Iterable[str], source: str = "<stream>") -> ParsedLog:
    """Parse a line-delimited completion log.

    Accepts either the per-completion schema or the aggregated schema;
    mixing the two in one file is rejected.  Blank lines are ignored.
    Every failure names the 1-based line number.
    """
    records: list[SampleRecord] = []
    counts: dict[str, dict[str, TaskCounts]] = {}
    kind: str | None = None
    saw_any = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        saw_any = True
        obj = _parse_json_line(line, lineno, source)
        line_kind = _classify_line(obj, lineno, source)
        if kind is None:
            kind = line_kind
        elif kind != line_kind:
            raise ParseError(
                f"{source}:{lineno}: mixed schemas in one file "
                f"(saw {kind} lines before, this line is {line_kind})"
            )
        if line_kind == "samples":
            records.append(_sample_from_obj(obj, lineno, source))
        else:
            _add_aggregated(counts, obj, lineno, source)
    if not saw_any:
        raise ParseError(f"{source}: no records found")
    if kind == "samples":
        _check_unique_keys(records, source)
        return ParsedLog(records=tuple(records), counts=None)
    return ParsedLog(
        records=None,
        counts={m: [tc for _, tc in sorted(t.items())] for m, t in sorted(counts.items())},
    )


def _parse_json_line(line: str, lineno: int, source: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{source}:{lineno}: expected an object, got {type(obj).__name__}")
    return obj


def _classify_line(obj: dict, lineno: int, source: str) -> str:
    if obj.get("kind") == "manifest":
        raise ParseError(
            f"{source}:{lineno}: found a run manifest; load this file with load_run()"
        )
    has_agg = "n" in obj or "c" in obj
    has_sample = "sample_index" in obj
    if has_agg and has_sample:
        raise ParseError(f"{source}:{lineno}: line mixes per-completion and aggregated fields")
    if not has_agg and not has_sample:
        raise ParseError(f"{source}:{lineno}: line is neither per-completion (sample_index) nor aggregated (n, c)")
    return "aggregated" if has_agg else "samples"


def _require_str(obj: dict, key: str, lineno: int, source: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise ParseError(f"{source}:{lineno}: field {key!r} must be a nonempty string")
    return value


def _require_int(obj: dict, key: str, lineno: int, source: str) -> int:
    value = obj.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f"{source}:{lineno}: field {key!r} must be an integer")
    return value


def _sample_from_obj(obj: dict, lineno: int, source: str) -> SampleRecord:
    model = _require_str(obj, "model", lineno, source)
    task = _require_str(obj, "task", lineno, source)
    index = _require_int(obj, "sample_index", lineno, source)
    if index < 0:
        raise ParseError(f"{source}:{lineno}: sample_index must be >= 0, got {index}")
    correct = obj.get("correct")
    if correct is not None and not isinstance(correct, bool):
        raise ParseError(f"{source}:{lineno}: field 'correct' must be a boolean when present")
    answer = obj.get("answer")
    if answer is not None and not isinstance(answer, str):
        raise ParseError(f"{source}:{lineno}: field 'answer' must be a string when present")
    if correct is None and answer is None:
        raise ParseError(
            f"{source}:{lineno}: record has neither a 'correct' verdict nor an 'answer' to grade"
        )
    return SampleRecord(model=model, task=task, sample_index=index, answer=answer, correct=correct)


def _add_aggregated(
    counts: dict[str, dict[str, TaskCounts]], obj: dict, lineno: int, source: str
) -> None:
    model = _require_str(obj, "model", lineno, source)
    task = _require_str(obj, "task", lineno, source)
    n = _require_int(obj, "n", lineno, source)
    c = _require_int(obj, "c", lineno, source)
    try:
        tc = TaskCounts(task=task, n=n, c=c)
    except ValueError as exc:
        raise ParseError(f"{source}:{lineno}: {exc}") from exc
    per_model = counts.setdefault(model, {})
    if task in per_model:
        raise ParseError(f"{source}:{lineno}: duplicate aggregated line for (model={model!r}, task={task!r})")
    per_model[task] = tc


def _check_unique_keys(records: Sequence[SampleRecord], source: str) -> None:
    seen: set[tuple[str, str, int]] = set()
    for rec in records:
        if rec.key in seen:
            raise ParseError(
                f"{source}: duplicate record key (model={rec.model!r}, "
                f"task={rec.task!r}, sample_index={rec.sample_index})"
            )
        seen.add(rec.key)


def parse_gold(lines: Iterable[str], source: str = "<gold>") -> dict[str, str]:
    """Parse a gold-answer file into {task: answer}."""
    gold: dict[str, str] = {}
    saw_any = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        saw_any = True
        obj = _parse_json_line(line, lineno, source)
        entry = GoldAnswer(
            task=_require_str(obj, "task", lineno, source),
            answer=_require_str(obj, "answer", lineno, source),
        )
        if entry.task in gold:
            raise ParseError(f"{source}:{lineno}: duplicate gold answer for task {entry.task!r}")
        gold[entry.task] = entry.answer
    if not saw_any:
        raise ParseError(f"{source}: no gold answers found")
    return gold


def normalize_answer(text: str) -> str:
    """Trim, casefold, and collapse internal whitespace."""
    return _WS_RE.sub(" ", text.strip()).casefold()


def parse_number(text: str) -> float | None:
    """Parse under the documented number grammar, else None.

    Grammar: optional sign, decimal digits, optional fraction part, optional
    exponent.  No fraction bars ("1/3") and no thousands separators; those
    compare as plain text.
    """
    if _NUMBER_RE.fullmatch(text):
        return float(text)
    return None


def canonical_answer(text: str) -> str:
    """Normalization used for mode counting: numeric strings collapse to a
    canonical float rendering so "0.5" and ".5" pool into one answer."""
    norm = normalize_answer(text)
    num = parse_number(norm)
    return repr(num) if num is not None else norm


def grade(answer: str, gold: str) -> bool:
    """Normalized equality of an answer against gold.

    Both sides are trimmed, casefolded, and whitespace-collapsed; if both
    parse under the number grammar they compare numerically with relative
    tolerance 1e-9 (absolute 1e-12 near zero).  Empty gold is rejected; an
    empty answer is simply wrong.
    """
    gold_norm = normalize_answer(gold)
    if not gold_norm:
        raise ValueError("gold answer is empty")
    answer_norm = normalize_answer(answer)
    if not answer_norm:
        return False
    a_num = parse_number(answer_norm)
    g_num = parse_number(gold_norm)
    if a_num is not None and g_num is not None:
        return math.isclose(a_num, g_num, rel_tol=1e-9, abs_tol=1e-12)
    return answer_norm == gold_norm


def apply_grading(
    records: Sequence[SampleRecord], gold: Mapping[str, str] | None
) -> tuple[list[SampleRecord], str]:
    """Resolve verdicts: explicit correct flags win, grading fills the gaps.

    Returns the resolved records plus the verdict source actually used
    ("flags", "flags+gold").  A record without a flag needs both its answer
    and a gold entry, otherwise it is rejected by name.
    """
    resolved: list[SampleRecord] = []
    used_gold = False
    for rec in records:
        if rec.correct is not None:
            resolved.append(rec)
            continue
        if gold is None or rec.task not in gold:
            raise ValueError(
                f"record (model={rec.model!r}, task={rec.task!r}, sample_index={rec.sample_index}) "
                "has no verdict and no gold answer to grade against"
            )
        if rec.answer is None:
            raise ValueError(
                f"record (model={rec.model!r}, task={rec.task!r}, sample_index={rec.sample_index}) "
                "has no verdict and no answer text"
            )
        used_gold = True
        resolved.append(
            SampleRecord(
                model=rec.model,
                task=rec.task,
                sample_index=rec.sample_index,
                answer=rec.answer,
                correct=grade(rec.answer, gold[rec.task]),
            )
        )
    return resolved, ("flags+gold" if used_gold else "flags")


def counts_from_log(
    parsed: ParsedLog, gold: Mapping[str, str] | None = None
) -> tuple[dict[str, list[TaskCounts]], str]:
    """Aggregate a parsed log into per-model counts plus the verdict source."""
    if parsed.counts is not None:
        return parsed.counts, "aggregated"
    resolved, verdict_source = apply_grading(parsed.records or (), gold)
    return aggregate(resolved), verdict_source


def build_manifest(
    counts: Mapping[str, Sequence[TaskCounts]],
    source_digests: Mapping[str, str],
    verdict_source: str,
) -> RunManifest:
    """Manifest for aggregated counts; run_id is a digest of the canonical
    body, so identical data yields an identical manifest."""
    if not counts:
        raise ValueError("no counts to persist")
    body = _render_body(counts)
    models = tuple(sorted(counts))
    tasks = tuple(sorted({tc.task for tcs in counts.values() for tc in tcs}))
    trials = {m: {tc.task: tc.n for tc in tcs} for m, tcs in counts.items()}
    record_count = sum(tc.n for tcs in counts.values() for tc in tcs)
    return RunManifest(
        run_id=hashlib.sha256(body.encode("utf-8")).hexdigest(),
        source_digests=dict(source_digests),
        record_count=record_count,
        models=models,
        tasks=tasks,
        trials=trials,
        verdict_source=verdict_source,
    )


def _render_body(counts: Mapping[str, Sequence[TaskCounts]]) -> str:
    lines = []
    for model in sorted(counts):
        for tc in sorted(counts[model], key=lambda t: t.task):
            obj = {"c": tc.c, "model": model, "n": tc.n, "task": tc.task}
            lines.append(json.dumps(obj, sort_keys=True, separators=(",", ":")))
    return "".join(line + "\n" for line in lines)


def _check_consistent(manifest: RunManifest, counts: Mapping[str, Sequence[TaskCounts]]) -> None:
    record_count = sum(tc.n for tcs in counts.values() for tc in tcs)
    if manifest.record_count != record_count:
        raise ValueError(
            f"manifest record_count={manifest.record_count} does not match counts total {record_count}"
        )
    if tuple(sorted(counts)) != manifest.models:
        raise ValueError("manifest model list does not match counts")
    tasks = tuple(sorted({tc.task for tcs in counts.values() for tc in tcs}))
    if tasks != manifest.tasks:
        raise ValueError("manifest task list does not match counts")
    trials = {m: {tc.task: tc.n for tc in tcs} for m, tcs in counts.items()}
    if trials != manifest.trials:
        raise ValueError("manifest per-(model, task) trial counts do not match counts")


def persist_run(
    manifest: RunManifest, counts: Mapping[str, Sequence[TaskCounts]], path: str | Path
) -> Path:
    """Write a self-contained aggregated run file (manifest line + body).

    The write is atomic (temp file + rename) and canonical, so a fixed
    input always produces identical bytes.
    """
    _check_consistent(manifest, counts)
    path = Path(path)
    header = json.dumps(manifest.to_json_obj(), sort_keys=True, separators=(",", ":"))
    payload = header + "\n" + _render_body(counts)
    write_atomic(path, payload)
    return path


def write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def load_run(path: str | Path) -> tuple[RunManifest, dict[str, list[TaskCounts]]]:
    """Load a persisted run, validating the manifest against the body."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ParseError(f"{path}: empty run file")
    head = _parse_json_line(lines[0], 1, str(path))
    if head.get("kind") != "manifest":
        raise ParseError(f"{path}:1: missing manifest header; is this a raw log?")
    if head.get("format") != FORMAT_NAME:
        raise ParseError(f"{path}:1: unsupported run format {head.get('format')!r}")
    manifest = RunManifest(
        run_id=str(head["run_id"]),
        source_digests={str(k): str(v) for k, v in head.get("source_digests", {}).items()},
        record_count=int(head["record_count"]),
        models=tuple(head["models"]),
        tasks=tuple(head["tasks"]),
        trials={m: {t: int(n) for t, n in ts.items()} for m, ts in head["trials"].items()},
        verdict_source=str(head["verdict_source"]),
    )
    counts: dict[str, dict[str, TaskCounts]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        obj = _parse_json_line(line, lineno, str(path))
        _add_aggregated(counts, obj, lineno, str(path))
    counts_lists = {m: [tc for _, tc in sorted(t.items())] for m, t in sorted(counts.items())}
    if not counts_lists:
        raise ParseError(f"{path}: run file has no aggregated lines")
    _check_consistent(manifest, counts_lists)
    return manifest, counts_lists


def digest_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_log(path: str | Path) -> ParsedLog:
    """Parse a raw log from disk (per-completion or aggregated form)."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return parse_records(fh, source=str(path))


def is_run_file(path: str | Path) -> bool:
    """Sniff whether a file starts with a run manifest."""
    try:
        with Path(path).open(encoding="utf-8") as fh:
            first = fh.readline().strip()
        return bool(first) and json.loads(first).get("kind") == "manifest"
    except (OSError, json.JSONDecodeError, AttributeError):
        return False
