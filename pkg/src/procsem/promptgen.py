"""Prompt and fine-tuning text rendering for the five tasks.

Wording lives in template files (``templates/<task>.desc.txt`` for the task
description, ``templates/<task>.block.txt`` for one instance block); the
code fills the ``{activities}``, ``{instance}`` and ``{answer_key}``
placeholders. Answer strings are exactly what the scoring parsers accept,
so every emitted gold answer round-trips through evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .core import Activity, Trace
from .taskgen import (
    GENERATION_TASKS,
    LABEL_ANOMALOUS,
    Task,
    TaskRecord,
    model_rng,
)
from .tree_dsl import render_dfg_edges

ANSWER_KEYS = {
    Task.TSAD: "Anomalous:",
    Task.ASAD: "Anomalous:",
    Task.SNAP: "Next activity:",
    Task.SDFD: "Directly-follows pairs:",
    Task.SPTD: "Process Tree:",
}

DEFAULT_SHOTS_CLASSIFICATION = 6
DEFAULT_SHOTS_GENERATION = 5


class PoolExhaustedError(ValueError):
    """Raised when the shot pool cannot satisfy the sampling constraints."""


@dataclass(frozen=True)
class PromptTemplates:
    description: str
    block: str


@dataclass(frozen=True)
class PromptBundle:
    record_id: str
    task: Task
    prompt_text: str
    shot_record_ids: tuple[str, ...]


@dataclass(frozen=True)
class FtExample:
    record_id: str
    task: Task
    input_text: str
    target_text: str


def load_templates(task: Task, directory: str | Path | None = None) -> PromptTemplates:
    """Packaged defaults, or per-task files from an override directory."""
    if directory is not None:
        base = Path(directory)
        return PromptTemplates(
            description=(base / f"{task.value}.desc.txt").read_text("utf-8").strip(),
            block=(base / f"{task.value}.block.txt").read_text("utf-8").strip(),
        )
    package = resources.files(__package__) / "templates"
    return PromptTemplates(
        description=(package / f"{task.value}.desc.txt").read_text("utf-8").strip(),
        block=(package / f"{task.value}.block.txt").read_text("utf-8").strip(),
    )


def default_shots(task: Task) -> int:
    if task in GENERATION_TASKS:
        return DEFAULT_SHOTS_GENERATION
    return DEFAULT_SHOTS_CLASSIFICATION


def activities_text(activity_set: tuple[Activity, ...]) -> str:
    return "{" + ", ".join(sorted(activity_set)) + "}"


def trace_text(trace: Trace) -> str:
    return "[" + ", ".join(trace) + "]"


def instance_text(record: TaskRecord) -> str:
    if record.task is Task.TSAD:
        assert record.trace is not None
        return trace_text(record.trace)
    if record.task is Task.ASAD:
        assert record.pair is not None
        first, second = record.pair
        return f"1. Activity: {first}\n2. Activity: {second}"
    if record.task is Task.SNAP:
        assert record.prefix is not None
        return trace_text(record.prefix)
    return ""


def answer_text(record: TaskRecord) -> str:
    """The gold answer exactly as the scoring parser for the task reads it."""
    if record.task in (Task.TSAD, Task.ASAD):
        return "true" if record.label == LABEL_ANOMALOUS else "false"
    if record.task is Task.SNAP:
        assert record.next_activity is not None
        return record.next_activity
    if record.task is Task.SDFD:
        assert record.edges is not None
        return render_dfg_edges(record.edges)
    assert record.tree_text is not None
    return record.tree_text


def _fill(block: str, record: TaskRecord, answer: str | None) -> str:
    key = ANSWER_KEYS[record.task]
    if answer is None:
        answer_line = key
    elif "\n" in answer:
        answer_line = f"{key}\n{answer}"
    elif answer:
        answer_line = f"{key} {answer}"
    else:
        answer_line = key
    text = block.replace("{activities}", activities_text(record.activity_set))
    text = text.replace("{instance}", instance_text(record))
    return text.replace("{answer_key}", answer_line)


def _sample_binary_shots(
    query: TaskRecord, pool: list[TaskRecord], shots: int, rng
) -> list[TaskRecord]:
    valid = [r for r in pool if r.label != LABEL_ANOMALOUS and r.record_id != query.record_id]
    anomalous = [r for r in pool if r.label == LABEL_ANOMALOUS and r.record_id != query.record_id]
    need_valid = (shots + 1) // 2
    need_anomalous = shots // 2
    if len(valid) < need_valid or len(anomalous) < need_anomalous:
        raise PoolExhaustedError(
            f"need {need_valid} valid and {need_anomalous} anomalous shots, "
            f"pool has {len(valid)} and {len(anomalous)}"
        )
    picked_valid = rng.sample(valid, need_valid)
    picked_anomalous = rng.sample(anomalous, need_anomalous)
    interleaved: list[TaskRecord] = []
    for i in range(shots):
        side = picked_valid if i % 2 == 0 else picked_anomalous
        interleaved.append(side[i // 2])
    return interleaved


def _sample_model_shots(
    query: TaskRecord, pool: list[TaskRecord], shots: int, rng
) -> list[TaskRecord]:
    by_model: dict[str, list[TaskRecord]] = {}
    for r in pool:
        if r.record_id != query.record_id:
            by_model.setdefault(r.model_id, []).append(r)
    if len(by_model) < shots:
        raise PoolExhaustedError(
            f"need records from {shots} distinct models, pool has {len(by_model)}"
        )
    chosen_models = rng.sample(sorted(by_model), shots)
    return [rng.choice(by_model[m]) for m in chosen_models]


def render_icl(
    task: Task,
    query: TaskRecord,
    train_pool: list[TaskRecord],
    shots: int,
    seed: int,
    templates: PromptTemplates | None = None,
) -> PromptBundle:
    """Task description, `shots` solved examples, then the open query.

    Binary tasks get an evenly balanced, interleaved shot sequence starting
    with a valid example; next-activity and generation shots come from
    `shots` distinct models. The query record never appears as a shot.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    tpl = templates if templates is not None else load_templates(task)
    rng = model_rng(seed, "icl", task.value, query.record_id)
    pool = sorted(train_pool, key=lambda r: r.record_id)
    if task in (Task.TSAD, Task.ASAD):
        shot_records = _sample_binary_shots(query, pool, shots, rng)
    else:
        shot_records = _sample_model_shots(query, pool, shots, rng)
    blocks = [_fill(tpl.block, r, answer_text(r)) for r in shot_records]
    blocks.append(_fill(tpl.block, query, None))
    prompt = "\n\n".join([tpl.description, *blocks])
    return PromptBundle(
        record_id=query.record_id,
        task=task,
        prompt_text=prompt,
        shot_record_ids=tuple(r.record_id for r in shot_records),
    )


def render_ft(
    task: Task,
    record: TaskRecord,
    templates: PromptTemplates | None = None,
) -> FtExample:
    """One fine-tuning pair: instance with an open answer key, gold target.

    Generation tasks carry the task description in the input; classification
    and next-activity inputs are the bare instance block.
    """
    tpl = templates if templates is not None else load_templates(task)
    block = _fill(tpl.block, record, None)
    if task in GENERATION_TASKS:
        input_text = f"{tpl.description}\n\n{block}"
    else:
        input_text = block
    return FtExample(
        record_id=record.record_id,
        task=task,
        input_text=input_text,
        target_text=answer_text(record),
    )
