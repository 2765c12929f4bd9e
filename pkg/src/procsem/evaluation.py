"""Scoring of prediction files against gold records, plus random baselines.

Classification tasks are scored with macro F1 (the unweighted mean of
per-class F1 values). Generation tasks are scored with footprint-based
fitness: both the gold and the predicted behavior are reduced to footprints
over the gold activity set and the score is the fraction of ordered activity
pairs on which the two footprints agree.

Unparseable predictions score 0 and are counted; they are never excluded.
Matching is case-insensitive with whitespace folding by default, with a
case-sensitive mode available.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from enum import Enum
from statistics import fmean

from .core import Activity, Dfg, Footprint, Relation
from .semantics import (
    DEFAULT_MAX_SEQUENCES,
    LanguageTooLargeError,
    dfg_of_model,
    footprint,
    playout,
)
from .taskgen import (
    CLASSIFICATION_TASKS,
    LABEL_ANOMALOUS,
    LABEL_VALID,
    Task,
    TaskRecord,
    model_rng,
)
from .tree_dsl import TreeSyntaxError, parse_dfg_edges, parse_tree, render_dfg_edges

BINARY_CLASSES = (LABEL_VALID, LABEL_ANOMALOUS)


class MatchingMode(str, Enum):
    CASE_SENSITIVE = "case_sensitive"
    CASE_INSENSITIVE = "case_insensitive"


class LengthMismatchError(ValueError):
    """Raised when gold and prediction lists differ in length."""


class UnknownRecordError(ValueError):
    """Raised when a prediction references no record in the dataset."""


@dataclass(frozen=True)
class Prediction:
    record_id: str
    raw_text: str


_WS_RUN = re.compile(r"\s+")


def fold_label(label: str, mode: MatchingMode) -> str:
    """Comparison key for a label under the given matching mode."""
    collapsed = _WS_RUN.sub(" ", label).strip()
    if mode is MatchingMode.CASE_SENSITIVE:
        return collapsed
    return collapsed.casefold()


_BINARY_ALIASES = {
    "valid": LABEL_VALID,
    "false": LABEL_VALID,
    "anomalous": LABEL_ANOMALOUS,
    "true": LABEL_ANOMALOUS,
}


def parse_binary_label(text: str) -> str | None:
    """Valid/Anomalous, with true/false accepted as aliases; None otherwise."""
    return _BINARY_ALIASES.get(text.strip().casefold())


# ---------------------------------------------------------------------------
# Macro F1


def per_class_f1(
    golds: list[str], preds: list[str | None], class_universe: list[str]
) -> dict[str, float]:
    if len(golds) != len(preds):
        raise LengthMismatchError(f"{len(golds)} golds vs {len(preds)} predictions")
    scores: dict[str, float] = {}
    for cls in class_universe:
        tp = sum(1 for g, p in zip(golds, preds) if g == cls and p == cls)
        fp = sum(1 for g, p in zip(golds, preds) if g != cls and p == cls)
        fn = sum(1 for g, p in zip(golds, preds) if g == cls and p != cls)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall == 0:
            scores[cls] = 0.0
        else:
            scores[cls] = 2 * precision * recall / (precision + recall)
    return scores


def macro_f1(
    golds: list[str],
    preds: list[str | None],
    class_universe: list[str] | None = None,
) -> float:
    """Unweighted mean of per-class F1 over the class universe.

    The default universe is the union of gold and (non-None) predicted
    labels; predictions of classes with no gold occurrence drag the mean
    down with a 0 entry.
    """
    if class_universe is None:
        universe = sorted({*golds, *(p for p in preds if p is not None)})
    else:
        universe = list(class_universe)
    scores = per_class_f1(golds, preds, universe)
    return fmean(scores.values()) if scores else 0.0


# ---------------------------------------------------------------------------
# Footprint fitness


def footprint_fitness(
    gold_fp: Footprint, pred_fp: Footprint, include_diagonal: bool = True
) -> float:
    """Fraction of ordered gold-activity pairs with equal relations.

    Pairs absent from the predicted footprint count as NONE; predicted
    activities outside the gold set are expected to be projected away by
    the caller.
    """
    activities = sorted(gold_fp.activities)
    matches = 0
    total = 0
    for x in activities:
        for y in activities:
            if x == y and not include_diagonal:
                continue
            total += 1
            pred_rel = pred_fp.relations.get((x, y), Relation.NONE)
            if gold_fp.relations[(x, y)] is pred_rel:
                matches += 1
    return matches / total if total else 1.0


@dataclass(frozen=True)
class RecordScore:
    record_id: str
    fitness: float
    parse_failure: bool = False
    hallucinated: tuple[Activity, ...] = ()
    skipped_lines: int = 0


def _project_edges(
    raw_edges: tuple[tuple[str, str], ...],
    gold_activities: tuple[Activity, ...],
    mode: MatchingMode,
) -> tuple[frozenset[tuple[Activity, Activity]], tuple[Activity, ...]]:
    """Map predicted labels onto gold activities; drop what cannot map."""
    fold_map: dict[str, Activity] = {}
    for a in sorted(gold_activities):
        fold_map.setdefault(fold_label(a, mode), a)
    edges: set[tuple[Activity, Activity]] = set()
    hallucinated: set[str] = set()
    for x, y in raw_edges:
        gx = fold_map.get(fold_label(x, mode))
        gy = fold_map.get(fold_label(y, mode))
        if gx is None:
            hallucinated.add(x)
        if gy is None:
            hallucinated.add(y)
        if gx is not None and gy is not None:
            edges.add((gx, gy))
    return frozenset(edges), tuple(sorted(hallucinated))


def _gold_footprint(record: TaskRecord, max_sequences: int) -> Footprint:
    activities = frozenset(record.activity_set)
    if record.task is Task.SDFD:
        assert record.edges is not None
        return footprint(Dfg(activities=activities, edges=frozenset(record.edges)))
    assert record.tree_text is not None
    model = playout(parse_tree(record.tree_text), max_sequences)
    return footprint(dfg_of_model(model))


def score_sdfd(
    record: TaskRecord,
    pred_text: str,
    mode: MatchingMode = MatchingMode.CASE_INSENSITIVE,
    include_diagonal: bool = True,
    max_sequences: int = DEFAULT_MAX_SEQUENCES,
) -> RecordScore:
    """Footprint fitness of predicted edge lines against a gold DFG record.

    Non-empty text yielding no edges at all is a parse failure and scores 0;
    empty text is an empty (edge-free) prediction and is scored normally.
    """
    parsed = parse_dfg_edges(pred_text, strict=False)
    if not parsed.edges and pred_text.strip():
        return RecordScore(
            record_id=record.record_id,
            fitness=0.0,
            parse_failure=True,
            skipped_lines=len(parsed.skipped),
        )
    edges, hallucinated = _project_edges(parsed.edges, record.activity_set, mode)
    pred_fp = footprint(
        Dfg(activities=frozenset(record.activity_set), edges=edges)
    )
    fitness = footprint_fitness(
        _gold_footprint(record, max_sequences), pred_fp, include_diagonal
    )
    return RecordScore(
        record_id=record.record_id,
        fitness=fitness,
        hallucinated=hallucinated,
        skipped_lines=len(parsed.skipped),
    )


def score_sptd(
    record: TaskRecord,
    pred_text: str,
    mode: MatchingMode = MatchingMode.CASE_INSENSITIVE,
    include_diagonal: bool = True,
    max_sequences: int = DEFAULT_MAX_SEQUENCES,
) -> RecordScore:
    """Footprint fitness of a predicted tree against a gold tree record.

    The prediction is parsed and played out; its directly-follows behavior
    is compared footprint-to-footprint with the gold tree's. Any parse or
    play-out failure scores 0.
    """
    try:
        pred_model = playout(parse_tree(pred_text), max_sequences)
    except (TreeSyntaxError, LanguageTooLargeError):
        return RecordScore(
            record_id=record.record_id, fitness=0.0, parse_failure=True
        )
    pred_dfg = dfg_of_model(pred_model)
    edges, _ = _project_edges(tuple(pred_dfg.edges), record.activity_set, mode)
    gold_keys = {fold_label(a, mode) for a in record.activity_set}
    hallucinated = tuple(
        sorted(a for a in pred_dfg.activities if fold_label(a, mode) not in gold_keys)
    )
    pred_fp = footprint(Dfg(activities=frozenset(record.activity_set), edges=edges))
    fitness = footprint_fitness(
        _gold_footprint(record, max_sequences), pred_fp, include_diagonal
    )
    return RecordScore(
        record_id=record.record_id,
        fitness=fitness,
        hallucinated=hallucinated,
    )


# ---------------------------------------------------------------------------
# Dataset-level scoring


@dataclass(frozen=True)
class ScoreReport:
    task: Task
    n_records: int
    metric_name: str
    value: float
    matching_mode: MatchingMode
    n_parse_failures: int
    n_missing_predictions: int
    n_hallucinated_activities: int = 0
    per_class_f1: dict[str, float] = field(default_factory=dict, hash=False)
    per_record_fitness: dict[str, float] = field(default_factory=dict, hash=False)


def _classification_golds_preds(
    records: list[TaskRecord],
    by_id: dict[str, Prediction],
    mode: MatchingMode,
) -> tuple[list[str], list[str | None], int, int]:
    golds: list[str] = []
    preds: list[str | None] = []
    n_parse_failures = 0
    n_missing = 0
    for record in records:
        prediction = by_id.get(record.record_id)
        if record.task in CLASSIFICATION_TASKS:
            golds.append(record.label or "")
            if prediction is None:
                n_missing += 1
                n_parse_failures += 1
                preds.append(None)
                continue
            label = parse_binary_label(prediction.raw_text)
            if label is None:
                n_parse_failures += 1
            preds.append(label)
        else:
            assert record.next_activity is not None
            golds.append(fold_label(record.next_activity, mode))
            if prediction is None:
                n_missing += 1
                n_parse_failures += 1
                preds.append(None)
                continue
            text = prediction.raw_text.strip()
            if not text:
                n_parse_failures += 1
                preds.append(None)
                continue
            preds.append(fold_label(text, mode))
    return golds, preds, n_parse_failures, n_missing


def score_dataset(
    records: list[TaskRecord],
    predictions: list[Prediction],
    mode: MatchingMode = MatchingMode.CASE_INSENSITIVE,
    include_diagonal: bool = True,
    max_sequences: int = DEFAULT_MAX_SEQUENCES,
) -> ScoreReport:
    """Score one task's records against a prediction list.

    Records without a prediction count as parse failures (macro F1 treats
    them as unclassified; fitness tasks score them 0). Predictions for
    unknown record ids are rejected.
    """
    if not records:
        raise ValueError("no records to score")
    tasks = {r.task for r in records}
    if len(tasks) != 1:
        raise ValueError(f"records span multiple tasks: {sorted(t.value for t in tasks)}")
    task = tasks.pop()
    known = {r.record_id for r in records}
    by_id: dict[str, Prediction] = {}
    for p in predictions:
        if p.record_id not in known:
            raise UnknownRecordError(f"prediction for unknown record {p.record_id!r}")
        by_id[p.record_id] = p

    if task in CLASSIFICATION_TASKS or task is Task.SNAP:
        golds, preds, n_parse_failures, n_missing = _classification_golds_preds(
            records, by_id, mode
        )
        if task in CLASSIFICATION_TASKS:
            universe = list(BINARY_CLASSES)
        else:
            universe = sorted({*golds, *(p for p in preds if p is not None)})
        class_scores = per_class_f1(golds, preds, universe)
        return ScoreReport(
            task=task,
            n_records=len(records),
            metric_name="macro_f1",
            value=fmean(class_scores.values()) if class_scores else 0.0,
            matching_mode=mode,
            n_parse_failures=n_parse_failures,
            n_missing_predictions=n_missing,
            per_class_f1=class_scores,
        )

    scorer = score_sdfd if task is Task.SDFD else score_sptd
    record_scores: list[RecordScore] = []
    n_missing = 0
    for record in records:
        prediction = by_id.get(record.record_id)
        if prediction is None:
            n_missing += 1
            record_scores.append(
                RecordScore(record_id=record.record_id, fitness=0.0, parse_failure=True)
            )
            continue
        record_scores.append(
            scorer(record, prediction.raw_text, mode, include_diagonal, max_sequences)
        )
    return ScoreReport(
        task=task,
        n_records=len(records),
        metric_name="mean_footprint_fitness",
        value=fmean(s.fitness for s in record_scores),
        matching_mode=mode,
        n_parse_failures=sum(1 for s in record_scores if s.parse_failure),
        n_missing_predictions=n_missing,
        n_hallucinated_activities=sum(len(s.hallucinated) for s in record_scores),
        per_record_fitness={s.record_id: s.fitness for s in record_scores},
    )


# ---------------------------------------------------------------------------
# Random baselines


def random_classification_baseline(
    records: list[TaskRecord], seed: int
) -> list[Prediction]:
    """Uniform class draw per record; next-activity draws from the record's
    own activity set."""
    predictions: list[Prediction] = []
    for record in records:
        rng = model_rng(seed, "baseline", record.task.value, record.record_id)
        if record.task in CLASSIFICATION_TASKS:
            text = rng.choice(BINARY_CLASSES)
        elif record.task is Task.SNAP:
            text = rng.choice(sorted(record.activity_set))
        else:
            raise ValueError(f"no classification baseline for task {record.task.value}")
        predictions.append(Prediction(record_id=record.record_id, raw_text=text))
    return predictions


_OFFDIAG_RELATIONS = (
    Relation.FORWARD,
    Relation.BACKWARD,
    Relation.PARALLEL,
    Relation.NONE,
)
_DIAG_RELATIONS = (Relation.PARALLEL, Relation.NONE)

_MIRROR = {
    Relation.FORWARD: Relation.BACKWARD,
    Relation.BACKWARD: Relation.FORWARD,
    Relation.PARALLEL: Relation.PARALLEL,
    Relation.NONE: Relation.NONE,
}


def random_footprint(activity_set: frozenset[Activity] | tuple[Activity, ...], rng: random.Random) -> Footprint:
    """Uniform relation per unordered pair (mirrored), uniform diagonal."""
    activities = sorted(activity_set)
    relations: dict[tuple[Activity, Activity], Relation] = {}
    for i, x in enumerate(activities):
        relations[(x, x)] = rng.choice(_DIAG_RELATIONS)
        for y in activities[i + 1 :]:
            rel = rng.choice(_OFFDIAG_RELATIONS)
            relations[(x, y)] = rel
            relations[(y, x)] = _MIRROR[rel]
    return Footprint(activities=frozenset(activities), relations=relations)


def random_footprint_baseline(
    activity_set: frozenset[Activity] | tuple[Activity, ...], seed: int
) -> Footprint:
    return random_footprint(activity_set, random.Random(seed))


def footprint_to_dfg(fp: Footprint) -> Dfg:
    """Edge set whose footprint is exactly `fp` (footprint∘this = identity)."""
    edges = {
        (x, y)
        for (x, y), rel in fp.relations.items()
        if rel is Relation.FORWARD or rel is Relation.PARALLEL
    }
    return Dfg(activities=fp.activities, edges=frozenset(edges))


def random_footprint_predictions(
    records: list[TaskRecord], seed: int
) -> list[Prediction]:
    """Edge-line predictions realizing one random footprint per record.

    Only DFG-generation records can be answered this way; for tree records
    score the equivalent DFG dataset of the same corpus (gold footprints
    coincide model for model).
    """
    predictions: list[Prediction] = []
    for record in records:
        if record.task is not Task.SDFD:
            raise ValueError("random footprint predictions apply to DFG records only")
        rng = model_rng(seed, "baseline", record.task.value, record.record_id)
        fp = random_footprint(record.activity_set, rng)
        edges = footprint_to_dfg(fp).edges
        predictions.append(
            Prediction(
                record_id=record.record_id, raw_text=render_dfg_edges(tuple(edges))
            )
        )
    return predictions


def expected_random_footprint_fitness(
    gold_fp: Footprint, include_diagonal: bool = True
) -> float:
    """Analytic mean fitness of the random-footprint baseline.

    Each off-diagonal ordered pair matches with probability 1/4, each
    diagonal pair with probability 1/2 (gold diagonals are PARALLEL or
    NONE by construction).
    """
    n = len(gold_fp.activities)
    if include_diagonal:
        if n == 0:
            return 1.0
        offdiag = n * (n - 1)
        return (0.25 * offdiag + 0.5 * n) / (n * n)
    return 0.25
