"""Evaluation harness: graded relevance judgments, binary collapse, F1,
threshold grid search, and a three-strategy comparison report.

Raw retrieval scores are computed once per topic and cached; thresholding at
every grid point is then pure counting. The union strategy's 2-axis grid is
evaluated with 2D suffix-sum dominance counts, so the full product grid costs
one histogram per topic instead of one retrieval run per point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .dense import DenseStore, EmbeddingProvider, HashedEmbeddingProvider, dense_scores
from .errors import InvalidInputError
from .fusion import STRATEGIES, FusionConfig, Strategy, fuse
from .sparse import InvertedIndex, bm25_scores, tokenize

VALID_GRADES = (0, 1, 2)

DEFAULT_BM25_AXIS = (0.0, 10.0, 0.01)
DEFAULT_COSINE_AXIS = (0.0, 1.0, 0.01)


class Qrel(NamedTuple):
    topic_id: str
    doc_id: str
    grade: int


class Topic(NamedTuple):
    topic_id: str
    query_text: str


class F1Result(NamedTuple):
    f1: float
    precision: float
    recall: float
    tp: int
    fp: int
    fn: int


class GridAxis(NamedTuple):
    """Inclusive [min, max] swept with the given step."""

    min: float
    max: float
    step: float

    def values(self) -> list[float]:
        if self.step <= 0 or self.min > self.max:
            raise InvalidInputError(f"bad grid axis {self}")
        n = int(math.floor((self.max - self.min) / self.step + 1e-9)) + 1
        return [round(self.min + k * self.step, 10) for k in range(n)]


def parse_qrels(stream: Iterable[str]) -> tuple[list[Qrel], list[tuple[int, str]]]:
    """Parse whitespace-separated lines: topic_id iteration doc_id grade.

    The iteration field is ignored. Lines with out-of-range grades, malformed
    fields, or duplicate (topic, doc) pairs are rejected and reported as
    (line_number, reason).
    """
    qrels: list[Qrel] = []
    rejected: list[tuple[int, str]] = []
    seen: set[tuple[str, str]] = set()
    for line_no, line in enumerate(stream, start=1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 4:
            rejected.append((line_no, f"expected 4 fields, got {len(parts)}"))
            continue
        topic_id, _iteration, doc_id, grade_text = parts
        try:
            grade = int(grade_text)
        except ValueError:
            rejected.append((line_no, f"non-integer grade {grade_text!r}"))
            continue
        if grade not in VALID_GRADES:
            rejected.append((line_no, f"grade {grade} outside {{0,1,2}}"))
            continue
        if (topic_id, doc_id) in seen:
            rejected.append((line_no, f"duplicate judgment for ({topic_id}, {doc_id})"))
            continue
        seen.add((topic_id, doc_id))
        qrels.append(Qrel(topic_id, doc_id, grade))
    return qrels, rejected


def parse_topics(stream: Iterable[str]) -> tuple[list[Topic], list[tuple[int, str]]]:
    """Parse line-delimited {topic_id, query} objects."""
    topics: list[Topic] = []
    rejected: list[tuple[int, str]] = []
    for line_no, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            topic = Topic(str(obj["topic_id"]), str(obj["query"]))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            rejected.append((line_no, f"malformed: {exc}"))
            continue
        if not topic.query_text:
            rejected.append((line_no, "empty query"))
            continue
        topics.append(topic)
    return topics, rejected


def binarize(qrels: Sequence[Qrel]) -> dict[tuple[str, str], bool]:
    """Collapse the three grades to binary: grade >= 1 is relevant."""
    return {(q.topic_id, q.doc_id): q.grade >= 1 for q in qrels}


def _f1_from_counts(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return f1, precision, recall


def f1_for_strategy(
    retrieved: dict[str, set[str]],
    binary_qrels: dict[tuple[str, str], bool],
    average: str = "micro",
) -> F1Result:
    """F1 over all judged (topic, doc) pairs.

    Retrieved documents without a judgment are dropped from counting. With
    ``average="macro"`` precision/recall/F1 are per-topic means instead of
    pooled; the returned counts stay pooled either way.
    """
    per_topic: dict[str, list[int]] = {}
    for (topic_id, doc_id), relevant in binary_qrels.items():
        tp_fp_fn = per_topic.setdefault(topic_id, [0, 0, 0])
        hit = doc_id in retrieved.get(topic_id, ())
        if hit and relevant:
            tp_fp_fn[0] += 1
        elif hit and not relevant:
            tp_fp_fn[1] += 1
        elif not hit and relevant:
            tp_fp_fn[2] += 1
    tp = sum(v[0] for v in per_topic.values())
    fp = sum(v[1] for v in per_topic.values())
    fn = sum(v[2] for v in per_topic.values())
    if average == "micro":
        f1, precision, recall = _f1_from_counts(tp, fp, fn)
    elif average == "macro":
        if not per_topic:
            f1 = precision = recall = 0.0
        else:
            rows = [_f1_from_counts(*counts) for counts in per_topic.values()]
            f1 = sum(r[0] for r in rows) / len(rows)
            precision = sum(r[1] for r in rows) / len(rows)
            recall = sum(r[2] for r in rows) / len(rows)
    else:
        raise InvalidInputError(f"unknown averaging mode {average!r}")
    return F1Result(f1, precision, recall, tp, fp, fn)


@dataclass
class TopicScores:
    """Cached raw scores of both arms for one topic (computed once)."""

    topic_id: str
    bm25: dict[str, float]
    cosine: dict[str, float]


def collect_topic_scores(
    topics: Sequence[Topic],
    index: InvertedIndex,
    store: DenseStore | None,
    provider: EmbeddingProvider | None = None,
) -> list[TopicScores]:
    if store is not None and provider is None:
        provider = HashedEmbeddingProvider(store.dimension)
    out = []
    for topic in topics:
        bm25 = dict(bm25_scores(index, tokenize(topic.query_text)))
        cosine = (
            dict(dense_scores(store, provider.embed(topic.query_text)))
            if store is not None
            else {}
        )
        out.append(TopicScores(topic.topic_id, bm25, cosine))
    return out


def _grid_f1(tp: np.ndarray, fp: np.ndarray, rel_total: float) -> np.ndarray:
    # Mirrors _f1_from_counts elementwise so grid cells and the scalar oracle
    # produce bit-identical values.
    fn = rel_total - tp
    precision = np.divide(tp, tp + fp, out=np.zeros_like(tp, dtype=np.float64), where=(tp + fp) > 0)
    recall = np.divide(tp, tp + fn, out=np.zeros_like(tp, dtype=np.float64), where=(tp + fn) > 0)
    pr = precision + recall
    return np.divide(2.0 * precision * recall, pr, out=np.zeros_like(pr), where=pr > 0)


def _axis_counts(scores: dict[str, float], docs: list[str], axis: np.ndarray) -> np.ndarray:
    """Count of ``docs`` whose score is >= each axis value."""
    present = np.sort(np.array([scores[d] for d in docs if d in scores], dtype=np.float64))
    return len(present) - np.searchsorted(present, axis, side="left")


def _dominance_counts(
    scores_b: dict[str, float],
    scores_c: dict[str, float],
    docs: list[str],
    axis_b: np.ndarray,
    axis_c: np.ndarray,
) -> np.ndarray:
    """Matrix [i, j] = count of docs surviving axis_b[i] OR axis_c[j]."""
    nb, nc = len(axis_b), len(axis_c)
    hist = np.zeros((nb + 1, nc + 1), dtype=np.int64)
    for doc in docs:
        sb = scores_b.get(doc, -np.inf)
        sc = scores_c.get(doc, -np.inf)
        ib = int(np.searchsorted(axis_b, sb, side="right"))  # 0 means below axis_b[0]
        ic = int(np.searchsorted(axis_c, sc, side="right"))
        hist[ib, ic] += 1
    suffix = hist[::-1, ::-1].cumsum(axis=0).cumsum(axis=1)[::-1, ::-1]
    only_b = suffix[1:, 0:1]  # survives the bm25 arm
    only_c = suffix[0:1, 1:]  # survives the cosine arm
    both = suffix[1:, 1:]
    return only_b + only_c - both


@dataclass
class GridSearchResult:
    strategy: Strategy
    axes: dict[str, list[float]]
    f1_grid: np.ndarray  # shape = one dim per axis, bm25 axis first
    best_thresholds: dict[str, float]
    best_f1: float

    def iter_grid(self) -> Iterator[tuple[dict[str, float], float]]:
        """All grid points in lexicographic threshold order."""
        names = list(self.axes)
        values = [self.axes[n] for n in names]
        flat = self.f1_grid.reshape(-1)
        for k, idx in enumerate(np.ndindex(self.f1_grid.shape)):
            yield {n: values[a][i] for a, (n, i) in enumerate(zip(names, idx))}, float(flat[k])


def _axes_for(strategy: Strategy, grids: dict[str, GridAxis]) -> dict[str, GridAxis]:
    bm25_axis = grids.get("bm25", GridAxis(*DEFAULT_BM25_AXIS))
    cosine_axis = grids.get("cosine", GridAxis(*DEFAULT_COSINE_AXIS))
    if strategy == "sparse_only":
        return {"bm25": bm25_axis}
    if strategy == "dense_only":
        return {"cosine": cosine_axis}
    return {"bm25": bm25_axis, "cosine": cosine_axis}


def grid_search(
    strategy: Strategy,
    grids: dict[str, GridAxis],
    topics: Sequence[Topic],
    qrels: Sequence[Qrel],
    index: InvertedIndex,
    store: DenseStore | None = None,
    provider: EmbeddingProvider | None = None,
    average: str = "micro",
    top_k_cut: int | None = None,
    topic_scores: list[TopicScores] | None = None,
) -> GridSearchResult:
    """Evaluate F1 at every grid point and return the argmax.

    Ties resolve to the lexicographically smallest threshold vector (bm25
    axis first). ``top_k_cut`` additionally applies the fused top-k cut at
    each point; that path runs full fusion per point and is only meant for
    small grids.
    """
    if strategy not in STRATEGIES:
        raise InvalidInputError(f"unknown strategy {strategy!r}")
    axes = _axes_for(strategy, grids)
    axis_values = {name: np.array(axis.values(), dtype=np.float64) for name, axis in axes.items()}
    if any(len(v) == 0 for v in axis_values.values()):
        raise InvalidInputError("empty threshold grid")
    binary = binarize(qrels)
    if topic_scores is None:
        topic_scores = collect_topic_scores(topics, index, store, provider)

    if top_k_cut is not None:
        f1_grid = _grid_by_fusion(strategy, axis_values, topic_scores, binary, average, top_k_cut)
    else:
        f1_grid = _grid_by_counting(strategy, axis_values, topic_scores, binary, average)

    flat_best = int(np.argmax(f1_grid))  # first occurrence = lexicographic tie rule
    best_idx = np.unravel_index(flat_best, f1_grid.shape)
    names = list(axis_values)
    best_thresholds = {n: float(axis_values[n][i]) for n, i in zip(names, best_idx)}
    return GridSearchResult(
        strategy=strategy,
        axes={n: [float(v) for v in vals] for n, vals in axis_values.items()},
        f1_grid=f1_grid,
        best_thresholds=best_thresholds,
        best_f1=float(f1_grid[best_idx]),
    )


def _judged_docs(binary: dict[tuple[str, str], bool], topic_id: str) -> tuple[list[str], list[str]]:
    rel = [d for (t, d), r in binary.items() if t == topic_id and r]
    nonrel = [d for (t, d), r in binary.items() if t == topic_id and not r]
    return rel, nonrel


def _grid_by_counting(
    strategy: Strategy,
    axis_values: dict[str, np.ndarray],
    topic_scores: list[TopicScores],
    binary: dict[tuple[str, str], bool],
    average: str,
) -> np.ndarray:
    shape = tuple(len(v) for v in axis_values.values())
    tp_total = np.zeros(shape, dtype=np.float64)
    fp_total = np.zeros(shape, dtype=np.float64)
    rel_total = 0.0
    macro_sum = np.zeros(shape, dtype=np.float64)
    n_topics = 0
    for ts in topic_scores:
        rel, nonrel = _judged_docs(binary, ts.topic_id)
        n_topics += 1
        if strategy == "sparse_only":
            axis = axis_values["bm25"]
            tp = _axis_counts(ts.bm25, rel, axis).astype(np.float64)
            fp = _axis_counts(ts.bm25, nonrel, axis).astype(np.float64)
        elif strategy == "dense_only":
            axis = axis_values["cosine"]
            tp = _axis_counts(ts.cosine, rel, axis).astype(np.float64)
            fp = _axis_counts(ts.cosine, nonrel, axis).astype(np.float64)
        else:
            axis_b, axis_c = axis_values["bm25"], axis_values["cosine"]
            tp = _dominance_counts(ts.bm25, ts.cosine, rel, axis_b, axis_c).astype(np.float64)
            fp = _dominance_counts(ts.bm25, ts.cosine, nonrel, axis_b, axis_c).astype(np.float64)
        tp_total += tp
        fp_total += fp
        rel_total += len(rel)
        if average == "macro":
            macro_sum += _grid_f1(tp, fp, float(len(rel)))
    if average == "macro":
        return macro_sum / n_topics if n_topics else macro_sum
    return _grid_f1(tp_total, fp_total, rel_total)


def _grid_by_fusion(
    strategy: Strategy,
    axis_values: dict[str, np.ndarray],
    topic_scores: list[TopicScores],
    binary: dict[tuple[str, str], bool],
    average: str,
    top_k: int,
) -> np.ndarray:
    names = list(axis_values)
    shape = tuple(len(v) for v in axis_values.values())
    f1_grid = np.zeros(shape, dtype=np.float64)
    for idx in np.ndindex(shape):
        point = {n: float(axis_values[n][i]) for n, i in zip(names, idx)}
        cfg = FusionConfig(
            bm25_threshold=point.get("bm25", 0.0),
            cosine_threshold=point.get("cosine", 0.0),
            top_k=top_k,
            strategy=strategy,
        )
        retrieved = {
            ts.topic_id: {
                c.doc_id
                for c in fuse(list(ts.bm25.items()), list(ts.cosine.items()), cfg)
            }
            for ts in topic_scores
        }
        f1_grid[idx] = f1_for_strategy(retrieved, binary, average).f1
    return f1_grid


@dataclass
class StrategyRow:
    strategy: Strategy
    f1: float
    thresholds: dict[str, float]
    precision: float
    recall: float
    tp: int
    fp: int
    fn: int

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "f1": self.f1,
            "thresholds": self.thresholds,
            "precision": self.precision,
            "recall": self.recall,
            "counts": {"tp": self.tp, "fp": self.fp, "fn": self.fn},
        }


@dataclass
class EvalReport:
    rows: list[StrategyRow]
    per_topic: dict[str, dict[str, dict]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rows": [row.to_dict() for row in self.rows],
            "per_topic": self.per_topic,
        }

    def format_table(self) -> str:
        lines = [f"{'strategy':<14} {'F1':>8} {'P':>8} {'R':>8}  thresholds"]
        for row in self.rows:
            thr = ", ".join(f"{k}={v:g}" for k, v in row.thresholds.items())
            lines.append(
                f"{row.strategy:<14} {row.f1:>8.4f} {row.precision:>8.4f} {row.recall:>8.4f}  {thr}"
            )
        return "\n".join(lines)


def retrieved_sets(
    strategy: Strategy,
    thresholds: dict[str, float],
    topic_scores: list[TopicScores],
) -> dict[str, set[str]]:
    """Threshold survivor sets per topic for a strategy (no top-k cut)."""
    out: dict[str, set[str]] = {}
    for ts in topic_scores:
        survivors: set[str] = set()
        if strategy != "dense_only":
            theta = thresholds.get("bm25", 0.0)
            survivors |= {d for d, s in ts.bm25.items() if s >= theta}
        if strategy != "sparse_only":
            theta = thresholds.get("cosine", 0.0)
            survivors |= {d for d, s in ts.cosine.items() if s >= theta}
        out[ts.topic_id] = survivors
    return out


def compare_strategies(
    topics: Sequence[Topic],
    qrels: Sequence[Qrel],
    index: InvertedIndex,
    store: DenseStore | None,
    grids: dict[str, GridAxis] | None = None,
    provider: EmbeddingProvider | None = None,
    average: str = "micro",
) -> EvalReport:
    """Grid-search each of the three strategies and report one row each."""
    grids = grids or {}
    topic_scores = collect_topic_scores(topics, index, store, provider)
    binary = binarize(qrels)
    rows = []
    per_topic: dict[str, dict[str, dict]] = {}
    for strategy in STRATEGIES:
        result = grid_search(
            strategy, grids, topics, qrels, index, store, provider,
            average=average, topic_scores=topic_scores,
        )
        retrieved = retrieved_sets(strategy, result.best_thresholds, topic_scores)
        pooled = f1_for_strategy(retrieved, binary, average)
        rows.append(
            StrategyRow(
                strategy=strategy,
                f1=pooled.f1,
                thresholds=result.best_thresholds,
                precision=pooled.precision,
                recall=pooled.recall,
                tp=pooled.tp,
                fp=pooled.fp,
                fn=pooled.fn,
            )
        )
        breakdown = {}
        for ts in topic_scores:
            single = f1_for_strategy(
                {ts.topic_id: retrieved[ts.topic_id]},
                {k: v for k, v in binary.items() if k[0] == ts.topic_id},
            )
            breakdown[ts.topic_id] = {
                "f1": single.f1, "tp": single.tp, "fp": single.fp, "fn": single.fn,
            }
        per_topic[strategy] = breakdown
    return EvalReport(rows=rows, per_topic=per_topic)
