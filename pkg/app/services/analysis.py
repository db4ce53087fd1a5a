"""Hubness study: where do a query's nearest neighbors sit in the frequency list?

For every query the top-K neighbors are collected and each neighbor at rank r
is paired with its rank in the corpus frequency list. The k-occurrence
distribution (how often each word shows up across all neighbor lists) and its
skewness summarize how hub-dominated the space is.
"""
import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import skew

from app.schemas.dsm_schemas import HubnessSummary, MeasureParams
from app.services.cooccur import Vocabulary, format_word
from app.services.evaluation import resolve_word
from app.services.similarity import SemanticSpace, nearest_neighbors
from app.utils.enums import Measure, PosPolicy
from app.utils.error_handling import ConfigurationError, EvaluationError, OOVError, UndefinedSimilarityError
from app.utils.logger import logger


@dataclass(frozen=True)
class HubnessPoint:
    query: str
    nn_rank: int
    neighbor: str
    freq_rank: int
    score: float


@dataclass
class HubnessProfile:
    points: List[HubnessPoint]
    measure: Measure
    K: int
    n_queries: int = 0
    n_skipped: int = 0
    n_zero_score: int = 0
    k_occurrence: Counter = field(default_factory=Counter)

    def summary(self) -> List[Tuple[int, float, int]]:
        """(nn_rank, mean freq_rank, n) for every neighbor rank present."""
        sums: dict = {}
        for point in self.points:
            total, n = sums.get(point.nn_rank, (0, 0))
            sums[point.nn_rank] = (total + point.freq_rank, n + 1)
        return [(rank, total / n, n) for rank, (total, n) in sorted(sums.items())]

    def skewness(self, n_rows: Optional[int] = None) -> float:
        """Skewness of the k-occurrence distribution (words never retrieved count as 0 when n_rows is given)."""
        counts = list(self.k_occurrence.values())
        if n_rows is not None and n_rows > len(counts):
            counts.extend([0] * (n_rows - len(counts)))
        if len(counts) < 3 or np.ptp(counts) == 0:
            return 0.0
        return float(skew(np.asarray(counts, dtype=np.float64)))


def frequency_ranks(vocab: Vocabulary) -> np.ndarray:
    """ranks[word_id] = 1 for the most frequent word; ties by ascending id."""
    if len(vocab) == 0:
        raise ConfigurationError("frequency ranks need a nonempty vocabulary")
    ids = np.arange(len(vocab))
    order = np.lexsort((ids, -vocab.freq))
    ranks = np.empty(len(vocab), dtype=np.int64)
    ranks[order] = np.arange(1, len(vocab) + 1)
    return ranks


def parse_query(entry: str) -> Tuple[str, Optional[str]]:
    lemma, sep, pos = entry.strip().rpartition("_")
    if sep and pos in ("N", "V", "J"):
        return lemma.lower(), pos
    return entry.strip().lower(), None


def read_queries(path) -> List[Tuple[str, Optional[str]]]:
    """One `lemma_POS` or bare `lemma` per line."""
    with open(path, "r", encoding="utf-8") as handle:
        return [parse_query(line) for line in handle if line.strip() and not line.startswith("#")]


def hubness_profile(space: SemanticSpace, queries: Sequence[Tuple[str, Optional[str]]], K: int,
                    measure: Measure = Measure.COSINE, params: Optional[MeasureParams] = None,
                    pos_policy: PosPolicy = PosPolicy.NOUN_FIRST) -> HubnessProfile:
    if K < 1:
        raise ConfigurationError("K must be >= 1")
    if not queries:
        raise ConfigurationError("hubness profile needs at least one query")
    measure = Measure(measure)
    ranks = frequency_ranks(space.vocab)
    profile = HubnessProfile(points=[], measure=measure, K=K)

    for lemma, pos in queries:
        try:
            word, _ = resolve_word(space, lemma, pos, pos_policy)
            neighbors = nearest_neighbors(space, word, K, measure, params)
        except (OOVError, UndefinedSimilarityError) as exc:
            profile.n_skipped += 1
            logger.debug("Query %s skipped: %s", lemma, exc)
            continue
        profile.n_queries += 1
        query = format_word(word)
        for nn_rank, neighbor in enumerate(neighbors, start=1):
            vid = space.vocab.lookup(neighbor.word)
            profile.points.append(HubnessPoint(query, nn_rank, format_word(neighbor.word), int(ranks[vid]), neighbor.score))
            profile.k_occurrence[vid] += 1
            if measure is Measure.APSYN and neighbor.score == 0.0:
                profile.n_zero_score += 1

    if profile.n_queries == 0:
        raise EvaluationError(f"All {len(queries)} hubness queries are out of vocabulary")
    if profile.n_zero_score:
        logger.warning("%d of %d neighbors share no top-N context with their query (APSyn score 0); "
                       "they fill the list in frequency order", profile.n_zero_score, len(profile.points))
    logger.info("Hubness (%s, K=%d): %d queries, %d skipped, %d points, k-occurrence skewness %.3f",
                measure.value, K, profile.n_queries, profile.n_skipped, len(profile.points),
                profile.skewness(space.n_rows))
    return profile


def write_profile_csv(profile: HubnessProfile, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["query", "nn_rank", "neighbor", "freq_rank", "score"])
        for p in profile.points:
            writer.writerow([p.query, p.nn_rank, p.neighbor, p.freq_rank, repr(p.score)])


def write_summary_csv(profile: HubnessProfile, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["nn_rank", "mean_freq_rank", "n"])
        for rank, mean, n in profile.summary():
            writer.writerow([rank, repr(mean), n])


def write_profile_json(profile: HubnessProfile, path, n_rows: Optional[int] = None,
                       apsyn_n: Optional[int] = None,
                       fingerprints: Optional[Mapping[str, str]] = None) -> HubnessSummary:
    summary = HubnessSummary(measure=profile.measure,
                             apsyn_n=apsyn_n if profile.measure is Measure.APSYN else None,
                             K=profile.K, n_queries=profile.n_queries, n_skipped=profile.n_skipped,
                             n_points=len(profile.points), n_zero_score=profile.n_zero_score,
                             skewness=profile.skewness(n_rows), fingerprints=dict(fingerprints or {}))
    Path(path).write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return summary
