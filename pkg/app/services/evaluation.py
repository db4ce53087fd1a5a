"""Word-similarity benchmarks: loaders, Spearman correlation, evaluation.

Upstream formats, one example line each:

    WS353 (combined.tab / Agirre subsets)   tiger<TAB>cat<TAB>7.35
    MEN lemma form                          dog-n cat-n 42.00
    MEN natural form                        dog cat 42.00
    SimLex-999                              old<TAB>new<TAB>A<TAB>1.58<TAB>...
"""
import csv
import math
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.stats import rankdata

from app.schemas.dsm_schemas import EvalDataset, EvalPair, EvalResult, EvalSummary, MeasureParams, PairScore
from app.services.cooccur import Vocabulary, format_word
from app.services.similarity import SemanticSpace, pair_similarity
from app.utils.enums import CONTENT_POS, CoarsePos, DatasetFormat, Measure, OovPolicy, PosPolicy
from app.utils.error_handling import (DatasetParseError, EvaluationError, OOVError,
                                      UndefinedCorrelationError, UndefinedSimilarityError)
from app.utils.logger import logger

NOUN_FIRST = (CoarsePos.NOUN.value, CoarsePos.VERB.value, CoarsePos.ADJECTIVE.value)

# SimLex uses A for adjectives, MEN uses -j
_SOURCE_POS = {"n": "N", "v": "V", "a": "J", "j": "J"}


def _fields(line: str) -> List[str]:
    if "\t" in line:
        return [f.strip() for f in line.split("\t")]
    if "," in line:
        return [f.strip() for f in line.split(",")]
    return line.split()


def _gold(raw: str, path, line_no: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise DatasetParseError(path, line_no, f"gold score {raw!r} is not a number") from None
    if not math.isfinite(value):
        raise DatasetParseError(path, line_no, f"gold score {raw!r} is not finite")
    return value


def _split_suffix(word: str) -> Tuple[str, Optional[str]]:
    lemma, sep, suffix = word.rpartition("-")
    if sep and lemma and suffix.lower() in _SOURCE_POS:
        return lemma, _SOURCE_POS[suffix.lower()]
    return word, None


def _parse_row(fields: List[str], fmt: DatasetFormat, path, line_no: int) -> EvalPair:
    if fmt is DatasetFormat.SIMLEX:
        if len(fields) < 4:
            raise DatasetParseError(path, line_no, f"expected >= 4 fields, got {len(fields)}")
        pos = _SOURCE_POS.get(fields[2].lower())
        if pos is None:
            raise DatasetParseError(path, line_no, f"unknown SimLex POS {fields[2]!r}")
        return EvalPair(word1=fields[0].lower(), word2=fields[1].lower(), pos1=pos, pos2=pos,
                        gold=_gold(fields[3], path, line_no))

    if len(fields) < 3:
        raise DatasetParseError(path, line_no, f"expected >= 3 fields, got {len(fields)}")
    w1, w2, gold = fields[0].lower(), fields[1].lower(), _gold(fields[2], path, line_no)
    if fmt is DatasetFormat.MEN:
        (w1, p1), (w2, p2) = _split_suffix(w1), _split_suffix(w2)
        return EvalPair(word1=w1, word2=w2, pos1=p1, pos2=p2, gold=gold)
    return EvalPair(word1=w1, word2=w2, gold=gold)


def _is_header(fields: List[str], fmt: DatasetFormat) -> bool:
    gold_col = 3 if fmt is DatasetFormat.SIMLEX else 2
    if len(fields) <= gold_col:
        return False
    try:
        float(fields[gold_col])
    except ValueError:
        return True
    return False


def load_dataset(path, fmt: DatasetFormat, name: Optional[str] = None) -> EvalDataset:
    fmt = DatasetFormat(fmt)
    path = Path(path)
    pairs: List[EvalPair] = []
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise DatasetParseError(path, 0, f"cannot read dataset: {exc.strerror}") from exc
    for line_no, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = _fields(line)
        if not pairs and _is_header(fields, fmt):
            continue
        pairs.append(_parse_row(fields, fmt, path, line_no))
    if len(pairs) < 2:
        raise DatasetParseError(path, 0, f"{len(pairs)} pairs; at least 2 are needed for a correlation")
    dataset = EvalDataset(name=name or path.stem, format=fmt, pairs=pairs)
    logger.info("Loaded %s dataset %s: %d pairs", fmt.value, dataset.name, len(dataset))
    return dataset


def load_subset(path, name: Optional[str] = None) -> EvalDataset:
    """Similarity / relatedness subsets of WordSim-353 (same row format)."""
    return load_dataset(path, DatasetFormat.WS353, name)


def parse_dataset_spec(spec: str) -> Tuple[DatasetFormat, str]:
    """`FORMAT:PATH` → (format, path)."""
    fmt, sep, path = spec.partition(":")
    if not sep:
        raise DatasetParseError(spec, 0, "expected FORMAT:PATH")
    try:
        return DatasetFormat(fmt.upper()), path
    except ValueError:
        raise DatasetParseError(spec, 0, f"unknown dataset format {fmt!r}") from None


# ────────────────────────────
# ░░ Correlation ░░
# ────────────────────────────
def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation of average ranks (ties share the mean of their rank range)."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("spearman needs two 1-D lists of equal length")
    if len(x) < 2:
        raise UndefinedCorrelationError("spearman needs at least 2 values")
    rx = rankdata(x, method="average")
    ry = rankdata(y, method="average")
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt(float(np.dot(rx, rx)) * float(np.dot(ry, ry)))
    if denom == 0.0:
        raise UndefinedCorrelationError("spearman is undefined for a constant list")
    return float(np.clip(np.dot(rx, ry) / denom, -1.0, 1.0))


# ────────────────────────────
# ░░ Scoring ░░
# ────────────────────────────
def resolve_word(space: SemanticSpace, lemma: str, pos: Optional[str],
                 policy: PosPolicy = PosPolicy.NOUN_FIRST) -> Tuple[Tuple[str, str], str]:
    """(lemma, pos) to score with, plus a note on how POS was chosen."""
    if pos is not None:
        return (lemma, pos), ""
    present = [p for p in NOUN_FIRST if (lemma, p) in space]
    if not present:
        raise OOVError(lemma)
    if PosPolicy(policy) is PosPolicy.MOST_FREQUENT:
        chosen = max(present, key=lambda p: (space.vocab.frequency((lemma, p)), -NOUN_FIRST.index(p)))
    else:
        chosen = present[0]
    return (lemma, chosen), f"{lemma}->{chosen}"


def evaluate(space: SemanticSpace, dataset: EvalDataset, measure: Measure = Measure.COSINE,
             params: Optional[MeasureParams] = None, pos_policy: PosPolicy = PosPolicy.NOUN_FIRST,
             oov_policy: OovPolicy = OovPolicy.SKIP) -> EvalResult:
    measure = Measure(measure)
    params = params or MeasureParams()
    oov_policy = OovPolicy(oov_policy)
    per_pair: List[PairScore] = []
    n_skipped = 0

    for pair in dataset.pairs:
        record = PairScore(word1=pair.word1, word2=pair.word2, pos1=pair.pos1, pos2=pair.pos2, gold=pair.gold)
        try:
            w1, note1 = resolve_word(space, pair.word1, pair.pos1, pos_policy)
            w2, note2 = resolve_word(space, pair.word2, pair.pos2, pos_policy)
            record.pos1, record.pos2 = w1[1], w2[1]
            record.reason = ";".join(n for n in (note1, note2) if n)
            record.score = pair_similarity(space, w1, w2, measure, params).value
        except (OOVError, UndefinedSimilarityError) as exc:
            reason = f"oov:{exc.word}" if isinstance(exc, OOVError) else "zero-vector"
            logger.debug("Pair %s-%s: %s", pair.word1, pair.word2, reason)
            record.reason = reason
            if oov_policy is OovPolicy.ZERO:
                record.score = 0.0
            else:
                record.skipped = True
                n_skipped += 1
        per_pair.append(record)

    scored = [p for p in per_pair if not p.skipped]
    if len(scored) < 2:
        raise EvaluationError(f"{dataset.name}: only {len(scored)} of {len(dataset)} pairs scorable, need >= 2")
    try:
        rho = spearman([p.score for p in scored], [p.gold for p in scored])
    except UndefinedCorrelationError as exc:
        raise EvaluationError(f"{dataset.name}: {exc}") from exc

    result = EvalResult(dataset=dataset.name, measure=measure,
                        apsyn_n=params.apsyn_n if measure is Measure.APSYN else None,
                        rho=rho, n_scored=len(scored), n_skipped=n_skipped, per_pair=per_pair)
    logger.info("%s %s: rho=%.4f, scored %d/%d (coverage %.1f%%)", dataset.name, measure.value, rho,
                result.n_scored, len(dataset), 100.0 * result.coverage)
    return result


def dataset_targets(datasets: Iterable[EvalDataset], vocab: Vocabulary) -> Set[int]:
    """Vocabulary ids of every dataset word; words without POS contribute all their content POS."""
    ids: Set[int] = set()
    for dataset in datasets:
        for pair in dataset.pairs:
            for lemma, pos in ((pair.word1, pair.pos1), (pair.word2, pair.pos2)):
                if pos is not None:
                    found = vocab.get((lemma, pos))
                    if found is not None:
                        ids.add(found)
                else:
                    ids.update(i for p, i in vocab.pos_ids(lemma).items() if p in CONTENT_POS)
    return ids


# ────────────────────────────
# ░░ Output ░░
# ────────────────────────────
RESULT_COLUMNS = ["word1", "pos1", "word2", "pos2", "gold", "score", "skipped", "reason"]


def write_results_csv(result: EvalResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RESULT_COLUMNS)
        for p in result.per_pair:
            score = "" if p.score is None else repr(p.score)
            writer.writerow([p.word1, p.pos1 or "", p.word2, p.pos2 or "", repr(p.gold), score,
                             int(p.skipped), p.reason])


def summarize(result: EvalResult, fingerprints: Optional[Mapping[str, str]] = None) -> EvalSummary:
    return EvalSummary(dataset=result.dataset, measure=result.measure, apsyn_n=result.apsyn_n, rho=result.rho,
                       n_pairs=result.n_scored + result.n_skipped, n_scored=result.n_scored,
                       n_skipped=result.n_skipped, coverage=result.coverage, fingerprints=dict(fingerprints or {}))


def write_summary_json(result: EvalResult, path, fingerprints: Optional[Mapping[str, str]] = None) -> EvalSummary:
    summary = summarize(result, fingerprints)
    Path(path).write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return summary
