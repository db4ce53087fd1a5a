from itertools import combinations

import pytest

from app.schemas.dsm_schemas import EvalDataset, EvalPair, MeasureParams, PipelineConfig
from app.services.evaluation import evaluate
from app.services.model_builder import ModelBuilder
from app.services.similarity import SemanticSpace, pair_similarity
from app.utils.enums import DatasetFormat, Measure
from tests.helpers import planted_gold, planted_groups, write_planted_corpus

pytestmark = pytest.mark.slow

MEASURES = [(Measure.COSINE, MeasureParams()), (Measure.APSYN, MeasureParams(apsyn_n=100))]


@pytest.fixture(scope="module")
def planted_space(tmp_path_factory):
    corpus = write_planted_corpus(tmp_path_factory.mktemp("planted") / "planted.txt")
    builder = ModelBuilder(PipelineConfig(corpus=[str(corpus)], window=2, min_context_freq=100))
    return SemanticSpace.from_weighted(builder.weight(builder.build_counts()))


def score(space, w1, w2, measure, params):
    return pair_similarity(space, (w1, "N"), (w2, "N"), measure, params).value


@pytest.mark.parametrize("measure, params", MEASURES)
def test_within_cluster_beats_across_cluster(planted_space, measure, params):
    groups = planted_groups()
    clusters = {c: [w for key, words in groups.items() if key[0] == c for w in words] for c in "01"}
    wins = total = 0
    for c, other in (("0", "1"), ("1", "0")):
        for w1, w2 in combinations(clusters[c][::4], 2):
            within = score(planted_space, w1, w2, measure, params)
            for w3 in clusters[other][::4]:
                total += 1
                wins += within > score(planted_space, w1, w3, measure, params)
    assert wins >= 0.95 * total


@pytest.mark.parametrize("measure, params", MEASURES)
def test_planted_gold_correlation(planted_space, measure, params):
    pairs = [EvalPair(word1=w1, pos1="N", word2=w2, pos2="N", gold=gold) for w1, w2, gold in planted_gold()]
    result = evaluate(planted_space, EvalDataset(name="planted", format=DatasetFormat.WS353, pairs=pairs), measure, params)
    assert result.coverage == 1.0
    assert result.rho >= 0.8
