import csv
import json

import numpy as np
import pytest
from scipy import sparse

from app.schemas.dsm_schemas import EvalDataset, EvalPair, MeasureParams
from app.services.cooccur import Vocabulary
from app.services.evaluation import (dataset_targets, evaluate, load_dataset, load_subset, parse_dataset_spec,
                                     resolve_word, spearman, write_results_csv, write_summary_json)
from app.services.similarity import SemanticSpace
from app.services.weighting import WeightedMatrix
from app.utils.enums import DatasetFormat, Measure, OovPolicy, PosPolicy, Scheme
from app.utils.error_handling import DatasetParseError, EvaluationError, UndefinedCorrelationError
from tests.helpers import weighted_from_dense


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def dataset(*pairs, name="toy"):
    return EvalDataset(name=name, format=DatasetFormat.WS353,
                       pairs=[EvalPair(word1=a, word2=b, gold=g) for a, b, g in pairs])


@pytest.fixture
def space():
    # w and u orthogonal, v close to w
    values = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.9, 0.1, 0.0]]
    return SemanticSpace.from_weighted(weighted_from_dense(values, lemmas=["w", "u", "v"]))


# ────────────────────────────
# ░░ Loaders ░░
# ────────────────────────────
def test_load_simlex(tmp_path):
    path = write(tmp_path, "simlex.txt",
                 "word1\tword2\tPOS\tSimLex999\tconc(w1)\n"
                 "old\tnew\tA\t1.58\t2.72\n"
                 "smart\tintelligent\tA\t9.2\t1.75\n"
                 "run\tjog\tV\t7.1\t4.0\n")
    data = load_dataset(path, DatasetFormat.SIMLEX)
    assert len(data) == 3
    first = data.pairs[0]
    assert (first.word1, first.word2, first.pos1, first.pos2, first.gold) == ("old", "new", "J", "J", 1.58)
    assert data.pairs[2].pos1 == "V"
    assert data.name == "simlex"


def test_load_men_lemma_and_natural_forms(tmp_path):
    path = write(tmp_path, "men.txt", "dog-n cat-n 42\nsun-n bright-j 30.5\nrun walk 12\n")
    data = load_dataset(path, DatasetFormat.MEN)
    assert (data.pairs[0].word1, data.pairs[0].pos1, data.pairs[0].gold) == ("dog", "N", 42.0)
    assert data.pairs[1].pos2 == "J"
    assert data.pairs[2].pos1 is None


def test_load_ws353_formats(tmp_path):
    tab = write(tmp_path, "ws.tab", "tiger\tcat\t7.35\nbook\tpaper\t7.46\n")
    commas = write(tmp_path, "ws.csv", "Word 1,Word 2,Human (mean)\nTiger,cat,7.35\nbook,paper,7.46\n")
    spaces = write(tmp_path, "ws.txt", "tiger cat 7.35\nbook paper 7.46\n")
    for path in (tab, commas, spaces):
        data = load_dataset(path, "WS353")
        assert (data.pairs[0].word1, data.pairs[0].word2, data.pairs[0].gold) == ("tiger", "cat", 7.35)
        assert data.pairs[0].pos1 is None


def test_malformed_row_reports_line_number(tmp_path):
    path = write(tmp_path, "bad.txt", "tiger cat 7.35\nbook paper lots\n")
    with pytest.raises(DatasetParseError) as err:
        load_dataset(path, DatasetFormat.WS353)
    assert err.value.line_no == 2


@pytest.mark.parametrize("text", ["", "tiger cat 7.35\n"])
def test_fewer_than_two_pairs(tmp_path, text):
    with pytest.raises(DatasetParseError):
        load_subset(write(tmp_path, "sub.txt", text))


def test_load_subset_counts_every_pair(tmp_path):
    rows = "".join(f"w{i}\tv{i}\t{i % 10}.5\n" for i in range(203))
    assert len(load_subset(write(tmp_path, "wordsim_sim.txt", rows))) == 203


def test_missing_dataset_file(tmp_path):
    with pytest.raises(DatasetParseError):
        load_dataset(tmp_path / "nope.txt", DatasetFormat.MEN)


def test_parse_dataset_spec():
    assert parse_dataset_spec("simlex:/data/SimLex-999.txt") == (DatasetFormat.SIMLEX, "/data/SimLex-999.txt")
    with pytest.raises(DatasetParseError):
        parse_dataset_spec("no-format")
    with pytest.raises(DatasetParseError):
        parse_dataset_spec("TOEFL:x.txt")


# ────────────────────────────
# ░░ Spearman ░░
# ────────────────────────────
def test_spearman_known_cases():
    assert spearman([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0)
    assert spearman([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    # average ranks [1, 2.5, 2.5, 4] vs [1, 3, 2, 4]
    assert spearman([1, 2, 2, 4], [1, 3, 2, 4]) == pytest.approx(3 / np.sqrt(10), abs=1e-12)


def test_spearman_constant_input():
    with pytest.raises(UndefinedCorrelationError):
        spearman([1, 1, 1], [1, 2, 3])
    with pytest.raises(UndefinedCorrelationError):
        spearman([1], [2])


def average_ranks(values):
    ranks = []
    for v in values:
        below = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        ranks.append(below + (equal + 1) / 2)
    return ranks


def test_spearman_matches_brute_force_oracle():
    rng = np.random.default_rng(0)
    checked = 0
    for i in range(1000):
        n = int(rng.integers(2, 51))
        xs = rng.integers(0, 6, n) if i % 2 else rng.standard_normal(n)
        ys = rng.integers(0, 6, n) if i % 3 else rng.standard_normal(n)
        rx, ry = np.array(average_ranks(list(xs))), np.array(average_ranks(list(ys)))
        if rx.std() == 0 or ry.std() == 0:
            continue
        oracle = np.corrcoef(rx, ry)[0, 1]
        assert spearman(xs, ys) == pytest.approx(oracle, abs=1e-12)
        checked += 1
    assert checked > 900


def test_spearman_invariant_under_monotone_transform():
    rng = np.random.default_rng(1)
    xs, ys = rng.standard_normal(40), rng.standard_normal(40)
    assert spearman(np.exp(xs), ys ** 3) == pytest.approx(spearman(xs, ys), abs=1e-12)
    assert spearman(xs, xs) == pytest.approx(1.0)


# ────────────────────────────
# ░░ Evaluate ░░
# ────────────────────────────
def test_self_pairs_rank_perfectly(space):
    result = evaluate(space, dataset(("w", "w", 10), ("u", "u", 10), ("w", "u", 0)))
    assert result.rho == pytest.approx(1.0)
    assert result.n_scored == 3 and result.n_skipped == 0


def test_oov_pairs_are_skipped_and_reported(space):
    data = dataset(("w", "v", 9), ("w", "u", 1), ("u", "v", 2), ("w", "zebra", 5))
    result = evaluate(space, data)
    assert result.n_scored + result.n_skipped == len(data)
    assert result.n_skipped == 1
    assert result.per_pair[3].skipped and result.per_pair[3].reason == "oov:zebra"
    assert result.coverage == pytest.approx(0.75)

    zeroed = evaluate(space, data, oov_policy=OovPolicy.ZERO)
    assert zeroed.n_skipped == 0 and zeroed.per_pair[3].score == 0.0


def test_no_coverage_is_an_error(space):
    with pytest.raises(EvaluationError):
        evaluate(space, dataset(("cat", "dog", 1), ("fish", "bird", 2)))


def test_evaluate_is_deterministic(space):
    data = dataset(("w", "v", 9), ("w", "u", 1), ("u", "v", 2))
    assert evaluate(space, data) == evaluate(space, data)


def test_apsyn_evaluation_records_n(space):
    result = evaluate(space, dataset(("w", "v", 9), ("w", "u", 1), ("u", "v", 2)), Measure.APSYN,
                      MeasureParams(apsyn_n=2))
    assert result.apsyn_n == 2
    assert -1.0 <= result.rho <= 1.0


def test_pos_backoff():
    vocab = Vocabulary([("run", "V"), ("run", "J"), ("dog", "N"), ("dog", "V")], [50, 10, 5, 80], 0)
    matrix = sparse.csr_matrix(np.eye(4))
    space = SemanticSpace.from_weighted(WeightedMatrix(vocab, np.arange(4), np.arange(4), matrix, Scheme.PPMI, 2))
    assert resolve_word(space, "run", None) == (("run", "V"), "run->V")
    assert resolve_word(space, "dog", None)[0] == ("dog", "N")
    assert resolve_word(space, "dog", None, PosPolicy.MOST_FREQUENT)[0] == ("dog", "V")
    assert resolve_word(space, "dog", "V") == (("dog", "V"), "")


def test_dataset_targets():
    vocab = Vocabulary([("run", "V"), ("run", "N"), ("dog", "N"), ("cat", "N")], [4, 3, 2, 1], 0)
    data = EvalDataset(name="t", format=DatasetFormat.MEN, pairs=[
        EvalPair(word1="run", word2="dog", gold=1.0),
        EvalPair(word1="cat", word2="unicorn", pos1="N", pos2="N", gold=2.0),
    ])
    assert dataset_targets([data], vocab) == {0, 1, 2, 3}


def test_result_files(tmp_path, space):
    result = evaluate(space, dataset(("w", "v", 9), ("w", "u", 1), ("u", "v", 2), ("w", "zebra", 5)))
    write_results_csv(result, tmp_path / "r.csv")
    summary = write_summary_json(result, tmp_path / "r.json", {"build": "abc"})

    with open(tmp_path / "r.csv", encoding="utf-8", newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 4
    assert rows[0]["pos1"] == "N" and rows[0]["reason"] == "w->N;v->N"
    assert rows[3]["skipped"] == "1" and rows[3]["score"] == ""

    stored = json.loads((tmp_path / "r.json").read_text(encoding="utf-8"))
    assert stored["n_pairs"] == 4 and stored["n_scored"] == 3
    assert stored["fingerprints"] == {"build": "abc"}
    assert stored["rho"] == pytest.approx(summary.rho)
