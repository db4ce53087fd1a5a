import pytest

from app.services.corpus import (CorpusStats, TagMap, Token, content_filter, parse_token, stream_corpus,
                                 stream_sentences)
from app.utils.error_handling import ConfigurationError, CorpusReadError, MalformedTokenError
from tests.helpers import write_corpus


@pytest.mark.parametrize("raw, expected", [
    ("Dog_NN", Token("dog", "N")),
    ("run_VVZ", Token("run", "V")),
    ("the_DT", Token("the", "O")),
    ("old_JJR", Token("old", "J")),
    ("new_york_NP", Token("new_york", "N")),
])
def test_parse_token(raw, expected):
    assert parse_token(raw) == expected


@pytest.mark.parametrize("raw", ["dog", "_NN", "dog_"])
def test_parse_token_malformed(raw):
    with pytest.raises(MalformedTokenError):
        parse_token(raw)


def test_tagmap_longest_prefix_wins():
    tagmap = TagMap({"N": "N", "NNP": "O"})
    assert tagmap("NNS") == "N"
    assert tagmap("NNP") == "O"
    assert tagmap("XX") == "O"


def test_tagmap_rejects_unknown_target():
    with pytest.raises(ConfigurationError):
        TagMap({"NN": "NOUN"})


def test_tagmap_from_file(tmp_path):
    path = tmp_path / "tags.cfg"
    path.write_text("# lemma tags\nNOM=N\nVER=V\n", encoding="utf-8")
    tagmap = TagMap.from_file(path)
    assert parse_token("chat_NOM", tagmap) == Token("chat", "N")
    assert parse_token("dog_NN", tagmap) == Token("dog", "O")


def test_stream_sentences_yields_one_sentence_per_line(tmp_path):
    path = write_corpus(tmp_path / "c.txt", ["dog_NN barks_VVZ", "the_DT cat_NN"])
    sentences = list(stream_sentences(path))
    assert len(sentences) == 2
    assert sentences[0] == [Token("dog", "N"), Token("barks", "V")]


def test_stream_sentences_empty_file(tmp_path):
    path = write_corpus(tmp_path / "empty.txt", [])
    assert list(stream_sentences(path)) == []


def test_stream_sentences_reads_gzip(tmp_path):
    path = write_corpus(tmp_path / "c.txt.gz", ["dog_NN barks_VVZ"], compress=True)
    assert list(stream_sentences(path)) == [[Token("dog", "N"), Token("barks", "V")]]


def test_stream_sentences_counts_malformed_tokens(tmp_path):
    path = write_corpus(tmp_path / "c.txt", ["dog_NN broken barks_VVZ", "nounderscore"])
    stats = CorpusStats()
    sentences = list(stream_sentences(path, stats=stats))
    assert sentences == [[Token("dog", "N"), Token("barks", "V")], []]
    assert stats.malformed_tokens == 2
    assert stats.sentences == 2
    assert stats.tokens == 2


def test_stream_sentences_missing_file(tmp_path):
    with pytest.raises(CorpusReadError):
        list(stream_sentences(tmp_path / "missing.txt"))


def test_stream_corpus_chains_files_in_order(tmp_path):
    first = write_corpus(tmp_path / "a.txt", ["a_NN"])
    second = write_corpus(tmp_path / "b.txt.gz", ["b_NN", "c_NN"], compress=True)
    stats = CorpusStats()
    lemmas = [s[0].lemma for s in stream_corpus([first, second], stats=stats)]
    assert lemmas == ["a", "b", "c"]
    assert stats.sentences == 3


def test_corpus_stats_merge():
    merged = CorpusStats(1, 2, 3).merge(CorpusStats(10, 20, 30))
    assert merged == CorpusStats(11, 22, 33)


def test_content_filter():
    sentence = [Token("the", "O"), Token("dog", "N"), Token("runs", "V")]
    assert content_filter(sentence) == [Token("dog", "N"), Token("runs", "V")]
    assert content_filter([Token("the", "O"), Token("of", "O")]) == []
    filtered = content_filter(sentence)
    assert content_filter(filtered) == filtered
