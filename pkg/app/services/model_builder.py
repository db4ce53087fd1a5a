from typing import Optional, Set

from app.schemas.dsm_schemas import PipelineConfig
from app.services.cooccur import (CooccurrenceMatrix, Vocabulary, build_vocab_files, count_corpus_files,
                                  read_targets)
from app.services.corpus import DEFAULT_TAGMAP, TagMap
from app.services.evaluation import dataset_targets, load_dataset, parse_dataset_spec
from app.services.svd import DenseModel, truncated_svd
from app.services.weighting import WeightedMatrix, apply_scheme
from app.utils.error_handling import ConfigurationError
from app.utils.logger import logger


def stamp(meta: dict, config: PipelineConfig, stage: str) -> dict:
    """Record the effective config and the fingerprints up to `stage` in a model's metadata."""
    meta = dict(meta)
    meta["config"] = config.model_dump(mode="json", exclude={"workers", "hubness_k"})
    meta["fingerprints"] = config.fingerprints(stage)
    return meta


class ModelBuilder:
    """Runs the build → weight → svd stages for one PipelineConfig."""

    def __init__(self, config: PipelineConfig):
        logger.info("Initializing ModelBuilder (window=%d, scheme=%s)", config.window, config.scheme.value)
        self.config = config
        self.tagmap: TagMap = TagMap.from_file(config.tagmap) if config.tagmap else DEFAULT_TAGMAP

    def resolve_targets(self, vocab: Vocabulary) -> Optional[Set[int]]:
        config = self.config
        if config.targets == "all" and not config.target_datasets:
            return None
        targets: Set[int] = set()
        if config.targets != "all":
            targets |= read_targets(config.targets, vocab)
        if config.target_datasets:
            datasets = [load_dataset(path, fmt) for fmt, path in map(parse_dataset_spec, config.target_datasets)]
            targets |= dataset_targets(datasets, vocab)
        logger.info("Restricting rows to %d target words", len(targets))
        return targets

    def build_counts(self) -> CooccurrenceMatrix:
        config = self.config
        if not config.corpus:
            raise ConfigurationError("No corpus files given")
        vocab, _ = build_vocab_files(config.corpus, config.min_context_freq, self.tagmap, config.workers)
        matrix = count_corpus_files(config.corpus, vocab, config.window, self.resolve_targets(vocab),
                                    config.window_over, self.tagmap, config.workers)
        matrix.meta = stamp(matrix.meta, config, "build")
        return matrix

    def weight(self, matrix: CooccurrenceMatrix) -> WeightedMatrix:
        weighted = apply_scheme(matrix, self.config.scheme)
        weighted.meta = stamp(weighted.meta, self.config, "weight")
        return weighted

    def reduce(self, weighted: WeightedMatrix) -> DenseModel:
        config = self.config
        dense = truncated_svd(weighted, config.svd_k, config.seed, config.svd_p, config.svd_dense_cutoff)
        dense.meta = stamp(dense.meta, config, "svd")
        return dense
