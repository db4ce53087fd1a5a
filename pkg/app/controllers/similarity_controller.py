from app.schemas.dsm_schemas import MeasureParams, PipelineConfig
from app.services.analysis import parse_query
from app.services.cooccur import format_word
from app.services.evaluation import resolve_word
from app.services.similarity import SemanticSpace, load_space, nearest_neighbors, pair_similarity
from app.utils.config import resolve_stage_config
from app.utils.enums import ModelKind
from app.utils.logger import logger

_LAST_STAGE = {ModelKind.COUNT: "build", ModelKind.WEIGHTED: "weight", ModelKind.DENSE: "svd"}


def scoring_config(space: SemanticSpace, args) -> PipelineConfig:
    """Config for a scoring command: the model's own config plus scoring flags."""
    overrides = {
        "measure": getattr(args, "measure", None),
        "apsyn_n": getattr(args, "apsyn_n", None),
        "pos_policy": getattr(args, "pos_policy", None),
        "oov_policy": getattr(args, "oov_policy", None),
    }
    return resolve_stage_config(space.meta, _LAST_STAGE[space.kind], args.config, overrides)


def sim_controller(args) -> int:
    space = load_space(args.model)
    config = scoring_config(space, args)
    w1, _ = resolve_word(space, *parse_query(args.word1), config.pos_policy)
    w2, _ = resolve_word(space, *parse_query(args.word2), config.pos_policy)
    score = pair_similarity(space, w1, w2, config.measure, MeasureParams(apsyn_n=config.apsyn_n))
    logger.info("%s(%s, %s) = %.6f", config.measure.value, format_word(w1), format_word(w2), score.value)
    print(f"{score.value:.6f}")
    return 0


def neighbors_controller(args) -> int:
    space = load_space(args.model)
    config = scoring_config(space, args)
    word, _ = resolve_word(space, *parse_query(args.word), config.pos_policy)
    neighbors = nearest_neighbors(space, word, args.top_k, config.measure, MeasureParams(apsyn_n=config.apsyn_n))
    print("neighbor,score")
    for neighbor in neighbors:
        print(f"{format_word(neighbor.word)},{neighbor.score:.6f}")
    return 0
