from app.services.cooccur import load_matrix
from app.services.model_builder import ModelBuilder
from app.services.weighting import save_weighted
from app.utils.config import resolve_stage_config
from app.utils.logger import logger


def weight_controller(args) -> int:
    matrix = load_matrix(args.model)
    config = resolve_stage_config(matrix.meta, "build", args.config, {"scheme": args.scheme})
    logger.info("Weighting %s with %s", args.model, config.scheme.value)
    weighted = ModelBuilder(config).weight(matrix)
    save_weighted(weighted, args.out)
    logger.info("Weighted model written to %s", args.out)
    return 0
