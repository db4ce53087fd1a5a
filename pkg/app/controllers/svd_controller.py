from app.services.model_builder import ModelBuilder
from app.services.svd import save_dense
from app.services.weighting import load_weighted
from app.utils.config import resolve_stage_config
from app.utils.logger import logger


def svd_controller(args) -> int:
    weighted = load_weighted(args.model)
    config = resolve_stage_config(weighted.meta, "weight", args.config,
                                  {"svd_k": args.k, "svd_p": args.p, "seed": args.seed})
    logger.info("Reducing %s to k=%d (p=%s, seed=%d)", args.model, config.svd_k, config.svd_p, config.seed)
    dense = ModelBuilder(config).reduce(weighted)
    save_dense(dense, args.out)
    logger.info("Dense model written to %s", args.out)
    return 0
