from app.services.cooccur import save_matrix
from app.services.model_builder import ModelBuilder
from app.utils.config import load_pipeline_config
from app.utils.logger import logger


def build_controller(args) -> int:
    config = load_pipeline_config(args.config, {
        "corpus": args.corpus,
        "window": args.window,
        "window_over": args.window_over,
        "min_context_freq": args.min_context_freq,
        "tagmap": args.tagmap,
        "targets": args.targets,
        "target_datasets": args.target_dataset,
        "workers": args.workers,
    })
    logger.info("Building count model from %d corpus file(s)", len(config.corpus))
    matrix = ModelBuilder(config).build_counts()
    save_matrix(matrix, args.out)
    logger.info("Count model written to %s", args.out)
    return 0
