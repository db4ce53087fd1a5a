from pathlib import Path

from app.controllers.similarity_controller import scoring_config
from app.schemas.dsm_schemas import MeasureParams
from app.services.evaluation import evaluate, load_dataset, write_results_csv, write_summary_json
from app.services.similarity import load_space
from app.utils.logger import logger


def eval_controller(args) -> int:
    space = load_space(args.model)
    config = scoring_config(space, args)
    dataset = load_dataset(args.dataset, args.format)
    result = evaluate(space, dataset, config.measure, MeasureParams(apsyn_n=config.apsyn_n),
                      config.pos_policy, config.oov_policy)

    fingerprints = dict(space.meta.get("fingerprints") or {})
    fingerprints["score"] = config.fingerprint("score")
    out = Path(args.out)
    write_results_csv(result, out.with_suffix(".csv"))
    summary = write_summary_json(result, out.with_suffix(".json"), fingerprints)
    logger.info("Results written to %s.{csv,json}", out.with_suffix(""))
    print(f"rho={summary.rho:.4f} scored={summary.n_scored}/{summary.n_pairs} coverage={summary.coverage:.3f}")
    return 0
