from pathlib import Path

from app.controllers.similarity_controller import scoring_config
from app.schemas.dsm_schemas import MeasureParams
from app.services.analysis import (hubness_profile, read_queries, write_profile_csv, write_profile_json,
                                   write_summary_csv)
from app.services.evaluation import load_dataset
from app.services.similarity import load_space
from app.utils.error_handling import ConfigurationError
from app.utils.logger import logger


def _queries(args):
    if args.queries:
        return read_queries(args.queries)
    if args.dataset and args.format:
        words = []
        for pair in load_dataset(args.dataset, args.format).pairs:
            words.extend([(pair.word1, pair.pos1), (pair.word2, pair.pos2)])
        return list(dict.fromkeys(words))
    raise ConfigurationError("hubness needs --queries FILE or --dataset FILE --format FORMAT")


def hubness_controller(args) -> int:
    space = load_space(args.model)
    config = scoring_config(space, args)
    top_k = args.top_k or config.hubness_k
    profile = hubness_profile(space, _queries(args), top_k, config.measure,
                              MeasureParams(apsyn_n=config.apsyn_n), config.pos_policy)
    out = Path(args.out)
    write_profile_csv(profile, out.with_suffix(".csv"))
    write_summary_csv(profile, out.with_suffix(".summary.csv"))
    fingerprints = dict(space.meta.get("fingerprints") or {})
    fingerprints["score"] = config.fingerprint("score")
    write_profile_json(profile, out.with_suffix(".json"), space.n_rows, config.apsyn_n, fingerprints)
    logger.info("Hubness profile written to %s (%d rows)", out.with_suffix(".csv"), len(profile.points))
    print(f"queries={profile.n_queries} skipped={profile.n_skipped} rows={len(profile.points)} "
          f"zero_score={profile.n_zero_score} skewness={profile.skewness(space.n_rows):.3f}")
    return 0
