import csv
from typing import Iterator, List, Optional, Tuple

from app.schemas.dsm_schemas import APSYN_N_GRID, WINDOW_GRID, MeasureParams, PipelineConfig, SweepRow
from app.services.evaluation import evaluate, load_dataset, parse_dataset_spec
from app.services.model_builder import ModelBuilder
from app.services.similarity import SemanticSpace
from app.utils.config import build_config, load_pipeline_config
from app.utils.enums import Measure, Scheme
from app.utils.error_handling import ConfigurationError, EvaluationError
from app.utils.logger import logger

SWEEP_SCHEMES = (Scheme.RAW, Scheme.PPMI, Scheme.LMI)
SCHEME_LABELS = {Scheme.RAW: "Freq", Scheme.PPMI: "PPMI", Scheme.LMI: "LMI"}
SWEEP_COLUMNS = ["model", "window", "measure", "dataset", "rho", "coverage", "fingerprint"]


def _spaces(builder: ModelBuilder, counts) -> Iterator[Tuple[str, Optional[SemanticSpace]]]:
    """Sparse space then its SVD; the SVD space is None when k does not fit the matrix."""
    config = builder.config
    label = SCHEME_LABELS[config.scheme]
    weighted = builder.weight(counts)
    yield label, SemanticSpace.from_weighted(weighted)
    svd_label = f"SVD-{label}{config.svd_k}"
    try:
        dense = builder.reduce(weighted)
    except ConfigurationError as exc:
        logger.warning("%s skipped at window %d: %s", svd_label, config.window, exc)
        yield svd_label, None
        return
    yield svd_label, SemanticSpace.from_dense(dense)


def _variant(base: PipelineConfig, **changes) -> PipelineConfig:
    return build_config(base.model_dump(mode="json"), changes)


def _scorers(label: str, space: Optional[SemanticSpace]) -> Iterator[Tuple[str, Measure, int]]:
    yield f"Cos{label}", Measure.COSINE, 0
    if space is not None and not space.is_dense and space.scheme is not Scheme.RAW:
        for n in APSYN_N_GRID:
            yield f"APSyn{label}-{n}", Measure.APSYN, n


def run_sweep(base: PipelineConfig, dataset_specs: List[str], windows=WINDOW_GRID) -> List[SweepRow]:
    if not dataset_specs:
        raise ConfigurationError("sweep needs at least one --dataset FORMAT:PATH")
    datasets = [load_dataset(path, fmt) for fmt, path in map(parse_dataset_spec, dataset_specs)]
    if not base.target_datasets:
        base = _variant(base, target_datasets=list(dataset_specs))

    rows: List[SweepRow] = []
    for window in windows:
        counts = ModelBuilder(_variant(base, window=window)).build_counts()
        for scheme in SWEEP_SCHEMES:
            builder = ModelBuilder(_variant(base, window=window, scheme=scheme))
            for label, space in _spaces(builder, counts):
                for model, measure, n in _scorers(label, space):
                    scored = _variant(builder.config, measure=measure, apsyn_n=n or base.apsyn_n)
                    params = MeasureParams(apsyn_n=scored.apsyn_n)
                    for dataset in datasets:
                        rho, coverage = None, 0.0
                        if space is not None:
                            try:
                                result = evaluate(space, dataset, measure, params, base.pos_policy, base.oov_policy)
                                rho, coverage = result.rho, result.coverage
                            except EvaluationError as exc:
                                logger.warning("%s w=%d on %s: %s", model, window, dataset.name, exc)
                        rows.append(SweepRow(model=model, window=window, measure=measure.value,
                                             dataset=dataset.name, rho=rho, coverage=coverage,
                                             fingerprint=scored.fingerprint("score")))
                        logger.info("%s w=%d %s: rho=%s", model, window, dataset.name,
                                    "n/a" if rho is None else f"{rho:.4f}")
    return rows


def write_sweep_csv(rows: List[SweepRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([row.model, row.window, row.measure, row.dataset,
                             "" if row.rho is None else f"{row.rho:.6f}", f"{row.coverage:.6f}", row.fingerprint])


def sweep_controller(args) -> int:
    config = load_pipeline_config(args.config, {
        "corpus": args.corpus,
        "min_context_freq": args.min_context_freq,
        "tagmap": args.tagmap,
        "svd_k": args.k,
        "svd_p": args.p,
        "seed": args.seed,
        "workers": args.workers,
        "pos_policy": args.pos_policy,
        "oov_policy": args.oov_policy,
    })
    windows = tuple(args.window) if args.window else WINDOW_GRID
    rows = run_sweep(config, args.dataset, windows)
    write_sweep_csv(rows, args.out)
    logger.info("Sweep table with %d rows written to %s", len(rows), args.out)
    return 0
