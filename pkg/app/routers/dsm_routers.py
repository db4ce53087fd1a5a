import argparse

from app.controllers.build_controller import build_controller
from app.controllers.eval_controller import eval_controller
from app.controllers.hubness_controller import hubness_controller
from app.controllers.similarity_controller import neighbors_controller, sim_controller
from app.controllers.svd_controller import svd_controller
from app.controllers.sweep_controller import sweep_controller
from app.controllers.weight_controller import weight_controller
from app.utils.enums import DatasetFormat, Measure, OovPolicy, PosPolicy, Scheme, WindowOver


def _dataset_format(value: str) -> DatasetFormat:
    return DatasetFormat(value.upper())


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value pipeline config")
    parser.add_argument("--verbose", action="store_true", help="debug logging")


def _scoring(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--measure", type=Measure, choices=[e.value for e in Measure])
    parser.add_argument("--apsyn-n", dest="apsyn_n", type=int)
    parser.add_argument("--pos-policy", dest="pos_policy", type=PosPolicy, choices=[e.value for e in PosPolicy])
    parser.add_argument("--oov-policy", dest="oov_policy", type=OovPolicy, choices=[e.value for e in OovPolicy])


def _corpus(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", action="append", help="tagged corpus file (repeatable, .gz allowed)")
    parser.add_argument("--min-context-freq", dest="min_context_freq", type=int)
    parser.add_argument("--tagmap", help="key=value file mapping tag prefixes to N/V/J")
    parser.add_argument("--workers", type=int)


def register(subparsers) -> None:
    build = subparsers.add_parser("build", help="count co-occurrences into a count model")
    _common(build)
    _corpus(build)
    build.add_argument("--window", type=int)
    build.add_argument("--window-over", dest="window_over", type=WindowOver, choices=[e.value for e in WindowOver])
    build.add_argument("--targets", help="file with one lemma or lemma_POS per line, or 'all'")
    build.add_argument("--target-dataset", dest="target_dataset", action="append",
                       help="FORMAT:PATH whose words become rows (repeatable)")
    build.add_argument("--out", required=True)
    build.set_defaults(handler=build_controller)

    weight = subparsers.add_parser("weight", help="apply RAW, PPMI or LMI to a count model")
    _common(weight)
    weight.add_argument("model")
    weight.add_argument("--scheme", type=Scheme, choices=[e.value for e in Scheme])
    weight.add_argument("--out", required=True)
    weight.set_defaults(handler=weight_controller)

    svd = subparsers.add_parser("svd", help="reduce a weighted model with truncated SVD")
    _common(svd)
    svd.add_argument("model")
    svd.add_argument("--k", type=int)
    svd.add_argument("--p", type=float, help="eigenvalue weighting exponent: 0, 0.5 or 1")
    svd.add_argument("--seed", type=int)
    svd.add_argument("--out", required=True)
    svd.set_defaults(handler=svd_controller)

    sim = subparsers.add_parser("sim", help="similarity of two words")
    _common(sim)
    _scoring(sim)
    sim.add_argument("model")
    sim.add_argument("word1", help="lemma or lemma_POS")
    sim.add_argument("word2", help="lemma or lemma_POS")
    sim.set_defaults(handler=sim_controller)

    neighbors = subparsers.add_parser("neighbors", help="nearest neighbors of a word")
    _common(neighbors)
    _scoring(neighbors)
    neighbors.add_argument("model")
    neighbors.add_argument("word", help="lemma or lemma_POS")
    neighbors.add_argument("--top-k", dest="top_k", type=int, default=10)
    neighbors.set_defaults(handler=neighbors_controller)

    evaluate = subparsers.add_parser("eval", help="Spearman correlation against a gold dataset")
    _common(evaluate)
    _scoring(evaluate)
    evaluate.add_argument("model")
    evaluate.add_argument("--dataset", required=True)
    evaluate.add_argument("--format", type=_dataset_format, choices=[e.value for e in DatasetFormat], required=True)
    evaluate.add_argument("--out", required=True, help="output prefix; writes <out>.csv and <out>.json")
    evaluate.set_defaults(handler=eval_controller)

    hubness = subparsers.add_parser("hubness", help="neighbor frequency-rank profile")
    _common(hubness)
    _scoring(hubness)
    hubness.add_argument("model")
    hubness.add_argument("--queries", help="file with one query per line")
    hubness.add_argument("--dataset", help="take queries from the words of a dataset")
    hubness.add_argument("--format", type=_dataset_format, choices=[e.value for e in DatasetFormat])
    hubness.add_argument("--top-k", dest="top_k", type=int)
    hubness.add_argument("--out", required=True, help="output prefix; writes <out>.csv and <out>.summary.csv")
    hubness.set_defaults(handler=hubness_controller)

    sweep = subparsers.add_parser("sweep", help="window x scheme x SVD grid evaluated on datasets")
    _common(sweep)
    _corpus(sweep)
    sweep.add_argument("--window", type=int, action="append", help="restrict the window grid (repeatable)")
    sweep.add_argument("--dataset", action="append", required=True, help="FORMAT:PATH (repeatable)")
    sweep.add_argument("--k", type=int)
    sweep.add_argument("--p", type=float)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--pos-policy", dest="pos_policy", type=PosPolicy, choices=[e.value for e in PosPolicy])
    sweep.add_argument("--oov-policy", dest="oov_policy", type=OovPolicy, choices=[e.value for e in OovPolicy])
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(handler=sweep_controller)
