"""``codegraph`` command-line entry point.

Exit status: 0 on success, 1 on a domain error (a JSON diagnostic is
written to stderr), 2 on a usage error.
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from codegraph import __version__
from codegraph.config import ENV_VAR, load_config
from codegraph.dataset import build_split, corpus_stats, load_index
from codegraph.ek import default_api_pairs_path, load_api_pairs, make_encoder, transform
from codegraph.errors import CodeGraphError, ShapeMismatch
from codegraph.frontend import SourceUnit, parse, split_methods
from codegraph.fusion import FusionParams, Pipeline, PipelineConfig, clone_score
from codegraph.gnn.params import PgnnConfig, PgnnParams, load_checkpoint, save_checkpoint
from codegraph.partition import PartitionConfig, partition
from codegraph.sast import MergeTable, build_sast, build_vocabulary, default_merges, default_vocabulary
from codegraph.selfcheck import run_selfcheck

SCHEMA_VERSION = 1
log = logging.getLogger("codegraph")


class JsonLogFormatter(logging.Formatter):
    def format(self, record):
        return json.dumps(
            {"level": record.levelname, "logger": record.name, "message": record.getMessage()},
            sort_keys=True,
        )


def dump_json(payload):
    return json.dumps({"schema_version": SCHEMA_VERSION, **payload}, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit(text, out=None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def read_unit(path):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return SourceUnit.from_file(p)


def method_name(ast, method=0):
    node = ast.nodes[method]
    for c in node.children:
        if ast.nodes[c].kind.name == "Identifier":
            return ast.nodes[c].token
    return None


# resources -------------------------------------------------------------


def load_vocab(cfg):
    return build_vocabulary(subwords=cfg.vocab) if cfg.vocab else default_vocabulary()


def load_merges(cfg):
    return MergeTable.load(cfg.merges) if cfg.merges else default_merges()


def load_store(cfg):
    return load_api_pairs(cfg.api_pairs or default_api_pairs_path())


def build_pipeline(cfg):
    vocab = load_vocab(cfg)
    if cfg.params:
        pgnn, extra = load_checkpoint(cfg.params)
        if pgnn.cfg.vocab_size != vocab.size:
            raise ShapeMismatch(
                f"checkpoint vocab size {pgnn.cfg.vocab_size} != vocabulary size {vocab.size}"
            )
        fusion = FusionParams.from_tensors(extra) if "fc_f.w" in extra else FusionParams.init(pgnn.d, cfg.seed)
    else:
        pgnn = PgnnParams.init(PgnnConfig(vocab.size, d=cfg.dims), cfg.seed)
        fusion = FusionParams.init(cfg.dims, cfg.seed)
    return Pipeline(
        pgnn,
        fusion,
        store=load_store(cfg),
        encoder=make_encoder(cfg.encoder, pgnn.d, cfg.encoder_command),
        vocab=vocab,
        merges=load_merges(cfg),
        config=PipelineConfig(
            lambda_=cfg.lambda_, max_length=cfg.effective_max_length, threshold=cfg.threshold
        ),
    )


# subcommands -----------------------------------------------------------


def cmd_parse(args, cfg):
    ast = parse(read_unit(args.file))
    emit(dump_json(ast.to_dict()), args.out)


def cmd_sast(args, cfg):
    ast = parse(read_unit(args.file))
    sast = build_sast(ast, load_vocab(cfg), load_merges(cfg))
    emit(dump_json({"path": args.file, **sast.to_dict()}), args.out)
    if args.dot:
        Path(args.dot).write_text(sast.to_dot(), encoding="utf-8")


def cmd_partition(args, cfg):
    ast = parse(read_unit(args.file))
    vocab, merges = load_vocab(cfg), load_merges(cfg)
    methods = []
    for m in split_methods(ast):
        sast = build_sast(m, vocab, merges)
        parts = partition(sast, PartitionConfig(cfg.lambda_))
        methods.append({"name": method_name(m), "nodes": len(sast), **parts.to_dict()})
    emit(dump_json({"path": args.file, "lambda": cfg.lambda_, "methods": methods}), args.out)


_worker_pipeline = None


def _init_worker(cfg):
    global _worker_pipeline
    _worker_pipeline = build_pipeline(cfg)


def embed_file(path, pipeline=None):
    pipeline = pipeline or _worker_pipeline
    methods = []
    for m in split_methods(parse(read_unit(path))):
        res = pipeline.encode_ast(m)
        methods.append(
            {
                "name": method_name(m),
                "nodes": len(res["sast"]),
                "subgraphs": len(res["partition"]),
                "ep": res["ep"].v.tolist(),
                "ee": res["ee"].tolist(),
                "ef": res["ef"].v.tolist(),
            }
        )
    return {"path": path, "methods": methods}


def cmd_embed(args, cfg):
    pipeline = build_pipeline(cfg)
    if cfg.jobs > 1 and len(args.files) > 1:
        # map() yields in input order, so the merged output is deterministic.
        with ProcessPoolExecutor(cfg.jobs, initializer=_init_worker, initargs=(cfg,)) as pool:
            files = list(pool.map(embed_file, args.files))
    else:
        files = [embed_file(f, pipeline) for f in args.files]
    payload = {
        "lambda": cfg.lambda_,
        "dims": pipeline.pgnn.d,
        "seed": cfg.seed,
        "files": files,
    }
    emit(dump_json(payload), args.out)


def cmd_transform(args, cfg):
    ast = parse(read_unit(args.file))
    emit(transform(ast, load_store(cfg)).text + "\n", args.out)


def cmd_split(args, cfg):
    fragments = load_index(args.index, read_sources=False)
    manifest = build_split(fragments, args.counts, cfg.seed, by=args.by, max_positives=args.max_positives)
    emit(dump_json({"index": args.index, "counts": list(args.counts), **manifest.to_dict()}), args.out)


def cmd_stats(args, cfg):
    stats = corpus_stats(load_index(args.index), jobs=cfg.jobs)
    emit(dump_json({"index": args.index, **stats.to_dict()}), args.out)


def cmd_clone_score(args, cfg):
    pipeline = build_pipeline(cfg)
    score = clone_score(read_unit(args.file_a), read_unit(args.file_b), pipeline)
    payload = {"a": args.file_a, "b": args.file_b, "lambda": cfg.lambda_, "seed": cfg.seed, **score.to_dict()}
    emit(dump_json(payload), args.out)


def cmd_selfcheck(args, cfg):
    # Small defaults keep the check fast; flags override them.
    report = run_selfcheck(
        dims=args.dims if args.dims is not None else 8,
        seed=args.seed if args.seed is not None else 7,
    )
    emit(dump_json(report), args.out)
    return 0 if report["passed"] else 1


def cmd_init_params(args, cfg):
    vocab = load_vocab(cfg)
    pgnn = PgnnParams.init(PgnnConfig(vocab.size, d=cfg.dims), cfg.seed)
    save_checkpoint(args.out, pgnn, extra=FusionParams.init(cfg.dims, cfg.seed).tensors())


# argument parsing ------------------------------------------------------


def _counts(text):
    try:
        parts = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("counts must be three comma-separated integers") from None
    if len(parts) != 3 or min(parts) < 0:
        raise argparse.ArgumentTypeError("counts must be three comma-separated non-negative integers")
    return parts


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"key=value config file (default: ${ENV_VAR} or ./codegraph.conf)")
    common.add_argument("--lambda", dest="lambda_", type=int, help="subgraph node threshold")
    common.add_argument("--dims", type=int, help="embedding width d")
    common.add_argument("--seed", type=int, help="parameter / sampling seed")
    common.add_argument("--params", help="parameter checkpoint (.npz)")
    common.add_argument("--vocab", help="subword vocabulary file (token<TAB>id)")
    common.add_argument("--merges", help="BPE merge file (left right)")
    common.add_argument("--api", dest="api_pairs", help="API description TSV")
    common.add_argument("--encoder", choices=("reference", "external"))
    common.add_argument("--encoder-command", help="command for the external encoder")
    common.add_argument("--task", choices=("clone", "summarization"), help="truncation profile")
    common.add_argument("--jobs", type=int, help="worker processes for batch commands")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--log-level", default="WARNING")

    parser = argparse.ArgumentParser(
        prog="codegraph",
        description="Java-subset program graphs and PGNN embeddings. "
        "Settings resolve as: flags > config file > defaults.",
    )
    parser.add_argument("--version", action="version", version=f"codegraph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    add("parse", cmd_parse, "parse a source file to AST JSON").add_argument("file")
    p = add("sast", cmd_sast, "build the S-AST (JSON, optional DOT)")
    p.add_argument("file")
    p.add_argument("--dot", help="write a Graphviz DOT file")
    add("partition", cmd_partition, "partition each method's S-AST").add_argument("file")
    add("embed", cmd_embed, "compute E_p / E_e / E_f per method").add_argument("files", nargs="+")
    add("transform", cmd_transform, "pre-order serialisation plus API descriptions").add_argument("file")
    p = add("split", cmd_split, "functionality-disjoint train/val/test split")
    p.add_argument("--index", required=True)
    p.add_argument("--counts", type=_counts, default=(22, 11, 10))
    p.add_argument("--by", choices=("functionality", "random"), default="functionality")
    p.add_argument("--max-positives", type=int)
    p = add("stats", cmd_stats, "corpus S-AST statistics and recommended lambda")
    p.add_argument("--index", required=True)
    p = add("clone-score", cmd_clone_score, "siamese similarity of two methods")
    p.add_argument("file_a")
    p.add_argument("file_b")
    add("selfcheck", cmd_selfcheck, "gradient and permutation-invariance checks")
    add("init-params", cmd_init_params, "write a freshly initialised checkpoint")
    return parser


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonLogFormatter())
    logging.basicConfig(level=args.log_level.upper(), handlers=[handler], force=True)
    if args.command == "init-params" and not args.out:
        parser.error("init-params requires --out")
    overrides = {
        k: getattr(args, k, None)
        for k in (
            "lambda_", "dims", "seed", "params", "vocab", "merges", "api_pairs",
            "encoder", "encoder_command", "task", "jobs",
        )
    }
    try:
        cfg = load_config(args.config, overrides).check_paths()
        code = args.func(args, cfg)
    except (CodeGraphError, OSError) as exc:
        if isinstance(exc, CodeGraphError):
            diag = exc.to_dict()
        else:
            diag = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(diag, sort_keys=True) + "\n")
        return 1
    return code or 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
