"""Pipeline driver: every stage of the toolkit behind one subcommand each.

Stages read a flat key=value config file and leave their artifacts in the
configured work directory.  Every artifact starts with a header recording the
resolved-config hash and the seed, so a finished pipeline can be audited for
stage mixups and identical configs reproduce byte-identical outputs.

Exit codes: 0 success, 1 usage/config problems, 2 data problems.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import baselines, dataset, embeddings, evaluation, filtering, forest, kb, paths
from .neural import (
    TrainConfig,
    init_model,
    init_relation_embedder,
    load_model,
    make_predictor,
    save_model,
    train,
)

MODEL_NAMES = ("random", "unigram", "single", "forest", "lstm")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 on usage problems, not argparse's 2
        raise UsageError(f"{self.prog}: {message}")


# -- configuration -------------------------------------------------------------

CONFIG_DEFAULTS = {
    "kb_edges": "",
    "vectors": "",
    "pairs": "",
    "workdir": "work",
    "max_len": "3",
    "direction_mode": "undirected",
    "max_paths": "0",
    "strategy": "target_anchored",
    "expected_dim": "0",
    "test_fraction": "0.25",
    "dev_fraction": "0.25",
    "seed": "0",
    "hidden_sizes": "450,200,100",
    "architecture": "stacked_lstm",
    "batch_size": "25",
    "epochs": "50",
    "learning_rate": "0.001",
    "dropout": "0.5",
    "entity_mode": "pretrained",
    "n_trees": "100",
    "forest_max_depth": "0",
    "forest_feature_subsample": "0",
}

_PATH_KEYS = ("kb_edges", "vectors", "pairs", "workdir")


class PipelineConfig:
    def __init__(self, values: dict[str, str], base_dir: str):
        self.values = values
        self.base_dir = base_dir
        self.hash = hashlib.sha256(
            "\n".join(f"{k}={values[k]}" for k in sorted(values)).encode("utf-8")
        ).hexdigest()[:12]

    @property
    def seed(self) -> int:
        return self.int_value("seed")

    def path(self, key: str) -> str:
        value = self.values[key]
        if not value:
            raise UsageError(f"config key {key!r} is required for this command")
        return os.path.normpath(os.path.join(self.base_dir, value))

    def artifact(self, name: str) -> str:
        return os.path.join(self.path("workdir"), name)

    def int_value(self, key: str) -> int:
        try:
            return int(self.values[key])
        except ValueError:
            raise UsageError(f"config key {key!r} must be an integer") from None

    def float_value(self, key: str) -> float:
        try:
            return float(self.values[key])
        except ValueError:
            raise UsageError(f"config key {key!r} must be a number") from None

    def str_value(self, key: str) -> str:
        return self.values[key]


def load_config(path: str, overrides: Optional[dict[str, str]] = None) -> PipelineConfig:
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    values = dict(CONFIG_DEFAULTS)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in CONFIG_DEFAULTS:
                raise UsageError(
                    f"{path}:{lineno}: unknown config key {key!r} "
                    f"(known: {', '.join(sorted(CONFIG_DEFAULTS))})"
                )
            values[key] = value.strip()
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = str(value)
    return PipelineConfig(values, os.path.dirname(os.path.abspath(path)))


# -- artifact headers ----------------------------------------------------------


def _header_line(config: PipelineConfig) -> str:
    return f"# relchain config_hash={config.hash} seed={config.seed}\n"


def _read_header_hash(path: str) -> Optional[str]:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("# relchain "):
        for token in first.split():
            if token.startswith("config_hash="):
                return token.split("=", 1)[1]
    return None


def _write_json_artifact(path: str, config: PipelineConfig, payload: dict) -> None:
    payload = {"config_hash": config.hash, "seed": config.seed, **payload}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _read_json_artifact(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _require_artifact(path: str, producer: str) -> str:
    if not os.path.exists(path):
        raise DataError(
            f"missing artifact {os.path.basename(path)!r}: run `relchain {producer}` first"
        )
    return path


def _require_file(path: str, what: str) -> str:
    if not os.path.exists(path):
        raise DataError(f"{what} not found: {path}")
    return path


def _load_graph(config: PipelineConfig) -> kb.KnowledgeGraph:
    return kb.load_edges_file(_require_file(config.path("kb_edges"), "edge file"))


def _load_table(config: PipelineConfig) -> embeddings.EmbeddingTable:
    expected = config.int_value("expected_dim") or None
    return embeddings.load_word_vectors_file(
        _require_file(config.path("vectors"), "vector file"), expected_dim=expected
    )


# -- subcommands ----------------------------------------------------------------


def cmd_ingest(args) -> int:
    config = load_config(args.config, {"seed": args.seed})
    g = _load_graph(config)
    print(f"{g.n_concepts} concepts, {g.n_relations} relations, {g.n_edges} edges")
    return 0


def cmd_convert_conceptnet(args) -> int:
    dump = _require_file(args.dump, "assertion dump")
    out = args.out or dump + ".edges.tsv"
    converted = 0
    skipped = 0
    with open(dump, "r", encoding="utf-8") as src, open(out, "w", encoding="utf-8") as dst:
        dst.write(f"# relchain convert-conceptnet source={os.path.basename(dump)}\n")
        for raw in src:
            fields = raw.rstrip("\n").split("\t")
            if len(fields) < 4:
                skipped += 1
                continue
            rel_uri, start_uri, end_uri = fields[1], fields[2], fields[3]
            if not (
                rel_uri.startswith("/r/")
                and start_uri.startswith("/c/en/")
                and end_uri.startswith("/c/en/")
            ):
                skipped += 1
                continue
            relation = rel_uri.split("/")[2]
            start = start_uri.split("/")[3]
            end = end_uri.split("/")[3]
            if not (relation and start and end):
                skipped += 1
                continue
            weight = 1.0
            if len(fields) >= 5:
                try:
                    weight = float(json.loads(fields[4]).get("weight", 1.0))
                except (ValueError, json.JSONDecodeError):
                    weight = 1.0
            dst.write(
                f"{kb.normalize(relation)}\t{kb.normalize(start)}\t{kb.normalize(end)}\t{weight}\n"
            )
            converted += 1
    print(f"converted {converted} edges to {out} (skipped {skipped} rows)")
    return 0


def _read_pairs(path: str) -> list[tuple[str, str]]:
    out: list[tuple[str, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise DataError(f"{path}:{lineno}: expected 'e1<TAB>e2'")
            out.append((fields[0], fields[1]))
    return out


def cmd_paths(args) -> int:
    config = load_config(args.config, {"seed": args.seed})
    g = _load_graph(config)
    pair_rows = _read_pairs(_require_file(config.path("pairs"), "pairs file"))
    max_paths = config.int_value("max_paths") or None
    limits = paths.SearchLimits(
        max_len=config.int_value("max_len"),
        max_paths=max_paths,
        direction_mode=config.str_value("direction_mode"),
    )
    os.makedirs(config.path("workdir"), exist_ok=True)
    out_path = config.artifact("paths.tsv")
    per_pair = []
    skipped = []
    total = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(_header_line(config))
        for raw1, raw2 in pair_rows:
            c1, c2 = g.find_concept(raw1), g.find_concept(raw2)
            if c1 is None or c2 is None:
                reason = "unknown concept: " + ", ".join(
                    r for r, c in ((raw1, c1), (raw2, c2)) if c is None
                )
                skipped.append({"e1": raw1, "e2": raw2, "reason": reason})
                print(f"skipping pair ({raw1}, {raw2}): {reason}", file=sys.stderr)
                continue
            if c1 == c2:
                skipped.append({"e1": raw1, "e2": raw2, "reason": "identical endpoints"})
                print(
                    f"skipping pair ({raw1}, {raw2}): identical endpoints", file=sys.stderr
                )
                continue
            result = paths.enumerate_paths(g, c1, c2, limits)
            for p in result.paths:
                fh.write(paths.render_path_line(g, p) + "\n")
            per_pair.append(
                {
                    "e1": g.concepts[c1],
                    "e2": g.concepts[c2],
                    "paths": len(result.paths),
                    "truncated": result.truncated,
                }
            )
            total += len(result.paths)
    _write_json_artifact(
        config.artifact("paths_manifest.json"),
        config,
        {
            "pairs_total": len(pair_rows),
            "pairs_resolved": len(per_pair),
            "pairs_skipped": skipped,
            "per_pair": per_pair,
            "total_paths": total,
        },
    )
    print(f"{total} paths for {len(per_pair)} pairs -> {out_path}")
    return 0


def _read_paths_artifact(
    g: kb.KnowledgeGraph, path: str
) -> list[tuple[paths.RelationPath, Optional[float]]]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            try:
                out.append(paths.parse_path_line(g, line))
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    return out


def cmd_filter(args) -> int:
    config = load_config(args.config, {"seed": args.seed, "strategy": args.strategy})
    g = _load_graph(config)
    table = _load_table(config)
    try:
        strategy = filtering.ScoreStrategy(config.str_value("strategy"))
    except ValueError:
        raise UsageError(
            f"unknown strategy {config.str_value('strategy')!r}; choose from "
            f"{[s.value for s in filtering.ScoreStrategy]}"
        ) from None
    in_path = _require_artifact(config.artifact("paths.tsv"), "paths")
    parsed = _read_paths_artifact(g, in_path)

    by_pair: dict[tuple[int, int], list[paths.RelationPath]] = {}
    for p, _ in parsed:
        by_pair.setdefault((p.concepts[0], p.concepts[-1]), []).append(p)

    out_path = config.artifact("filtered.tsv")
    per_pair = []
    total_after = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(_header_line(config))
        for (c1, c2), pair_paths in by_pair.items():
            scored = [filtering.score_path(table, g, p, strategy) for p in pair_paths]
            outcome = filtering.filter_paths(scored)
            for sp in outcome.kept:
                fh.write(paths.render_path_line(g, sp.path, sp.score) + "\n")
            per_pair.append(
                {
                    "e1": g.concepts[c1],
                    "e2": g.concepts[c2],
                    "before": len(pair_paths),
                    "after": len(outcome.kept),
                    "max_score": outcome.max_score,
                    "threshold": outcome.threshold,
                }
            )
            total_after += len(outcome.kept)
    _write_json_artifact(
        config.artifact("filter_manifest.json"),
        config,
        {
            "strategy": strategy.value,
            "per_pair": per_pair,
            "total_before": len(parsed),
            "total_after": total_after,
        },
    )
    print(f"kept {total_after} of {len(parsed)} paths -> {out_path}")
    return 0


def cmd_build_dataset(args) -> int:
    config = load_config(args.config, {"seed": args.seed})
    g = _load_graph(config)
    in_path = _require_artifact(config.artifact("filtered.tsv"), "filter")
    parsed = [p for p, _ in _read_paths_artifact(g, in_path)]
    if args.keep_list:
        keep = set()
        with open(_require_file(args.keep_list, "keep list"), "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if line and not line.startswith("#"):
                    keep.add(line)
        parsed = [p for p in parsed if paths.render_path(g, p) in keep]
    examples = dataset.build_examples(g, parsed)
    if not examples:
        raise DataError("no examples to build a dataset from")
    try:
        ds = dataset.split(
            examples,
            test_fraction=config.float_value("test_fraction"),
            dev_fraction_of_train=config.float_value("dev_fraction"),
            seed=config.seed,
        )
    except ValueError as exc:
        raise DataError(str(exc)) from None
    vocab = dataset.relation_vocabulary(examples)
    for name, part in (("train", ds.train), ("dev", ds.dev), ("test", ds.test)):
        path = config.artifact(f"{name}.jsonl")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(_header_line(config))
            dataset.write_examples(part, fh)
    with open(config.artifact("relations.txt"), "w", encoding="utf-8") as fh:
        fh.write(_header_line(config))
        for name in vocab:
            fh.write(name + "\n")
    _write_json_artifact(
        config.artifact("dataset_manifest.json"),
        config,
        {
            "paths": len(parsed),
            "examples": len(examples),
            "relations": len(vocab),
            "train": len(ds.train),
            "dev": len(ds.dev),
            "test": len(ds.test),
        },
    )
    print(
        f"{len(examples)} examples ({len(ds.train)} train / {len(ds.dev)} dev / "
        f"{len(ds.test)} test), {len(vocab)} relations"
    )
    return 0


def _read_vocab(config: PipelineConfig) -> list[str]:
    path = _require_artifact(config.artifact("relations.txt"), "build-dataset")
    vocab = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith("#"):
                vocab.append(line)
    if not vocab:
        raise DataError(f"{path}: empty relation vocabulary")
    return vocab


def _read_split_part(config: PipelineConfig, name: str) -> list[dataset.ClozeExample]:
    path = _require_artifact(config.artifact(f"{name}.jsonl"), "build-dataset")
    try:
        return dataset.read_examples(path)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def cmd_train(args) -> int:
    config = load_config(args.config, {"seed": args.seed})
    vocab = _read_vocab(config)
    train_examples = _read_split_part(config, "train")
    if not train_examples:
        raise DataError("empty training partition")
    seed = config.seed
    meta = {"config_hash": config.hash, "seed": seed}

    if args.model == "unigram":
        model = baselines.train_unigram(train_examples, vocab)
        _write_json_artifact(
            config.artifact("model_unigram.json"), config, baselines.unigram_to_dict(model)
        )
    elif args.model == "single":
        model = baselines.train_single(train_examples, vocab)
        _write_json_artifact(
            config.artifact("model_single.json"), config, baselines.single_to_dict(model)
        )
    elif args.model == "forest":
        table = _load_table(config)
        embedder = init_relation_embedder(vocab, table.dim, seed)
        encoded = [dataset.encode(ex, table, embedder) for ex in train_examples]
        X = np.stack([dataset.flatten_features(e) for e in encoded])
        y = np.array([e.label for e in encoded])
        fconfig = forest.ForestConfig(
            n_trees=config.int_value("n_trees"),
            max_depth=config.int_value("forest_max_depth") or None,
            feature_subsample=config.int_value("forest_feature_subsample") or None,
        )
        try:
            model = forest.train_forest(X, y, fconfig, seed)
        except ValueError as exc:
            raise DataError(str(exc)) from None
        payload = forest.forest_to_dict(model)
        payload["embedding_matrix"] = embedder.matrix.tolist()
        payload["vocab"] = vocab
        payload["dim"] = table.dim
        _write_json_artifact(config.artifact("model_forest.json"), config, payload)
    elif args.model == "lstm":
        dev_examples = _read_split_part(config, "dev")
        entity_mode = config.str_value("entity_mode")
        table = _load_table(config) if entity_mode == "pretrained" else None
        dim = table.dim if table is not None else (config.int_value("expected_dim") or 300)
        hidden = tuple(
            int(h) for h in config.str_value("hidden_sizes").split(",") if h.strip()
        )
        model, embedder = init_model(
            vocab,
            input_dim=dim + dataset.TYPE_COUNT,
            seed=seed,
            hidden_sizes=hidden,
            dropout_rate=config.float_value("dropout"),
            architecture=config.str_value("architecture"),
        )
        tconfig = TrainConfig(
            batch_size=config.int_value("batch_size"),
            epochs=config.int_value("epochs"),
            seed=seed,
            learning_rate=config.float_value("learning_rate"),
            entity_mode=entity_mode,
        )
        ds = dataset.DatasetSplit(train=train_examples, dev=dev_examples, test=[], seed=seed)
        history = train(model, embedder, ds, tconfig, table)
        save_model(config.artifact("model_lstm.bin"), model, embedder, meta)
        _write_json_artifact(
            config.artifact("train_history_lstm.json"),
            config,
            {
                "train_loss": history.train_loss,
                "dev_accuracy": history.dev_accuracy,
                "best_epoch": history.best_epoch,
            },
        )
        print(
            f"best dev accuracy {max(history.dev_accuracy):.4f} at epoch {history.best_epoch}"
        )
    else:
        raise UsageError(f"unknown model {args.model!r}")
    print(f"trained {args.model} model")
    return 0


def _model_artifact(name: str) -> str:
    return "model_lstm.bin" if name == "lstm" else f"model_{name}.json"


def _predictor_for(config: PipelineConfig, name: str, vocab: list[str]):
    """Returns (example-batch -> predicted names, artifact config hash or None)."""
    seed = config.seed
    if name == "random":
        return (lambda exs: baselines.predict_random(vocab, seed, len(exs))), None
    path = _require_artifact(config.artifact(_model_artifact(name)), f"train {name}")
    if name == "unigram":
        data = _read_json_artifact(path)
        model = baselines.unigram_from_dict(data)
        constant = baselines.predict_unigram(model)
        return (lambda exs: [constant] * len(exs)), data.get("config_hash")
    if name == "single":
        data = _read_json_artifact(path)
        model = baselines.single_from_dict(data)
        return (lambda exs: [baselines.predict_single(model, ex) for ex in exs]), data.get(
            "config_hash"
        )
    if name == "forest":
        data = _read_json_artifact(path)
        model = forest.forest_from_dict(data)
        table = _load_table(config)
        if table.dim != int(data["dim"]):
            raise DataError(
                f"vector table dim {table.dim} differs from the {data['dim']} the forest saw"
            )
        from .neural import RelationEmbedder

        embedder = RelationEmbedder(
            relations=list(data["vocab"]),
            matrix=np.array(data["embedding_matrix"], dtype=np.float64),
            seed=int(data["seed"]),
        )

        def predict_names(exs):
            out = []
            for ex in exs:
                enc = dataset.encode(ex, table, embedder)
                out.append(data["vocab"][forest.predict_forest(model, dataset.flatten_features(enc))])
            return out

        return predict_names, data.get("config_hash")
    if name == "lstm":
        model, embedder, meta = load_model(path)
        entity_mode = config.str_value("entity_mode")
        table = _load_table(config) if entity_mode == "pretrained" else None
        return (
            make_predictor(model, embedder, table, entity_mode, seed),
            meta.get("config_hash"),
        )
    raise UsageError(f"unknown model name {name!r}; choose from {MODEL_NAMES}")


def cmd_evaluate(args) -> int:
    config = load_config(args.config, {"seed": args.seed})
    vocab = _read_vocab(config)
    test_examples = _read_split_part(config, "test")
    if not test_examples:
        raise DataError("empty test partition")
    names = list(args.models) if args.models else [
        n
        for n in MODEL_NAMES
        if n == "random" or os.path.exists(config.artifact(_model_artifact(n)))
    ]

    hashes = {"test.jsonl": _read_header_hash(config.artifact("test.jsonl"))}
    results = []
    payload_models = {}
    for name in names:
        predictor, artifact_hash = _predictor_for(config, name, vocab)
        if artifact_hash is not None:
            hashes[_model_artifact(name)] = artifact_hash
        report, cm = evaluation.evaluate(predictor, test_examples, vocab)
        results.append((name, report, cm))
        payload_models[name] = evaluation.report_to_dict(report, cm)

    distinct = {h for h in hashes.values() if h is not None}
    if len(distinct) > 1 and not args.force:
        detail = ", ".join(f"{k}={v}" for k, v in sorted(hashes.items()))
        raise DataError(
            f"artifacts carry mixed config hashes ({detail}); rerun the pipeline "
            "with one config or pass --force"
        )

    text = _render_report_text([(n, r, c) for n, r, c in results])
    out_txt = config.artifact("eval_report.txt")
    with open(out_txt, "w", encoding="utf-8") as fh:
        fh.write(_header_line(config))
        fh.write(text)
    _write_json_artifact(
        config.artifact("eval_report.json"),
        config,
        {"relations": vocab, "models": payload_models},
    )
    print(text)
    return 0


def _render_report_text(results) -> str:
    blocks = [evaluation.render_metrics_table([(n, r) for n, r, _ in results])]
    for name, _, cm in results:
        blocks.append(f"\n== {name}: per-relation accuracy ==")
        blocks.append(evaluation.render_per_relation_table(cm))
        blocks.append(f"\n== {name}: most frequent confusions ==")
        blocks.append(evaluation.render_confusion_table(cm))
    return "\n".join(blocks) + "\n"


def cmd_report(args) -> int:
    config = load_config(args.config, {"seed": args.seed})
    path = _require_artifact(config.artifact("eval_report.json"), "evaluate")
    payload = _read_json_artifact(path)
    results = []
    for name in sorted(payload["models"], key=lambda n: MODEL_NAMES.index(n) if n in MODEL_NAMES else 99):
        data = payload["models"][name]
        cm = evaluation.ConfusionMatrix(
            relations=list(data["relations"]),
            counts=np.array(data["confusion"], dtype=np.int64),
        )
        report = evaluation.report_from_matrix(cm)
        results.append((name, report, cm))
    print(_render_report_text(results), end="")
    return 0


# -- entry point ----------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="relchain", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, needs_config: bool = True, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        if needs_config:
            p.add_argument("--config", required=True, help="flat key=value config file")
            p.add_argument("--seed", type=int, default=None, help="override the config seed")
        return p

    add("ingest", cmd_ingest, help="load the edge file and print graph counts")

    p = add(
        "convert-conceptnet",
        cmd_convert_conceptnet,
        needs_config=False,
        help="convert a ConceptNet 5 assertion dump to the edge-file format",
    )
    p.add_argument("dump", help="tab-separated assertion dump")
    p.add_argument("--out", default=None, help="output edge file (default: <dump>.edges.tsv)")

    add("paths", cmd_paths, help="enumerate relation paths for every entity pair")

    p = add("filter", cmd_filter, help="score paths and drop incoherent ones")
    p.add_argument(
        "--strategy",
        default=None,
        choices=[s.value for s in filtering.ScoreStrategy],
        help="override the scoring strategy",
    )

    p = add("build-dataset", cmd_build_dataset, help="build cloze examples and split them")
    p.add_argument(
        "--keep-list",
        default=None,
        help="file of approved path renderings; all other paths are dropped",
    )

    p = add("train", cmd_train, help="train one predictor on the built dataset")
    p.add_argument("model", choices=[n for n in MODEL_NAMES if n != "random"])

    p = add("evaluate", cmd_evaluate, help="evaluate trained predictors on the test set")
    p.add_argument(
        "--models",
        nargs="*",
        default=None,
        choices=list(MODEL_NAMES),
        help="which predictors to evaluate (default: random plus every trained model)",
    )
    p.add_argument(
        "--force", action="store_true", help="evaluate even if artifact config hashes differ"
    )

    add("report", cmd_report, help="re-render the evaluation report")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataError, kb.EdgeFileError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
