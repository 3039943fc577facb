"""Command-line pipeline: build caches, select examples, bench, inspect.

Exit codes: 0 success, 1 usage/config problems, 2 data errors.  Every
build/select run writes a manifest with input and output digests; reruns
with unchanged inputs skip completed build stages.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .bench import run_bench
from .config import RunConfig, load_config
from .corpus import (
    apply_polynomial_cache,
    attach_polynomials,
    filter_by_length,
    load_parallel_corpus,
    load_test_inputs,
    read_corpus_cache,
    write_corpus_cache,
)
from .coverage import TermPool, TokenBag, syn_set_cov, word_set_cov
from .errors import ConfigError, DataError, ScoiError
from .manifest import RunManifest, read_manifest, sha256_file, stage_is_current
from .prompts import render_prompt
from .retrieval import bm25_topk, build_index, load_index, save_index
from .selection import STRATEGIES, run_strategy
from .tokenizer import TOKENIZER_VERSION
from .treepoly import (
    LabelVocabulary,
    read_polynomial_cache,
    write_polynomial_cache,
)

_BUILD_MANIFEST = "build-manifest.json"
_SELECT_MANIFEST = "select-manifest.json"


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route usage problems to exit code 1
        raise ConfigError(message)


def _cache_paths(out_dir: Path) -> dict[str, Path]:
    return {
        "corpus_cache": out_dir / "corpus.jsonl",
        "test_cache": out_dir / "test.jsonl",
        "corpus_poly": out_dir / "corpus.poly.jsonl",
        "test_poly": out_dir / "test.poly.jsonl",
        "index": out_dir / "bm25.idx",
    }


def _require_inputs(config: RunConfig) -> None:
    needed = {
        "corpus_source": config.corpus_source,
        "corpus_target": config.corpus_target,
        "corpus_conllu": config.corpus_conllu,
        "test_source": config.test_source,
        "test_conllu": config.test_conllu,
    }
    missing = [name for name, path in needed.items() if path is None]
    if missing:
        raise ConfigError(f"missing required input paths: {', '.join(missing)}")
    absent = [f"{name} ({path})" for name, path in needed.items() if not Path(path).is_file()]
    if absent:
        raise ConfigError(f"input files not found: {'; '.join(absent)}")


def cmd_build(config: RunConfig) -> int:
    _require_inputs(config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = _cache_paths(out_dir)
    previous = read_manifest(out_dir / _BUILD_MANIFEST)
    manifest = RunManifest(config.snapshot(), __version__)

    corpus_inputs = {
        "corpus_source": sha256_file(config.corpus_source),
        "corpus_target": sha256_file(config.corpus_target),
        "corpus_conllu": sha256_file(config.corpus_conllu),
        "test_source": sha256_file(config.test_source),
        "test_conllu": sha256_file(config.test_conllu),
        "max_tokens": str(config.max_tokens),
        "filter_target": str(config.filter_target),
        "fold_case": str(config.fold_case),
        "strip_punctuation": str(config.strip_punctuation),
        "tokenizer_version": str(TOKENIZER_VERSION),
    }
    corpus_outputs = {"corpus_cache": paths["corpus_cache"], "test_cache": paths["test_cache"]}

    vocab: LabelVocabulary | None = None
    corpus_records = None
    test_records = None

    start = time.perf_counter()
    if stage_is_current(previous, "corpus", corpus_inputs, corpus_outputs):
        manifest.record_stage(
            "corpus",
            corpus_inputs,
            previous["stages"]["corpus"]["outputs"],
            0.0,
            skipped=True,
        )
        print("corpus: skipped (inputs unchanged)")
    else:
        vocab = LabelVocabulary()
        all_records = load_parallel_corpus(
            config.corpus_source, config.corpus_target, config.corpus_conllu, vocab,
            config.fold_case, config.strip_punctuation,
        )
        test_records = load_test_inputs(
            config.test_source, config.test_conllu, vocab,
            config.fold_case, config.strip_punctuation,
        )
        corpus_records, removed = filter_by_length(
            all_records, config.max_tokens, config.filter_target
        )
        if not corpus_records:
            raise DataError("every corpus record was removed by the length filter")
        write_corpus_cache(paths["corpus_cache"], corpus_records, vocab)
        write_corpus_cache(paths["test_cache"], test_records, vocab)
        seconds = time.perf_counter() - start
        manifest.record_stage(
            "corpus",
            corpus_inputs,
            {str(k): sha256_file(p) for k, p in corpus_outputs.items()},
            seconds,
        )
        print(
            f"corpus: {len(corpus_records)} records kept, {removed} removed by the "
            f"{config.max_tokens}-token filter ({seconds:.2f}s)"
        )

    poly_inputs = {
        "corpus_cache": sha256_file(paths["corpus_cache"]),
        "test_cache": sha256_file(paths["test_cache"]),
    }
    poly_outputs = {"corpus_poly": paths["corpus_poly"], "test_poly": paths["test_poly"]}
    start = time.perf_counter()
    if stage_is_current(previous, "polynomials", poly_inputs, poly_outputs):
        manifest.record_stage(
            "polynomials",
            poly_inputs,
            previous["stages"]["polynomials"]["outputs"],
            0.0,
            skipped=True,
        )
        print("polynomials: skipped (inputs unchanged)")
    else:
        if corpus_records is None:
            vocab, corpus_records = read_corpus_cache(paths["corpus_cache"])
            _, test_records = read_corpus_cache(paths["test_cache"])
        attach_polynomials(corpus_records, vocab, config.workers)
        attach_polynomials(test_records, vocab, config.workers)
        write_polynomial_cache(
            paths["corpus_poly"], ((r.id, r.poly) for r in corpus_records), vocab
        )
        write_polynomial_cache(
            paths["test_poly"], ((r.id, r.poly) for r in test_records), vocab
        )
        seconds = time.perf_counter() - start
        manifest.record_stage(
            "polynomials",
            poly_inputs,
            {str(k): sha256_file(p) for k, p in poly_outputs.items()},
            seconds,
        )
        print(f"polynomials: {len(corpus_records) + len(test_records)} built ({seconds:.2f}s)")

    index_inputs = {"corpus_cache": sha256_file(paths["corpus_cache"])}
    index_outputs = {"index": paths["index"]}
    start = time.perf_counter()
    if stage_is_current(previous, "index", index_inputs, index_outputs):
        manifest.record_stage(
            "index", index_inputs, previous["stages"]["index"]["outputs"], 0.0, skipped=True
        )
        print("index: skipped (inputs unchanged)")
    else:
        if corpus_records is None:
            vocab, corpus_records = read_corpus_cache(paths["corpus_cache"])
        save_index(paths["index"], build_index(corpus_records))
        seconds = time.perf_counter() - start
        manifest.record_stage(
            "index",
            index_inputs,
            {str(k): sha256_file(p) for k, p in index_outputs.items()},
            seconds,
        )
        print(f"index: {len(corpus_records)} documents indexed ({seconds:.2f}s)")

    manifest.save(out_dir / _BUILD_MANIFEST)
    return 0


def _load_built(out_dir: Path):
    paths = _cache_paths(out_dir)
    missing = [str(p) for p in paths.values() if not p.is_file()]
    if missing:
        raise ConfigError(
            "caches not built yet; run 'scoi build' first (missing: " + ", ".join(missing) + ")"
        )
    vocab, corpus_records = read_corpus_cache(paths["corpus_cache"])
    test_vocab, test_records = read_corpus_cache(paths["test_cache"])
    if test_vocab != vocab:
        raise DataError("corpus and test caches disagree on the label vocabulary")
    poly_vocab, corpus_polys = read_polynomial_cache(paths["corpus_poly"])
    if poly_vocab != vocab:
        raise DataError("polynomial cache disagrees with the corpus label vocabulary")
    _, test_polys = read_polynomial_cache(paths["test_poly"])
    apply_polynomial_cache(corpus_records, corpus_polys)
    apply_polynomial_cache(test_records, test_polys)
    index = load_index(paths["index"])
    return vocab, corpus_records, test_records, index


def _select_one(test, strategies, config, corpus_by_id, corpus_ids, index, template):
    params = config.bm25_params()
    ranked = bm25_topk(index, test.tokens, config.pool_size, params)
    fallback = False
    if ranked:
        pool = [corpus_by_id[rid] for rid, _ in ranked]
    else:
        # No lexical overlap with the corpus: deterministic random pool.
        rng = random.Random(f"{config.seed}:bm25-fallback:{test.id}")
        size = min(config.pool_size, len(corpus_ids))
        pool = [corpus_by_id[rid] for rid in rng.sample(sorted(corpus_ids), size)]
        fallback = True
    outputs = []
    for strategy in strategies:
        plan = config.plan(strategy)
        result = run_strategy(
            test, pool, plan, index=index, corpus_ids=corpus_ids, params=params
        )
        if fallback:
            result.flags["bm25_fallback"] = True
        examples = [
            (corpus_by_id[rid].source, corpus_by_id[rid].target) for rid in result.selected
        ]
        short_ok = result.flags.get("pool_exhausted") or result.flags.get("bm25_fallback")
        prompt = render_prompt(
            template,
            examples,
            test.source,
            expected_count=None if short_ok else plan.k,
        )
        outputs.append((strategy, result.to_record(), {
            "test_id": test.id,
            "strategy": strategy,
            "prompt": prompt,
        }))
    return outputs


_WORKER_CTX: dict = {}


def _init_worker(tests, strategies, config, corpus_by_id, corpus_ids, index, template):
    _WORKER_CTX.update(
        tests=tests,
        strategies=strategies,
        config=config,
        corpus_by_id=corpus_by_id,
        corpus_ids=corpus_ids,
        index=index,
        template=template,
    )


def _worker_select(test_pos: int):
    ctx = _WORKER_CTX
    return _select_one(
        ctx["tests"][test_pos],
        ctx["strategies"],
        ctx["config"],
        ctx["corpus_by_id"],
        ctx["corpus_ids"],
        ctx["index"],
        ctx["template"],
    )


def cmd_select(config: RunConfig) -> int:
    out_dir = Path(config.out_dir)
    vocab, corpus_records, test_records, index = _load_built(out_dir)
    corpus_by_id = {r.id: r for r in corpus_records}
    corpus_ids = tuple(sorted(corpus_by_id))
    strategies = list(STRATEGIES) if config.strategy == "all" else [config.strategy]
    if "random" in strategies and len(corpus_ids) < config.k:
        raise ConfigError(
            f"random strategy draws from the whole corpus, but k={config.k} exceeds "
            f"its {len(corpus_ids)} records"
        )
    template = config.template()

    start = time.perf_counter()
    if config.workers <= 1:
        per_test = [
            _select_one(test, strategies, config, corpus_by_id, corpus_ids, index, template)
            for test in test_records
        ]
    else:
        init_args = (test_records, strategies, config, corpus_by_id, corpus_ids, index, template)
        with ProcessPoolExecutor(
            max_workers=config.workers, initializer=_init_worker, initargs=init_args
        ) as pool:
            per_test = list(pool.map(_worker_select, range(len(test_records))))
    seconds = time.perf_counter() - start

    manifest = RunManifest(config.snapshot(), __version__)
    output_digests: dict[str, str] = {}
    for strategy in strategies:
        sel_path = out_dir / f"selections_{strategy}.jsonl"
        prompt_path = out_dir / f"prompts_{strategy}.jsonl"
        with open(sel_path, "w", encoding="utf-8") as sel_fh, open(
            prompt_path, "w", encoding="utf-8"
        ) as prompt_fh:
            for outputs in per_test:
                for out_strategy, record, prompt in outputs:
                    if out_strategy != strategy:
                        continue
                    sel_fh.write(_dump(record) + "\n")
                    prompt_fh.write(_dump(prompt) + "\n")
        output_digests[sel_path.name] = sha256_file(sel_path)
        output_digests[prompt_path.name] = sha256_file(prompt_path)
        print(f"{strategy}: wrote {sel_path.name} and {prompt_path.name}")

    cache_paths = _cache_paths(out_dir)
    manifest.record_stage(
        "select",
        {str(k): sha256_file(p) for k, p in cache_paths.items()},
        output_digests,
        seconds,
    )
    manifest.save(out_dir / _SELECT_MANIFEST)
    print(f"select: {len(test_records)} test inputs x {len(strategies)} strategies ({seconds:.2f}s)")
    return 0


def cmd_bench(args) -> int:
    ts = tuple(int(x) for x in args.t.split(","))
    qs = tuple(int(x) for x in args.q.split(","))
    report = run_bench(qs=qs, ts=ts, budget=args.budget)
    sys.stdout.write(report.to_table())
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
        print(f"report written to {args.out}")
    return 0


def _format_term(pairs, vocab: LabelVocabulary) -> str:
    chunks = []
    for label, exp in pairs:
        name = vocab.labels[label]
        chunks.append(name if exp == 1 else f"{name}^{exp}")
    return "*".join(chunks)


def cmd_inspect(config: RunConfig, record_id: int, side: str, pool_ids: list[int], measure: str) -> int:
    out_dir = Path(config.out_dir)
    vocab, corpus_records, test_records, _ = _load_built(out_dir)
    records = corpus_records if side == "corpus" else test_records
    by_id = {r.id: r for r in records}
    record = by_id.get(record_id)
    if record is None:
        raise DataError(f"no {side} record with id {record_id}")

    print(f"record {record.id} ({side})")
    print(f"  source: {record.source}")
    if record.target:
        print(f"  target: {record.target}")
    print(f"  tokens: {' '.join(record.token_list)}")
    print("  tree:")
    tree = record.tree

    def walk(node: int, depth: int) -> None:
        print(f"    {'  ' * depth}[{node}] {vocab.labels[tree.labels[node]]}")
        for child in tree.children[node]:
            walk(child, depth + 1)

    walk(tree.root, 0)
    print("  polynomial terms:")
    for pairs, count in record.poly.term_vectors():
        suffix = f"  (x{count})" if count > 1 else ""
        print(f"    {_format_term(pairs, vocab)}{suffix}")

    if pool_ids:
        corpus_by_id = {r.id: r for r in corpus_records}
        missing = [i for i in pool_ids if i not in corpus_by_id]
        if missing:
            raise DataError(f"pool ids not in corpus: {missing}")
        members = [corpus_by_id[i] for i in pool_ids]
        pool_terms = TermPool.from_polynomials([m.poly for m in members])
        pool_tokens = TokenBag.union([m.tokens for m in members])
        syn = syn_set_cov(record.poly, pool_terms, measure)
        word = word_set_cov(record.tokens, pool_tokens)
        print(f"  coverage against pool {pool_ids}:")
        print(f"    syntactic ({measure}): {syn:.6f}")
        print(f"    lexical: {word:.6f}")
    return 0


def _add_config_arguments(parser: argparse.ArgumentParser, selection_opts: bool = True) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--corpus-source", dest="corpus_source")
    parser.add_argument("--corpus-target", dest="corpus_target")
    parser.add_argument("--corpus-conllu", dest="corpus_conllu")
    parser.add_argument("--test-source", dest="test_source")
    parser.add_argument("--test-conllu", dest="test_conllu")
    parser.add_argument("--out-dir", dest="out_dir")
    parser.add_argument("--max-tokens", dest="max_tokens", type=int)
    parser.add_argument("--filter-target", dest="filter_target", action="store_const", const=True)
    parser.add_argument("--fold-case", dest="fold_case", action="store_const", const=True)
    parser.add_argument(
        "--strip-punctuation", dest="strip_punctuation", action="store_const", const=True
    )
    parser.add_argument("--workers", type=int)
    if selection_opts:
        parser.add_argument("--strategy", choices=STRATEGIES + ("all",))
        parser.add_argument("--k", type=int)
        parser.add_argument("--order", dest="order")
        parser.add_argument("--measure", dest="measure")
        parser.add_argument("--pool-size", dest="pool_size", type=int)
        parser.add_argument("--dpp-lambda", dest="dpp_lambda", type=float)
        parser.add_argument("--relevance-norm", dest="relevance_norm")
        parser.add_argument("--seed", type=int)
        parser.add_argument("--prompt-style", dest="prompt_style")
        parser.add_argument("--source-language", dest="source_language")
        parser.add_argument("--target-language", dest="target_language")
        parser.add_argument("--bm25-k1", dest="bm25_k1", type=float)
        parser.add_argument("--bm25-b", dest="bm25_b", type=float)


_CONFIG_KEYS = (
    "corpus_source", "corpus_target", "corpus_conllu", "test_source", "test_conllu",
    "out_dir", "strategy", "k", "order", "measure", "pool_size", "dpp_lambda",
    "relevance_norm", "seed", "max_tokens", "filter_target", "fold_case",
    "strip_punctuation", "workers",
    "prompt_style", "source_language", "target_language", "bm25_k1", "bm25_b",
)


def _config_from_args(args) -> RunConfig:
    overrides = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
    return load_config(args.config, overrides)


def main(argv=None) -> int:
    parser = _Parser(prog="scoi", description=__doc__)
    parser.add_argument("--version", action="version", version=f"scoi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="ingest corpus, build caches and BM25 index")
    _add_config_arguments(p_build)

    p_select = sub.add_parser("select", help="select demonstrations and render prompts")
    _add_config_arguments(p_select)

    p_bench = sub.add_parser("bench", help="scaling comparison of the two constructions")
    p_bench.add_argument("--t", default="2,4,8,16", help="comma-separated chain lengths")
    p_bench.add_argument("--q", default="1,2,3", help="comma-separated crown depths (p = 2^q)")
    p_bench.add_argument("--budget", type=int, default=1_000_000, help="term budget")
    p_bench.add_argument("--out", help="write a JSON report here")

    p_inspect = sub.add_parser("inspect", help="dump one record's tree, polynomial, coverage")
    _add_config_arguments(p_inspect)
    p_inspect.add_argument("--record", type=int, required=True)
    p_inspect.add_argument("--side", choices=("corpus", "test"), default="corpus")
    p_inspect.add_argument("--pool", default="", help="comma-separated corpus ids to cover with")

    try:
        args = parser.parse_args(argv)
        if args.command == "build":
            return cmd_build(_config_from_args(args))
        if args.command == "select":
            return cmd_select(_config_from_args(args))
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "inspect":
            config = _config_from_args(args)
            pool_ids = [int(x) for x in args.pool.split(",") if x.strip()]
            return cmd_inspect(config, args.record, args.side, pool_ids, config.measure)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ScoiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
