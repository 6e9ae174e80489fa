"""Command-line entry point.

One binary, subcommand style. Every run is a pure function of its inputs,
flags, and seeds: reruns produce byte-identical outputs. Exit codes:
0 success, 1 validation/input error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .clarify import (
    AMBIGUOUS,
    CLEAR,
    LabeledInstruction,
    QuestionPool,
    bm25_rank,
    color_postfilter,
    evaluate_need,
    f1_score,
    mrr_at_k,
    train_dual_encoder,
    train_need_classifier,
)
from .clarify.dual import DualEncoderConfig
from .clarify.need import NeedClassifier, NeedClassifierConfig
from .dataset import (
    SynthConfig,
    clean,
    load_corpus,
    save_corpus,
    stats,
    synth_generate,
    synth_rank_corpus,
)
from .fusion import DialogueString, FusionConfig, FusionModel, Vocab, one_hot_encode
from .structure import classify_structure, match
from .verbalize import state_line, verbalize_world
from .world import ActionLog, VoxelWorld, replay, world_digest, world_from_json, world_to_json


def _load_world(path: str) -> VoxelWorld:
    return world_from_json(Path(path).read_text(encoding="utf-8"))


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "format", "text") == "json-lines":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# -- subcommand handlers ---------------------------------------------------


def cmd_replay(args) -> int:
    log = ActionLog.from_jsonl(Path(args.log).read_text(encoding="utf-8"))
    world, agent = replay(log)
    digest = world_digest(world)
    if args.out:
        Path(args.out).write_text(world_to_json(world), encoding="utf-8")
    _emit(
        args,
        {"blocks": world.block_count(), "digest": digest, "steps": len(log)},
        f"replayed {len(log)} steps -> {world.block_count()} blocks, digest {digest}",
    )
    return 0


def cmd_verbalize(args) -> int:
    world = _load_world(args.world)
    if args.state_line:
        text = state_line(world, args.seed)
    else:
        text = verbalize_world(world)
    _emit(args, {"text": text}, text)
    return 0


def cmd_classify(args) -> int:
    labels = classify_structure(_load_world(args.world)).as_dict()
    text = " ".join(f"{k}={str(v).lower()}" for k, v in labels.items())
    _emit(args, labels, text)
    return 0


def cmd_match(args) -> int:
    report = match(_load_world(args.world), _load_world(args.target))
    payload = {
        "exact": report.exact,
        "translated_match": report.translated_match,
        "offset": list(report.offset),
        "missing": report.missing,
        "extra": report.extra,
    }
    _emit(
        args,
        payload,
        f"exact={report.exact} translated={report.translated_match} "
        f"offset={report.offset} missing={report.missing} extra={report.extra}",
    )
    return 0


def cmd_dataset(args) -> int:
    if args.dataset_cmd == "synth":
        return _dataset_synth(args)

    report = load_corpus(args.input, args.kind, mapping=_read_mapping(args))
    for lineno, reason in report.skipped:
        print(f"skipped line {lineno}: {reason}", file=sys.stderr)

    if args.dataset_cmd == "load":
        _emit(
            args,
            {"records": len(report.records), "skipped": len(report.skipped)},
            f"loaded {len(report.records)} records ({len(report.skipped)} skipped)",
        )
        return 0

    if args.dataset_cmd == "clean":
        result = clean(report.records, min_words=args.min_words)
        if args.out:
            save_corpus(args.out, result.kept)
        for rec, reason in result.dropped:
            print(f"dropped {rec.id}: {reason}", file=sys.stderr)
        _emit(
            args,
            {"kept": len(result.kept), "dropped": len(result.dropped)},
            f"kept {len(result.kept)}, dropped {len(result.dropped)}",
        )
        return 0

    if args.dataset_cmd == "stats":
        summary = stats(report.records)
        payload = {k: v for k, v in summary.as_dict().items() if v is not None}
        if args.report_dir:
            from .report import stats_report

            written = stats_report(summary, report.records, args.report_dir)
            print("\n".join(str(p) for p in written), file=sys.stderr)
        _emit(
            args,
            payload,
            "\n".join(f"{k}\t{v}" for k, v in payload.items()),
        )
        return 0
    raise AssertionError(args.dataset_cmd)


def _read_mapping(args) -> dict | None:
    if getattr(args, "field_map", None):
        return json.loads(Path(args.field_map).read_text(encoding="utf-8"))
    return None


def _dataset_synth(args) -> int:
    config = SynthConfig(
        n_records=args.n,
        n_worlds=args.worlds,
        ambiguity_rate=args.ambiguity_rate,
        label_mode=args.label_mode,
        seed=args.seed,
    )
    result = synth_generate(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(out / "single.jsonl", result.records)
    worlds_dir = out / "objects"
    worlds_dir.mkdir(exist_ok=True)
    for digest, world in result.worlds.items():
        (worlds_dir / digest).write_text(world_to_json(world), encoding="utf-8")
    (out / "meta.json").write_text(json.dumps(result.meta, sort_keys=True, indent=2))
    _emit(
        args,
        {"records": len(result.records), "worlds": len(result.worlds), "out": str(out)},
        f"wrote {len(result.records)} records and {len(result.worlds)} worlds to {out}",
    )
    return 0


def cmd_clarify(args) -> int:
    if args.clarify_cmd == "need-train":
        return _need_train(args)
    if args.clarify_cmd == "need-eval":
        return _need_eval(args)
    return _rank(args)


def _labeled(records, worlds_dir: str | None):
    worlds = {}
    if worlds_dir:
        root = Path(worlds_dir)
        for rec in records:
            path = root / rec.world_ref
            if rec.world_ref not in worlds and path.exists():
                worlds[rec.world_ref] = world_from_json(path.read_text(encoding="utf-8"))
    data = [
        LabeledInstruction(
            id=rec.id,
            instruction=rec.instruction,
            world_ref=rec.world_ref,
            label=CLEAR if rec.clear else AMBIGUOUS,
            questions=rec.questions,
        )
        for rec in records
    ]
    return data, worlds


def _need_train(args) -> int:
    report = load_corpus(args.input, "single")
    data, worlds = _labeled(report.records, args.worlds_dir)
    config = NeedClassifierConfig(seed=args.seed)
    model = train_need_classifier(
        data, use_world_prefix=args.world_prefix, config=config, worlds=worlds
    )
    model.save(args.model)
    _emit(args, {"model": args.model, "records": len(data)}, f"trained on {len(data)} records -> {args.model}")
    return 0


def _need_eval(args) -> int:
    report = load_corpus(args.input, "single")
    data, worlds = _labeled(report.records, args.worlds_dir)
    model = NeedClassifier.load(args.model)
    preds, golds = evaluate_need(model, data, worlds)
    score = f1_score(preds, golds, positive=AMBIGUOUS)
    _emit(args, {"f1": score, "records": len(data)}, f"F1 = {score:.4f} over {len(data)} records")
    return 0


def _rank(args) -> int:
    corpus = synth_rank_corpus(n_queries=args.n, seed=args.seed)
    pool = QuestionPool(candidates=corpus.pool_candidates)
    split = int(len(corpus.pairs) * 0.8)
    train_pairs, test_pairs = corpus.pairs[:split], corpus.pairs[split:]

    if args.method == "dual":
        encoder = train_dual_encoder(train_pairs, pool, DualEncoderConfig(seed=args.seed))
        rank_fn = lambda q: encoder.rank(q, pool)
    else:
        rank_fn = lambda q: bm25_rank(q, pool)

    texts = dict(pool.candidates)
    rankings = []
    per_query = []
    for i, (query, gold) in enumerate(test_pairs):
        ranked = rank_fn(query)
        if args.postfilter != "off":
            pairs = [(qid, texts[qid]) for qid in ranked]
            filtered = color_postfilter(query, None, pairs, exclude=args.postfilter == "strict")
            ranked = [qid for qid, _ in filtered]
        rankings.append((ranked, gold))
        position = ranked.index(gold) + 1 if gold in ranked else 0
        per_query.append((f"q{i:04d}", position if 0 < position <= args.k else 0))

    score = mrr_at_k(rankings, args.k)
    if args.report_dir:
        from .report import ranking_report

        written = ranking_report(per_query, score, args.method, args.report_dir, args.k)
        print("\n".join(str(p) for p in written), file=sys.stderr)
    _emit(
        args,
        {"method": args.method, "mrr": score, "k": args.k, "queries": len(test_pairs)},
        f"{args.method}: MRR@{args.k} = {score:.4f} over {len(test_pairs)} queries",
    )
    return 0


def cmd_fusion(args) -> int:
    if args.fusion_cmd == "demo-train":
        return _fusion_demo_train(args)
    return _fusion_forward(args)


def _fusion_demo_train(args) -> int:
    result = synth_generate(
        SynthConfig(n_records=args.n, n_worlds=8, ambiguity_rate=0.5, seed=args.seed)
    )
    vocab = Vocab.fit([r.instruction for r in result.records], max_size=256)
    config = FusionConfig(
        conv_channels=(4, 4), embed_dim=4, heads=1, block_pairs=1,
        vocab_size=256, max_text_len=16, learning_rate=args.lr, seed=args.seed,
    )
    model = FusionModel(config, vocab)
    examples = [
        (
            one_hot_encode(result.worlds[rec.world_ref]),
            DialogueString((("architect", rec.instruction),)),
            0 if rec.clear else 1,
        )
        for rec in result.records
    ]
    import random as _random

    rng = _random.Random(args.seed)
    first = last = None
    for _ in range(args.steps):
        batch = rng.sample(examples, min(4, len(examples)))
        loss = model.backward_and_step(batch)
        first = first if first is not None else loss
        last = loss
    if args.model:
        model.save(args.model)
    _emit(
        args,
        {"initial_loss": first, "final_loss": last, "steps": args.steps},
        f"loss {first:.4f} -> {last:.4f} over {args.steps} steps",
    )
    return 0


def _fusion_forward(args) -> int:
    model = FusionModel.load(args.model)
    world = _load_world(args.world)
    p = model.forward(one_hot_encode(world), args.text)
    _emit(args, {"probability": p}, f"clarification-need probability = {p:.4f}")
    return 0


def cmd_serve(args) -> int:
    from .service import SessionService, serve_forever

    service = SessionService(args.data_dir, min_instruction_words=args.min_words)
    if args.seed_demo:
        from .dataset.synthetic import synth_world

        target = synth_world(seed=args.seed, n_actions=12)
        empty_id = service.register_world(VoxelWorld())
        target_id = service.register_world(target)
        print(json.dumps({"target_id": target_id, "empty_world_id": empty_id}), flush=True)
    serve_forever(service, args.port, web_root=args.web_root)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocktalk",
        description="Collaborative voxel-building playground: environment, datasets, baselines, service.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("text", "json-lines"), default="text",
                       help="machine-readable output mode")

    p = sub.add_parser("replay", help="replay an action log and print the final world digest")
    p.add_argument("--log", required=True)
    p.add_argument("--out", help="write the final world snapshot here")
    add_format(p)
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("verbalize", help="describe a world snapshot in text")
    p.add_argument("--world", required=True)
    p.add_argument("--state-line", action="store_true", help="one-line seeded color summary")
    p.add_argument("--seed", type=int, default=0)
    add_format(p)
    p.set_defaults(fn=cmd_verbalize)

    p = sub.add_parser("classify-structure", help="five-way structure labels for a snapshot")
    p.add_argument("--world", required=True)
    add_format(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("match", help="compare a built world against a target")
    p.add_argument("--world", required=True)
    p.add_argument("--target", required=True)
    add_format(p)
    p.set_defaults(fn=cmd_match)

    p = sub.add_parser("dataset", help="load, clean, summarize, or synthesize corpora")
    dsub = p.add_subparsers(dest="dataset_cmd", required=True)
    for name in ("load", "clean", "stats"):
        dp = dsub.add_parser(name)
        dp.add_argument("--input", required=True)
        dp.add_argument("--kind", choices=("multi", "single"), required=True)
        dp.add_argument("--field-map", help="JSON file mapping canonical->external field names")
        add_format(dp)
        if name == "clean":
            dp.add_argument("--min-words", type=int, default=3)
            dp.add_argument("--out", help="write kept records here")
        if name == "stats":
            dp.add_argument("--report-dir", help="write stats.tsv and figures here")
        dp.set_defaults(fn=cmd_dataset)
    dp = dsub.add_parser("synth")
    dp.add_argument("--out", required=True)
    dp.add_argument("--n", type=int, default=200)
    dp.add_argument("--worlds", type=int, default=20)
    dp.add_argument("--ambiguity-rate", type=float, default=0.13)
    dp.add_argument("--label-mode", choices=("slot", "world_count"), default="slot")
    dp.add_argument("--seed", type=int, default=0)
    add_format(dp)
    dp.set_defaults(fn=cmd_dataset)

    p = sub.add_parser("synth", help="alias for dataset synth")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--worlds", type=int, default=20)
    p.add_argument("--ambiguity-rate", type=float, default=0.13)
    p.add_argument("--label-mode", choices=("slot", "world_count"), default="slot")
    p.add_argument("--seed", type=int, default=0)
    add_format(p)
    p.set_defaults(fn=cmd_dataset, dataset_cmd="synth")

    p = sub.add_parser("clarify", help="clarification-need and question-ranking pipelines")
    csub = p.add_subparsers(dest="clarify_cmd", required=True)
    cp = csub.add_parser("need-train")
    cp.add_argument("--input", required=True)
    cp.add_argument("--worlds-dir", help="object-store directory with world snapshots")
    cp.add_argument("--model", required=True)
    cp.add_argument("--world-prefix", action="store_true")
    cp.add_argument("--seed", type=int, default=0)
    add_format(cp)
    cp.set_defaults(fn=cmd_clarify)
    cp = csub.add_parser("need-eval")
    cp.add_argument("--input", required=True)
    cp.add_argument("--worlds-dir")
    cp.add_argument("--model", required=True)
    add_format(cp)
    cp.set_defaults(fn=cmd_clarify)
    cp = csub.add_parser("rank")
    cp.add_argument("--method", choices=("bm25", "dual"), default="bm25")
    cp.add_argument("--postfilter", choices=("on", "off", "strict"), default="off")
    cp.add_argument("--k", type=int, default=20)
    cp.add_argument("--n", type=int, default=500, help="synthetic query count")
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--report-dir", help="write ranking.tsv and figures here")
    add_format(cp)
    cp.set_defaults(fn=cmd_clarify)

    p = sub.add_parser("fusion", help="fusion classifier demos")
    fsub = p.add_subparsers(dest="fusion_cmd", required=True)
    fp = fsub.add_parser("demo-train")
    fp.add_argument("--n", type=int, default=16)
    fp.add_argument("--steps", type=int, default=10)
    fp.add_argument("--lr", type=float, default=0.5)
    fp.add_argument("--seed", type=int, default=0)
    fp.add_argument("--model", help="save the trained checkpoint here")
    add_format(fp)
    fp.set_defaults(fn=cmd_fusion)
    fp = fsub.add_parser("forward")
    fp.add_argument("--model", required=True)
    fp.add_argument("--world", required=True)
    fp.add_argument("--text", required=True)
    add_format(fp)
    fp.set_defaults(fn=cmd_fusion)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument("--port", type=int, default=int(os.environ.get("BLOCKTALK_PORT", "8371")))
    p.add_argument("--data-dir", default=os.environ.get("BLOCKTALK_DATA", "./blocktalk-data"))
    p.add_argument("--web-root", help="serve this directory at / for the browser client")
    p.add_argument("--min-words", type=int, default=3)
    p.add_argument("--seed-demo", action="store_true",
                   help="register a demo target world and print its id")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
