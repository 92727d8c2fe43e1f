"""Command-line entry points.

Subcommands: group, vote, stack-train, stack-predict, eval, link, serve,
pipeline. Every command is deterministic given its flags and seeds;
output files embed a provenance header (command, config hash, seeds).
Failures print a machine-readable JSON error to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from medner import stacking
from medner.errors import CoverageGap, LengthMismatch, MednerError
from medner.formats import (
    WordDoc,
    WordFile,
    parse_gold_file,
    parse_logit_file,
    parse_word_file,
    provenance,
    write_word_file,
)
from medner.grouping import GroupingStrategy, group
from medner.linking import fuzzy_link, link_document, load_mapping_csv
from medner.metrics import EvalMode, confusion, render_confusion, render_report, report
from medner.stacking import FeatureMode, TrainConfig
from medner.voting import TieBreak, VoteKind, VotePolicy, vote_document


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# group

def _aligned_word_counts(runs_by_model):
    """doc_id -> word count, verified consistent across models."""
    doc_ids = None
    for model_id, runs in runs_by_model:
        ids = [r.doc_id for r in runs]
        if doc_ids is None:
            doc_ids = ids
        elif set(ids) != set(doc_ids):
            raise CoverageGap(
                f"model {model_id} covers documents {sorted(set(ids))}, "
                f"expected {sorted(set(doc_ids))}"
            )
    counts: dict[str, int] = {}
    for _, runs in runs_by_model:
        for r in runs:
            n = max(sw.word_index for sw in r.subwords) + 1 if r.subwords else 0
            counts[r.doc_id] = max(counts.get(r.doc_id, 0), n)
    return doc_ids or [], counts


def cmd_group(args) -> int:
    strategy = GroupingStrategy(args.strategy)
    runs_by_model = [parse_logit_file(path) for path in args.logits]
    doc_ids, counts = _aligned_word_counts(runs_by_model)
    os.makedirs(args.out_dir, exist_ok=True)
    prov = provenance("group", {"strategy": strategy.value})
    for model_id, runs in runs_by_model:
        by_doc = {r.doc_id: r for r in runs}
        docs = []
        for doc_id in doc_ids:
            preds = group(by_doc[doc_id], strategy, n_words=counts[doc_id])
            docs.append(WordDoc(doc_id=doc_id, predictions=tuple(preds)))
        out_path = os.path.join(args.out_dir, f"{model_id}.words.jsonl")
        write_word_file(out_path, WordFile(model_id=model_id, docs=docs, provenance=prov))
        print(out_path)
    return 0


# ---------------------------------------------------------------------------
# vote

def _aligned_word_files(paths):
    files = [parse_word_file(p) for p in paths]
    first = files[0]
    doc_ids = [d.doc_id for d in first.docs]
    for wf in files[1:]:
        if [d.doc_id for d in wf.docs] != doc_ids:
            raise CoverageGap(
                f"word files disagree on documents: {wf.model_id} vs {first.model_id}"
            )
        for a, b in zip(first.docs, wf.docs):
            if len(a.predictions) != len(b.predictions):
                raise LengthMismatch(
                    f"doc {a.doc_id}: {len(a.predictions)} words in "
                    f"{first.model_id} vs {len(b.predictions)} in {wf.model_id}"
                )
    return files, doc_ids


def _build_policy(args, n_models: int) -> VotePolicy:
    kind = VoteKind.MAJORITY_OR_O if args.policy == "majority" else VoteKind.MAX_VOTE
    policy = VotePolicy(
        kind=kind,
        threshold=args.threshold,
        tie_break=TieBreak(args.tie),
        seed=args.seed,
    )
    if policy.effective_threshold(n_models) > n_models and kind is VoteKind.MAJORITY_OR_O:
        raise MednerError(
            f"threshold {policy.effective_threshold(n_models)} exceeds "
            f"{n_models} model(s)"
        )
    return policy


def cmd_vote(args) -> int:
    files, doc_ids = _aligned_word_files(args.words)
    policy = _build_policy(args, len(files))
    prov = provenance(
        "vote",
        {
            "policy": args.policy,
            "threshold": args.threshold,
            "tie": args.tie,
            "models": [wf.model_id for wf in files],
        },
        seeds={"tie_break": args.seed},
    )
    docs = []
    for i, doc_id in enumerate(doc_ids):
        per_model = [wf.docs[i].predictions for wf in files]
        voted = vote_document(per_model, policy)
        docs.append(WordDoc(doc_id=doc_id, predictions=tuple(voted)))
    write_word_file(args.out, WordFile(model_id="ensemble-vote", docs=docs, provenance=prov))
    print(args.out)
    return 0


# ---------------------------------------------------------------------------
# stacking

def _stacked_columns(files, gold_docs):
    """Per-model flat word prediction lists plus the aligned gold labels."""
    gold_by_id = {d.doc_id: d for d in gold_docs}
    doc_ids = [d.doc_id for d in files[0].docs]
    missing = [d for d in doc_ids if d not in gold_by_id]
    if missing:
        raise CoverageGap(f"gold file lacks documents: {missing}")
    per_model = [[] for _ in files]
    gold: list[int] = []
    for i, doc_id in enumerate(doc_ids):
        gdoc = gold_by_id[doc_id]
        n = len(files[0].docs[i].predictions)
        if gdoc.gold_labels is None or len(gdoc.gold_labels) != n:
            raise LengthMismatch(
                f"doc {doc_id}: gold has {len(gdoc.gold_labels or ())} labels, "
                f"predictions have {n}"
            )
        gold.extend(gdoc.gold_labels)
        for m, wf in enumerate(files):
            per_model[m].extend(wf.docs[i].predictions)
    return per_model, gold


def cmd_stack_train(args) -> int:
    files, _ = _aligned_word_files(args.words)
    gold_docs = parse_gold_file(args.gold)
    per_model, gold = _stacked_columns(files, gold_docs)
    dataset = stacking.build_stacked_dataset(
        per_model,
        gold,
        mode=FeatureMode(args.mode),
        min_non_O=args.min_non_o,
        shuffle_split_seed=args.split_seed,
    )
    config = TrainConfig(
        hidden_width=args.hidden,
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch,
        seed=args.seed,
        shuffle=not args.no_shuffle,
    )
    result = stacking.train(dataset, config)
    stacking.save_metanet(result.net, args.out)
    summary = {
        "out": args.out,
        "train_examples": len(dataset.train),
        "test_examples": len(dataset.test),
        "train_accuracy": result.train_accuracy,
        "test_accuracy": result.test_accuracy,
        "final_loss": result.epoch_losses[-1] if result.epoch_losses else None,
        "seeds": {"train": args.seed, "split": args.split_seed},
    }
    print(json.dumps(summary, indent=2))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_stack_predict(args) -> int:
    files, doc_ids = _aligned_word_files(args.words)
    net = stacking.load_metanet(args.net)
    prov = provenance(
        "stack-predict",
        {"net": os.path.basename(args.net), "models": [wf.model_id for wf in files]},
    )
    docs = []
    for i, doc_id in enumerate(doc_ids):
        per_model = [wf.docs[i].predictions for wf in files]
        preds = stacking.predict_words(net, per_model)
        docs.append(WordDoc(doc_id=doc_id, predictions=tuple(preds)))
    write_word_file(
        args.out, WordFile(model_id="ensemble-stacked", docs=docs, provenance=prov)
    )
    print(args.out)
    return 0


# ---------------------------------------------------------------------------
# eval / link

def _flat_labels(wf, gold_docs):
    gold_by_id = {d.doc_id: d for d in gold_docs}
    gold: list[int] = []
    pred: list[int] = []
    for doc in wf.docs:
        if doc.doc_id not in gold_by_id:
            raise CoverageGap(f"gold file lacks document {doc.doc_id!r}")
        gdoc = gold_by_id[doc.doc_id]
        if gdoc.gold_labels is None or len(gdoc.gold_labels) != len(doc.predictions):
            raise LengthMismatch(f"doc {doc.doc_id}: gold/pred length mismatch")
        gold.extend(gdoc.gold_labels)
        pred.extend(p.label for p in doc.predictions)
    return gold, pred


def cmd_eval(args) -> int:
    wf = parse_word_file(args.pred)
    gold_docs = parse_gold_file(args.gold)
    gold, pred = _flat_labels(wf, gold_docs)
    mode = EvalMode(args.mode)
    rep = report(gold, pred, mode=mode, include_O_in_macro=not args.no_o_in_macro)
    print(render_report(rep))
    cm = confusion(gold, pred, mode=mode)
    if args.show_confusion:
        print()
        print(render_confusion(cm))
    if args.json:
        payload = {"report": rep.to_dict(), "confusion": cm.to_dict()}
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_link(args) -> int:
    table = load_mapping_csv(args.mapping)
    results = []
    if args.term:
        results.append(fuzzy_link(args.term, table, threshold=args.threshold))
    else:
        wf = parse_word_file(args.pred)
        docs = {d.doc_id: d for d in parse_gold_file(args.docs)}
        for doc in wf.docs:
            if doc.doc_id not in docs:
                raise CoverageGap(f"docs file lacks document {doc.doc_id!r}")
            words = docs[doc.doc_id].words
            if len(words) != len(doc.predictions):
                raise LengthMismatch(f"doc {doc.doc_id}: words/pred length mismatch")
            for res in link_document(
                words, [p.label for p in doc.predictions], table, args.threshold
            ):
                row = res.to_dict()
                row["doc_id"] = doc.doc_id
                results.append(row)
        print(json.dumps(results, indent=2))
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(results, fh, indent=2)
                fh.write("\n")
        return 0
    print(json.dumps([r.to_dict() for r in results], indent=2))
    return 0


# ---------------------------------------------------------------------------
# serve / pipeline

def cmd_serve(args) -> int:
    import uvicorn

    from medner.labeler import DictionaryLabeler, load_lexicon
    from medner.service import create_app

    table = load_mapping_csv(args.mapping) if args.mapping else None
    labelers = None
    if args.lexicon:
        labelers = [
            DictionaryLabeler(load_lexicon(path), model_id=os.path.basename(path))
            for path in args.lexicon
        ]
    net = stacking.load_metanet(args.net) if args.net else None
    app = create_app(
        labelers=labelers,
        mapping_table=table,
        metanet=net,
        link_threshold=args.threshold,
        static_dir=args.static,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_pipeline(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    group_args = argparse.Namespace(
        logits=args.logits, strategy=args.strategy, out_dir=args.out_dir
    )
    cmd_group(group_args)
    word_paths = []
    for path in args.logits:
        model_id, _ = parse_logit_file(path)
        word_paths.append(os.path.join(args.out_dir, f"{model_id}.words.jsonl"))
    ensemble_path = os.path.join(args.out_dir, "ensemble.words.jsonl")
    vote_args = argparse.Namespace(
        words=word_paths,
        policy=args.policy,
        threshold=args.threshold,
        tie=args.tie,
        seed=args.seed,
        out=ensemble_path,
    )
    cmd_vote(vote_args)
    for mode in ("bio_strict", "collapsed"):
        eval_args = argparse.Namespace(
            pred=ensemble_path,
            gold=args.gold,
            mode=mode,
            no_o_in_macro=False,
            show_confusion=False,
            json=os.path.join(args.out_dir, f"report.{mode}.json"),
        )
        cmd_eval(eval_args)
    if args.mapping:
        link_args = argparse.Namespace(
            term=None,
            pred=ensemble_path,
            docs=args.gold,
            mapping=args.mapping,
            threshold=0.8,
            out=os.path.join(args.out_dir, "links.json"),
        )
        cmd_link(link_args)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> tuple[argparse.ArgumentParser, argparse._SubParsersAction]:
    parser = argparse.ArgumentParser(
        prog="medner",
        description="Medication NER ensembling, evaluation, and entity linking",
    )
    parser.add_argument("--config", help="JSON config file with per-command sections")
    parser.add_argument("--seed", type=int, default=None, dest="global_seed",
                        help="override the subcommand's seed flag")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group", help="subword logits -> word predictions per model")
    p.add_argument("--logits", nargs="+", required=True, help="logit files, one per model")
    p.add_argument("--strategy", choices=[s.value for s in GroupingStrategy], default="first")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("vote", help="vote word files into one ensemble prediction file")
    p.add_argument("--words", nargs="+", required=True, help="word-prediction files")
    p.add_argument("--policy", choices=["majority", "max"], default="max")
    p.add_argument("--threshold", type=int, default=None,
                   help="majority threshold (default: half the models, rounded up)")
    p.add_argument("--tie", choices=[t.value for t in TieBreak], default="alphabetical")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_vote)

    p = sub.add_parser("stack-train", help="build the stacked dataset and train the meta-net")
    p.add_argument("--words", nargs="+", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--mode", choices=[m.value for m in FeatureMode], default="one_hot")
    p.add_argument("--min-non-o", type=int, default=2)
    p.add_argument("--hidden", type=int, default=128)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split-seed", type=int, default=None,
                   help="shuffle examples before the 80/20 split (default: positional)")
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--out", required=True, help="metanet output path")
    p.add_argument("--report", help="write the training summary JSON here too")
    p.set_defaults(func=cmd_stack_train)

    p = sub.add_parser("stack-predict", help="apply a trained meta-net to word files")
    p.add_argument("--words", nargs="+", required=True)
    p.add_argument("--net", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stack_predict)

    p = sub.add_parser("eval", help="classification report against a gold file")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--mode", choices=[m.value for m in EvalMode], default="bio_strict")
    p.add_argument("--no-o-in-macro", action="store_true",
                   help="exclude O from the macro average")
    p.add_argument("--show-confusion", action="store_true")
    p.add_argument("--json", help="write report + confusion matrix JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("link", help="link Drug runs (or one term) to SNOMED/BNF")
    p.add_argument("--mapping", required=True, help="mapping table CSV")
    p.add_argument("--term", help="link a single term instead of a prediction file")
    p.add_argument("--pred", help="word-prediction file")
    p.add_argument("--docs", help="gold-format file supplying the words")
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("serve", help="run the annotation HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--mapping", help="mapping table CSV for /link")
    p.add_argument("--lexicon", nargs="*", help="JSON lexicon file(s) for the demo labeler")
    p.add_argument("--net", help="optional stacked meta-net used when ensemble=true")
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--static", help="directory of UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("pipeline", help="composed run: group -> vote -> eval [-> link]")
    p.add_argument("--logits", nargs="+", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--strategy", choices=[s.value for s in GroupingStrategy], default="first")
    p.add_argument("--policy", choices=["majority", "max"], default="max")
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--tie", choices=[t.value for t in TieBreak], default="alphabetical")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mapping")
    p.set_defaults(func=cmd_pipeline)

    return parser, sub


def _peek_config_path(argv: list[str]) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, sub = build_parser()
    try:
        # precedence: built-in defaults < config file section < CLI flags
        config = _load_config(_peek_config_path(argv))
        command = next((tok for tok in argv if tok in sub.choices), None)
        if config and command:
            command_parser = sub.choices[command]
            known = {a.dest for a in command_parser._actions}
            section = {
                k.replace("-", "_"): v for k, v in config.get(command, {}).items()
            }
            unknown = set(section) - known
            if unknown:
                raise MednerError(
                    f"config section {command!r} has unknown keys: {sorted(unknown)}"
                )
            command_parser.set_defaults(**section)
        args = parser.parse_args(argv)
        if args.global_seed is not None and hasattr(args, "seed"):
            args.seed = args.global_seed
        return args.func(args)
    except MednerError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1
    except FileNotFoundError as exc:
        print(
            json.dumps({"error": "FileNotFound", "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
