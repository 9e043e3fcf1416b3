"""Command-line entry points.

Exit status: 0 on success, 1 on invalid input data, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from functools import partial
from pathlib import Path

from . import corpus as cp
from .errors import ContractError, TrainingDivergedError, ValidationError
from .oracle import (DEFAULT_OBJECTIVE, OBJECTIVES, ExtractionOracle, greedy_extraction_oracle,
                     oracle_metadata, plausibility_labels, salience_labels)
from .pipeline import (DATASET_K, DATASET_LAMBDA_S, DEFAULT_LAMBDA_P, CompressiveSummary,
                       PipelineConfig, summarize)
from .rouge import RougeConfig
from .rules import propose_spans
from .scorer import LinearScorer, TrainConfig, load_external_scores, train

log = logging.getLogger("compsumm")

GLOBAL_DEFAULTS = {"seed": 0, "no_stemming": False, "token_budget": 512,
                   "max_spans": 50, "jobs": 1, "config": None}


def _global_flags(parser, suppress: bool) -> None:
    d = (lambda key: argparse.SUPPRESS) if suppress else GLOBAL_DEFAULTS.get
    parser.add_argument("--seed", type=int, default=d("seed"))
    parser.add_argument("--no-stemming", action="store_true", default=d("no_stemming"),
                        help="disable Porter stemming in ROUGE")
    parser.add_argument("--token-budget", type=int, default=d("token_budget"))
    parser.add_argument("--max-spans", type=int, default=d("max_spans"))
    parser.add_argument("--jobs", type=int, default=d("jobs"), help="worker processes")
    parser.add_argument("--config", default=d("config"),
                        help="JSON file whose keys mirror the command-line flags")


def _sources(p) -> None:
    for name, what in (("extract", "extraction"), ("plaus", "plausibility"),
                       ("sal", "salience")):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument(f"--{name}-model", help=f"{what} model JSON")
        group.add_argument(f"--{name}-scores", help=f"{what} score JSONL")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compsumm", description=__doc__)
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propose", parents=[common], help="candidate spans per sentence")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", default="-")

    p = sub.add_parser("oracle-extract", parents=[common], help="greedy extraction oracle")
    p.add_argument("--corpus", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--objective", choices=sorted(OBJECTIVES), default=DEFAULT_OBJECTIVE)
    p.add_argument("--out", default="-")

    p = sub.add_parser("oracle-compress", parents=[common], help="span keep/delete labels")
    p.add_argument("--mode", choices=["plausibility", "salience"], required=True)
    p.add_argument("--pairs", help="parallel compression pairs (plausibility)")
    p.add_argument("--corpus", help="summarization corpus (salience)")
    p.add_argument("--extract", help="oracle-extract output to reuse (salience)")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--objective", choices=sorted(OBJECTIVES), default=DEFAULT_OBJECTIVE)
    p.add_argument("--out", default="-")

    p = sub.add_parser("train", parents=[common], help="fit a logistic scorer")
    p.add_argument("--task", choices=["extract", "plausibility", "salience"], required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--corpus", help="corpus the labels refer to (extract, salience)")
    p.add_argument("--pairs", help="pairs the labels refer to (plausibility)")
    p.add_argument("--init", help="warm-start from this model (domain adaptation)")
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--loss-trace", help="write the loss after every step here")
    p.add_argument("--out", required=True)

    p = sub.add_parser("summarize", parents=[common], help="extract-then-compress")
    p.add_argument("--corpus", required=True)
    _sources(p)
    p.add_argument("--dataset", choices=sorted(DATASET_K),
                   help="preset k and salience threshold")
    p.add_argument("--k", type=int)
    p.add_argument("--lambda-p", type=float, default=DEFAULT_LAMBDA_P)
    p.add_argument("--lambda-s", type=float)
    p.add_argument("--out", default="-")

    p = sub.add_parser("sweep", parents=[common], help="line search on the salience threshold")
    p.add_argument("--corpus", required=True)
    _sources(p)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--lambda-p", type=float, default=DEFAULT_LAMBDA_P)
    p.add_argument("--grid-lo", type=float, default=0.1)
    p.add_argument("--grid-hi", type=float, default=0.9)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--out", default="-")

    p = sub.add_parser("eval", parents=[common], help="ROUGE report for summaries")
    p.add_argument("--corpus", required=True)
    p.add_argument("--summaries", required=True)
    p.add_argument("--out", help="also write the JSON report here")
    return parser


def _parse(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            raw = json.loads(Path(known.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {known.config}: {exc}")
        if not isinstance(raw, dict):
            parser.error("config must be a JSON object")
        defaults = {k.lstrip("-").replace("-", "_"): v for k, v in raw.items()}
        parser.set_defaults(**defaults)
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def _write_rows(out, rows) -> None:
    if out == "-":
        for row in rows:
            sys.stdout.write(json.dumps(row, sort_keys=True) + "\n")
    else:
        cp.write_jsonl(out, rows)


def _write_json(out, obj) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _source(model, scores):
    return LinearScorer.load(model) if model else load_external_scores(scores)


def _propose_rows(doc, max_spans):
    return [{"doc_id": doc.id, "sent_idx": i,
             "spans": [c.to_json() for c in propose_spans(s.tree, max_spans)]}
            for i, s in enumerate(doc.sentences)]


def _extract_row(doc, k, rcfg, objective):
    return greedy_extraction_oracle(doc, k, rcfg, objective).to_json(doc.id)


def _salience_rows(doc, k, rcfg, objective, max_spans, extracts):
    if extracts is not None and doc.id in extracts:
        ext = ExtractionOracle(tuple(extracts[doc.id]), 0.0)
    else:
        ext = greedy_extraction_oracle(doc, k, rcfg, objective)
    return [lab.to_json() for lab in salience_labels(doc, ext, rcfg, max_spans, objective)]


def _summary_row(doc, sources, cfg):
    return summarize(doc, *sources, cfg).to_json()


def _flatten(chunks):
    return [row for chunk in chunks for row in chunk]


def run(args) -> int:
    rcfg = RougeConfig(stemming=not args.no_stemming)
    cmd = args.command

    if cmd == "propose":
        docs = cp.read_corpus(args.corpus).records
        _write_rows(args.out, _flatten(cp.map_docs(
            partial(_propose_rows, max_spans=args.max_spans), docs, args.jobs)))

    elif cmd == "oracle-extract":
        docs = cp.read_corpus(args.corpus).records
        _write_rows(args.out, cp.map_docs(
            partial(_extract_row, k=args.k, rcfg=rcfg, objective=args.objective),
            docs, args.jobs))

    elif cmd == "oracle-compress":
        if args.mode == "plausibility":
            if not args.pairs:
                raise _Usage("--mode plausibility needs --pairs")
            pairs = cp.read_pairs(args.pairs)
            rows = [lab.to_json() for lab in
                    plausibility_labels(pairs, rcfg, args.max_spans, args.objective)]
        else:
            if not args.corpus:
                raise _Usage("--mode salience needs --corpus")
            docs = cp.read_corpus(args.corpus).records
            extracts = None
            if args.extract:
                extracts = {r["doc_id"]: r["selected"] for r in cp.read_jsonl(args.extract)}
            rows = _flatten(cp.map_docs(
                partial(_salience_rows, k=args.k, rcfg=rcfg, objective=args.objective,
                        max_spans=args.max_spans, extracts=extracts), docs, args.jobs))
        _write_rows(args.out, rows)
        if args.out != "-":
            meta = dict(oracle_metadata(args.objective, rcfg), mode=args.mode)
            _write_json(args.out + ".meta.json", meta)

    elif cmd == "train":
        if args.task == "plausibility" and not args.pairs:
            raise _Usage("--task plausibility needs --pairs")
        if args.task != "plausibility" and not args.corpus:
            raise _Usage(f"--task {args.task} needs --corpus")
        if args.task == "extract":
            selected = {r["doc_id"]: r["selected"] for r in cp.read_jsonl(args.labels)}
            X, y = cp.sentence_dataset(cp.read_corpus(args.corpus), selected)
        else:
            labels = cp.read_labels(args.labels)
            if args.task == "plausibility":
                lookup = cp.pair_lookup(cp.read_pairs(args.pairs))
            else:
                lookup = cp.sentence_lookup(cp.read_corpus(args.corpus))
            X, y = cp.span_dataset(labels, lookup)
        tcfg = TrainConfig(args.lr, args.steps, args.batch_size, args.seed)
        init = LinearScorer.load(args.init) if args.init else None
        model, trace = train(X, y, tcfg, task=args.task, init=init)
        model.save(args.out)
        if args.loss_trace:
            Path(args.loss_trace).write_text(json.dumps(trace) + "\n")
        log.info("trained %s on %d examples: loss %.4f -> %.4f",
                 args.task, len(y), trace[0], trace[-1])

    elif cmd in ("summarize", "sweep"):
        docs = cp.read_corpus(args.corpus).records
        sources = (_source(args.extract_model, args.extract_scores),
                   _source(args.plaus_model, args.plaus_scores),
                   _source(args.sal_model, args.sal_scores))
        if cmd == "summarize":
            preset = args.dataset
            k = args.k or (DATASET_K[preset] if preset else 3)
            lam_s = args.lambda_s
            if lam_s is None:
                lam_s = DATASET_LAMBDA_S.get(preset, 0.6) if preset else 0.6
            cfg = PipelineConfig(k, args.lambda_p, lam_s, args.token_budget, args.max_spans)
            _write_rows(args.out, cp.map_docs(
                partial(_summary_row, sources=sources, cfg=cfg), docs, args.jobs))
        else:
            cfg = PipelineConfig(args.k, args.lambda_p, 0.0, args.token_budget, args.max_spans)
            result = cp.sweep_lambda_s(docs, *sources, cfg, args.grid_lo, args.grid_hi,
                                       args.step, rcfg, jobs=args.jobs)
            _write_json(args.out, result.to_json())

    elif cmd == "eval":
        docs = cp.read_corpus(args.corpus).records
        summaries = [CompressiveSummary.from_json(r) for r in cp.read_jsonl(args.summaries)]
        report = cp.evaluate(docs, summaries, rcfg)
        print(report.table())
        if args.out:
            _write_json(args.out, report.to_json())
    return 0


class _Usage(Exception):
    pass


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    argv = sys.argv[1:] if argv is None else list(argv)
    args = _parse(argv)
    try:
        return run(args)
    except _Usage as exc:
        print(f"compsumm {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ContractError, TrainingDivergedError, OSError) as exc:
        print(f"compsumm {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
