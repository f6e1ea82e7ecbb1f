"""Command line interface: ``lsialign {train,align,evaluate,loo,synth}``.

Every option can also be given in a flat ``key=value`` config file passed
with ``--config``; keys are the long option names without dashes prefix
(``train-pairs=data/pairs.tsv``). Command-line flags win over the file.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

from .corpus import CorpusError, load_corpus, load_pairs
from .evaluation import DEFAULT_THRESHOLDS, SOFT_MODES, evaluate, render_misses
from .linking import NORMALIZATIONS, WeightConfig, combine_scores, emit_ranked_list, load_alignment, rank
from .lsi import SCALINGS, LsiModel, RankError
from .pipeline import EXCLUSIONS, Aligner, LsiParams, link, run_regime
from .synth import SynthConfig, generate
from .vectorizer import build_term_doc_matrix

log = logging.getLogger("lsialign")


def read_config(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key=value`` file. Blank lines and ``#`` comments are ignored."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--src-lang", default="en")
    p.add_argument("--tgt-lang", default="fr")
    p.add_argument("-v", "--verbose", action="count", default=0)


def _add_docs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--docs", help="document TSV (domain, lang, url, base64 text)")
    p.add_argument("--idf-scope", choices=("domain", "global"), default="domain",
                   help="idf per web domain (default) or collection-wide")
    p.add_argument("--url-counts", choices=("domain", "global"), default="domain",
                   help="URL token counts per domain (default) or collection-wide")


def _add_lsi(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rank", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oversample", type=int, default=20)
    p.add_argument("--power-iters", type=int, default=2)


def _add_scoring(p: argparse.ArgumentParser) -> None:
    p.add_argument("--weights", default="1,1,1", help="cos,lcos,url weights (nonnegative)")
    p.add_argument("--normalize", choices=NORMALIZATIONS, default="minmax")
    p.add_argument("--embedding-scaling", choices=SCALINGS, default="singular_values")
    p.add_argument("--top-k", type=int, default=0, help="prune candidates to top-k by cosine (0 = exact)")
    p.add_argument("--workers", type=int, default=1)


def _add_eval(p: argparse.ArgumentParser) -> None:
    p.add_argument("--thresholds", default=",".join(f"{t:.2f}" for t in DEFAULT_THRESHOLDS))
    p.add_argument("--soft-mode", choices=SOFT_MODES, default="either")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsialign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = sub.choices

    p = sub.add_parser("train", help="build the bilingual matrix and factorize it")
    _add_common(p)
    _add_docs(p)
    _add_lsi(p)
    p.add_argument("--train-pairs", help="known translation pairs (src_url, tgt_url)")
    p.add_argument("--model", help="output model file")
    p.add_argument("--dump-matrix", help="also write the term-document matrix as text triples")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("align", help="embed, score and competitively link every domain")
    _add_common(p)
    _add_docs(p)
    _add_scoring(p)
    p.add_argument("--model")
    p.add_argument("--out", help="alignment TSV (score, src_url, tgt_url)")
    p.add_argument("--ranked-list", help="also write every scored hypothesis in rank order")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("evaluate", help="strict and soft recall of an alignment file")
    _add_common(p)
    _add_eval(p)
    p.add_argument("--docs")
    p.add_argument("--gold-pairs")
    p.add_argument("--alignment", help="alignment TSV produced by align or loo")
    p.add_argument("--out", help="key-value report path (a table is written to OUT.txt)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("loo", help="train/align/evaluate under an inclusion or exclusion regime")
    _add_common(p)
    _add_docs(p)
    _add_lsi(p)
    _add_scoring(p)
    _add_eval(p)
    p.add_argument("--train-pairs")
    p.add_argument("--gold-pairs")
    p.add_argument("--exclusion", choices=EXCLUSIONS, default="loo")
    p.add_argument("--out", help="key-value report path (a table is written to OUT.txt)")
    p.add_argument("--alignment-out", help="also write the predicted alignment")
    p.set_defaults(func=cmd_loo)

    p = sub.add_parser("synth", help="write a synthetic bilingual fixture")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="count", default=0)
    for f in fields(SynthConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name in ("src_lang", "tgt_lang"):
            p.add_argument(flag, default=f.default)
        else:
            p.add_argument(flag, type=type(f.default), default=f.default)
    p.set_defaults(func=cmd_synth)
    return parser


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise SystemExit(f"lsialign {args.command}: missing required option(s): {flags}")


def _aligner(args: argparse.Namespace) -> Aligner:
    corpus = load_corpus(args.docs)
    log.info("loaded %d documents in %d domains from %s", len(corpus), len(corpus.by_domain), args.docs)
    return Aligner(corpus, args.src_lang, args.tgt_lang, args.idf_scope, args.url_counts)


def _lsi_params(args: argparse.Namespace) -> LsiParams:
    if args.rank < 1:
        raise RankError(f"--rank must be >= 1, got {args.rank}")
    return LsiParams(args.rank, args.seed, args.oversample, args.power_iters,
                     getattr(args, "embedding_scaling", "singular_values"))


def _thresholds(args: argparse.Namespace) -> list[float]:
    ths = _floats(args.thresholds)
    if not ths or any(not 0.0 < t <= 1.0 for t in ths):
        raise ValueError(f"--thresholds must be a comma list of values in (0, 1], got {args.thresholds!r}")
    return sorted(set(ths), reverse=True)


def cmd_train(args: argparse.Namespace) -> int:
    _require(args, "docs", "train_pairs", "model")
    aligner = _aligner(args)
    pairs = load_pairs(args.train_pairs)
    if args.dump_matrix:
        build_term_doc_matrix(aligner.corpus, pairs, aligner.vocab, aligner.idf).dump(args.dump_matrix)
    model = aligner.train(pairs, _lsi_params(args))
    model.save(args.model)
    log.info("wrote model (%d terms, rank %d) to %s", model.n_terms, model.rank, args.model)
    return 0


def cmd_align(args: argparse.Namespace) -> int:
    _require(args, "docs", "model", "out")
    aligner = _aligner(args)
    model = LsiModel.load(args.model)
    config = WeightConfig.parse(args.weights, args.normalize)
    emb = aligner.embed(model, args.embedding_scaling)
    scored = aligner.score(emb, config=config, top_k=args.top_k)
    linked = link(scored, config)
    emit_ranked_list(linked, args.out)
    log.info("wrote %d aligned pairs to %s", len(linked), args.out)
    if args.ranked_list:
        emit_ranked_list(rank(h for hyps in scored.values() for h in combine_scores(hyps, config)), args.ranked_list)
    return 0


def _report(report, args: argparse.Namespace, label: str) -> None:
    sys.stdout.write(report.render_table(label))
    if report.per_domain_misses:
        sys.stdout.write(f"\nmissed pairs at {report.miss_threshold:.2f}:\n")
        sys.stdout.write(render_misses(report.per_domain_misses))
    if args.out:
        report.write(args.out, label)


def cmd_evaluate(args: argparse.Namespace) -> int:
    _require(args, "docs", "gold_pairs", "alignment")
    corpus = load_corpus(args.docs)
    gold = load_pairs(args.gold_pairs)
    predicted = [(s, t) for _, s, t in load_alignment(args.alignment)]
    report = evaluate(predicted, gold, corpus, _thresholds(args), mode=args.soft_mode)
    _report(report, args, Path(args.alignment).name)
    return 0


def cmd_loo(args: argparse.Namespace) -> int:
    _require(args, "docs", "train_pairs", "gold_pairs")
    aligner = _aligner(args)
    train_pairs = load_pairs(args.train_pairs)
    gold = load_pairs(args.gold_pairs)
    config = WeightConfig.parse(args.weights, args.normalize)
    [linked] = run_regime(aligner, train_pairs, gold, args.exclusion, _lsi_params(args), [config],
                          top_k=args.top_k, workers=args.workers)
    if args.alignment_out:
        emit_ranked_list(linked, args.alignment_out)
    report = evaluate([(h.src_url, h.tgt_url) for h in linked], gold, aligner.corpus,
                      _thresholds(args), mode=args.soft_mode)
    _report(report, args, f"exclusion={args.exclusion}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    _require(args, "out")
    cfg = SynthConfig(**{f.name: getattr(args, f.name) for f in fields(SynthConfig)})
    paths = generate(cfg).write(args.out)
    for kind, path in paths.items():
        log.info("wrote %s: %s", kind, path)
    return 0


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    values = read_config(args.config)
    sub = parser.subcommands[args.command]
    known = {a.dest for a in sub._actions}  # noqa: SLF001
    unknown = sorted(set(values) - known)
    if unknown:
        raise ValueError(f"{args.config}: unknown option(s) {unknown} for {args.command}")
    sub.set_defaults(**values)
    # re-parse so explicit flags override the file and typed options are converted
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
    except (OSError, ValueError) as exc:
        print(f"lsialign: error: {exc}", file=sys.stderr)
        return 2
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except RankError as exc:
        print(f"lsialign: rank error: {exc}", file=sys.stderr)
        return 3
    except (CorpusError, ValueError, KeyError, OSError) as exc:
        print(f"lsialign: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
