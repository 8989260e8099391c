"""Command-line interface.

Subcommands:
    stats      print the token-count bin table for a corpus
    perturb    dump fuzz/negation variants as TSV
    evaluate   run the full pipeline for one corpus and a set of embedders
    report     re-render figures and the overlap matrix from stored CSVs
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import make_run_config, parse_config_file
from .corpus import Language, filter_by_length, format_token_bin_table, \
    load_corpus, token_bin_stats
from .pipeline import MATRIX_CSV_NAME, MATRIX_TXT_NAME, all_succeeded, \
    run_pipeline
from .perturb import Mode, dump_tsv
from . import pipeline, report


def _add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="corpus file, one sentence per line")
    p.add_argument("--language", required=True, type=Language.parse,
                   metavar="{nl,en}")


def _cmd_stats(args) -> int:
    corpus = load_corpus(args.corpus, args.language)
    if args.filter_max_tokens is not None:
        corpus = filter_by_length(corpus, args.filter_max_tokens)
    table = token_bin_stats(corpus, bin_width=args.bin_width)
    print(format_token_bin_table(table, name=Path(args.corpus).stem))
    return 0


def _cmd_perturb(args) -> int:
    corpus = load_corpus(args.corpus, args.language)
    modes = {"fuzz": (Mode.FUZZ,), "negate": (Mode.NEGATE,),
             "both": (Mode.FUZZ, Mode.NEGATE)}[args.mode]
    sets = [p for p in pipeline.generate_perturbations(
                corpus, args.x, args.seed, args.grammar_negation or False)
            if p.mode in modes]
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            rows = dump_tsv(sets, fh)
        print(f"wrote {rows} variants to {args.out}")
    else:
        dump_tsv(sets, sys.stdout)
    return 0


def _cmd_evaluate(args) -> int:
    file_values = parse_config_file(args.config) if args.config else None
    config = make_run_config(
        file_values,
        corpus=args.corpus,
        language=args.language,
        embedder=args.embedder,
        x=args.x,
        seed=args.seed,
        resolution=args.resolution,
        filter_max_tokens=args.filter_max_tokens,
        grammar_negation=args.grammar_negation,
        endpoint=args.endpoint,
        out=args.out,
        jobs=args.jobs,
    )
    manifest = run_pipeline(config)
    for combo in manifest["combinations"]:
        if combo["status"] == "ok":
            print(f"ok      {combo['embedder']} x {combo['dataset']}: "
                  f"overlap={combo['overlap']:.4f}")
        else:
            print(f"failed  {combo['embedder']} x {combo['dataset']}: "
                  f"{combo['error']}")
    matrix_txt = Path(config.out_dir) / MATRIX_TXT_NAME
    if matrix_txt.exists():
        print()
        print(matrix_txt.read_text(encoding="utf-8"), end="")
    print(f"\nmanifest: {Path(config.out_dir) / pipeline.MANIFEST_NAME}")
    return 0 if all_succeeded(manifest) else 1


def _cmd_report(args) -> int:
    in_dir = Path(args.in_dir)
    out_dir = Path(args.out) if args.out else in_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    curve_csvs = sorted(p for p in in_dir.glob("*.csv")
                        if p.name != MATRIX_CSV_NAME)
    overlaps = {}
    rendered = 0
    for path in curve_csvs:
        try:
            result = report.read_csv_curves(path)
        except ValueError:
            continue  # not a curve CSV
        base = path.stem
        report.render_curves(result, base, out_dir / f"{base}.svg")
        rendered += 1
        if "__" in base:
            dataset, embedder = base.split("__", 1)
            overlaps[(embedder, dataset)] = result.overlap
        print(f"rendered {base}.svg  overlap={result.overlap:.4f}")
    if rendered == 0:
        print("error: nothing to report (no curve CSVs found)", file=sys.stderr)
        return 1
    if overlaps:
        matrix = report.overlap_matrix(overlaps)
        (out_dir / MATRIX_CSV_NAME).write_text(matrix.to_csv_text(),
                                               encoding="utf-8", newline="\n")
        (out_dir / MATRIX_TXT_NAME).write_text(matrix.to_text(),
                                               encoding="utf-8", newline="\n")
        print()
        print(matrix.to_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conceptsep",
        description="Evaluate how well sentence embedders separate concepts "
                    "by contrasting surface-level (fuzz) and semantic "
                    "(negation) perturbations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="token-count bin table for a corpus")
    _add_corpus_args(p_stats)
    p_stats.add_argument("--bin-width", type=int, default=10)
    p_stats.add_argument("--filter-max-tokens", type=int, default=None)
    p_stats.set_defaults(func=_cmd_stats)

    p_pert = sub.add_parser("perturb", help="dump perturbation variants as TSV")
    _add_corpus_args(p_pert)
    p_pert.add_argument("--mode", choices=("fuzz", "negate", "both"),
                        default="both")
    p_pert.add_argument("--x", type=int, default=3,
                        help="max variants per sentence per mode")
    p_pert.add_argument("--seed", type=int, default=0)
    p_pert.add_argument("--grammar-negation", action="store_const", const=True,
                        default=None, help="English grammar-aware negation")
    p_pert.add_argument("--out", default=None, help="output TSV (default stdout)")
    p_pert.set_defaults(func=_cmd_perturb)

    p_eval = sub.add_parser("evaluate", help="run the full evaluation pipeline")
    p_eval.add_argument("--config", default=None, help="key=value config file")
    p_eval.add_argument("--corpus", default=None)
    p_eval.add_argument("--language", type=Language.parse, default=None,
                        metavar="{nl,en}")
    p_eval.add_argument("--embedder", action="append", default=None,
                        help="tfidf | hash | wordavg:PATH | remote:MODEL[@URL]"
                             " (repeatable)")
    p_eval.add_argument("--x", type=int, default=None)
    p_eval.add_argument("--seed", type=int, default=None)
    p_eval.add_argument("--resolution", type=int, default=None)
    p_eval.add_argument("--filter-max-tokens", type=int, default=None)
    p_eval.add_argument("--grammar-negation", action="store_const", const=True,
                        default=None)
    p_eval.add_argument("--endpoint", default=None,
                        help="default endpoint for remote embedders")
    p_eval.add_argument("--out", default=None, help="output directory")
    p_eval.add_argument("--jobs", type=int, default=None)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_rep = sub.add_parser("report", help="re-render from stored curve CSVs")
    p_rep.add_argument("--in", dest="in_dir", required=True,
                       help="directory holding curve CSVs")
    p_rep.add_argument("--out", default=None,
                       help="output directory (default: same as --in)")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
