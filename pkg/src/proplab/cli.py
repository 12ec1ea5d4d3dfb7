"""Command-line pipeline: generate, balance, split, template, annotate, score."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dataio, evaluation, figures, semantics
from .annotate import DEFAULT_DEPTH_CAP, write_annotations
from .formulas import Pattern
from .generate import DatasetSpec, Datapoint, balance_trees, dataset_stats, generate_dataset
from .rewrites import SplitSpec, make_split, verify_absent
from .templates import generate_templated_set, make_behavior_pairs


def _pattern(value: str) -> Pattern:
    try:
        return Pattern(value.upper())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected one of P1..P7, got {value!r}")


def _cmd_gen(args) -> int:
    spec = DatasetSpec(
        n_examples=args.n, seed=args.seed, min_len=args.min_len, max_len=args.max_len
    )
    dataset = generate_dataset(spec)
    if args.balance:
        dataset = balance_trees(dataset, seed=args.seed)
    dataio.write_dataset(args.out, dataset)
    print(f"wrote {len(dataset)} datapoints to {args.out}")
    return 0


def _cmd_balance(args) -> int:
    dataset = dataio.read_dataset(args.in_path)
    dataio.write_dataset(args.out, balance_trees(dataset, seed=args.seed))
    print(f"rebalanced {len(dataset)} datapoints into {args.out}")
    return 0


def _cmd_stats(args) -> int:
    dataset = dataio.read_dataset(args.in_path)
    stats = dataset_stats(dataset, difficulty_sample=args.difficulty_sample)
    dataio.write_json(args.out, stats)
    if args.figures:
        lengths_png = Path(args.out).with_suffix(".lengths.png")
        difficulty_png = Path(args.out).with_suffix(".difficulty.png")
        figures.render_length_histogram(stats, lengths_png)
        figures.render_difficulty(stats, difficulty_png)
        print(f"stats -> {args.out}, figures -> {lengths_png}, {difficulty_png}")
    else:
        print(f"stats -> {args.out}")
    return 0


def _cmd_split(args) -> int:
    dataset = dataio.read_dataset(args.in_path)
    spec = SplitSpec.for_pattern(args.pattern)
    split = make_split(dataset, spec)
    dataio.write_dataset(args.out, split)
    report = verify_absent(split, args.pattern)
    verify_path = Path(args.out).with_suffix(Path(args.out).suffix + ".verify.json")
    dataio.write_json(
        verify_path,
        {
            "pattern": args.pattern.value,
            "method": spec.method.value,
            "n_in": len(dataset),
            "n_out": len(split),
            "total_occurrences": report.total_occurrences,
            "offending_indices": list(report.offending_indices[:100]),
            "clean": report.clean,
        },
    )
    print(
        f"{args.pattern.value} split ({spec.method.value}): {len(dataset)} -> {len(split)} "
        f"datapoints, {report.total_occurrences} residual occurrences"
    )
    return 0 if report.clean else 1


def _cmd_template(args) -> int:
    instances = generate_templated_set()
    dataset = [
        Datapoint(formula=inst.formula, target=semantics.pick_target(inst.formula))
        for inst in instances
    ]
    dataio.write_dataset(args.out, dataset)
    meta = args.meta or str(Path(args.out).with_suffix(".meta.tsv"))
    dataio.write_table(
        meta,
        ("index", "template_id", "subformula_id", "a_choice", "b_choice", "variant", "tags"),
        [
            (
                i,
                inst.template_id,
                inst.subformula_id,
                inst.a_choice,
                inst.b_choice,
                int(inst.is_variant),
                ",".join(sorted(p.value for p in inst.tags)),
            )
            for i, inst in enumerate(instances)
        ],
    )
    print(f"wrote {len(instances)} templated datapoints to {args.out}, metadata to {meta}")
    return 0


def _cmd_pairs(args) -> int:
    if args.in_path:
        from .formulas import contains_pattern
        from .templates import BehaviorPair, drop_pattern_negations

        formulas = [dp.formula for dp in dataio.read_dataset(args.in_path)]
        pairs = []
        for f in formulas:
            if not contains_pattern(f, args.pattern):
                continue
            modified = drop_pattern_negations(f, args.pattern)
            if semantics.is_satisfiable(modified):
                pairs.append(BehaviorPair(original=f, modified=modified))
    else:
        pairs = make_behavior_pairs(generate_templated_set(), args.pattern)
    dataio.write_pairs(args.out_pairs, pairs)
    for path, side in ((args.out_orig, "original"), (args.out_mod, "modified")):
        if not path:
            continue
        dataset = [
            Datapoint(formula=getattr(p, side), target=semantics.pick_target(getattr(p, side)))
            for p in pairs
        ]
        dataio.write_dataset(path, dataset)
    print(f"wrote {len(pairs)} {args.pattern.value} behavior pairs to {args.out_pairs}")
    return 0


def _cmd_annotate(args) -> int:
    dataset = dataio.read_dataset(args.in_path)
    with open(args.out, "w", encoding="utf-8") as fh:
        n = write_annotations(fh, (dp.formula for dp in dataset), depth_cap=args.depth_cap)
    print(f"annotated {n} datapoints -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    dataset = dataio.read_dataset(args.data)
    preds = dataio.read_predictions(args.preds)
    records = evaluation.records_from_token_lists(preds)
    patterns = [args.slice_pattern] if args.slice_pattern else list(Pattern)
    report = evaluation.evaluate_records(dataset, records, patterns=patterns)
    files = evaluation.emit_report(report, args.out)
    if args.figures:
        fig = figures.render_pattern_accuracy(
            report.to_dict(), Path(args.out) / "eval_pattern_accuracy.png"
        )
        files["figure"] = str(fig)
    print(
        f"n={report.n} syntactic={report.syntactic_acc:.4f} "
        f"semantic={report.semantic_acc:.4f} malformed={report.malformed_rate:.4f}"
    )
    print(f"report files: {', '.join(sorted(files.values()))}")
    return 0


def _cmd_behavior(args) -> int:
    pairs = dataio.read_pairs(args.pairs)
    preds_orig = dataio.read_predictions(args.preds_orig)
    preds_mod = dataio.read_predictions(args.preds_mod)
    summary = evaluation.behavior_summary(pairs, preds_orig, preds_mod)
    line = " ".join(f"{cls}={summary['fractions'][cls]:.4f}" for cls in ("A", "B", "C", "D"))
    print(f"n={summary['n']} {line}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        dataio.write_json(out / "behavior.json", summary)
        dataio.write_table(
            out / "behavior.tsv",
            ("class", "count", "fraction"),
            [
                (cls, summary["counts"][cls], summary["fractions"][cls])
                for cls in ("A", "B", "C", "D")
            ],
        )
        figures.render_behavior(summary, out / "behavior.png")
    return 0


def _cmd_overlap(args) -> int:
    fraction = evaluation.overlap(
        dataio.read_predictions(args.a), dataio.read_predictions(args.b)
    )
    print(f"overlap={fraction:.4f}")
    return 0


def _cmd_aggregate(args) -> int:
    from .evaluation import EvalReport, SliceAccuracy

    reports_by_label: dict[str, list] = {}
    for item in args.report:
        label, _, path = item.partition("=")
        if not path:
            raise SystemExit(f"--report wants LABEL=PATH, got {item!r}")
        payload = dataio.read_json(path)
        slices = {
            p: {
                side: SliceAccuracy(
                    n=acc["n"],
                    syntactic_acc=acc["syntactic_acc"],
                    semantic_acc=acc["semantic_acc"],
                )
                for side, acc in sides.items()
            }
            for p, sides in payload["pattern_slices"].items()
        }
        report = EvalReport(
            n=payload["n"],
            counts=payload["counts"],
            syntactic_acc=payload["syntactic_acc"],
            semantic_acc=payload["semantic_acc"],
            malformed_rate=payload["malformed_rate"],
            pattern_slices=slices,
        )
        reports_by_label.setdefault(label, []).append(report)
    rows = evaluation.aggregate_pattern_accuracies(reports_by_label)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dataio.write_table(
        out / "pattern_accuracy_by_seed.tsv",
        ("label", "pattern", "slice", "n_seeds", "mean_semantic_acc", "stderr"),
        [
            (r["label"], r["pattern"], r["slice"], r["n_seeds"], r["mean_semantic_acc"], r["stderr"])
            for r in rows
        ],
    )
    figures.render_aggregate(rows, out / "pattern_accuracy_by_seed.png")
    print(f"aggregated {sum(len(v) for v in reports_by_label.values())} reports -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proplab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random satisfiable dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-len", type=int, default=5)
    p.add_argument("--max-len", type=int, default=35)
    p.add_argument("--balance", action="store_true", help="also rebalance subtrees")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("balance", help="rebalance an existing dataset")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_balance)

    p = sub.add_parser("stats", help="dataset statistics as JSON")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--difficulty-sample", type=int, default=None)
    p.add_argument("--no-figures", dest="figures", action="store_false")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("split", help="pattern-holdout training set")
    p.add_argument("--pattern", type=_pattern, required=True)
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("template", help="templated diagnostic test set")
    p.add_argument("--out", required=True)
    p.add_argument("--meta", default=None, help="metadata sidecar path")
    p.set_defaults(func=_cmd_template)

    p = sub.add_parser("pairs", help="negation behavior pairs")
    p.add_argument("--pattern", type=_pattern, required=True)
    p.add_argument("--in", dest="in_path", default=None, help="dataset file; default templated set")
    p.add_argument("--out-pairs", required=True)
    p.add_argument("--out-orig", default=None, help="dataset file for the originals")
    p.add_argument("--out-mod", default=None, help="dataset file for the modified formulas")
    p.set_defaults(func=_cmd_pairs)

    p = sub.add_parser("annotate", help="tree-position and adjacency sidecar")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--depth-cap", type=int, default=DEFAULT_DEPTH_CAP)
    p.set_defaults(func=_cmd_annotate)

    p = sub.add_parser("eval", help="score a prediction file")
    p.add_argument("--data", required=True)
    p.add_argument("--preds", required=True)
    p.add_argument("--slice-pattern", type=_pattern, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", dest="figures", action="store_false")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("behavior", help="classify negation-handling behavior")
    p.add_argument("--pairs", required=True)
    p.add_argument("--preds-orig", required=True)
    p.add_argument("--preds-mod", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_behavior)

    p = sub.add_parser("overlap", help="fraction of identical predictions")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=_cmd_overlap)

    p = sub.add_parser("aggregate", help="across-seed summary of eval reports")
    p.add_argument("--report", action="append", required=True, metavar="LABEL=PATH")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_aggregate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
