"""Train encoders and emit prediction files for the evaluation harness."""

from __future__ import annotations

import argparse
import sys

from .data import attach_annotations, read_dataset
from .decoding import greedy_decode, write_predictions
from .models import ENCODER_KINDS, ModelConfig, build_model
from .training import TrainConfig, load_checkpoint, train


def _load(data_path, annotations, needed: bool):
    examples = read_dataset(data_path)
    if annotations:
        attach_annotations(examples, annotations)
    elif needed:
        raise SystemExit("this encoder needs --annotations (see `proplab annotate`)")
    return examples


def _cmd_train(args) -> int:
    model_cfg = ModelConfig(encoder_kind=args.encoder, dropout=args.dropout)
    model = build_model(model_cfg)
    needs_annotations = model_cfg.needs_paths or model_cfg.needs_adjacency
    examples = _load(args.data, args.annotations, needs_annotations)
    eval_examples = None
    if args.eval_data:
        eval_examples = _load(args.eval_data, args.eval_annotations, needs_annotations)
    cfg = TrainConfig(
        data=args.data,
        annotations=args.annotations,
        out_dir=args.out,
        steps=args.steps,
        batch=args.batch,
        warmup=args.warmup,
        lr=args.lr,
        seed=args.seed,
        eval_data=args.eval_data,
    )
    ckpt = train(model, cfg, examples, eval_examples)
    print(f"checkpoint -> {ckpt}")
    return 0


def _cmd_predict(args) -> int:
    model = load_checkpoint(args.ckpt)
    needs_annotations = model.cfg.needs_paths or model.cfg.needs_adjacency
    examples = _load(args.data, args.annotations, needs_annotations)
    predictions = greedy_decode(model, examples, batch_size=args.batch)
    write_predictions(args.out, predictions)
    print(f"wrote {len(predictions)} predictions to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proptrain", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train")
    p.add_argument("--data", required=True)
    p.add_argument("--annotations", default=None)
    p.add_argument("--encoder", choices=ENCODER_KINDS, default="transformer_abs")
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--batch", type=int, default=128)
    p.add_argument("--warmup", type=int, default=4000)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eval-data", default=None)
    p.add_argument("--eval-annotations", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--annotations", default=None)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_predict)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
