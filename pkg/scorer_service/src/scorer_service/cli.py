"""Command line: serve the scorer, fine-tune, evaluate, generate data."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .datagen import generate_pair_file
from .evaluate import evaluate_artifact
from .model import ScorerConfig


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scorer-service")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="serve a trained artifact over HTTP")
    p_serve.add_argument("--artifact", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8400)

    p_tune = sub.add_parser("finetune", help="fine-tune on pair files")
    p_tune.add_argument("--train", required=True)
    p_tune.add_argument("--dev", required=True)
    p_tune.add_argument("--out", required=True)
    p_tune.add_argument("--epochs", type=int, default=12)
    p_tune.add_argument("--seed", type=int, default=0)
    p_tune.add_argument("--learning-rate", type=float, default=3e-4)
    p_tune.add_argument("--min-dev-accuracy", type=float, default=0.5)
    p_tune.add_argument("--augment-identity", action="store_true")
    p_tune.add_argument("--encoder-checkpoint",
                        help="pretrained encoder name for full-scale runs")

    p_eval = sub.add_parser("evaluate", help="score a test pair file")
    p_eval.add_argument("--artifact", required=True)
    p_eval.add_argument("--test", required=True)

    p_gen = sub.add_parser("make-data", help="generate a synthetic pair file")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--pairs", type=int, default=1000)
    p_gen.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        from .app import serve

        serve(args.artifact, host=args.host, port=args.port)
        return 0
    if args.command == "finetune":
        from .train import fine_tune

        config = ScorerConfig(
            epochs=args.epochs,
            seed=args.seed,
            learning_rate=args.learning_rate,
            min_dev_accuracy=args.min_dev_accuracy,
            augment_identity=args.augment_identity,
            encoder_checkpoint=args.encoder_checkpoint,
        )
        out = fine_tune(args.train, args.dev, config, args.out)
        print(f"artifact written to {out}")
        return 0
    if args.command == "evaluate":
        print(json.dumps(evaluate_artifact(args.artifact, args.test), indent=2, sort_keys=True))
        return 0
    if args.command == "make-data":
        path = generate_pair_file(args.out, args.pairs, args.seed)
        print(f"wrote {args.pairs} pairs to {path}")
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
