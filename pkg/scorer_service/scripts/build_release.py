#!/usr/bin/env python3
"""Rebuild the released artifact from scratch, deterministically.

Regenerates the committed pair files, fine-tunes with the release
configuration, and refuses to ship an artifact whose identity probe or
dev accuracy is below the release bars.
"""

import json
import logging
import sys
from pathlib import Path

from scorer_service.datagen import generate_pair_file
from scorer_service.model import ScorerConfig
from scorer_service.train import fine_tune

ROOT = Path(__file__).resolve().parents[1]

RELEASE_CONFIG = ScorerConfig(
    hidden_size=64,
    num_layers=2,
    num_heads=4,
    intermediate_size=128,
    max_length=32,
    batch_size=32,
    learning_rate=5e-4,
    epochs=40,
    seed=42,
    min_dev_accuracy=0.75,
    augment_identity=True,
)

IDENTITY_BAR = 0.9


def main() -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    data = ROOT / "data"
    generate_pair_file(data / "train.jsonl", 10_000, seed=100)
    generate_pair_file(data / "dev.jsonl", 400, seed=200)
    generate_pair_file(data / "test.jsonl", 400, seed=300)
    generate_pair_file(data / "toy_train.jsonl", 200, seed=400)
    generate_pair_file(data / "toy_dev.jsonl", 60, seed=500)

    out = fine_tune(data / "train.jsonl", data / "dev.jsonl", RELEASE_CONFIG, ROOT / "artifact")
    manifest = json.loads((out / "manifest.json").read_text())
    print(f"best dev accuracy {manifest['best_dev_accuracy']:.4f} "
          f"(epoch {manifest['best_epoch']})")
    print(f"identity probe min {manifest['identity_probe_min']:.4f}")
    if manifest["identity_probe_min"] < IDENTITY_BAR:
        print(f"identity probe below the {IDENTITY_BAR} release bar", file=sys.stderr)
        return 1
    print(f"released artifact at {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
