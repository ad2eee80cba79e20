"""Offline fine-tuning of the title-pair classifier."""

from __future__ import annotations

import logging
import random
from pathlib import Path

import numpy as np
import torch

from .data import TitlePair, file_digest, load_pairs
from .evaluate import compute_metrics
from .model import PairScorer, ScorerConfig, build_model, build_tokenizer, encode_pairs, save_artifact

logger = logging.getLogger(__name__)


class TrainingFloor(Exception):
    """Best dev accuracy stayed below the configured floor."""


def _seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def _augment_identity(pairs: list[TitlePair], rng: random.Random) -> list[TitlePair]:
    """Add identical-title positives (one per four samples)."""
    titles = sorted({p.a for p in pairs} | {p.b for p in pairs})
    extra = [TitlePair(t, t, True) for t in rng.sample(titles, min(len(titles), len(pairs) // 4))]
    return pairs + extra


def _dev_probs(model, tokenizer, pairs, config) -> list[float]:
    model.eval()
    probs = []
    with torch.no_grad():
        for start in range(0, len(pairs), config.batch_size):
            chunk = pairs[start:start + config.batch_size]
            encoded = encode_pairs(tokenizer, [(p.a, p.b) for p in chunk], config)
            logits = model(**encoded).logits
            probs.extend(torch.softmax(logits, dim=-1)[:, 1].tolist())
    return probs


def fine_tune(
    train_file,
    dev_file,
    config: ScorerConfig = ScorerConfig(),
    out_dir="artifact",
) -> Path:
    """Train on pair files and export the best-dev checkpoint.

    Deterministic for a fixed config: seeds, single-threaded math and a
    seeded shuffle give identical per-epoch dev metrics across reruns.
    Raises :class:`TrainingFloor` when the best dev accuracy stays under
    ``config.min_dev_accuracy``.
    """
    _seed_everything(config.seed)
    n_threads = torch.get_num_threads()
    torch.set_num_threads(1)
    try:
        rng = random.Random(config.seed)
        train_pairs = load_pairs(train_file)
        dev_pairs = load_pairs(dev_file)
        if config.augment_identity:
            train_pairs = _augment_identity(train_pairs, rng)

        titles = [p.a for p in train_pairs] + [p.b for p in train_pairs]
        tokenizer = build_tokenizer(titles, config)
        model = build_model(config, vocab_size=tokenizer.vocab_size)
        optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)

        history = []
        best = {"accuracy": -1.0, "epoch": -1, "state": None}
        order = list(range(len(train_pairs)))
        for epoch in range(1, config.epochs + 1):
            model.train()
            rng.shuffle(order)
            epoch_loss = 0.0
            for start in range(0, len(order), config.batch_size):
                batch = [train_pairs[i] for i in order[start:start + config.batch_size]]
                encoded = encode_pairs(tokenizer, [(p.a, p.b) for p in batch], config)
                labels = torch.tensor([int(p.label) for p in batch])
                output = model(**encoded, labels=labels)
                optimizer.zero_grad()
                output.loss.backward()
                optimizer.step()
                epoch_loss += output.loss.item() * len(batch)

            probs = _dev_probs(model, tokenizer, dev_pairs, config)
            metrics = compute_metrics(probs, [p.label for p in dev_pairs])
            entry = {
                "epoch": epoch,
                "train_loss": epoch_loss / len(train_pairs),
                "dev_accuracy": metrics["accuracy"],
                "dev_f1": metrics["f1"],
            }
            history.append(entry)
            logger.info(
                "epoch %d: loss %.4f dev accuracy %.4f dev F1 %.4f",
                epoch, entry["train_loss"], entry["dev_accuracy"], entry["dev_f1"],
            )
            if metrics["accuracy"] > best["accuracy"]:
                best = {
                    "accuracy": metrics["accuracy"],
                    "epoch": epoch,
                    "state": {k: v.clone() for k, v in model.state_dict().items()},
                }

        if best["accuracy"] < config.min_dev_accuracy:
            raise TrainingFloor(
                f"best dev accuracy {best['accuracy']:.4f} below the "
                f"configured floor {config.min_dev_accuracy}"
            )
        model.load_state_dict(best["state"])

        # empirical probe recorded in the manifest: identical titles must
        # score near certainty on a released artifact
        probe_titles = sorted({p.a for p in dev_pairs})[:50]
        scorer = PairScorer(model, tokenizer, config, digest="unsaved")
        identity_scores = scorer.score([(t, t) for t in probe_titles])
        manifest = {
            "train_file_digest": file_digest(train_file),
            "dev_file_digest": file_digest(dev_file),
            "train_samples": len(train_pairs),
            "dev_samples": len(dev_pairs),
            "history": history,
            "best_epoch": best["epoch"],
            "best_dev_accuracy": best["accuracy"],
            "identity_probe_min": min(identity_scores),
            "identity_probe_mean": sum(identity_scores) / len(identity_scores),
        }
        return save_artifact(out_dir, model, tokenizer, config, manifest)
    finally:
        torch.set_num_threads(n_threads)
