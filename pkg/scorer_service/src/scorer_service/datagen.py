"""Synthetic title-pair files in the pipeline's pair schema.

Positives mimic real version-history title changes (word drops, swaps,
replacements, reorderings of one underlying title); negatives pair titles
of different works, sometimes sharing topic words so the task is not
trivially separable by overlap alone.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

_WORDS = (
    "adaptive sparse robust latent deep neural convolutional recurrent bayesian "
    "variational stochastic distributed parallel scalable efficient network model "
    "framework method approach algorithm system architecture representation "
    "embedding attention transformer graph kernel manifold segmentation "
    "classification detection recognition estimation prediction optimization "
    "inference learning reasoning planning retrieval ranking clustering regression "
    "sampling pruning quantization distillation fusion image video speech language "
    "text code protein molecular clinical medical semantic temporal spatial causal "
    "adversarial generative supervised unsupervised multimodal transfer federated "
    "online analysis synthesis evaluation benchmark dataset calibration uncertainty "
    "interpretability fairness privacy security verification compression hardware "
    "memory energy latency recommendation dialogue translation summarization parsing"
).split()


def _title(rng: random.Random) -> list[str]:
    return rng.sample(_WORDS, rng.randint(6, 9))


def _perturb(rng: random.Random, words: list[str]) -> list[str]:
    out = list(words)
    for _ in range(rng.randint(1, 3)):
        op = rng.choice(("drop", "replace", "swap", "rotate"))
        if op == "drop" and len(out) > 5:
            out.pop(rng.randrange(len(out)))
        elif op == "replace":
            out[rng.randrange(len(out))] = rng.choice([w for w in _WORDS if w not in out])
        elif op == "swap" and len(out) > 1:
            i = rng.randrange(len(out) - 1)
            out[i], out[i + 1] = out[i + 1], out[i]
        else:
            out = out[2:] + out[:2]
    if out == words:  # force a visible change
        out[0] = rng.choice([w for w in _WORDS if w not in out])
    return out


def generate_pair_file(path: str | Path, n_pairs: int, seed: int) -> Path:
    """Write a balanced pair file; deterministic for a fixed seed."""
    rng = random.Random(seed)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i in range(n_pairs):
            base = _title(rng)
            if i % 2 == 0:
                a, b = " ".join(base), " ".join(_perturb(rng, base))
                label = True
            else:
                other = _title(rng)
                if rng.random() < 0.4:  # share a couple of topic words
                    other[:2] = base[:2]
                a, b = " ".join(base), " ".join(other)
                label = False
            if b < a:
                a, b = b, a
            fh.write(json.dumps({
                "a": a,
                "b": b,
                "authors_a": ["A. Author"],
                "authors_b": ["B. Writer"],
                "label": label,
                "prov": "version_history_positive" if label else "crossref_negative",
                "src": f"gen.{seed}.{i:05d}",
                "swapped": False,
            }, sort_keys=True))
            fh.write("\n")
    return path
