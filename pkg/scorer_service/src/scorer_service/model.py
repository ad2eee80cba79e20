"""Model, tokenizer and artifact handling for the title-pair classifier.

The classifier is a BERT-architecture cross-encoder: both titles go in as
one sequence and a two-class head emits the probability that they denote
the same work. At full scale the encoder is initialized from a pretrained
scientific-text checkpoint (``encoder_checkpoint``); the bundled artifact
uses a small randomly initialized encoder with a WordPiece vocabulary
trained on the pair data, which keeps everything reproducible offline.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import re
import unicodedata
from collections import Counter

import torch
from safetensors.torch import load_file, save_file
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers
from tokenizers.processors import TemplateProcessing
from transformers import BertConfig, BertForSequenceClassification, PreTrainedTokenizerFast

SPECIAL_TOKENS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]

MODEL_FILE = "model.safetensors"
TOKENIZER_FILE = "tokenizer.json"
CONFIG_FILE = "config.json"
MANIFEST_FILE = "manifest.json"


@dataclass(frozen=True)
class ScorerConfig:
    """Architecture and fine-tuning settings.

    ``encoder_checkpoint`` switches to a pretrained encoder (downloads its
    weights and tokenizer); when it is None a compact encoder is trained
    from scratch with the settings below.
    """

    vocab_size: int = 2000
    hidden_size: int = 128
    num_layers: int = 2
    num_heads: int = 4
    intermediate_size: int = 256
    max_length: int = 64
    seed: int = 0
    epochs: int = 12
    batch_size: int = 16
    learning_rate: float = 3e-4
    min_dev_accuracy: float = 0.5
    augment_identity: bool = False
    encoder_checkpoint: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "ScorerConfig":
        return cls(**obj)


# mirrors the Whitespace pre-tokenizer: word runs or punctuation runs
_WORD_RE = re.compile(r"\w+|[^\w\s]+")


def _normalize_for_vocab(text: str) -> str:
    decomposed = unicodedata.normalize("NFD", text)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return stripped.lower()


def build_tokenizer(titles: Sequence[str], config: ScorerConfig) -> PreTrainedTokenizerFast:
    """Build a deterministic word-level tokenizer from the corpus titles.

    The vocabulary is the most frequent words up to the configured size,
    ties broken alphabetically, so identical data always yields identical
    token ids (the library's subword trainer is parallel and does not).
    Full-scale runs with a pretrained encoder use its tokenizer instead.
    """
    counts: Counter[str] = Counter()
    for title in titles:
        counts.update(_WORD_RE.findall(_normalize_for_vocab(title)))
    budget = max(config.vocab_size - len(SPECIAL_TOKENS), 0)
    words = sorted(counts, key=lambda w: (-counts[w], w))[:budget]
    vocab = {tok: i for i, tok in enumerate([*SPECIAL_TOKENS, *words])}

    tokenizer = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    tokenizer.normalizer = normalizers.Sequence(
        [normalizers.NFD(), normalizers.StripAccents(), normalizers.Lowercase()]
    )
    tokenizer.pre_tokenizer = pre_tokenizers.Whitespace()
    tokenizer.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B:1 [SEP]:1",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        pad_token="[PAD]",
        unk_token="[UNK]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )


def build_model(config: ScorerConfig, vocab_size: int) -> BertForSequenceClassification:
    if config.encoder_checkpoint:
        return BertForSequenceClassification.from_pretrained(
            config.encoder_checkpoint, num_labels=2
        )
    bert_config = BertConfig(
        vocab_size=vocab_size,
        hidden_size=config.hidden_size,
        num_hidden_layers=config.num_layers,
        num_attention_heads=config.num_heads,
        intermediate_size=config.intermediate_size,
        max_position_embeddings=config.max_length + 8,
        num_labels=2,
    )
    return BertForSequenceClassification(bert_config)


def encode_pairs(tokenizer, pairs, config: ScorerConfig) -> dict[str, torch.Tensor]:
    """Fixed-shape encoding of (title_a, title_b) pairs as one sequence each."""
    batch = tokenizer(
        [p[0] for p in pairs],
        [p[1] for p in pairs],
        truncation=True,
        max_length=config.max_length,
        padding="max_length",
        return_token_type_ids=True,
        return_tensors="pt",
    )
    return dict(batch)


def save_artifact(directory, model, tokenizer, config: ScorerConfig, manifest: dict) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    save_file(model.state_dict(), out / MODEL_FILE)
    tokenizer.backend_tokenizer.save(str(out / TOKENIZER_FILE))
    with open(out / CONFIG_FILE, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(config.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    manifest = dict(manifest, weights_digest=_digest_file(out / MODEL_FILE))
    with open(out / MANIFEST_FILE, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return out


def _digest_file(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


class PairScorer:
    """A loaded artifact: deterministic scoring of title pairs.

    Pairs are scored one by one at a fixed padded length, so scores do not
    depend on how a request batches them and repeated runs are bitwise
    identical.
    """

    def __init__(self, model, tokenizer, config: ScorerConfig, digest: str):
        self.model = model.eval()
        self.tokenizer = tokenizer
        self.config = config
        self.digest = digest

    @classmethod
    def load(cls, directory) -> "PairScorer":
        directory = Path(directory)
        with open(directory / CONFIG_FILE, "r", encoding="utf-8") as fh:
            config = ScorerConfig.from_dict(json.load(fh))
        tokenizer = PreTrainedTokenizerFast(
            tokenizer_file=str(directory / TOKENIZER_FILE),
            pad_token="[PAD]",
            unk_token="[UNK]",
            cls_token="[CLS]",
            sep_token="[SEP]",
            mask_token="[MASK]",
        )
        state = load_file(directory / MODEL_FILE)
        vocab_size = state["bert.embeddings.word_embeddings.weight"].shape[0]
        model = build_model(config, vocab_size)
        model.load_state_dict(state)
        return cls(model, tokenizer, config, _digest_file(directory / MODEL_FILE))

    @torch.no_grad()
    def score(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        out = []
        for pair in pairs:
            encoded = encode_pairs(self.tokenizer, [pair], self.config)
            logits = self.model(**encoded).logits
            prob = torch.softmax(logits, dim=-1)[0, 1].item()
            out.append(min(1.0, max(0.0, prob)))
        return out
