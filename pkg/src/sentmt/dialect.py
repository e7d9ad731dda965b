"""Dialectal vs standard Arabic classification.

A logistic model over hashed character n-gram frequencies of the normalized
text. Dialect identity is strongly lexical and orthographic, so a linear
char-n-gram model is the classical strong baseline and keeps the toolkit
free of heavyweight model dependencies. Training is plain SGD in a fixed,
seeded order, so runs are bit-reproducible.
"""

import json
import math
import random
import zlib
from dataclasses import dataclass, field

from sentmt.errors import InputError
from sentmt.textproc import normalize_arabic

LABEL_DA = "DA"
LABEL_MSA = "MSA"
MODEL_MAGIC = "DAID1"
MODEL_VERSION = 1

DEFAULT_NGRAM_ORDERS = (2, 3, 4)
DEFAULT_HASH_BITS = 18
_EARLY_STOP_PATIENCE = 3


@dataclass(frozen=True)
class LabeledSentence:
    text: str
    label: str

    def __post_init__(self):
        if self.label not in (LABEL_DA, LABEL_MSA):
            raise ValueError(f"unknown label: {self.label!r}")
        if not normalize_arabic(self.text).strip():
            raise ValueError("text empty after normalization")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 25
    learning_rate: float = 1.0
    l2: float = 1e-6
    seed: int = 0
    ngram_orders: tuple = DEFAULT_NGRAM_ORDERS
    hash_bits: int = DEFAULT_HASH_BITS


@dataclass
class DialectModel:
    """Trained classifier; DA is the positive class."""

    ngram_orders: tuple
    hash_bits: int
    hash_seed: int
    feature_weights: dict
    bias: float
    training_meta: dict = field(default_factory=dict)


def _features(text, ngram_orders, hash_bits, hash_seed):
    """Hashed char n-gram counts of the normalized text, L2-normalized.

    Spaces are included so n-grams capture word boundaries. The hash is
    CRC-32 over a seed prefix plus the n-gram bytes, masked to hash_bits,
    which is stable across runs and platforms. Unit L2 norm keeps one SGD
    step's effect independent of sentence length.
    """
    norm = normalize_arabic(text)
    mask = (1 << hash_bits) - 1
    prefix = hash_seed.to_bytes(4, "little", signed=False)
    counts = {}
    for order in ngram_orders:
        for i in range(len(norm) - order + 1):
            bucket = zlib.crc32(prefix + norm[i : i + order].encode("utf-8")) & mask
            counts[bucket] = counts.get(bucket, 0) + 1
    scale = math.sqrt(sum(v * v for v in counts.values()))
    if scale:
        counts = {k: v / scale for k, v in counts.items()}
    return counts


def _sigmoid(z):
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def _raw_probability(weights, bias, feats):
    z = bias
    for bucket, value in feats.items():
        w = weights.get(bucket)
        if w is not None:
            z += w * value
    p = _sigmoid(z)
    # keep the documented open-interval contract even at saturating z
    return min(max(p, 1e-15), 1.0 - 1e-15)


def train(data, split=(0.8, 0.1), config=None):
    """Train on labeled sentences; early-stops on dev accuracy.

    split is (train_fraction, dev_fraction); the remainder is untouched so
    callers can keep a test slice. Deterministic given data order and seed.
    """
    config = config or TrainConfig()
    data = list(data)
    per_class = {LABEL_DA: 0, LABEL_MSA: 0}
    for ex in data:
        per_class[ex.label] += 1
    if min(per_class.values()) < 2:
        raise InputError(
            f"need at least 2 examples per class, got DA={per_class[LABEL_DA]} "
            f"MSA={per_class[LABEL_MSA]}"
        )
    train_frac, dev_frac = split
    if train_frac <= 0 or dev_frac < 0 or train_frac + dev_frac > 1.0 + 1e-9:
        raise InputError(f"bad split fractions: {split!r}")

    rng = random.Random(config.seed)
    order = list(range(len(data)))
    rng.shuffle(order)
    n_train = max(1, round(train_frac * len(data)))
    n_dev = round(dev_frac * len(data))
    train_idx = order[:n_train]
    dev_idx = order[n_train : n_train + n_dev]

    featurized = {
        i: (
            _features(data[i].text, config.ngram_orders, config.hash_bits, config.seed),
            1.0 if data[i].label == LABEL_DA else 0.0,
        )
        for i in set(train_idx) | set(dev_idx)
    }

    weights = {}
    bias = 0.0
    lr, l2 = config.learning_rate, config.l2
    best = None  # (accuracy, epoch, weights snapshot, bias)
    epochs_run = 0
    for epoch in range(config.epochs):
        epochs_run = epoch + 1
        rng.shuffle(train_idx)
        for i in train_idx:
            feats, y = featurized[i]
            p = _raw_probability(weights, bias, feats)
            g = p - y
            for bucket, value in feats.items():
                w = weights.get(bucket, 0.0)
                weights[bucket] = w - lr * (g * value + l2 * w)
            bias -= lr * g
        if dev_idx:
            hits = sum(
                (_raw_probability(weights, bias, featurized[i][0]) >= 0.5)
                == (featurized[i][1] == 1.0)
                for i in dev_idx
            )
            accuracy = hits / len(dev_idx)
            if best is None or accuracy > best[0]:
                best = (accuracy, epoch, dict(weights), bias)
            elif epoch - best[1] >= _EARLY_STOP_PATIENCE:
                break
    if best is not None:
        _, _, weights, bias = best

    meta = {
        "corpus_size": len(data),
        "n_train": len(train_idx),
        "n_dev": len(dev_idx),
        "epochs_requested": config.epochs,
        "epochs_run": epochs_run,
        "best_dev_accuracy": best[0] if best is not None else None,
        "learning_rate": lr,
        "l2": l2,
        "seed": config.seed,
    }
    return DialectModel(
        ngram_orders=tuple(config.ngram_orders),
        hash_bits=config.hash_bits,
        hash_seed=config.seed,
        feature_weights=weights,
        bias=bias,
        training_meta=meta,
    )


def predict(model, text, threshold=0.5):
    """(label, probability-of-DA) for one sentence.

    Empty text (after normalization) is undecidable: returns (MSA, 0.5) by
    documented tie rule. Otherwise the label is DA iff probability >= threshold.
    """
    if not normalize_arabic(text).strip():
        return LABEL_MSA, 0.5
    feats = _features(text, model.ngram_orders, model.hash_bits, model.hash_seed)
    p = _raw_probability(model.feature_weights, model.bias, feats)
    return (LABEL_DA if p >= threshold else LABEL_MSA), p


def extract_da(model, corpus, threshold=0.5):
    """Partition a corpus into (da_subset, msa_subset, report).

    The report lists per-sentence probabilities; the two subsets are disjoint
    and jointly exhaustive for every threshold.
    """
    if not 0.0 < threshold < 1.0:
        raise InputError(f"threshold must be in (0, 1), got {threshold}")
    da_subset, msa_subset, report = [], [], []
    for index, text in enumerate(corpus):
        label, p = predict(model, text, threshold)
        report.append({"index": index, "probability": p, "label": label})
        (da_subset if label == LABEL_DA else msa_subset).append(text)
    return da_subset, msa_subset, report


def evaluate(model, test, threshold=0.5):
    """Accuracy, precision, recall, and confusion counts with DA positive."""
    test = list(test)
    if not test:
        raise InputError("empty test set")
    tp = fp = fn = tn = 0
    for ex in test:
        label, _ = predict(model, ex.text, threshold)
        if ex.label == LABEL_DA:
            if label == LABEL_DA:
                tp += 1
            else:
                fn += 1
        else:
            if label == LABEL_DA:
                fp += 1
            else:
                tn += 1
    return {
        "accuracy": (tp + tn) / len(test),
        "precision": tp / (tp + fp) if tp + fp else 0.0,
        "recall": tp / (tp + fn) if tp + fn else 0.0,
        "tp": tp,
        "fp": fp,
        "fn": fn,
        "tn": tn,
    }


def save_model(model, path):
    """Write the model as versioned JSON with the DAID1 magic header.

    Weight keys are sorted so identical models serialize byte-identically.
    """
    payload = {
        "magic": MODEL_MAGIC,
        "version": MODEL_VERSION,
        "ngram_orders": list(model.ngram_orders),
        "hash_bits": model.hash_bits,
        "hash_seed": model.hash_seed,
        "bias": model.bias,
        "weights": {str(k): model.feature_weights[k] for k in sorted(model.feature_weights)},
        "training_meta": model.training_meta,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, ensure_ascii=False, separators=(",", ":"))
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8-sig") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not a model file: {exc}") from None
    if not isinstance(payload, dict) or payload.get("magic") != MODEL_MAGIC:
        raise InputError(f"{path}: missing {MODEL_MAGIC} magic header")
    if payload.get("version") != MODEL_VERSION:
        raise InputError(f"{path}: unsupported model version {payload.get('version')!r}")
    return DialectModel(
        ngram_orders=tuple(payload["ngram_orders"]),
        hash_bits=payload["hash_bits"],
        hash_seed=payload["hash_seed"],
        feature_weights={int(k): v for k, v in payload["weights"].items()},
        bias=payload["bias"],
        training_meta=payload.get("training_meta", {}),
    )


def load_labeled_tsv(path):
    """Read `label<TAB>text` training data."""
    out = []
    with open(path, encoding="utf-8-sig") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise InputError(f"{path}: expected 2 columns at line {lineno}")
            label, text = cols
            if label not in (LABEL_DA, LABEL_MSA):
                raise InputError(f"{path}: unknown label {label!r} at line {lineno}")
            try:
                out.append(LabeledSentence(text=text, label=label))
            except ValueError as exc:
                raise InputError(f"{path}: line {lineno}: {exc}") from None
    return out
