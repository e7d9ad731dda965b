"""Bundled demo corpus: lookup and materialization helpers.

The contrast corpus is constructed so that the polarity-preserving system
and the polarity-flipped system differ from the reference by exactly one
token per line, at the same position, with replacement tokens that occur
nowhere else in the line. Their BLEU statistics are therefore identical by
construction while their sentiment distances diverge, so any BLEU gap below
CONTRAST_BLEU_MARGIN with a strict SAM gap demonstrates that n-gram overlap
alone does not track sentiment.
"""

from importlib import resources
from pathlib import Path

# |BLEU(preserving) - BLEU(flipped)| stays under this by corpus design.
CONTRAST_BLEU_MARGIN = 1.0

DEMO_FILES = (
    "sentiwords_mini.tsv",
    "phrases_da.tsv",
    "dialect_train.tsv",
    "da_corpus.txt",
    "demo_hyp.txt",
    "demo_ref.txt",
    "contrast_ref.txt",
    "contrast_preserving.txt",
    "contrast_flipped.txt",
    "human_scores.tsv",
)


def data_path(name):
    """Filesystem path of one bundled data file."""
    if name not in DEMO_FILES:
        raise KeyError(f"unknown demo file: {name!r}")
    return Path(resources.files("sentmt") / "data" / name)


def materialize(dest_dir):
    """Copy the bundled demo files into dest_dir; returns the written paths."""
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    written = []
    for name in DEMO_FILES:
        target = dest / name
        target.write_bytes(data_path(name).read_bytes())
        written.append(target)
    return written
