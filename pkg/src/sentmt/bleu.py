"""Corpus-level BLEU (4-gram, single reference) for the SAM comparison harness.

Self-contained reimplementation so toolkit scores are deterministic and do
not depend on an external scorer's tokenization. Scores are internally
comparable across systems, not comparable to other tools' absolute values.
"""

import math
from collections import Counter
from dataclasses import dataclass

from sentmt.errors import InputError

MAX_ORDER = 4
SMOOTHING_NONE = "none"
SMOOTHING_ADD_ONE_EXP = "add-one-exp"
SMOOTHINGS = (SMOOTHING_NONE, SMOOTHING_ADD_ONE_EXP)
# add-one-exp: the j-th n-gram order with zero matches (j = 1, 2, ...) gets a
# smoothed numerator of SMOOTH_K / 2**(j - 1). Orders with zero total n-grams
# cannot be smoothed and force a zero score.
SMOOTH_K = 0.1


@dataclass(frozen=True)
class BleuScore:
    """Corpus BLEU with its components; score is on the 0-100 scale."""

    score: float
    precisions: tuple
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    smoothing: str


def _ngram_counts(tokens, order):
    return Counter(tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1))


def corpus_bleu(hyps, refs, smoothing=SMOOTHING_ADD_ONE_EXP):
    """Corpus BLEU over aligned token lists.

    Clipped n-gram counts are aggregated over the whole corpus, never
    averaged per sentence. Brevity penalty is min(1, exp(1 - ref_len/hyp_len));
    an all-empty hypothesis corpus scores 0 with BP 0.
    """
    if smoothing not in SMOOTHINGS:
        raise InputError(f"unknown smoothing: {smoothing!r}")
    if len(hyps) != len(refs):
        raise InputError(
            f"bleu: hypothesis has {len(hyps)} segments but reference has {len(refs)}"
        )
    if not hyps:
        raise InputError("bleu: empty corpus")

    correct = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hyps, refs):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for order in range(1, MAX_ORDER + 1):
            hyp_ngrams = _ngram_counts(hyp, order)
            if not hyp_ngrams:
                continue
            ref_ngrams = _ngram_counts(ref, order)
            total[order - 1] += sum(hyp_ngrams.values())
            correct[order - 1] += sum(
                min(count, ref_ngrams[ngram]) for ngram, count in hyp_ngrams.items()
            )

    if hyp_len == 0:
        bp = 0.0
    elif hyp_len >= ref_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_len / hyp_len)

    precisions = []
    zero_matches_seen = 0
    for order in range(MAX_ORDER):
        if total[order] == 0:
            precisions.append(0.0)
        elif correct[order] == 0:
            if smoothing == SMOOTHING_ADD_ONE_EXP:
                zero_matches_seen += 1
                precisions.append(
                    SMOOTH_K / 2 ** (zero_matches_seen - 1) / total[order]
                )
            else:
                precisions.append(0.0)
        else:
            precisions.append(correct[order] / total[order])

    if any(p == 0.0 for p in precisions) or bp == 0.0:
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions) / MAX_ORDER)

    return BleuScore(
        score=score,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        hyp_len=hyp_len,
        ref_len=ref_len,
        smoothing=smoothing,
    )
