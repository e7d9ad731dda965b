"""Sentiment-aware translation cost between a hypothesis and a reference.

The score is half the absolute difference between the weighted prior-polarity
averages of the words left unmatched on each side after multiset
cancellation, so it lies in [0, 1] and lower is better.
"""

from collections import Counter
from dataclasses import dataclass

from sentmt.errors import InputError
from sentmt.textproc import OTHER


@dataclass(frozen=True)
class MismatchSets:
    """Multisets of (lemma, pos) items unmatched on each side.

    Common occurrences are fully cancelled, so the two multisets are disjoint.
    """

    hyp_mismatched: Counter
    ref_mismatched: Counter

    def __post_init__(self):
        overlap = self.hyp_mismatched & self.ref_mismatched
        if overlap:
            raise ValueError(f"mismatch sets share occurrences: {dict(overlap)}")

    @property
    def m(self):
        return sum(self.hyp_mismatched.values())

    @property
    def n(self):
        return sum(self.ref_mismatched.values())


@dataclass(frozen=True)
class SamResult:
    """Per-sentence score with the weight breakdown of both sides.

    Weight rows are (lemma, pos, score, normalized_weight), one row per
    mismatched occurrence, sorted by (lemma, pos). A side is degenerate when
    all its weights are zero (including the empty side); its total is 0.
    """

    s_h: float
    s_r: float
    sam: float
    hyp_weights: tuple
    ref_weights: tuple
    degenerate_hyp: bool
    degenerate_ref: bool

    @property
    def m(self):
        return len(self.hyp_weights)

    @property
    def n(self):
        return len(self.ref_weights)


@dataclass(frozen=True)
class CorpusSamSummary:
    """Corpus aggregate: total plus two mean variants.

    mean_sam_all averages over every pair; mean_sam_defined averages only
    over pairs where at least one side is non-degenerate. Means are None
    when their denominator is zero.
    """

    total_sam: float
    mean_sam_all: float | None
    mean_sam_defined: float | None
    n_pairs: int
    n_defined: int


def _is_punctuation(lemma, pos):
    # Tokens with no alphabetic character and no content POS carry no polarity.
    return pos == OTHER and not any(ch.isalpha() for ch in lemma)


def _countable_items(sentence):
    counter = Counter()
    for tok in sentence.tokens:
        lemma = tok.lemma.casefold()
        if _is_punctuation(lemma, tok.pos):
            continue
        counter[(lemma, tok.pos)] += 1
    return counter


def extract_mismatches(hyp, ref):
    """Cancel common (lemma, pos) occurrences; return what remains per side.

    Matching is multiset cancellation on casefolded (lemma, pos) pairs, not
    surface forms, so inflectional variants do not count as sentiment
    differences. Punctuation-only tokens are excluded before matching.
    """
    hyp_items = _countable_items(hyp)
    ref_items = _countable_items(ref)
    return MismatchSets(
        hyp_mismatched=hyp_items - ref_items,
        ref_mismatched=ref_items - hyp_items,
    )


def _side_total(counter, lex):
    rows = []
    weight_sum = 0.0
    for (lemma, pos), count in sorted(counter.items()):
        score = lex.lookup(lemma, pos)
        if score is None:
            score = 0.0  # out-of-lexicon words get zero weight and vanish
        weight = abs(score)
        for _ in range(count):
            rows.append((lemma, pos, score, weight))
            weight_sum += weight
    if weight_sum > 0.0:
        rows = [(lemma, pos, s, w / weight_sum) for lemma, pos, s, w in rows]
        total = sum(alpha * s for _, _, s, alpha in rows)
        return total, tuple(rows), False
    # Degenerate side: the weighted average is undefined, define it neutral.
    rows = [(lemma, pos, s, 0.0) for lemma, pos, s, _ in rows]
    return 0.0, tuple(rows), True


def sentence_sam(mismatches, lex):
    """Score one mismatch pair against a prior-polarity lexicon.

    Each side's total is the |score|-weighted average of its items' scores;
    the result is half the absolute difference of the two totals.
    """
    s_h, hyp_rows, degenerate_hyp = _side_total(mismatches.hyp_mismatched, lex)
    s_r, ref_rows, degenerate_ref = _side_total(mismatches.ref_mismatched, lex)
    return SamResult(
        s_h=s_h,
        s_r=s_r,
        sam=abs(s_r - s_h) / 2.0,
        hyp_weights=hyp_rows,
        ref_weights=ref_rows,
        degenerate_hyp=degenerate_hyp,
        degenerate_ref=degenerate_ref,
    )


def sentence_sam_pair(hyp, ref, lex):
    """extract_mismatches + sentence_sam in one step."""
    return sentence_sam(extract_mismatches(hyp, ref), lex)


def corpus_sam(pairs, lex):
    """Score aligned (hyp, ref) sentence pairs; returns per-pair results + summary.

    Pairs are scored independently; the summary accumulates in input order so
    reruns are bit-identical.
    """
    results = []
    total = 0.0
    n_defined = 0
    for hyp, ref in pairs:
        result = sentence_sam_pair(hyp, ref, lex)
        results.append(result)
        total += result.sam
        if not (result.degenerate_hyp and result.degenerate_ref):
            n_defined += 1
    n_pairs = len(results)
    defined_total = sum(
        r.sam for r in results if not (r.degenerate_hyp and r.degenerate_ref)
    )
    summary = CorpusSamSummary(
        total_sam=total,
        mean_sam_all=total / n_pairs if n_pairs else None,
        mean_sam_defined=defined_total / n_defined if n_defined else None,
        n_pairs=n_pairs,
        n_defined=n_defined,
    )
    return results, summary


def align_pairs(hyps, refs, what="corpus"):
    """Zip equal-length hypothesis/reference lists or fail with both counts."""
    if len(hyps) != len(refs):
        raise InputError(
            f"{what}: hypothesis has {len(hyps)} sentences but reference has {len(refs)}"
        )
    return list(zip(hyps, refs))
