"""Tokenization, Arabic normalization, and lemma-POS annotation.

Annotation is two-tier: CoNLL-U ingestion when pre-annotated files exist
(exact), and a rule-based fallback annotator otherwise (degraded but
self-contained). Downstream scoring records which tier produced its input.
"""

import re
from dataclasses import dataclass

from sentmt.errors import InputError

NOUN = "noun"
VERB = "verb"
ADJECTIVE = "adjective"
ADVERB = "adverb"
OTHER = "other"

VALID_POS = frozenset((NOUN, VERB, ADJECTIVE, ADVERB, OTHER))
# Tie-break order when a fallback lemma exists under several POS tags.
POS_PRIORITY = (ADJECTIVE, NOUN, VERB, ADVERB)

LANG_EN = "en"
LANG_MSA = "msa"
LANG_DA = "da"
LANG_AR_UNKNOWN = "ar-unknown"
VALID_LANGS = frozenset((LANG_EN, LANG_MSA, LANG_DA, LANG_AR_UNKNOWN))

# Sentence-final and clause punctuation detached at token edges.
_DETACH = frozenset(
    {".", ",", "!", "?", ";", ":", "«", "»", '"', "'", "(", ")",
     "،", "؛", "؟"}  # Arabic comma, semicolon, question mark
)
# Chunks kept whole: URLs, @mentions, #hashtags (UGT requirement).
_KEEP_WHOLE = re.compile(r"^(?:https?://\S+|www\.\S+|[@#]\S+)$")
_CHUNK = re.compile(r"\S+")

# Arabic diacritic marks (tashkeel).
_DIACRITICS = re.compile(r"[ً-ْ]")
_AR_CHAR_MAP = str.maketrans(
    {
        "أ": "ا",  # alef with hamza above
        "إ": "ا",  # alef with hamza below
        "آ": "ا",  # alef with madda
        "ى": "ي",  # alef maqsura -> yaa
        "ة": "ه",  # taa marbuta -> haa
        "ـ": None,      # tatweel
    }
)
# Runs of >=3 identical characters (UGT elongation); collapsed to 2 for letters.
_ELONGATION = re.compile(r"(.)\1{2,}", re.DOTALL)


@dataclass(frozen=True)
class Token:
    """One surface token with its lemma, coarse POS, and character span."""

    surface: str
    lemma: str
    pos: str
    start: int
    end: int

    def __post_init__(self):
        if not self.lemma:
            raise ValueError("token lemma must be non-empty")
        if self.lemma != self.lemma.casefold():
            raise ValueError(f"token lemma must be lowercase: {self.lemma!r}")
        if self.pos not in VALID_POS:
            raise ValueError(f"unknown POS tag: {self.pos!r}")
        if not self.start < self.end:
            raise ValueError(f"empty or inverted span ({self.start}, {self.end})")

    @property
    def char_span(self):
        return (self.start, self.end)


@dataclass(frozen=True)
class AnnotatedSentence:
    """A sentence with ordered, span-aligned annotated tokens."""

    text: str
    tokens: tuple
    lang: str

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.lang not in VALID_LANGS:
            raise ValueError(f"unknown language tag: {self.lang!r}")
        prev_end = 0
        for tok in self.tokens:
            if tok.start < prev_end:
                raise ValueError(f"overlapping or unordered span at {tok.char_span}")
            if self.text[tok.start:tok.end] != tok.surface:
                raise ValueError(
                    f"span {tok.char_span} does not reconstruct {tok.surface!r}"
                )
            prev_end = tok.end


def tokenize(text, lang=LANG_EN):
    """Split text into (surface, start, end) tuples.

    Whitespace-delimited chunks are split further by detaching clause and
    sentence punctuation at chunk edges, one mark per token. URLs, @mentions,
    and #hashtags are never split. Deterministic; empty text yields [].
    """
    del lang  # same rule set for all languages; kept for interface stability
    tokens = []
    for m in _CHUNK.finditer(text):
        chunk, start = m.group(), m.start()
        if _KEEP_WHOLE.match(chunk):
            tokens.append((chunk, start, start + len(chunk)))
            continue
        lo, hi = 0, len(chunk)
        leading = []
        while lo < hi and chunk[lo] in _DETACH:
            leading.append((chunk[lo], start + lo, start + lo + 1))
            lo += 1
        trailing = []
        while hi > lo and chunk[hi - 1] in _DETACH:
            trailing.append((chunk[hi - 1], start + hi - 1, start + hi))
            hi -= 1
        tokens.extend(leading)
        if hi > lo:
            tokens.append((chunk[lo:hi], start + lo, start + hi))
        tokens.extend(reversed(trailing))
    return tokens


def normalize_arabic(text):
    """Normalize Arabic orthography for matching.

    Removes tashkeel (U+064B-U+0652) and tatweel, maps alef variants to bare
    alef, alef maqsura to yaa, taa marbuta to haa, and collapses runs of 3+
    identical letters to 2. Idempotent; never lengthens the string.
    """
    text = _DIACRITICS.sub("", text)
    text = text.translate(_AR_CHAR_MAP)
    return _ELONGATION.sub(
        lambda m: m.group(1) * 2 if m.group(1).isalpha() else m.group(0), text
    )


_UPOS_TO_COARSE = {
    "NOUN": NOUN,
    "PROPN": NOUN,
    "VERB": VERB,
    "AUX": VERB,
    "ADJ": ADJECTIVE,
    "ADV": ADVERB,
}
_COARSE_TO_UPOS = {NOUN: "NOUN", VERB: "VERB", ADJECTIVE: "ADJ", ADVERB: "ADV", OTHER: "X"}


def ingest_conllu(path, lang=LANG_EN):
    """Read a CoNLL-U file into AnnotatedSentences.

    Consumes FORM, LEMMA, UPOS; other columns are ignored. Multiword-token
    ranges (id like 1-2) and empty nodes (id like 1.1) are skipped. A LEMMA of
    "_" or "" falls back to the lowercased form. Sentence text is rebuilt by
    joining forms with single spaces.
    """
    sentences = []
    rows = []

    def flush():
        if rows:
            sentences.append(_sentence_from_rows(rows, lang))
            rows.clear()

    with open(path, encoding="utf-8-sig") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                flush()
                continue
            if line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise InputError(
                    f"{path}: line {lineno}: expected 10 columns, got {len(cols)}"
                )
            tok_id = cols[0]
            if "-" in tok_id or "." in tok_id:
                continue
            form, lemma, upos = cols[1], cols[2], cols[3]
            if not form:
                raise InputError(f"{path}: line {lineno}: empty FORM")
            rows.append((form, lemma, upos))
    flush()
    return sentences


def _sentence_from_rows(rows, lang):
    tokens = []
    parts = []
    offset = 0
    for form, lemma, upos in rows:
        if offset:
            offset += 1  # single joining space
        if lemma in ("", "_"):
            lemma = form
        tokens.append(
            Token(
                surface=form,
                lemma=lemma.casefold(),
                pos=_UPOS_TO_COARSE.get(upos, OTHER),
                start=offset,
                end=offset + len(form),
            )
        )
        parts.append(form)
        offset += len(form)
    return AnnotatedSentence(text=" ".join(parts), tokens=tokens, lang=lang)


def write_conllu(sentences, path):
    """Write sentences in 10-column CoNLL-U; coarse POS mapped back to UPOS."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sent in sentences:
            for i, tok in enumerate(sent.tokens, start=1):
                upos = _COARSE_TO_UPOS[tok.pos]
                fh.write(
                    "\t".join(
                        [str(i), tok.surface, tok.lemma, upos, "_", "_", "_", "_", "_", "_"]
                    )
                    + "\n"
                )
            fh.write("\n")


def lemmatize_en(surface):
    """Suffix-rule English lemmatizer (degraded fallback tier).

    Rule table, first match wins on the casefolded surface:
      -ies -> -y          (len >= 5)
      -ing -> drop        (len >= 6, then doubling repair)
      -ed  -> drop        (len >= 5, then doubling repair)
      -es  -> drop        (len >= 4, only after sibilants or o)
      -s   -> drop        (len >= 4, not after ss/us/is)
    Doubling repair removes a trailing doubled consonant except ll/ss/zz.
    """
    w = surface.casefold()
    if w.endswith("ies") and len(w) >= 5:
        return w[:-3] + "y"
    if w.endswith("ing") and len(w) >= 6:
        return _repair_doubling(w[:-3]) or w
    if w.endswith("ed") and len(w) >= 5:
        return _repair_doubling(w[:-2]) or w
    if w.endswith("es") and len(w) >= 4 and w[:-2].endswith(("s", "x", "z", "ch", "sh", "o")):
        return w[:-2]
    if w.endswith("s") and len(w) >= 4 and not w.endswith(("ss", "us", "is")):
        return w[:-1]
    return w


def _repair_doubling(stem):
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1].isalpha() and stem[-1] not in "lsz":
        return stem[:-1]
    return stem


def annotate_fallback(text, tokens, lang, lex=None):
    """Annotate surface tokens without external tools.

    English lemmas come from the suffix-rule lemmatizer; the POS is the one
    under which the lemma exists in the prior-polarity lexicon (tie-break
    adjective > noun > verb > adverb), otherwise `other`. Arabic falls back
    to lemma = normalize_arabic(surface), pos = `other`.
    """
    annotated = []
    for surface, start, end in tokens:
        if lang == LANG_EN:
            lemma = lemmatize_en(surface)
            pos = _choose_pos(lemma, lex)
        else:
            lemma = normalize_arabic(surface).casefold() or surface.casefold()
            pos = OTHER
        annotated.append(Token(surface=surface, lemma=lemma, pos=pos, start=start, end=end))
    return AnnotatedSentence(text=text, tokens=annotated, lang=lang)


def _choose_pos(lemma, lex):
    if lex is None:
        return OTHER
    for pos in POS_PRIORITY:
        if lex.lookup(lemma, pos) is not None:
            return pos
    return OTHER


def annotate(text, lang, lex=None):
    """Tokenize then annotate in one step (fallback tier)."""
    return annotate_fallback(text, tokenize(text, lang), lang, lex)


def read_lines(path):
    """Read a plain one-sentence-per-line UTF-8 corpus."""
    with open(path, encoding="utf-8-sig") as fh:
        return [line.rstrip("\n").rstrip("\r") for line in fh]


def write_lines(lines, path):
    """Write a plain corpus with LF endings regardless of platform."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")
