"""Prior-polarity word lexicon and dialectal sentiment phrase lexicon.

Both lexicons are immutable after load and safe for concurrent reads.
"""

from dataclasses import dataclass, field

from sentmt.errors import InputError
from sentmt.textproc import ADJECTIVE, ADVERB, NOUN, VERB, normalize_arabic

FORMAT_HASH = "lemma-hash-pos"   # lemma#p<TAB>score, p in {n,v,a,r}
FORMAT_3COL = "three-column"     # lemma<TAB>pos<TAB>score
LEXICON_FORMATS = (FORMAT_HASH, FORMAT_3COL)

_CODE_TO_POS = {"n": NOUN, "v": VERB, "a": ADJECTIVE, "r": ADVERB}
_POS_TO_CODE = {v: k for k, v in _CODE_TO_POS.items()}

POLARITY_POSITIVE = "positive"
POLARITY_NEGATIVE = "negative"
_POLARITIES = frozenset((POLARITY_POSITIVE, POLARITY_NEGATIVE))


@dataclass(frozen=True)
class PriorPolarityEntry:
    """A (lemma, POS) pair with its signed prior-polarity score."""

    lemma: str
    pos: str
    score: float

    def __post_init__(self):
        if not self.lemma or any(ch.isspace() for ch in self.lemma):
            raise ValueError(f"bad lemma: {self.lemma!r}")
        if self.lemma != self.lemma.casefold():
            raise ValueError(f"lemma must be lowercase: {self.lemma!r}")
        if self.pos not in _POS_TO_CODE:
            raise ValueError(f"unknown POS: {self.pos!r}")
        if not -1.0 <= self.score <= 1.0:
            raise ValueError(f"score out of range: {self.score!r}")


class PriorPolarityLexicon:
    """Map from (lemma, POS) to a prior-polarity score in [-1, +1].

    Lookup is total: a query returns exactly one score or None. Equality is
    entry-set equality; source_name is metadata only.
    """

    def __init__(self, entries=(), source_name=""):
        self._entries = {}
        self.source_name = source_name
        for entry in entries:
            key = (entry.lemma, entry.pos)
            if key in self._entries:
                raise ValueError(f"duplicate entry {key}")
            self._entries[key] = entry.score

    def lookup(self, lemma, pos):
        """Exact-match score for (lemma, pos), or None if absent."""
        return self._entries.get((lemma.casefold(), pos))

    def entries(self):
        """All entries, sorted by (lemma, pos) for deterministic output."""
        return tuple(
            PriorPolarityEntry(lemma, pos, score)
            for (lemma, pos), score in sorted(self._entries.items())
        )

    def scaled(self, factor):
        """A copy with every score multiplied by factor (must stay in range)."""
        return PriorPolarityLexicon(
            [PriorPolarityEntry(l, p, s * factor) for (l, p), s in self._entries.items()],
            source_name=self.source_name,
        )

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        lemma, pos = key
        return (lemma.casefold(), pos) in self._entries

    def __eq__(self, other):
        if not isinstance(other, PriorPolarityLexicon):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self):
        return f"PriorPolarityLexicon({len(self)} entries, source={self.source_name!r})"


def _parse_score(text, path, lineno):
    try:
        score = float(text)
    except ValueError:
        raise InputError(f"{path}: unparseable score at line {lineno}: {text!r}") from None
    if not -1.0 <= score <= 1.0:
        raise InputError(f"{path}: score out of range at line {lineno}")
    return score


def load_prior_polarity(path, format=FORMAT_HASH):
    """Load a prior-polarity lexicon from disk.

    Format `lemma-hash-pos` is `lemma#p<TAB>score` with p in {n,v,a,r};
    `three-column` is `lemma<TAB>pos<TAB>score` with the POS spelled out.
    Lines whose first character is `#` followed by a space are comments
    (a bare leading `#` can start a hashtag lemma and is data). Lemmas are
    casefolded at load. Malformed rows and duplicate (lemma, pos) pairs
    raise InputError naming the offending line(s).
    """
    if format not in LEXICON_FORMATS:
        raise InputError(f"unknown lexicon format: {format!r}")
    entries = {}
    first_line = {}
    with open(path, encoding="utf-8-sig") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("# "):
                continue
            cols = line.split("\t")
            if format == FORMAT_HASH:
                if len(cols) != 2:
                    raise InputError(
                        f"{path}: expected 2 columns at line {lineno}, got {len(cols)}"
                    )
                head, _, code = cols[0].rpartition("#")
                if not head or code not in _CODE_TO_POS:
                    raise InputError(
                        f"{path}: expected lemma#pos with pos in n/v/a/r at line {lineno}"
                    )
                lemma, pos = head, _CODE_TO_POS[code]
                score = _parse_score(cols[1], path, lineno)
            else:
                if len(cols) != 3:
                    raise InputError(
                        f"{path}: expected 3 columns at line {lineno}, got {len(cols)}"
                    )
                lemma, posname = cols[0], cols[1]
                if posname not in _POS_TO_CODE:
                    raise InputError(f"{path}: unknown POS {posname!r} at line {lineno}")
                pos = posname
                score = _parse_score(cols[2], path, lineno)
            lemma = lemma.casefold()
            if not lemma or any(ch.isspace() for ch in lemma):
                raise InputError(f"{path}: bad lemma at line {lineno}")
            key = (lemma, pos)
            if key in entries:
                raise InputError(
                    f"{path}: duplicate entry {lemma}#{_POS_TO_CODE[pos]} at lines "
                    f"{first_line[key]} and {lineno}"
                )
            entries[key] = score
            first_line[key] = lineno
    lex = PriorPolarityLexicon(source_name=str(path))
    lex._entries = entries
    return lex


def save_prior_polarity(lex, path, format=FORMAT_HASH):
    """Write a lexicon back to disk; load(save(lex)) is entry-set identical."""
    if format not in LEXICON_FORMATS:
        raise InputError(f"unknown lexicon format: {format!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for entry in lex.entries():
            if format == FORMAT_HASH:
                fh.write(f"{entry.lemma}#{_POS_TO_CODE[entry.pos]}\t{entry.score!r}\n")
            else:
                fh.write(f"{entry.lemma}\t{entry.pos}\t{entry.score!r}\n")


@dataclass(frozen=True)
class PhraseEntry:
    """A dialectal sentiment phrase with curated EN/MSA translations."""

    da_phrase: str
    polarity: str
    en_translation: str
    msa_translation: str
    literal_mistranslations: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(
            self, "literal_mistranslations", tuple(self.literal_mistranslations)
        )
        if not self.da_phrase:
            raise ValueError("empty da_phrase")
        if not self.en_translation or not self.msa_translation:
            raise ValueError(f"empty translation for phrase {self.da_phrase!r}")
        if self.polarity not in _POLARITIES:
            raise ValueError(f"unknown polarity: {self.polarity!r}")


class PhraseLexicon:
    """Phrase entries indexed for longest-match-first, non-overlapping search.

    Phrases are stored in normalized form; callers must search normalized text.
    """

    def __init__(self, entries=()):
        self._entries = []
        self._by_first_word = {}
        seen = set()
        for entry in entries:
            if entry.da_phrase in seen:
                raise ValueError(f"duplicate phrase {entry.da_phrase!r}")
            seen.add(entry.da_phrase)
            self._entries.append(entry)
            words = tuple(entry.da_phrase.split())
            self._by_first_word.setdefault(words[0], []).append((words, entry))
        for candidates in self._by_first_word.values():
            candidates.sort(key=lambda item: (-len(item[0]), item[0]))

    def entries(self):
        return tuple(self._entries)

    def __len__(self):
        return len(self._entries)

    def find_matches(self, words):
        """Longest-match-first, non-overlapping phrase hits in a word sequence.

        Returns (start, end, entry) triples over word indices, left to right.
        """
        words = list(words)
        hits = []
        i = 0
        while i < len(words):
            matched = None
            for phrase_words, entry in self._by_first_word.get(words[i], ()):
                end = i + len(phrase_words)
                if end <= len(words) and tuple(words[i:end]) == phrase_words:
                    matched = (i, end, entry)
                    break
            if matched:
                hits.append(matched)
                i = matched[1]
            else:
                i += 1
        return hits


def load_phrase_lexicon(path):
    """Load the 4-5 column phrase lexicon TSV.

    Columns: da_phrase, polarity, en_translation, msa_translation, optional
    semicolon-separated literal mistranslations. Phrases are normalized with
    the Arabic normalizer before indexing; rows whose phrases collide after
    normalization are duplicates.
    """
    entries = []
    first_line = {}
    with open(path, encoding="utf-8-sig") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("# "):
                continue
            cols = line.split("\t")
            if len(cols) not in (4, 5):
                raise InputError(
                    f"{path}: expected 4 or 5 columns at line {lineno}, got {len(cols)}"
                )
            phrase = " ".join(normalize_arabic(cols[0]).split())
            if not phrase:
                raise InputError(f"{path}: empty phrase at line {lineno}")
            polarity = cols[1].strip().casefold()
            if polarity not in _POLARITIES:
                raise InputError(f"{path}: unknown polarity at line {lineno}")
            if not cols[2] or not cols[3]:
                raise InputError(f"{path}: empty translation at line {lineno}")
            literals = ()
            if len(cols) == 5:
                literals = tuple(p.strip() for p in cols[4].split(";") if p.strip())
            if phrase in first_line:
                raise InputError(
                    f"{path}: duplicate phrase at lines {first_line[phrase]} and {lineno}"
                )
            first_line[phrase] = lineno
            entries.append(
                PhraseEntry(
                    da_phrase=phrase,
                    polarity=polarity,
                    en_translation=cols[2],
                    msa_translation=cols[3],
                    literal_mistranslations=literals,
                )
            )
    return PhraseLexicon(entries)


def save_phrase_lexicon(phrases, path):
    """Write the phrase lexicon back as TSV (always 5 columns)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in phrases.entries():
            fh.write(
                "\t".join(
                    [
                        e.da_phrase,
                        e.polarity,
                        e.en_translation,
                        e.msa_translation,
                        ";".join(e.literal_mistranslations),
                    ]
                )
                + "\n"
            )
