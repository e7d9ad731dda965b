"""Round-trip silver data generation and sentiment phrase infusion.

The MT backend is an injected interface. The shipped default is a
deterministic offline mock so the whole pipeline is testable without
credentials; an HTTP client covers real services.
"""

import contextlib
import logging
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import requests

from sentmt.errors import BackendError, BackendUnreachableError, InputError
from sentmt.textproc import normalize_arabic

logger = logging.getLogger(__name__)

REASON_EMPTY_SOURCE = "empty_source"
REASON_BACKEND_ERROR = "backend_error"
REASON_UNLOCATABLE_SPAN = "unlocatable_span"

ACTION_REPLACED = "replaced"
ACTION_ALREADY_CORRECT = "already_correct"


@dataclass(frozen=True)
class InfusionRecord:
    """One phrase-level action taken on one side of a triple."""

    phrase: str
    side: str  # "en" | "msa"
    action: str  # "replaced" | "already_correct"
    replaced_text: str | None = None


@dataclass(frozen=True)
class SilverTriple:
    da: str
    en: str
    msa: str
    infusion_log: tuple = ()
    needs_review: bool = False
    review_reasons: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "infusion_log", tuple(self.infusion_log))
        object.__setattr__(self, "review_reasons", tuple(self.review_reasons))


class MtBackend:
    """Translation backend contract.

    translate() must return one output per input, in order. Failures raise
    BackendError for the whole batch; per-item silent failures are not
    allowed.
    """

    def translate(self, texts, source_lang, target_lang):
        raise NotImplementedError


class MockBackend(MtBackend):
    """Offline deterministic backend: reverses word order.

    A forward leg followed by a back leg restores the original sentence,
    which makes round-trip output self-checking in tests and demos.
    """

    def translate(self, texts, source_lang, target_lang):
        return [" ".join(reversed(text.split())) for text in texts]


class HttpBackend(MtBackend):
    """JSON-over-HTTP translation client with retry and backoff.

    Wire format: POST {"q": [...], "source": "...", "target": "..."} to the
    endpoint; the response must be {"translations": [...]} with one string
    per input. The auth token is read from the environment variable named by
    auth_env (never stored in files) and sent as a Bearer header.
    """

    def __init__(self, endpoint, auth_env=None, timeout=30.0, max_retries=3, backoff=0.5):
        self.endpoint = endpoint
        self.auth_env = auth_env
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff

    def _headers(self):
        headers = {}
        if self.auth_env:
            token = os.environ.get(self.auth_env)
            if not token:
                raise BackendError(f"auth token env var {self.auth_env!r} is not set")
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def translate(self, texts, source_lang, target_lang):
        texts = list(texts)
        payload = {"q": texts, "source": source_lang, "target": target_lang}
        headers = self._headers()
        last_error = None
        for attempt in range(self.max_retries + 1):
            try:
                response = requests.post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout
                )
                response.raise_for_status()
                data = response.json()
            except Exception as exc:
                last_error = exc
                if attempt < self.max_retries:
                    time.sleep(self.backoff * 2**attempt)
                continue
            out = data.get("translations") if isinstance(data, dict) else None
            if not isinstance(out, list) or len(out) != len(texts):
                raise BackendError(f"malformed response from {self.endpoint}")
            return [str(item) for item in out]
        raise BackendError(
            f"backend unreachable after {self.max_retries + 1} attempts: {last_error}"
        )


def _translate_batch(texts, backend):
    """Both legs for one batch; returns (en_list, msa_list)."""
    en = backend.translate(texts, "ar", "en")
    if len(en) != len(texts):
        raise BackendError("backend returned wrong batch size on forward leg")
    msa = backend.translate(en, "en", "ar")
    if len(msa) != len(en):
        raise BackendError("backend returned wrong batch size on back leg")
    return en, msa


def _batch_triples(batch, backend):
    """Round-trip one batch of source strings into triples.

    Empty sources are flagged, not sent. Returns (triples, batch_failed).
    """
    send_positions = [i for i, text in enumerate(batch) if text.strip()]
    en_out = msa_out = None
    failed = False
    if send_positions:
        try:
            en_out, msa_out = _translate_batch([batch[i] for i in send_positions], backend)
        except BackendError as exc:
            logger.warning("batch of %d failed: %s", len(send_positions), exc)
            failed = True
    position = {original: k for k, original in enumerate(send_positions)}
    triples = []
    for i, text in enumerate(batch):
        if not text.strip():
            triples.append(
                SilverTriple(text, "", "", needs_review=True,
                             review_reasons=(REASON_EMPTY_SOURCE,))
            )
        elif failed:
            triples.append(
                SilverTriple(text, "", "", needs_review=True,
                             review_reasons=(REASON_BACKEND_ERROR,))
            )
        else:
            k = position[i]
            triples.append(SilverTriple(text, en_out[k], msa_out[k]))
    return triples, failed


def round_trip(corpus, backend, batch_size=32, threads=1, abort_after=3):
    """Translate da -> en -> msa in batches, preserving 1:1:1 alignment.

    A failed batch flags its triples needs_review/backend_error and the run
    continues; abort_after consecutive batch failures raise
    BackendUnreachableError carrying everything completed so far. With
    threads > 1 batches run concurrently but output order always equals
    input order.
    """
    corpus = list(corpus)
    if not corpus:
        raise InputError("round_trip: empty corpus")
    if batch_size < 1:
        raise InputError(f"round_trip: batch_size must be >= 1, got {batch_size}")
    batches = [corpus[i : i + batch_size] for i in range(0, len(corpus), batch_size)]

    out = []
    consecutive_failures = 0
    workers = max(1, threads)

    def finish_wave(wave_results):
        nonlocal consecutive_failures
        for triples, failed in wave_results:
            out.extend(triples)
            consecutive_failures = consecutive_failures + 1 if failed else 0
            if consecutive_failures >= abort_after:
                raise BackendUnreachableError(
                    f"aborting after {consecutive_failures} consecutive batch "
                    f"failures; {len(out)} triples completed",
                    completed=out,
                )

    if workers == 1:
        for batch in batches:
            finish_wave([_batch_triples(batch, backend)])
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for start in range(0, len(batches), workers):
                wave = batches[start : start + workers]
                finish_wave(pool.map(lambda b: _batch_triples(b, backend), wave))
    return out


@dataclass
class InfusionStats:
    phrases_found: int = 0
    replacements_en: int = 0
    replacements_msa: int = 0
    already_correct: int = 0
    flagged: int = 0


def _replace_ci(text, needle, replacement):
    """Case-insensitive first-occurrence replacement; None if not found."""
    pattern = re.compile(re.escape(needle), re.IGNORECASE)
    if not pattern.search(text):
        return None
    return pattern.sub(lambda m: replacement, text, count=1)


def _contains_ci(text, needle):
    return needle.casefold() in text.casefold()


def infuse(triples, phrases):
    """Correct known phrase mistranslations in the en/msa sides.

    For each lexicon phrase found in the normalized da text (longest match
    first, non-overlapping) and each target side: if the curated translation
    is already present it is logged as already_correct; otherwise a known
    literal mistranslation, if present, is replaced; otherwise the triple is
    flagged unlocatable_span rather than guessing a span. The da side is
    never edited. Idempotent on the triple texts and review flags; the
    infusion log describes the most recent pass.
    """
    stats = InfusionStats()
    out = []
    for triple in triples:
        words = normalize_arabic(triple.da).split()
        hits = phrases.find_matches(words)
        if not hits:
            out.append(replace(triple, infusion_log=()))
            continue
        en, msa = triple.en, triple.msa
        log = []
        unlocatable = False
        for _, _, entry in hits:
            stats.phrases_found += 1
            for side in ("en", "msa"):
                text = en if side == "en" else msa
                correct = entry.en_translation if side == "en" else entry.msa_translation
                if _contains_ci(text, correct):
                    log.append(InfusionRecord(entry.da_phrase, side, ACTION_ALREADY_CORRECT))
                    stats.already_correct += 1
                    continue
                replaced = None
                for literal in entry.literal_mistranslations:
                    new_text = _replace_ci(text, literal, correct)
                    if new_text is not None:
                        replaced = literal
                        text = new_text
                        break
                if replaced is not None:
                    log.append(
                        InfusionRecord(entry.da_phrase, side, ACTION_REPLACED, replaced)
                    )
                    if side == "en":
                        stats.replacements_en += 1
                        en = text
                    else:
                        stats.replacements_msa += 1
                        msa = text
                else:
                    unlocatable = True
        reasons = tuple(r for r in triple.review_reasons if r != REASON_UNLOCATABLE_SPAN)
        if unlocatable:
            reasons = reasons + (REASON_UNLOCATABLE_SPAN,)
            stats.flagged += 1
        out.append(
            SilverTriple(
                da=triple.da,
                en=en,
                msa=msa,
                infusion_log=tuple(log),
                needs_review=bool(reasons),
                review_reasons=reasons,
            )
        )
    return out, stats


_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}


def _escape(text):
    for raw, esc in _ESCAPES.items():
        text = text.replace(raw, esc)
    return text


def _unescape(text):
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            mapped = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


FORMAT_TSV3 = "tsv3"
FORMAT_PAIRED = "paired-files"
EXPORT_FORMATS = (FORMAT_TSV3, FORMAT_PAIRED)
_PAIRED_SUFFIXES = (".da", ".en", ".msa")


def export_triples(triples, path, format=FORMAT_TSV3):
    """Stream triples to disk; returns the number written.

    tsv3 writes `da<TAB>en<TAB>msa` lines; paired-files writes three
    line-aligned files at path + .da/.en/.msa. Tabs, newlines, and
    backslashes inside texts are escaped, so import round-trips losslessly.
    Accepts any iterable and never materializes it.
    """
    if format == FORMAT_TSV3:
        count = 0
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for triple in triples:
                fh.write(
                    f"{_escape(triple.da)}\t{_escape(triple.en)}\t{_escape(triple.msa)}\n"
                )
                count += 1
        return count
    if format == FORMAT_PAIRED:
        path = str(path)
        count = 0
        with contextlib.ExitStack() as stack:
            files = [
                stack.enter_context(open(path + sfx, "w", encoding="utf-8", newline="\n"))
                for sfx in _PAIRED_SUFFIXES
            ]
            for triple in triples:
                for fh, text in zip(files, (triple.da, triple.en, triple.msa)):
                    fh.write(_escape(text) + "\n")
                count += 1
        return count
    raise InputError(f"unknown export format: {format!r}")


def import_triples(path, format=FORMAT_TSV3):
    """Read triples written by export_triples (texts only; no flags/logs)."""
    if format == FORMAT_TSV3:
        triples = []
        with open(path, encoding="utf-8-sig") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                cols = line.split("\t")
                if len(cols) != 3:
                    raise InputError(
                        f"{path}: expected 3 columns at line {lineno}, got {len(cols)}"
                    )
                triples.append(SilverTriple(*(_unescape(c) for c in cols)))
        return triples
    if format == FORMAT_PAIRED:
        path = str(path)
        columns = []
        for sfx in _PAIRED_SUFFIXES:
            with open(path + sfx, encoding="utf-8-sig") as fh:
                columns.append([_unescape(l.rstrip("\n")) for l in fh])
        if not len(columns[0]) == len(columns[1]) == len(columns[2]):
            raise InputError(
                f"{path}: paired files misaligned: "
                f"{len(columns[0])}/{len(columns[1])}/{len(columns[2])} lines"
            )
        return [SilverTriple(da, en, msa) for da, en, msa in zip(*columns)]
    raise InputError(f"unknown import format: {format!r}")
