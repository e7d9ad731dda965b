"""Multi-system comparison reports: SAM + BLEU + optional human scores.

Human scores are ingested from a TSV, never collected; annotation tooling is
out of scope. Best cells are marked per column: SAM is a cost (lower wins),
BLEU and human scores are higher-is-better.
"""

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

from sentmt import __version__
from sentmt.bleu import SMOOTHING_ADD_ONE_EXP, BleuScore, corpus_bleu
from sentmt.errors import InputError
from sentmt.sam import CorpusSamSummary, align_pairs, corpus_sam
from sentmt.textproc import LANG_EN, annotate, read_lines, tokenize

REPORT_VERSION = 1
TIER_FALLBACK = "fallback"
TIER_CONLLU = "conllu"
TIER_MIXED = "mixed"

RENDER_FORMATS = ("json", "tsv", "markdown-table")

# Columns where the smaller value wins; everything else is larger-wins.
_LOWER_IS_BETTER = ("sam_total", "sam_mean_all", "sam_mean_defined")


@dataclass(frozen=True)
class SystemRun:
    name: str
    hyp_path: str
    sam: CorpusSamSummary
    bleu: BleuScore
    human_scores: dict | None = None


@dataclass(frozen=True)
class ComparisonReport:
    systems: tuple
    reference_path: str
    lexicon_name: str
    annotation_tier: str
    created_at: str
    tool_version: str
    best: dict
    report_version: int = REPORT_VERSION


def _timestamp():
    # SOURCE_DATE_EPOCH makes report output byte-reproducible.
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    ts = int(epoch) if epoch else int(time.time())
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def load_human_scores(path):
    """Read `system<TAB>annotator<TAB>mean_score` rows (1-5 scale)."""
    scores = {}
    with open(path, encoding="utf-8-sig") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("# "):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise InputError(f"{path}: expected 3 columns at line {lineno}")
            system, annotator, raw_score = cols
            try:
                score = float(raw_score)
            except ValueError:
                raise InputError(f"{path}: unparseable score at line {lineno}") from None
            if not 1.0 <= score <= 5.0:
                raise InputError(f"{path}: score outside 1-5 at line {lineno}")
            per_system = scores.setdefault(system, {})
            if annotator in per_system:
                raise InputError(
                    f"{path}: duplicate {system}/{annotator} at line {lineno}"
                )
            per_system[annotator] = score
    return scores


def _mark_best(systems):
    best = {}

    def pick(column, values, lower):
        scored = [(v, i) for i, v in enumerate(values) if v is not None]
        if not scored:
            return
        chooser = min if lower else max
        _, index = chooser(scored, key=lambda pair: (pair[0], pair[1]) if lower else (pair[0], -pair[1]))
        best[column] = systems[index].name

    pick("sam_total", [s.sam.total_sam for s in systems], lower=True)
    pick("sam_mean_all", [s.sam.mean_sam_all for s in systems], lower=True)
    pick("sam_mean_defined", [s.sam.mean_sam_defined for s in systems], lower=True)
    pick("bleu", [s.bleu.score for s in systems], lower=False)
    for annotator in annotator_columns(systems):
        pick(
            f"human:{annotator}",
            [(s.human_scores or {}).get(annotator) for s in systems],
            lower=False,
        )
    return best


def annotator_columns(systems):
    names = set()
    for system in systems:
        names.update(system.human_scores or ())
    return sorted(names)


def compare(ref_path, systems, lex, human_path=None, smoothing=SMOOTHING_ADD_ONE_EXP, threads=1):
    """Evaluate named hypothesis files against one reference file.

    systems is a list of (name, hyp_path). Every hypothesis must be
    line-aligned with the reference; a mismatch names the offending system.
    Input order is preserved; best cells are marked, not re-sorted.
    """
    names = [name for name, _ in systems]
    if len(set(names)) != len(names):
        raise InputError(f"duplicate system names in {names}")
    if not systems:
        raise InputError("no systems to compare")

    ref_lines = read_lines(ref_path)
    ref_annotated = [annotate(line, LANG_EN, lex) for line in ref_lines]
    ref_tokens = [[s for s, _, _ in tokenize(line)] for line in ref_lines]

    human = load_human_scores(human_path) if human_path else {}
    unknown = set(human) - set(names)
    if unknown:
        raise InputError(f"human scores name unknown systems: {sorted(unknown)}")

    def evaluate(item):
        name, hyp_path = item
        hyp_lines = read_lines(hyp_path)
        if len(hyp_lines) != len(ref_lines):
            raise InputError(
                f"system {name!r}: hypothesis has {len(hyp_lines)} lines but "
                f"reference has {len(ref_lines)}"
            )
        hyp_annotated = [annotate(line, LANG_EN, lex) for line in hyp_lines]
        _, summary = corpus_sam(align_pairs(hyp_annotated, ref_annotated, name), lex)
        hyp_tokens = [[s for s, _, _ in tokenize(line)] for line in hyp_lines]
        bleu = corpus_bleu(hyp_tokens, ref_tokens, smoothing=smoothing)
        return SystemRun(
            name=name,
            hyp_path=str(hyp_path),
            sam=summary,
            bleu=bleu,
            human_scores=human.get(name),
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = tuple(pool.map(evaluate, systems))
    else:
        runs = tuple(evaluate(item) for item in systems)

    return ComparisonReport(
        systems=runs,
        reference_path=str(ref_path),
        lexicon_name=lex.source_name,
        annotation_tier=TIER_FALLBACK,
        created_at=_timestamp(),
        tool_version=__version__,
        best=_mark_best(runs),
    )


def report_to_dict(report):
    return {
        "report_version": report.report_version,
        "reference_path": report.reference_path,
        "lexicon_name": report.lexicon_name,
        "annotation_tier": report.annotation_tier,
        "created_at": report.created_at,
        "tool_version": report.tool_version,
        "systems": [
            {
                "name": s.name,
                "hyp_path": s.hyp_path,
                "sam": {
                    "total_sam": s.sam.total_sam,
                    "mean_sam_all": s.sam.mean_sam_all,
                    "mean_sam_defined": s.sam.mean_sam_defined,
                    "n_pairs": s.sam.n_pairs,
                    "n_defined": s.sam.n_defined,
                },
                "bleu": {
                    "score": s.bleu.score,
                    "precisions": list(s.bleu.precisions),
                    "brevity_penalty": s.bleu.brevity_penalty,
                    "hyp_len": s.bleu.hyp_len,
                    "ref_len": s.bleu.ref_len,
                    "smoothing": s.bleu.smoothing,
                },
                "human_scores": s.human_scores,
            }
            for s in report.systems
        ],
        "best": report.best,
    }


def report_from_dict(payload):
    if payload.get("report_version") != REPORT_VERSION:
        raise InputError(
            f"unsupported report_version {payload.get('report_version')!r}"
        )
    systems = tuple(
        SystemRun(
            name=s["name"],
            hyp_path=s["hyp_path"],
            sam=CorpusSamSummary(**s["sam"]),
            bleu=BleuScore(
                score=s["bleu"]["score"],
                precisions=tuple(s["bleu"]["precisions"]),
                brevity_penalty=s["bleu"]["brevity_penalty"],
                hyp_len=s["bleu"]["hyp_len"],
                ref_len=s["bleu"]["ref_len"],
                smoothing=s["bleu"]["smoothing"],
            ),
            human_scores=s.get("human_scores"),
        )
        for s in payload["systems"]
    )
    return ComparisonReport(
        systems=systems,
        reference_path=payload["reference_path"],
        lexicon_name=payload["lexicon_name"],
        annotation_tier=payload["annotation_tier"],
        created_at=payload["created_at"],
        tool_version=payload["tool_version"],
        best=payload["best"],
    )


def _fmt(value, digits):
    return "n/a" if value is None else f"{value:.{digits}f}"


def render(report, format="markdown-table"):
    """Render a report as json, tsv, or a markdown table.

    JSON round-trips losslessly through report_from_dict. The markdown table
    follows the column order SAM total, SAM means, human annotators, BLEU,
    with the best value per column in bold.
    """
    if format == "json":
        return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"

    annotators = annotator_columns(report.systems)
    if format == "tsv":
        header = ["system", "sam_total", "sam_mean_all", "sam_mean_defined"]
        header += [f"human:{a}" for a in annotators] + ["bleu"]
        rows = ["\t".join(header)]
        for s in report.systems:
            cells = [
                s.name,
                repr(s.sam.total_sam),
                "" if s.sam.mean_sam_all is None else repr(s.sam.mean_sam_all),
                "" if s.sam.mean_sam_defined is None else repr(s.sam.mean_sam_defined),
            ]
            for annotator in annotators:
                value = (s.human_scores or {}).get(annotator)
                cells.append("" if value is None else repr(value))
            cells.append(repr(s.bleu.score))
            rows.append("\t".join(cells))
        return "\n".join(rows) + "\n"

    if format == "markdown-table":
        def cell(column, system_name, text):
            return f"**{text}**" if report.best.get(column) == system_name else text

        header = ["System", "SAM total", "SAM mean (all)", "SAM mean (defined)"]
        header += annotators + ["BLEU"]
        lines = [
            "| " + " | ".join(header) + " |",
            "|" + "|".join(["---"] * len(header)) + "|",
        ]
        for s in report.systems:
            row = [
                s.name,
                cell("sam_total", s.name, _fmt(s.sam.total_sam, 4)),
                cell("sam_mean_all", s.name, _fmt(s.sam.mean_sam_all, 4)),
                cell("sam_mean_defined", s.name, _fmt(s.sam.mean_sam_defined, 4)),
            ]
            for annotator in annotators:
                value = (s.human_scores or {}).get(annotator)
                row.append(cell(f"human:{annotator}", s.name, _fmt(value, 2)))
            row.append(cell("bleu", s.name, _fmt(s.bleu.score, 2)))
            lines.append("| " + " | ".join(row) + " |")
        return "\n".join(lines) + "\n"

    raise InputError(f"unknown render format: {format!r}")
