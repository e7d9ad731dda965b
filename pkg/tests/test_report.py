import json

import pytest

from sentmt import demo
from sentmt.errors import InputError
from sentmt.lexicon import load_prior_polarity
from sentmt.report import (
    compare,
    load_human_scores,
    render,
    report_from_dict,
    report_to_dict,
)


@pytest.fixture(scope="module")
def mini_lexicon():
    return load_prior_polarity(demo.data_path("sentiwords_mini.tsv"))


@pytest.fixture(scope="module")
def contrast_systems():
    return [
        ("preserving", str(demo.data_path("contrast_preserving.txt"))),
        ("flipped", str(demo.data_path("contrast_flipped.txt"))),
    ]


@pytest.fixture(scope="module")
def contrast_report(mini_lexicon, contrast_systems):
    return compare(
        demo.data_path("contrast_ref.txt"),
        contrast_systems,
        mini_lexicon,
        human_path=demo.data_path("human_scores.tsv"),
    )


class TestCompare:
    def test_contrast_corpus_sam_orders_bleu_close(self, contrast_report):
        preserving, flipped = contrast_report.systems
        assert preserving.sam.total_sam < flipped.sam.total_sam
        assert abs(preserving.bleu.score - flipped.bleu.score) < demo.CONTRAST_BLEU_MARGIN
        assert contrast_report.best["sam_total"] == "preserving"
        assert contrast_report.best["human:H1"] == "preserving"

    def test_reference_copy_wins_everything(self, mini_lexicon, tmp_path):
        ref = demo.data_path("contrast_ref.txt")
        copy = tmp_path / "copy.txt"
        copy.write_bytes(ref.read_bytes())
        result = compare(
            ref,
            [("copy", str(copy)), ("flipped", str(demo.data_path("contrast_flipped.txt")))],
            mini_lexicon,
        )
        copy_run = result.systems[0]
        assert copy_run.sam.total_sam == 0.0
        assert copy_run.bleu.score == 100.0
        assert result.best["sam_total"] == "copy"
        assert result.best["bleu"] == "copy"

    def test_single_system_trivially_best(self, mini_lexicon, contrast_systems):
        result = compare(
            demo.data_path("contrast_ref.txt"), contrast_systems[:1], mini_lexicon
        )
        assert len(result.systems) == 1
        assert set(result.best.values()) == {"preserving"}

    def test_line_count_mismatch_names_system(self, mini_lexicon, tmp_path):
        short = tmp_path / "short.txt"
        short.write_text("only one line\n", encoding="utf-8")
        with pytest.raises(InputError, match="'short-sys'"):
            compare(
                demo.data_path("contrast_ref.txt"),
                [("short-sys", str(short))],
                mini_lexicon,
            )

    def test_duplicate_system_names_rejected(self, mini_lexicon, contrast_systems):
        doubled = [contrast_systems[0], contrast_systems[0]]
        with pytest.raises(InputError, match="duplicate"):
            compare(demo.data_path("contrast_ref.txt"), doubled, mini_lexicon)

    def test_threaded_equals_sequential(self, mini_lexicon, contrast_systems, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        a = compare(demo.data_path("contrast_ref.txt"), contrast_systems, mini_lexicon)
        b = compare(
            demo.data_path("contrast_ref.txt"), contrast_systems, mini_lexicon, threads=4
        )
        assert a == b

    def test_created_at_honors_source_date_epoch(
        self, mini_lexicon, contrast_systems, monkeypatch
    ):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        result = compare(demo.data_path("contrast_ref.txt"), contrast_systems, mini_lexicon)
        assert result.created_at == "2023-11-14T22:13:20Z"


class TestHumanScores:
    def test_load(self):
        scores = load_human_scores(demo.data_path("human_scores.tsv"))
        assert scores["preserving"]["H2"] == 4.0
        assert set(scores) == {"preserving", "flipped"}

    def test_out_of_scale_rejected(self, tmp_path):
        path = tmp_path / "h.tsv"
        path.write_text("sys\tH1\t6.0\n", encoding="utf-8")
        with pytest.raises(InputError, match="1-5"):
            load_human_scores(path)

    def test_duplicate_cell_rejected(self, tmp_path):
        path = tmp_path / "h.tsv"
        path.write_text("sys\tH1\t4.0\nsys\tH1\t3.0\n", encoding="utf-8")
        with pytest.raises(InputError, match="duplicate"):
            load_human_scores(path)

    def test_unknown_system_rejected(self, mini_lexicon, contrast_systems, tmp_path):
        path = tmp_path / "h.tsv"
        path.write_text("ghost\tH1\t4.0\n", encoding="utf-8")
        with pytest.raises(InputError, match="ghost"):
            compare(
                demo.data_path("contrast_ref.txt"),
                contrast_systems,
                mini_lexicon,
                human_path=path,
            )


class TestRender:
    def test_json_round_trip(self, contrast_report):
        text = render(contrast_report, "json")
        assert report_from_dict(json.loads(text)) == contrast_report

    def test_to_dict_from_dict_identity(self, contrast_report):
        assert report_from_dict(report_to_dict(contrast_report)) == contrast_report

    def test_tsv_row_count(self, contrast_report):
        lines = render(contrast_report, "tsv").rstrip("\n").split("\n")
        assert len(lines) == len(contrast_report.systems) + 1
        assert lines[0].startswith("system\tsam_total")

    def test_markdown_bolds_extrema(self, contrast_report):
        text = render(contrast_report, "markdown-table")
        rows = {line.split(" | ")[0].strip("| "): line for line in text.splitlines()[2:]}
        pres, flip = rows["preserving"], rows["flipped"]
        pres_cells = [c.strip() for c in pres.strip("|").split("|")]
        flip_cells = [c.strip() for c in flip.strip("|").split("|")]
        # columns: name, sam_total, mean_all, mean_defined, H1, H2, H3, bleu
        assert pres_cells[1].startswith("**")       # lowest SAM total is bold
        assert not flip_cells[1].startswith("**")
        assert pres_cells[4].startswith("**")       # highest H1 is bold
        assert not flip_cells[4].startswith("**")

    def test_markdown_column_order(self, contrast_report):
        header = render(contrast_report, "markdown-table").splitlines()[0]
        columns = [c.strip() for c in header.strip("|").split("|")]
        assert columns == [
            "System",
            "SAM total",
            "SAM mean (all)",
            "SAM mean (defined)",
            "H1",
            "H2",
            "H3",
            "BLEU",
        ]

    def test_unknown_format(self, contrast_report):
        with pytest.raises(InputError):
            render(contrast_report, "xml")

    def test_report_version_checked(self, contrast_report):
        payload = report_to_dict(contrast_report)
        payload["report_version"] = 99
        with pytest.raises(InputError, match="report_version"):
            report_from_dict(payload)
