"""Text/CSV rendering of run summaries, per-attack tables, and histograms."""

import csv
import io

import numpy as np

from sasvfuse import (
    ClassifierKind,
    FusionMode,
    LabeledScores,
    LabelKind,
    PathwaySpec,
    PathwayResult,
    evaluate_scores,
    histogram_export,
    render_per_attack_csv,
    render_per_attack_text,
    render_summary_csv,
    render_summary_text,
)
from sasvfuse.reports import histogram_csv
from conftest import random_class_scores


def sample_results(rng):
    scores, labels = random_class_scores(rng, 40, 30, 30)
    report = evaluate_scores(LabeledScores(scores, tuple(labels)))
    ok = PathwayResult(
        PathwaySpec(FusionMode.SCORE_SUM, ("E", "A"), normalize=False),
        dev_report=report,
        eval_report=report,
    )
    failed = PathwayResult(
        PathwaySpec(
            FusionMode.SINGLE_STAGE, ("E", "A"), stage1=ClassifierKind.SVM
        ),
        error="column 'A' missing",
    )
    return [ok, failed], report


class TestSummary:
    def test_text_layout(self, rng):
        results, report = sample_results(rng)
        text = render_summary_text(results)
        lines = text.splitlines()
        assert lines[0].startswith("pathway")
        assert "sasv-eer dev/eval" in lines[0]
        assert lines[1].startswith("---")
        assert "score-sum/-/E+A" in lines[2]
        assert f"{report.sasv_eer:.2f} / {report.sasv_eer:.2f}" in lines[2]
        assert "failed: column 'A' missing" in lines[3]
        assert text.endswith("\n")

    def test_csv_full_precision(self, rng):
        results, report = sample_results(rng)
        rows = list(csv.DictReader(io.StringIO(render_summary_csv(results))))
        assert len(rows) == 2
        assert rows[0]["name"] == "score-sum/-/E+A"
        assert float(rows[0]["sasv_eer_dev"]) == report.sasv_eer
        assert float(rows[0]["a_dcf_eval"]) == report.a_dcf
        assert rows[0]["error"] == ""
        assert rows[1]["error"] == "column 'A' missing"
        assert rows[1]["sasv_eer_dev"] == ""

    def test_missing_partition_renders_dash(self, rng):
        results, report = sample_results(rng)
        results[0].eval_report = None
        text = render_summary_text(results)
        assert f"{report.sasv_eer:.2f} / -" in text


class TestPerAttack:
    def test_text_and_csv_agree(self, rng):
        results, report = sample_results(rng)
        text = render_per_attack_text(results)
        assert "pooled" in text
        assert "AX" in text and "AY" in text
        raw = render_per_attack_csv(results)
        # wide layout: one row per pathway, attacks as columns, pooled last
        header = raw.splitlines()[0].split(",")
        assert header == ["name", "AX", "AY", "pooled"]
        rows = list(csv.DictReader(io.StringIO(raw)))
        row = rows[0]
        assert row["name"] == "score-sum/-/E+A"
        assert float(row["AX"]) == report.per_attack["AX"]
        assert float(row["pooled"]) == report.per_attack["pooled"]

    def test_failed_rows_skipped(self, rng):
        results, _ = sample_results(rng)
        rows = list(csv.DictReader(io.StringIO(render_per_attack_csv(results))))
        assert [r["name"] for r in rows] == ["score-sum/-/E+A"]


class TestHistogramCsv:
    def test_structure_and_conservation(self, rng):
        scores, labels = random_class_scores(rng, 25, 20, 15)
        export = histogram_export(LabeledScores(scores, tuple(labels)), bins=8)
        rows = list(csv.DictReader(io.StringIO(histogram_csv(export))))
        assert len(rows) == 3 * 8
        for kind, want in ((LabelKind.TARGET, 25), (LabelKind.NONTARGET, 20), (LabelKind.SPOOF, 15)):
            got = sum(int(r["count"]) for r in rows if r["class"] == kind.value)
            assert got == want
        lows = [float(r["bin_low"]) for r in rows if r["class"] == "target"]
        assert lows == sorted(lows)
        assert np.isclose(lows[0], scores.min())
