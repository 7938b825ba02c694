"""Plain-text and CSV rendering of run results, and score histograms."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .metrics import POOLED_KEY
from .score_io import LabelKind


@dataclass
class PathwayResult:
    """Outcome of one pathway in a run: reports per partition, or an error."""

    spec: object
    dev_report: object | None = None
    eval_report: object | None = None
    error: str | None = None


def _fmt_pct(value):
    return "-" if value is None else f"{value:.2f}"


def _fmt_cost(value):
    return "-" if value is None else f"{value:.4f}"


def _raw(value):
    return "" if value is None else repr(float(value))


def _fixed_width(header, rows):
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []
    fmt = "  ".join("{:<%d}" % w for w in widths)
    lines.append(fmt.format(*header).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append(fmt.format(*row).rstrip())
    return "\n".join(lines) + "\n"


def render_summary_text(results):
    """Human-readable run summary, one row per pathway (dev / eval pairs)."""
    header = (
        "pathway",
        "classifiers",
        "scores",
        "sasv-eer dev/eval",
        "sv-eer dev/eval",
        "spf-eer dev/eval",
        "a-dcf dev/eval",
    )
    rows = []
    for result in results:
        spec = result.spec
        if result.error is not None:
            rows.append(
                (
                    spec.display_name,
                    spec.classifier_token,
                    spec.scores_token,
                    f"failed: {result.error}",
                    "",
                    "",
                    "",
                )
            )
            continue

        def pair(attr):
            dev = getattr(result.dev_report, attr) if result.dev_report else None
            ev = getattr(result.eval_report, attr) if result.eval_report else None
            if attr == "a_dcf":
                return f"{_fmt_cost(dev)} / {_fmt_cost(ev)}"
            return f"{_fmt_pct(dev)} / {_fmt_pct(ev)}"

        rows.append(
            (
                spec.display_name,
                spec.classifier_token,
                spec.scores_token,
                pair("sasv_eer"),
                pair("sv_eer"),
                pair("spf_eer"),
                pair("a_dcf"),
            )
        )
    return _fixed_width(header, rows)


_SUMMARY_FIELDS = ("sv_eer", "spf_eer", "sasv_eer", "a_dcf")


def render_summary_csv(results):
    """Machine-readable summary with full-precision values."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["name", "alias", "mode", "classifiers", "scores"]
    for part in ("dev", "eval"):
        header.extend(f"{field}_{part}" for field in _SUMMARY_FIELDS)
    header.append("error")
    writer.writerow(header)
    for result in results:
        spec = result.spec
        row = [
            spec.name,
            spec.alias or "",
            spec.mode.value,
            spec.classifier_token,
            spec.scores_token,
        ]
        for report in (result.dev_report, result.eval_report):
            for field in _SUMMARY_FIELDS:
                row.append(_raw(getattr(report, field)) if report else "")
        row.append(result.error or "")
        writer.writerow(row)
    return buffer.getvalue()


def _attack_columns(results, which):
    names = set()
    for result in results:
        report = getattr(result, which)
        if report is not None:
            names.update(report.per_attack)
    names.discard(POOLED_KEY)
    ordered = sorted(names)
    ordered.append(POOLED_KEY)
    return ordered


def render_per_attack_text(results, which="eval_report"):
    """Per-attack EER table (percent), one row per pathway."""
    attacks = _attack_columns(results, which)
    header = ("pathway",) + tuple(attacks)
    rows = []
    for result in results:
        report = getattr(result, which)
        if report is None:
            continue
        rows.append(
            (result.spec.display_name,)
            + tuple(_fmt_pct(report.per_attack.get(a)) for a in attacks)
        )
    return _fixed_width(header, rows)


def render_per_attack_csv(results, which="eval_report"):
    attacks = _attack_columns(results, which)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["name"] + attacks)
    for result in results:
        report = getattr(result, which)
        if report is None:
            continue
        writer.writerow(
            [result.spec.name]
            + [_raw(report.per_attack.get(a)) for a in attacks]
        )
    return buffer.getvalue()


def histogram_csv(export):
    """Per-class bin counts: class,bin_low,bin_high,count rows."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["class", "bin_low", "bin_high", "count"])
    edges = export.edges
    for kind in LabelKind:
        counts = export.counts[kind]
        for b in range(counts.shape[0]):
            writer.writerow(
                [kind.value, repr(float(edges[b])), repr(float(edges[b + 1])), int(counts[b])]
            )
    return buffer.getvalue()
