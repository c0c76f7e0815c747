"""Classification reports (aligned text, JSON record, heatmap CSV) and variant comparisons."""

import csv
import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from src.errors import IoError
from src.evaluation.metrics import ConfusionMatrix, MetricsReport

logger = logging.getLogger(__name__)

HEATMAP_HEADER = ("gold", "predicted", "count", "row_fraction")
SUMMARY_ROWS = ("Accuracy", "Macro Average", "Weighted Average")


@dataclass(frozen=True)
class ClassificationReport:
    """Rendered forms of one MetricsReport.

    Attributes:
        text: Aligned table, values to 4 decimals
        record: JSON-serializable dict at full precision
        heatmap_csv: Confusion-matrix cells, one CSV row per (gold, predicted) pair
    """

    text: str
    record: dict[str, object]
    heatmap_csv: str


def format_table(report: MetricsReport) -> str:
    """Class rows in canonical order, then accuracy, macro and weighted averages."""
    names = [m.label.display_name for m in report.per_class] + list(SUMMARY_ROWS)
    width = max(len(name) for name in names)
    header = f"{'':<{width}}  {'Precision':>9}  {'Recall':>9}  {'F1-score':>9}  {'Support':>7}"
    lines = [header]
    for m in report.per_class:
        lines.append(
            f"{m.label.display_name:<{width}}  {m.precision:>9.4f}  {m.recall:>9.4f}  "
            f"{m.f1:>9.4f}  {m.support:>7d}"
        )
    lines.append("")
    lines.append(f"{'Accuracy':<{width}}  {'':>9}  {'':>9}  {report.accuracy:>9.4f}  {report.total:>7d}")
    lines.append(
        f"{'Macro Average':<{width}}  {report.macro_precision:>9.4f}  {report.macro_recall:>9.4f}  "
        f"{report.macro_f1:>9.4f}  {report.total:>7d}"
    )
    lines.append(
        f"{'Weighted Average':<{width}}  {report.weighted_precision:>9.4f}  "
        f"{report.weighted_recall:>9.4f}  {report.weighted_f1:>9.4f}  {report.total:>7d}"
    )
    return "\n".join(lines) + "\n"


def report_record(report: MetricsReport) -> dict[str, object]:
    cm = report.confusion
    return {
        "classes": [
            {
                "label": m.label.value,
                "code": m.label.code,
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
                "zero_division": m.zero_division,
            }
            for m in report.per_class
        ],
        "accuracy": report.accuracy,
        "macro_avg": {
            "precision": report.macro_precision,
            "recall": report.macro_recall,
            "f1": report.macro_f1,
        },
        "weighted_avg": {
            "precision": report.weighted_precision,
            "recall": report.weighted_recall,
            "f1": report.weighted_f1,
        },
        "total": report.total,
        "confusion_matrix": {
            "labels": [label.code for label in cm.labelset],
            "counts": cm.counts.tolist(),
        },
    }


def heatmap_rows(cm: ConfusionMatrix) -> list[tuple[str, str, int, float]]:
    """(gold code, predicted code, count, row-normalized fraction) for every cell."""
    fractions = cm.row_normalized()
    return [
        (gold.code, pred.code, int(cm.counts[i, j]), float(fractions[i, j]))
        for i, gold in enumerate(cm.labelset)
        for j, pred in enumerate(cm.labelset)
    ]


def heatmap_csv(cm: ConfusionMatrix) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(HEATMAP_HEADER)
    for gold, pred, count, fraction in heatmap_rows(cm):
        writer.writerow((gold, pred, count, repr(fraction)))
    return buffer.getvalue()


def classification_report(report: MetricsReport) -> ClassificationReport:
    """Render a MetricsReport as text, a JSON record and heatmap CSV."""
    return ClassificationReport(
        text=format_table(report),
        record=report_record(report),
        heatmap_csv=heatmap_csv(report.confusion),
    )


def report_stem(language: str, variant: str, model_tag: str) -> str:
    return f"{language}_{variant}_{model_tag}"


def write_report(
    report: MetricsReport,
    out_dir: Path | str,
    language: str,
    variant: str,
    model_tag: str,
) -> dict[str, Path]:
    """Write ``report_<stem>.txt``, ``report_<stem>.json`` and ``heatmap_<stem>.csv``.

    Returns:
        Paths keyed "text", "json" and "heatmap"
    """
    out_dir = Path(out_dir)
    rendered = classification_report(report)
    stem = report_stem(language, variant, model_tag)
    paths = {
        "text": out_dir / f"report_{stem}.txt",
        "json": out_dir / f"report_{stem}.json",
        "heatmap": out_dir / f"heatmap_{stem}.csv",
    }
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        paths["text"].write_text(rendered.text, encoding="utf-8")
        paths["json"].write_text(json.dumps(rendered.record, indent=2) + "\n", encoding="utf-8")
        paths["heatmap"].write_text(rendered.heatmap_csv, encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write report to {out_dir}: {e}") from e
    logger.info("Wrote classification report %s to %s", stem, out_dir)
    return paths


def comparison_table(reports: dict[str, MetricsReport]) -> str:
    """One row per variant: accuracy, macro and weighted P/R/F1."""
    width = max([len("Variant")] + [len(name) for name in reports])
    columns = ("Accuracy", "Macro P", "Macro R", "Macro F1", "Weighted P", "Weighted R", "Weighted F1")
    lines = [f"{'Variant':<{width}}  " + "  ".join(f"{c:>11}" for c in columns)]
    for name, r in reports.items():
        values = (
            r.accuracy,
            r.macro_precision,
            r.macro_recall,
            r.macro_f1,
            r.weighted_precision,
            r.weighted_recall,
            r.weighted_f1,
        )
        lines.append(f"{name:<{width}}  " + "  ".join(f"{v:>11.4f}" for v in values))
    return "\n".join(lines) + "\n"


def comparison_record(reports: dict[str, MetricsReport], test_digest: str | None) -> dict[str, object]:
    return {
        "test_digest": test_digest,
        "variants": {name: report_record(r) for name, r in reports.items()},
    }


def write_comparison(
    reports: dict[str, MetricsReport],
    out_dir: Path | str,
    language: str,
    model_tag: str,
    test_digest: str | None = None,
) -> dict[str, Path]:
    """Write ``comparison_<language>_<tag>.txt`` and ``.json`` for a set of variant runs.

    Returns:
        Paths keyed "text" and "json"
    """
    out_dir = Path(out_dir)
    stem = f"comparison_{language}_{model_tag}"
    paths = {"text": out_dir / f"{stem}.txt", "json": out_dir / f"{stem}.json"}
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        paths["text"].write_text(comparison_table(reports), encoding="utf-8")
        record = comparison_record(reports, test_digest)
        paths["json"].write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write comparison to {out_dir}: {e}") from e
    logger.info("Wrote %d-variant comparison %s to %s", len(reports), stem, out_dir)
    return paths
