"""Output formatting for the cmtra CLI.

Results go to stdout, status and errors to stderr, so piped output stays clean.
"""

import json
import logging
import sys
from collections.abc import Generator, Sequence
from contextlib import contextmanager
from typing import Any

import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.status import Status
from rich.table import Table

from src.corpus.labels import OffenseLabel
from src.corpus.stats import DatasetSummary
from src.evaluation.metrics import ConfusionMatrix, MetricsReport
from src.model.training import History
from src.translit.engine import TransliterationStats

# Console for stdout (results)
console = Console()
# Console for stderr (status messages, errors)
err_console = Console(stderr=True)


def setup_logging(verbose: bool = False) -> None:
    """Route library logs to stderr through rich (DEBUG when verbose, else WARNING)."""
    handler = RichHandler(console=err_console, show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root = logging.getLogger()
    for existing in list(root.handlers):
        if isinstance(existing, RichHandler):
            root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)


def print_json(data: dict[str, Any] | list[Any]) -> None:
    """Print data as formatted JSON."""
    print(json.dumps(data, indent=2))


def print_distribution(summary: DatasetSummary) -> None:
    """Print a dataset's size and class make-up."""
    table = Table(
        title=f"{summary.language.value.title()} {summary.split.value} split ({summary.size} samples)",
        show_header=True,
        header_style="bold",
    )
    table.add_column("Label", style="cyan")
    table.add_column("Code")
    table.add_column("Count", justify="right")
    table.add_column("Share", justify="right")
    shares = summary.shares()
    for label, count in summary.distribution.items():
        table.add_row(label.display_name, label.code, str(count), f"{shares[label]:.2%}")
    console.print(table)
    for discrepancy in summary.discrepancies:
        err_console.print(f"[yellow]Warning:[/] {discrepancy}")


def print_translit_stats(stats: TransliterationStats) -> None:
    table = Table(title="Transliteration", show_header=True, header_style="bold")
    table.add_column("Counter", style="cyan")
    table.add_column("Value", justify="right")
    for key, value in stats.to_dict().items():
        table.add_row(key.replace("_", " "), str(value))
    console.print(table)


def print_report(report: MetricsReport, title: str = "Classification report") -> None:
    """Print per-class and summary rows to 4 decimals."""
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("Class", style="cyan")
    for name in ("Precision", "Recall", "F1", "Support"):
        table.add_column(name, justify="right")
    for item in report.per_class:
        flag = " [dim]*[/]" if item.zero_division else ""
        table.add_row(
            item.label.display_name + flag,
            f"{item.precision:.4f}",
            f"{item.recall:.4f}",
            f"{item.f1:.4f}",
            str(item.support),
        )
    table.add_section()
    table.add_row("Accuracy", "", "", f"{report.accuracy:.4f}", str(report.total))
    table.add_row(
        "Macro Average",
        f"{report.macro_precision:.4f}",
        f"{report.macro_recall:.4f}",
        f"{report.macro_f1:.4f}",
        str(report.total),
    )
    table.add_row(
        "Weighted Average",
        f"{report.weighted_precision:.4f}",
        f"{report.weighted_recall:.4f}",
        f"{report.weighted_f1:.4f}",
        str(report.total),
    )
    console.print(table)
    if any(item.zero_division for item in report.per_class):
        print_info("* zero denominator, reported as 0")


def print_comparison(reports: dict[str, MetricsReport], title: str = "Variant comparison") -> None:
    """Print one row per variant; the best weighted F1 is bold."""
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("Variant", style="cyan")
    for name in ("Accuracy", "Macro F1", "Weighted P", "Weighted R", "Weighted F1"):
        table.add_column(name, justify="right")
    best = max(r.weighted_f1 for r in reports.values())
    for name, r in reports.items():
        table.add_row(
            name,
            f"{r.accuracy:.4f}",
            f"{r.macro_f1:.4f}",
            f"{r.weighted_precision:.4f}",
            f"{r.weighted_recall:.4f}",
            f"[bold]{r.weighted_f1:.4f}[/]" if r.weighted_f1 == best else f"{r.weighted_f1:.4f}",
        )
    console.print(table)


def _heat_style(fraction: float) -> str:
    if fraction >= 0.75:
        return "bold white on dark_green"
    if fraction >= 0.5:
        return "white on green4"
    if fraction >= 0.25:
        return "black on yellow3"
    if fraction > 0.0:
        return "black on grey70"
    return "dim"


def print_heatmap(cm: ConfusionMatrix) -> None:
    """Confusion matrix with cells shaded by row-normalized fraction."""
    table = Table(title="Confusion matrix (rows: gold, columns: predicted)", show_header=True, header_style="bold")
    table.add_column("Gold", style="cyan")
    for label in cm.labelset:
        table.add_column(label.code, justify="right")
    fractions = cm.row_normalized()
    for i, gold in enumerate(cm.labelset):
        cells = [
            f"[{_heat_style(float(fractions[i, j]))}]{int(cm.counts[i, j])}[/]"
            for j in range(len(cm.labelset))
        ]
        table.add_row(gold.code, *cells)
    console.print(table)


def print_history(history: History) -> None:
    table = Table(title="Training history", show_header=True, header_style="bold")
    for name in ("Stage", "Epoch", "Loss", "Train acc", "Dev acc", "Dev macro F1"):
        table.add_column(name, justify="right" if name != "Stage" else "left")
    for record in history.records:
        table.add_row(
            record.stage,
            str(record.epoch),
            f"{record.train_loss:.4f}",
            f"{record.train_acc:.4f}",
            "-" if record.dev_acc is None else f"{record.dev_acc:.4f}",
            "-" if record.dev_macro_f1 is None else f"{record.dev_macro_f1:.4f}",
        )
    console.print(table)


def print_predictions(
    texts: Sequence[str],
    predictions: Sequence[tuple[OffenseLabel, np.ndarray]],
    output_format: str = "text",
) -> None:
    """Print one label (and its probability) per text."""
    if output_format == "json":
        print_json(
            [
                {
                    "text": text,
                    "label": label.code,
                    "probabilities": [float(p) for p in probs],
                }
                for text, (label, probs) in zip(texts, predictions, strict=True)
            ]
        )
        return
    table = Table(show_header=True, header_style="bold")
    table.add_column("Text")
    table.add_column("Label", style="cyan")
    table.add_column("Prob", justify="right")
    for text, (label, probs) in zip(texts, predictions, strict=True):
        table.add_row(text, label.display_name, f"{float(np.max(probs)):.4f}")
    console.print(table)


def print_config(config: dict[str, Any]) -> None:
    """Print a configuration as dotted keys."""
    table = Table(title="cmtra Configuration", show_header=True, header_style="bold")
    table.add_column("Setting", style="cyan")
    table.add_column("Value")

    def add(prefix: str, value: Any) -> None:
        if isinstance(value, dict):
            for key, inner in value.items():
                add(f"{prefix}.{key}" if prefix else key, inner)
        else:
            table.add_row(prefix, str(value) if value is not None else "[dim]not set[/]")

    add("", config)
    console.print(table)


def print_error(message: str, hint: str | None = None) -> None:
    """Print an error message.

    Args:
        message: Error message
        hint: Optional hint for resolution
    """
    err_console.print(f"[bold red]Error:[/] {message}")
    if hint:
        err_console.print(f"[dim]Hint: {hint}[/]")


def print_success(message: str) -> None:
    """Print a success message."""
    err_console.print(f"[bold green]Success:[/] {message}")


def print_info(message: str) -> None:
    """Print an info message."""
    err_console.print(f"[dim]{message}[/]")


def print_progress(message: str) -> None:
    """Print a progress message to stderr (doesn't interfere with piped output)."""
    err_console.print(f"[dim]{message}...[/]")


@contextmanager
def stage_status(initial_message: str = "Starting...") -> Generator[Status, None, None]:
    """Spinner on stderr that stage and epoch callbacks update in place."""
    with err_console.status(f"[dim]{initial_message}[/]", spinner="dots") as status:
        yield status


def is_piped() -> bool:
    """Check if stdout is being piped."""
    return not sys.stdout.isatty()
