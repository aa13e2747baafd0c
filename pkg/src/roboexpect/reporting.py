"""Render experiment results as a results-table grid in Markdown or CSV.

Rows are the 7 modality combinations plus the baseline; columns are the six
constructs.  Cells show the mean MSE to 3 decimals with significance stars;
the best (lowest) non-baseline cell per column is bold in Markdown and
flagged in CSV.  Ties at display precision are all flagged.
"""

from __future__ import annotations

import csv
import io
from decimal import ROUND_HALF_EVEN, Decimal

from .dataset import Construct
from .evaluation import CellResult, stars
from .features import ModalityCombo, all_combos
from .svr import HyperParams

BASELINE_LABEL = "Predict Dataset Average (baseline)"

FORMATS = ("markdown", "csv")


def _fmt3(value: float) -> str:
    """Round-half-even to 3 decimals, from the shortest repr of the double."""
    return str(Decimal(repr(value)).quantize(Decimal("0.001"), rounding=ROUND_HALF_EVEN))


def _index_results(results: list[CellResult]) -> dict[tuple[str | None, Construct], CellResult]:
    combos = all_combos()
    indexed: dict[tuple[str | None, Construct], CellResult] = {}
    for cell in results:
        key = (None if cell.combo is None else cell.combo.label, cell.construct)
        indexed[key] = cell
    missing = [
        (label, c.column)
        for label in [cb.label for cb in combos] + [None]
        for c in Construct
        if (label, c) not in indexed
    ]
    if missing:
        raise ValueError(f"incomplete result set; missing cells: {missing}")
    return indexed


def _best_mask(indexed: dict, combos: list[ModalityCombo]) -> dict[tuple[str, Construct], bool]:
    """Flag the minimal non-baseline mean per column, at display precision."""
    mask: dict[tuple[str, Construct], bool] = {}
    for construct in Construct:
        shown = {cb.label: _fmt3(indexed[(cb.label, construct)].mean_mse) for cb in combos}
        best = min(Decimal(v) for v in shown.values())
        for label, v in shown.items():
            mask[(label, construct)] = Decimal(v) == best
    return mask


def _cell_stars(cell: CellResult) -> str:
    return "" if cell.p_value is None else stars(cell.p_value)


def render(results: list[CellResult], format: str = "markdown") -> str:
    """Pure rendering of a complete (42 model + 6 baseline cells) result set."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    indexed = _index_results(results)
    combos = all_combos()
    best = _best_mask(indexed, combos)

    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["combo", "construct", "mean_mse", "p_value", "stars", "is_best"])
        for combo in combos:
            for construct in Construct:
                cell = indexed[(combo.label, construct)]
                writer.writerow([
                    combo.label, construct.column, _fmt3(cell.mean_mse),
                    repr(cell.p_value), _cell_stars(cell),
                    "true" if best[(combo.label, construct)] else "false",
                ])
        for construct in Construct:
            cell = indexed[(None, construct)]
            writer.writerow([BASELINE_LABEL, construct.column, _fmt3(cell.mean_mse),
                             "", "", "false"])
        return buf.getvalue()

    header = ["Features Used"] + [c.display for c in Construct]
    lines = ["| " + " | ".join(header) + " |",
             "| " + " | ".join(["---"] * len(header)) + " |"]
    for combo in combos:
        row = [combo.label]
        for construct in Construct:
            cell = indexed[(combo.label, construct)]
            text = _fmt3(cell.mean_mse)
            if best[(combo.label, construct)]:
                text = f"**{text}**"
            row.append(text + _cell_stars(cell))
        lines.append("| " + " | ".join(row) + " |")
    row = [BASELINE_LABEL]
    for construct in Construct:
        row.append(_fmt3(indexed[(None, construct)].mean_mse))
    lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def footer(seed: int, hp: HyperParams, k: int, fingerprint: str, version: str) -> str:
    """One-line provenance record appended below the table."""
    return (f"seed={seed} C={hp.c} epsilon={hp.epsilon} gamma={hp.gamma} k={k} "
            f"dataset_sha256={fingerprint} roboexpect={version}")
