"""Delimited report writers and their companion figures.

Every report path emits machine-readable output (CSV, canonical JSON)
and renders a matplotlib figure next to it. The JSON serialization here
is the single source of truth for report bytes: the CLI and the HTTP
report endpoints both call :func:`canonical_json`, so their outputs
match byte for byte.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from bidimatch.offline_eval import EvalReport, FeatureEffectivenessRow
from bidimatch.sim.driver import ConvergenceReport
from bidimatch.smart_match import MatchBreakdown

FIGURE_DPI = 120


def canonical_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_csv(path: str | Path, rows: Sequence[Mapping], columns: Sequence[str]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return target


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_suffix(suffix)


# -- smart-match score table -------------------------------------------------

SCORE_COLUMNS = ["total_smart_match_score", "job_id", "contact_id"]


def breakdown_rows(breakdowns: Sequence[MatchBreakdown]) -> list[dict]:
    rows = []
    for breakdown in breakdowns:
        row = {
            "total_smart_match_score": f"{breakdown.display_total():.6f}",
            "job_id": breakdown.job_id,
            "contact_id": breakdown.contact_id,
        }
        for kind, score in breakdown.component_scores.items():
            row[kind.value] = score
        rows.append(row)
    return rows


def score_columns(breakdowns: Sequence[MatchBreakdown]) -> list[str]:
    columns = list(SCORE_COLUMNS)
    if breakdowns:
        columns += [kind.value for kind in breakdowns[0].component_scores]
    return columns


def write_score_report(breakdowns: Sequence[MatchBreakdown], csv_path: str | Path) -> dict[str, Path]:
    csv_path = Path(csv_path)
    rows = breakdown_rows(breakdowns)
    write_csv(csv_path, rows, score_columns(breakdowns))
    json_path = _sibling(csv_path, ".json")
    json_path.write_text(canonical_json(rows), encoding="utf-8")
    figure_path = _sibling(csv_path, ".png")
    totals = [b.total for b in breakdowns]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(range(len(totals)), totals, color="#3b7dd8")
    ax.set_xlabel("candidate rank")
    ax.set_ylabel("total smart-match score")
    ax.set_ylim(0, 1.05)
    ax.set_title("Smart-match totals (descending)")
    fig.tight_layout()
    fig.savefig(figure_path, dpi=FIGURE_DPI)
    plt.close(fig)
    return {"csv": csv_path, "json": json_path, "figure": figure_path}


# -- convergence series ------------------------------------------------------

CONVERGENCE_COLUMNS = ["bucket_start", "mae", "n"]


def convergence_rows(report: ConvergenceReport) -> list[dict]:
    return [{"bucket_start": b.bucket_start, "mae": f"{b.mae:.6f}", "n": b.n} for b in report.series]


def write_convergence_report(report: ConvergenceReport, csv_path: str | Path) -> dict[str, Path]:
    csv_path = Path(csv_path)
    write_csv(csv_path, convergence_rows(report), CONVERGENCE_COLUMNS)
    figure_path = _sibling(csv_path, ".png")
    xs = [b.bucket_start for b in report.series]
    ys = [b.mae for b in report.series]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(xs, ys, marker="o", markersize=3, color="#3b7dd8")
    ax.set_xlabel("event index")
    ax.set_ylabel("mean |probability - target|")
    ax.set_title(f"Convergence (initial {report.initial_mae:.3f}, final {report.final_mae:.3f})")
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    fig.savefig(figure_path, dpi=FIGURE_DPI)
    plt.close(fig)
    return {"csv": csv_path, "figure": figure_path}


# -- offline evaluation ------------------------------------------------------

EVAL_COLUMNS = ["policy", "estimated_avg_reward", "ci_low", "ci_high", "n_events"]


def eval_report_payload(report: EvalReport) -> dict:
    return {
        "rows": [
            {
                "policy": row.policy,
                "estimated_avg_reward": row.estimated_avg_reward,
                "ci_low": row.ci_low,
                "ci_high": row.ci_high,
                "n_events": row.n_events,
            }
            for row in report.rows
        ],
        "winner": report.winner,
        "applied": report.applied,
        "status": report.status,
    }


def write_eval_report(report: EvalReport, csv_path: str | Path) -> dict[str, Path]:
    csv_path = Path(csv_path)
    payload = eval_report_payload(report)
    write_csv(csv_path, payload["rows"], EVAL_COLUMNS)
    json_path = _sibling(csv_path, ".json")
    json_path.write_text(canonical_json(payload), encoding="utf-8")
    figure_path = _sibling(csv_path, ".png")
    names = [row.policy for row in report.rows]
    estimates = [row.estimated_avg_reward for row in report.rows]
    err_low = [row.estimated_avg_reward - row.ci_low for row in report.rows]
    err_high = [row.ci_high - row.estimated_avg_reward for row in report.rows]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(names, estimates, yerr=[err_low, err_high], capsize=4, color="#58a05c")
    ax.set_ylabel("estimated average reward")
    title = "Offline evaluation"
    if report.status:
        title += f" ({report.status})"
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(figure_path, dpi=FIGURE_DPI)
    plt.close(fig)
    return {"csv": csv_path, "json": json_path, "figure": figure_path}


# -- feature effectiveness ---------------------------------------------------

FEATURE_COLUMNS = ["rank", "namespace", "feature_name", "score", "occurrences"]


def feature_report_payload(rows: Sequence[FeatureEffectivenessRow]) -> dict:
    return {
        "rows": [
            {
                "rank": index + 1,
                "namespace": row.namespace,
                "feature_name": row.feature_name,
                "score": row.score,
                "occurrences": row.occurrences,
            }
            for index, row in enumerate(rows)
        ]
    }


def write_feature_report(rows: Sequence[FeatureEffectivenessRow], csv_path: str | Path) -> dict[str, Path]:
    csv_path = Path(csv_path)
    payload = feature_report_payload(rows)
    write_csv(csv_path, payload["rows"], FEATURE_COLUMNS)
    json_path = _sibling(csv_path, ".json")
    json_path.write_text(canonical_json(payload), encoding="utf-8")
    figure_path = _sibling(csv_path, ".png")
    top = rows[:15]
    labels = [f"{'c' if r.namespace == 'context' else 'a'}:{r.feature_name}" for r in top]
    fig, ax = plt.subplots(figsize=(7, max(3, 0.4 * len(top) + 1)))
    ax.barh(range(len(top)), [r.score for r in top], color="#c97e2c")
    ax.set_yticks(range(len(top)), labels)
    ax.invert_yaxis()
    ax.set_xlabel("effectiveness score (0-100)")
    ax.set_title("Feature effectiveness")
    fig.tight_layout()
    fig.savefig(figure_path, dpi=FIGURE_DPI)
    plt.close(fig)
    return {"csv": csv_path, "json": json_path, "figure": figure_path}
