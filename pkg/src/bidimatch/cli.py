"""Command-line interface.

Report-producing commands write delimited output (CSV plus canonical
JSON) and render a matplotlib figure alongside; without ``--out`` they
print to stdout. ``serve`` hosts the HTTP API; ``batch-train`` is the
cron-invocable batch trainer.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from pathlib import Path
from random import Random

import click

from bidimatch import __version__
from bidimatch.bandit import ContextualBandit, ModelName
from bidimatch.baselines import RatingsMatrix, cf_predict, recommend_facilities, similar_travelers, tfidf_fit
from bidimatch.config import EngineConfig, MatchConfig, load_config, load_match_config
from bidimatch.domain import Job, Traveler
from bidimatch.errors import BidimatchError, InsufficientEvents
from bidimatch.feed import JsonlStore, ScrubRules, fetch_raw, load_gazetteers, orchestrate
from bidimatch.feed.pipeline import RawJobRecord
from bidimatch.ids import derive_seed
from bidimatch.offline_eval import PolicyKind, PolicySpec, default_policy_specs
from bidimatch.reports import (
    breakdown_rows,
    canonical_json,
    eval_report_payload,
    feature_report_payload,
    score_columns,
    write_convergence_report,
    write_eval_report,
    write_feature_report,
    write_score_report,
)
from bidimatch.sentiment import SentimentAnalyzer
from bidimatch.service.app import INSUFFICIENT_EVENTS_PAYLOAD, create_app
from bidimatch.service.batch import MaintenanceThread, WEEKLY_BATCH_CRON
from bidimatch.service.engine import RecommendationService, resolve_model_name
from bidimatch.sim import FeedbackMode, WorldSpec, convergence_report, generate_world, simulate
from bidimatch.smart_match import match_travelers_for_job

logger = logging.getLogger(__name__)


def _load_records(path: str) -> list[dict]:
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        return []
    if text.startswith("["):
        return json.loads(text)
    if text.startswith("{") and "\n" not in text.strip():
        return [json.loads(text)]
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _echo_csv(rows: list[dict], columns: list[str]) -> None:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    click.echo(buffer.getvalue(), nl=False)


@click.group()
@click.version_option(version=__version__, prog_name="bidimatch")
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool) -> None:
    """Bi-directional staffing personalization toolkit."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")


# -- score ---------------------------------------------------------------


@main.command()
@click.option("--job", "job_path", required=True, type=click.Path(exists=True), help="Job record (JSON).")
@click.option("--travelers", "travelers_path", required=True, type=click.Path(exists=True), help="Traveler records (JSON/JSONL).")
@click.option("--sentiment", type=float, default=None, help="Facility sentiment score in [0, 1].")
@click.option("--match-config", "match_config_path", type=click.Path(exists=True), help="Smart-match config file.")
@click.option("--out", "out_path", type=click.Path(), help="CSV output path; JSON and figure land alongside.")
def score(job_path, travelers_path, sentiment, match_config_path, out_path):
    """Smart-match a traveler pool against one job (descending totals)."""
    job = Job.from_record(_load_records(job_path)[0])
    pool = [Traveler.from_record(r) for r in _load_records(travelers_path)]
    config = load_match_config(match_config_path) if match_config_path else MatchConfig()
    sentiments = {job.facility_id: sentiment} if sentiment is not None else {}
    rows = match_travelers_for_job(job, pool, sentiments, config=config)
    if out_path:
        paths = write_score_report(rows, out_path)
        click.echo(f"wrote {paths['csv']}, {paths['json']}, {paths['figure']}")
    else:
        _echo_csv(breakdown_rows(rows), score_columns(rows))


# -- sentiment -----------------------------------------------------------


@main.command()
@click.option("--text", help="Review text to analyze.")
@click.option("--opinions", is_flag=True, help="Include unit-level opinion mining.")
@click.option("--input", "input_path", type=click.Path(exists=True), help='JSON request: {"Text": ..., "IncludeOpinionMining": ...}.')
def sentiment(text: str | None, opinions: bool, input_path: str | None) -> None:
    """Sentence and document sentiment in the service wire shape."""
    if input_path:
        request = json.loads(Path(input_path).read_text(encoding="utf-8"))
        text = request.get("Text", text)
        opinions = str(request.get("IncludeOpinionMining", opinions)).lower() == "true"
    if not text:
        raise click.UsageError("provide --text or --input")
    analyzer = SentimentAnalyzer()
    result = analyzer.analyze(text, include_opinion_mining=opinions)
    click.echo(result.to_wire_json())


# -- offline evaluation ----------------------------------------------------


def _parse_policy_file(path: str) -> list[PolicySpec]:
    specs = []
    for item in _load_records(path):
        specs.append(PolicySpec(item["name"], PolicyKind(item["kind"]), item.get("params", {})))
    return specs


@main.command("eval")
@click.option("--model", "model_key", required=True, help="traveler or job.")
@click.option("--data-dir", required=True, type=click.Path(exists=True), help="Service data directory.")
@click.option("--policies", "policies_path", type=click.Path(exists=True), help="Policy specs (JSON array).")
@click.option("--auto-optimize", is_flag=True, help="Grid-search learning settings and apply a clear winner.")
@click.option("--grid", "grid_path", type=click.Path(exists=True), help="Hyper policy grid for auto-optimize.")
@click.option("--feature-effectiveness", "features_only", is_flag=True, help="Emit the feature report instead.")
@click.option("--min-events", type=int, default=None, help="Evaluation floor override (production default 50000).")
@click.option("--out", "out_path", type=click.Path(), help="CSV output path; JSON and figure land alongside.")
def eval_command(model_key, data_dir, policies_path, auto_optimize, grid_path, features_only, min_events, out_path):
    """Counterfactual policy evaluation and feature-effectiveness reports."""
    service = RecommendationService.from_directory(data_dir)
    model_name = resolve_model_name(model_key)
    if features_only:
        rows = service.feature_report(model_name)
        if out_path:
            paths = write_feature_report(rows, out_path)
            click.echo(f"wrote {paths['csv']}, {paths['json']}, {paths['figure']}")
        else:
            click.echo(canonical_json(feature_report_payload(rows)), nl=False)
        return
    try:
        if auto_optimize:
            grid = _parse_policy_file(grid_path) if grid_path else _default_grid()
            report = service.auto_optimize_report(model_name, grid, min_events=min_events)
        else:
            specs = _parse_policy_file(policies_path) if policies_path else default_policy_specs()
            report = service.eval_report(model_name, specs, min_events=min_events)
    except InsufficientEvents as exc:
        click.echo(canonical_json(dict(INSUFFICIENT_EVENTS_PAYLOAD)), nl=False)
        raise SystemExit(0) from exc
    if out_path:
        paths = write_eval_report(report, out_path)
        click.echo(f"wrote {paths['csv']}, {paths['json']}, {paths['figure']}")
    else:
        click.echo(canonical_json(eval_report_payload(report)), nl=False)


def _default_grid() -> list[PolicySpec]:
    return [
        PolicySpec.hyper("Hyper1", epsilon=0.1, learning_rate=0.05),
        PolicySpec.hyper("Hyper2", epsilon=0.2, learning_rate=0.1),
        PolicySpec.hyper("Hyper3", epsilon=0.3, learning_rate=0.02),
    ]


# -- baselines -------------------------------------------------------------


@main.group()
def baseline() -> None:
    """Classical baseline recommenders."""


@baseline.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True), help="JSON {doc_id: text}.")
@click.option("--query", required=True, help="Skill text to match.")
@click.option("-k", type=int, default=5, show_default=True)
def tfidf(corpus_path, query, k):
    """Content recommendations over skill documents."""
    corpus = json.loads(Path(corpus_path).read_text(encoding="utf-8"))
    model = tfidf_fit(corpus)
    for doc_id, similarity in similar_travelers(model, query, k):
        click.echo(f"{doc_id}\t{similarity:.4f}")


@baseline.command()
@click.option("--ratings", "ratings_path", required=True, type=click.Path(exists=True), help="JSON {traveler: {facility: score}}.")
@click.option("--traveler", "traveler_id", required=True)
@click.option("--facility", "facility_id", default=None, help="Predict one facility instead of recommending.")
@click.option("-k", type=int, default=5, show_default=True)
@click.option("--neighbors", type=int, default=5, show_default=True)
@click.option("--divisor", type=click.Choice(["count", "sim_sum"]), default="count", show_default=True)
def cf(ratings_path, traveler_id, facility_id, k, neighbors, divisor):
    """User-based collaborative filtering over sentiment ratings."""
    nested = json.loads(Path(ratings_path).read_text(encoding="utf-8"))
    ratings = {(t, f): float(score) for t, row in nested.items() for f, score in row.items()}
    matrix = RatingsMatrix(ratings)
    if facility_id:
        prediction = cf_predict(matrix, traveler_id, facility_id, neighbors, divisor=divisor)
        click.echo(f"{facility_id}\t{prediction:.4f}")
        return
    for fid, prediction in recommend_facilities(matrix, traveler_id, k, n_neighbors=neighbors, divisor=divisor):
        click.echo(f"{fid}\t{prediction:.4f}")


# -- feed pipeline -----------------------------------------------------------


@main.command()
@click.option("--source", required=True, help="Fixture path or http(s) feed URL.")
@click.option("--data-dir", required=True, type=click.Path(), help="Directory for raw/jobfeed/review stores.")
@click.option("--canon", "canon_path", type=click.Path(exists=True), help="Canonical facility names (JSON array).")
@click.option("--gazetteers", "gazetteers_path", type=click.Path(exists=True), help="Gazetteer JSON override.")
def ingest(source, data_dir, canon_path, gazetteers_path):
    """Fetch raw ads, clean and map them, persist job-feed rows."""
    root = Path(data_dir)
    raw_store = JsonlStore(root / "raw.jsonl")
    jobfeed_store = JsonlStore(root / "jobfeed.jsonl")
    review_store = JsonlStore(root / "review_queue.jsonl")
    canon = json.loads(Path(canon_path).read_text(encoding="utf-8")) if canon_path else []
    gazetteers = load_gazetteers(gazetteers_path)
    records = fetch_raw(source, raw_store)
    complete = 0
    for raw in records:
        row = orchestrate(
            raw, canon or ["Unknown Facility"], gazetteers, jobfeed_store=jobfeed_store, review_store=review_store
        )
        complete += int(row.mapping_complete)
    click.echo(f"ingested {len(records)} records ({complete} fully mapped) into {root}")


@main.command()
@click.option("--src", "src_path", required=True, type=click.Path(exists=True))
@click.option("--dst", "dst_path", required=True, type=click.Path())
@click.option("--fields", required=True, help="Comma-separated fields to pseudonymize.")
@click.option("--key", required=True, help="Keyed-hash secret so joins survive scrubbing.")
def replicate(src_path, dst_path, fields, key):
    """Copy a store with identity fields scrubbed; idempotent."""
    from bidimatch.feed import replicate_scrub

    rules = ScrubRules(tuple(f.strip() for f in fields.split(",") if f.strip()), key)
    copied = replicate_scrub(JsonlStore(src_path), JsonlStore(dst_path), rules)
    click.echo(f"copied {copied} rows to {dst_path}")


# -- simulation ---------------------------------------------------------------


@main.command("simulate")
@click.option("--model", "model_key", type=click.Choice(["traveler", "job"]), required=True)
@click.option("--rounds", type=int, default=20000, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--feedback", type=click.Choice(["smartmatch", "noisy"]), default="smartmatch", show_default=True)
@click.option("--report", "report_path", required=True, type=click.Path(), help="Convergence CSV (figure alongside).")
@click.option("--data-dir", type=click.Path(), help="Persist the world, event log, and model snapshot here.")
@click.option("--jobs", "n_jobs", type=int, default=60, show_default=True)
@click.option("--travelers", "n_travelers", type=int, default=150, show_default=True)
def simulate_command(model_key, rounds, seed, feedback, report_path, data_dir, n_jobs, n_travelers):
    """Seeded synthetic-recruiter run with a convergence report."""
    model_name = ModelName.TRAVELER if model_key == "traveler" else ModelName.JOB
    spec = WorldSpec(seed=seed, n_jobs=n_jobs, n_travelers=n_travelers)
    world = generate_world(spec)
    bandit = None
    if data_dir:
        root = Path(data_dir)
        world.save(root)
        bandit = ContextualBandit(
            model_name,
            EngineConfig(),
            log_path=root / f"events-{model_name.value}.jsonl",
            rng=Random(derive_seed(seed, "bandit", model_name.value)),
            snapshot_path=root / f"model-{model_name.value}.snap",
        )
    result = simulate(model_name, rounds, world, FeedbackMode(feedback), bandit=bandit)
    if data_dir:
        result.bandit.snapshot()
    report = convergence_report(result.events)
    paths = write_convergence_report(report, report_path)
    click.echo(
        f"{model_key} model: {rounds} rounds, initial MAE {report.initial_mae:.4f}, "
        f"final MAE {report.final_mae:.4f} -> {paths['csv']}, {paths['figure']}"
    )


# -- service -------------------------------------------------------------------


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="Engine config file.")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", required=True, type=click.Path(exists=True), help="Entity stores and model state.")
@click.option("--batch-cron", default=WEEKLY_BATCH_CRON, show_default=True, help="In-process batch schedule.")
def serve(config_path, port, host, data_dir, batch_cron):
    """Run the HTTP API with background maintenance and weekly batch."""
    import uvicorn

    from bidimatch.config import engine_config_from_env

    config = load_config(config_path) if config_path else engine_config_from_env()
    match_config = load_match_config(config_path) if config_path else MatchConfig()
    service = RecommendationService.from_directory(data_dir, config=config, match_config=match_config)
    maintenance = MaintenanceThread(service, batch_cron=batch_cron)
    maintenance.start()
    app = create_app(service)
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    finally:
        maintenance.stop()
        service.save_models()


@main.command("batch-train")
@click.option("--model", "model_key", type=click.Choice(["traveler", "job"]), required=True)
@click.option("--contexts", type=int, default=25, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--data-dir", required=True, type=click.Path(exists=True))
def batch_train(model_key, contexts, seed, data_dir):
    """One batch-training pass (what the Saturday cron invokes)."""
    service = RecommendationService.from_directory(data_dir)
    model_name = resolve_model_name(model_key)
    summary = service.run_batch_training(model_name, contexts, seed)
    service.save_models()
    click.echo(
        f"batch {model_key}: {summary.contexts} contexts, {summary.rank_calls} rank calls, "
        f"{summary.rewards_sent} rewards sent"
    )


def run() -> None:
    try:
        main(standalone_mode=True)
    except BidimatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    run()
