"""Command-line front end: per-instance orchestration over a dataset plus
aggregation of the headline metrics, with plot-ready exports.

Every summary statistic is recomputable from the per-instance record files;
records are written in instance-id order regardless of worker count, so a
seeded rerun reproduces them byte for byte.
"""

from __future__ import annotations

import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from .attack import AttackGoal, AttackParams, run_greedy, run_pdp
from .bracket import bracket
from .classifiers import Classifier, connect_external, label_of, load_toy_model
from .errors import PairingError
from .io import DatasetInstance, load_dataset, load_lexicon, read_records, write_csv_column, write_records
from .metric import default_radius, estimate_pr, exact_pr
from .space import build_space
from .verify import certify

_SEED_STRIDE = 100003


def _instance_seed(seed: int, instance_id: int) -> int:
    return seed * _SEED_STRIDE + instance_id


def _build_backend(toy_model, external_cmd, external_addr) -> Classifier:
    picked = [x for x in (toy_model, external_cmd, external_addr) if x]
    if len(picked) != 1:
        raise click.UsageError(
            "choose exactly one backend: --toy-model, --external-cmd, or --external-addr"
        )
    if toy_model:
        return load_toy_model(toy_model)
    if external_cmd:
        return connect_external(command=external_cmd)
    return connect_external(address=external_addr)


def _split_correct(instances, handle: Classifier):
    """Partition instances by whether the backend already classifies them
    correctly; only correct ones are attacked/certified."""
    if not instances:
        return [], []
    scores = handle.predict_batch([inst.sentence.tokens for inst in instances])
    kept, skipped = [], []
    for inst, row in zip(instances, scores):
        (kept if label_of(row) == inst.sentence.gold_label else skipped).append(inst)
    return kept, skipped


def _run_instances(instances, fn, workers: int):
    """Apply fn to every instance, preserving order; exceptions become
    (id, error) markers instead of aborting the whole suite."""

    def guarded(inst: DatasetInstance):
        try:
            return fn(inst), None
        except Exception as exc:  # noqa: BLE001 - reported per instance
            return None, f"{type(exc).__name__}: {exc}"

    if workers <= 1:
        results = [guarded(inst) for inst in instances]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(guarded, instances))
    return results


def _emit_summary(summary: dict) -> None:
    click.echo(json.dumps(summary, sort_keys=True, indent=2))


def _finish(summary: dict, errors: list) -> None:
    _emit_summary(summary)
    if errors:
        sys.exit(1)


def _backend_options(fn):
    fn = click.option("--toy-model", type=click.Path(exists=True), default=None)(fn)
    fn = click.option("--external-cmd", type=str, default=None)(fn)
    fn = click.option("--external-addr", type=str, default=None)(fn)
    return fn


def _data_options(fn):
    fn = click.option("--dataset", type=click.Path(exists=True), required=True)(fn)
    fn = click.option("--lexicon", type=click.Path(exists=True), required=True)(fn)
    fn = click.option("--eta", type=int, default=5, show_default=True)(fn)
    return fn


@click.group()
def main():
    """Word-substitution robustness auditing."""


@main.command()
@_data_options
@_backend_options
@click.option("--method", type=click.Choice(["pdp", "greedy"]), default="pdp",
              show_default=True)
@click.option("--beam-width", type=int, default=16, show_default=True)
@click.option("--tau", type=float, default=0.25, show_default=True,
              help="Max fraction of tokens to modify.")
@click.option("--lookahead", type=int, default=8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--budget", type=int, default=None, help="Query budget per instance.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def attack(dataset, lexicon, eta, toy_model, external_cmd, external_addr, method,
           beam_width, tau, lookahead, seed, budget, workers, out):
    """Attack every correctly-classified instance; write one record each."""
    handle = _build_backend(toy_model, external_cmd, external_addr)
    lex = load_lexicon(lexicon)
    instances = load_dataset(dataset)
    kept, skipped = _split_correct(instances, handle)
    runner = run_pdp if method == "pdp" else run_greedy

    def one(inst: DatasetInstance):
        space = build_space(inst.sentence, lex, eta, inst.perturbable_from)
        params = AttackParams(
            beam_width=beam_width,
            max_ratio=tau,
            lookahead_draws=lookahead,
            seed=_instance_seed(seed, inst.id),
            query_budget=budget,
        )
        goal = AttackGoal.untargeted(inst.sentence.gold_label)
        outcome = runner(space, handle, goal, params)
        return outcome.to_record(inst.id, len(inst.sentence))

    results = _run_instances(kept, one, workers)
    records = [r for r, err in results if err is None]
    errors = [(inst.id, err) for inst, (r, err) in zip(kept, results) if err]
    write_records(out, records)

    succ = [r for r in records if r["success"]]
    summary = {
        "command": "attack",
        "method": method,
        "instances": len(instances),
        "skipped": len(skipped),
        "skipped_ids": [inst.id for inst in skipped],
        "attacks": len(records),
        "successes": len(succ),
        "success_rate": (len(succ) / len(records)) if records else None,
        "mean_substitutions": (
            sum(r["substitutions"] for r in succ) / len(succ) if succ else None
        ),
        "percent_substituted": (
            sum(100.0 * r["ratio"] for r in succ) / len(succ) if succ else None
        ),
        "errors": [{"id": i, "error": e} for i, e in errors],
        "out": str(out),
    }
    _finish(summary, errors)


@main.command("certify")
@_data_options
@_backend_options
@click.option("--radius", type=int, default=None,
              help="Single radius; default sweeps 1..max-radius.")
@click.option("--max-radius", type=int, default=4, show_default=True)
@click.option("--budget", type=int, default=None, help="Scored-text budget per verdict.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--timing", is_flag=True, default=False,
              help="Include elapsed_ms in record files (breaks byte-determinism).")
@click.option("--out", type=click.Path(), required=True)
def certify_cmd(dataset, lexicon, eta, toy_model, external_cmd, external_addr,
                radius, max_radius, budget, workers, timing, out):
    """Certify each instance at every radius in the sweep."""
    handle = _build_backend(toy_model, external_cmd, external_addr)
    lex = load_lexicon(lexicon)
    instances = load_dataset(dataset)
    kept, skipped = _split_correct(instances, handle)
    radii = [radius] if radius is not None else list(range(1, max_radius + 1))

    def one(inst: DatasetInstance):
        space = build_space(inst.sentence, lex, eta, inst.perturbable_from)
        out_records = []
        for r in radii:
            t0 = time.perf_counter()
            verdict = certify(space, handle, r, budget=budget)
            elapsed = (time.perf_counter() - t0) * 1000.0
            record = verdict.to_record(inst.id, elapsed_ms=elapsed if timing else None)
            record["_elapsed"] = elapsed
            out_records.append(record)
        return out_records

    results = _run_instances(kept, one, workers)
    errors = [(inst.id, err) for inst, (r, err) in zip(kept, results) if err]
    records = [rec for r, err in results if err is None for rec in r]
    elapsed_by_r = {r: [] for r in radii}
    for rec in records:
        elapsed_by_r[rec["radius"]].append(rec.pop("_elapsed"))
    write_records(out, records)

    def pct(kind, r):
        at_r = [rec for rec in records if rec["radius"] == r]
        if not at_r:
            return None
        return 100.0 * sum(rec["verdict"] == kind for rec in at_r) / len(at_r)

    summary = {
        "command": "certify",
        "instances": len(instances),
        "skipped": len(skipped),
        "skipped_ids": [inst.id for inst in skipped],
        "certified_instances": len([r for r, e in results if e is None]),
        "radii": radii,
        "percent_falsified": {str(r): pct("falsified", r) for r in radii},
        "percent_certified": {str(r): pct("certified", r) for r in radii},
        "percent_budget": {str(r): pct("budget", r) for r in radii},
        "mean_elapsed_ms": {
            str(r): (sum(v) / len(v) if v else None) for r, v in elapsed_by_r.items()
        },
        "errors": [{"id": i, "error": e} for i, e in errors],
        "out": str(out),
    }
    _finish(summary, errors)


@main.command()
@_data_options
@_backend_options
@click.option("--radius", type=int, default=None,
              help="Fixed radius; default is ceil(0.25 * length) per instance.")
@click.option("--epsilon", type=float, default=0.025, show_default=True)
@click.option("--delta", type=float, default=0.005, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threshold", type=float, default=0.9, show_default=True,
              help="Report the fraction of instances with estimate above this.")
@click.option("--exact", is_flag=True, default=False,
              help="Full enumeration instead of sampling (small spaces only).")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def pr(dataset, lexicon, eta, toy_model, external_cmd, external_addr, radius,
       epsilon, delta, seed, threshold, exact, workers, out):
    """Estimate the robustness score per instance; export the score column as CSV."""
    handle = _build_backend(toy_model, external_cmd, external_addr)
    lex = load_lexicon(lexicon)
    instances = load_dataset(dataset)
    kept, skipped = _split_correct(instances, handle)

    def one(inst: DatasetInstance):
        space = build_space(inst.sentence, lex, eta, inst.perturbable_from)
        r = radius if radius is not None else default_radius(len(inst.sentence))
        if exact:
            value = exact_pr(space, handle, r)
            return {
                "id": inst.id,
                "radius": min(r, space.m),
                "pr_hat": float(value),
                "epsilon": None,
                "delta": None,
                "samples": value.denominator,
                "successes": value.numerator,
                "exact": True,
            }
        rng = random.Random(_instance_seed(seed, inst.id))
        est = estimate_pr(space, handle, r, epsilon, delta, rng)
        return est.to_record(inst.id)

    results = _run_instances(kept, one, workers)
    errors = [(inst.id, err) for inst, (r, err) in zip(kept, results) if err]
    records = [r for r, err in results if err is None]
    write_records(out, records)
    write_csv_column(
        Path(out).with_suffix(".csv"), "pr_hat", [r["pr_hat"] for r in records]
    )

    above = [r for r in records if r["pr_hat"] > threshold]
    summary = {
        "command": "pr",
        "instances": len(instances),
        "skipped": len(skipped),
        "skipped_ids": [inst.id for inst in skipped],
        "estimates": len(records),
        "threshold": threshold,
        "fraction_above_threshold": (len(above) / len(records)) if records else None,
        "mean_pr": (sum(r["pr_hat"] for r in records) / len(records)) if records else None,
        "errors": [{"id": i, "error": e} for i, e in errors],
        "out": str(out),
    }
    _finish(summary, errors)


@main.command("radius")
@_data_options
@_backend_options
@click.option("--beam-width", type=int, default=16, show_default=True)
@click.option("--tau", type=float, default=0.25, show_default=True)
@click.option("--lookahead", type=int, default=8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-radius", type=int, default=4, show_default=True)
@click.option("--budget", type=int, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def radius_cmd(dataset, lexicon, eta, toy_model, external_cmd, external_addr,
               beam_width, tau, lookahead, seed, max_radius, budget, workers, out):
    """Bracket the maximum safe radius per instance (attack + certification)."""
    handle = _build_backend(toy_model, external_cmd, external_addr)
    lex = load_lexicon(lexicon)
    instances = load_dataset(dataset)
    kept, skipped = _split_correct(instances, handle)

    def one(inst: DatasetInstance):
        space = build_space(inst.sentence, lex, eta, inst.perturbable_from)
        params = AttackParams(
            beam_width=beam_width,
            max_ratio=tau,
            lookahead_draws=lookahead,
            seed=_instance_seed(seed, inst.id),
            query_budget=budget,
        )
        result = bracket(space, handle, params, max_certify_radius=max_radius,
                         budget=budget)
        return result.to_record(inst.id)

    results = _run_instances(kept, one, workers)
    errors = [(inst.id, err) for inst, (r, err) in zip(kept, results) if err]
    records = [r for r, err in results if err is None]
    write_records(out, records)

    uppers = [r["upper"] for r in records if r["upper"] is not None]
    summary = {
        "command": "radius",
        "instances": len(instances),
        "skipped": len(skipped),
        "skipped_ids": [inst.id for inst in skipped],
        "brackets": len(records),
        "bracketed": sum(r["status"] == "bracketed" for r in records),
        "lower_only": sum(r["status"] == "lower_only" for r in records),
        "inconsistent": sum(r["status"] == "inconsistent" for r in records),
        "mean_lower": (
            sum(r["lower"] for r in records) / len(records) if records else None
        ),
        "mean_upper": (sum(uppers) / len(uppers)) if uppers else None,
        "errors": [{"id": i, "error": e} for i, e in errors],
        "out": str(out),
    }
    _finish(summary, errors)


def compare_wins(records_a: list[dict], records_b: list[dict]) -> dict:
    """Strict-win counts between two attack runs over the same instances.

    A wins an instance when both succeed and A used strictly fewer
    substitutions; equal counts tie. Instances where only one side succeeds
    are tallied separately, not counted as wins.
    """
    by_a = {r["id"]: r for r in records_a}
    by_b = {r["id"]: r for r in records_b}
    if set(by_a) != set(by_b):
        raise PairingError("result files cover different instance ids")
    wins_a = wins_b = ties = only_a = only_b = both_failed = 0
    for instance_id, ra in by_a.items():
        rb = by_b[instance_id]
        if ra["success"] and rb["success"]:
            if ra["substitutions"] < rb["substitutions"]:
                wins_a += 1
            elif rb["substitutions"] < ra["substitutions"]:
                wins_b += 1
            else:
                ties += 1
        elif ra["success"]:
            only_a += 1
        elif rb["success"]:
            only_b += 1
        else:
            both_failed += 1
    return {
        "instances": len(by_a),
        "wins_a": wins_a,
        "wins_b": wins_b,
        "ties": ties,
        "only_a": only_a,
        "only_b": only_b,
        "both_failed": both_failed,
    }


@main.command()
@click.option("--a", "file_a", type=click.Path(exists=True), required=True)
@click.option("--b", "file_b", type=click.Path(exists=True), required=True)
def report(file_a, file_b):
    """Compare two attack-result files by substitution count."""
    summary = {"command": "report", "a": str(file_a), "b": str(file_b)}
    summary.update(compare_wins(read_records(file_a), read_records(file_b)))
    _emit_summary(summary)


if __name__ == "__main__":
    main()
