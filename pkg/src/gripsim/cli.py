"""Command line entry points: collect | train | eval | grasp | perturb |
master-slave | serve."""

from __future__ import annotations

import asyncio
import json
import statistics
import sys
from pathlib import Path

import click

from .config import load_config
from .prediction import (
    Classifier,
    TrainConfig,
    build_dataset,
    evaluate,
    load_dataset,
    load_records,
    save_dataset,
    save_records,
    split_records,
    train,
)
from .report import export_report, export_trace
from .trials import (
    Override,
    gen_perturbation_schedule,
    run_grasp_trial,
    run_master_slave,
    run_perturbation_trial,
)


def _common(func):
    func = click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                        help="YAML run configuration")(func)
    func = click.option("--seed", type=int, default=0, show_default=True)(func)
    return func


@click.group()
def main():
    """Planar multi-finger grasp simulator and independent grip controllers."""


@main.command()
@_common
@click.option("--out", type=click.Path(), required=True, help="output directory")
def collect(config_path, seed, out):
    """Run the training-data collection protocol and write the dataset."""
    from .collection import collect_training_data

    cfg = load_config(config_path)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    trials, records = collect_training_data(cfg, seed)
    failed = sum(1 for t in trials if t.failed)
    save_records(records, out_dir / "records.ndjson")
    samples = build_dataset(records, cfg.protocol.horizon)
    save_dataset(samples, out_dir / "dataset.ndjson")
    click.echo(
        f"collected {len(trials)} trials ({failed} failed), "
        f"{len(records)} finger records, {len(samples)} samples -> {out_dir}"
    )


@main.command("train")
@_common
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--out", "model_path", type=click.Path(), required=True)
@click.option("--kind", type=click.Choice(["multinomial-linear", "k-nearest-neighbor"]),
              default="multinomial-linear", show_default=True)
def train_cmd(config_path, seed, data_dir, model_path, kind):
    """Train a slip classifier from a collected dataset directory."""
    cfg = load_config(config_path)
    records = load_records(Path(data_dir) / "records.ndjson")
    train_recs, _ = split_records(records, seed=seed)
    dataset = build_dataset(train_recs, cfg.protocol.horizon)
    tc = cfg.training
    tc.kind, tc.seed = kind, seed
    model = train(dataset, tc)
    model.save(model_path)
    click.echo(f"trained {kind} on {len(dataset)} samples -> {model_path}")


@main.command("eval")
@_common
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
def eval_cmd(config_path, seed, model_path, data_dir):
    """Evaluate a model on the held-out split of a dataset directory."""
    cfg = load_config(config_path)
    model = Classifier.load(model_path)
    records = load_records(Path(data_dir) / "records.ndjson")
    _, holdout = split_records(records, seed=seed)
    report = evaluate(model, holdout, cfg.protocol.horizon)
    doc = report.to_json()
    if report.onset_leads:
        doc["median_lead"] = statistics.median(report.onset_leads)
    click.echo(json.dumps(doc, indent=2))


@main.command()
@_common
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--fingers", type=int, default=2, show_default=True)
@click.option("--trials", "n_trials", type=int, default=5, show_default=True)
@click.option("--duration", type=float, default=10.0, show_default=True)
def grasp(config_path, seed, model_path, out, fingers, n_trials, duration):
    """Grasp-stabilization trials over the generated test object set."""
    from .objects import generated_test_objects

    cfg = load_config(config_path)
    model = Classifier.load(model_path)
    results = []
    for spec in generated_test_objects():
        for rep in range(n_trials):
            results.append(
                run_grasp_trial(
                    spec, fingers, model, cfg, seed + rep, duration,
                    trial_id=f"grasp-{spec.name}-f{fingers}-r{rep}",
                )
            )
    export_report(results, out)
    stable = sum(r.stable for r in results)
    click.echo(f"{stable}/{len(results)} trials stable -> {out}")


@main.command()
@_common
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--fingers", type=int, default=3, show_default=True)
@click.option("--duration", type=float, default=30.0, show_default=True)
def perturb(config_path, seed, model_path, out, fingers, duration):
    """One 30 s perturbation trial with an irregular pulse schedule."""
    from .objects import generated_test_objects

    cfg = load_config(config_path)
    model = Classifier.load(model_path)
    spec = generated_test_objects()[8]  # mid-mass, high-friction object
    result = run_perturbation_trial(spec, fingers, model, cfg, seed, duration=duration)
    out_dir = Path(out)
    export_report([result], out_dir)
    export_trace(result, out_dir / "trace.ndjson")
    click.echo(f"stable={result.stable} schedule={len(result.schedule)} pulses -> {out}")


@main.command("master-slave")
@_common
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--retract-finger", type=int, default=0, show_default=True)
def master_slave(config_path, seed, model_path, out, retract_finger):
    """3-finger grasp with one finger scripted to full retraction."""
    from .objects import generated_test_objects
    from .trials import contact_angles
    import math

    cfg = load_config(config_path)
    model = Classifier.load(model_path)
    spec = generated_test_objects()[4]
    ang = contact_angles(3)[retract_finger]
    script = [
        Override(
            finger_id=retract_finger,
            t_start=3.0,
            t_end=10.0,
            velocity=(0.01 * math.cos(ang), 0.01 * math.sin(ang)),
        )
    ]
    result = run_master_slave(spec, 3, model, cfg, seed, script)
    out_dir = Path(out)
    export_report([result], out_dir)
    export_trace(result, out_dir / "trace.ndjson")
    click.echo(f"stable={result.stable} -> {out}")


@main.command()
@_common
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--log-dir", type=click.Path(), default=None)
def serve(config_path, seed, model_path, host, port, log_dir):
    """Serve a live interactive session over websockets."""
    from .server import serve_session

    cfg = load_config(config_path)
    model = Classifier.load(model_path)
    click.echo(f"serving on ws://{host}:{port}")
    try:
        asyncio.run(serve_session(host, port, model, cfg, seed=seed, log_dir=log_dir))
    except KeyboardInterrupt:
        click.echo("stopped")


if __name__ == "__main__":
    sys.exit(main())
