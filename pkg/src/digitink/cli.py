"""Command-line front end.

Every subcommand prints its resolved configuration (seeds included) before
acting, and artifact-producing commands write only inside a run directory
named <command>-<timestamp>-seed<seed> under --out.  Flags can also come
from environment variables named DIGITINK_<COMMAND>_<FLAG> (flag beats
env beats default).

Exit codes: 0 success, 2 usage, 3 missing/invalid input file, 4 failed
audit, 1 any other runtime failure.
"""

from __future__ import annotations

import functools
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

import click

from . import checkpoint as ckpt_io
from . import dataset as dataset_io
from . import experiments, server, synth
from .errors import AuditError, DatasetFormatError, DigitinkError
from .models import build_model, count_parameters
from .models import audit as audit_model
from .training import (
    TrainConfig,
    evaluate,
    save_history_csv,
    save_metrics_json,
    train,
)

EXIT_INPUT = 3
EXIT_AUDIT = 4


def _print_config(name: str, params: dict) -> None:
    resolved = {k: (str(v) if isinstance(v, Path) else v) for k, v in params.items()}
    click.echo(f"resolved config [{name}]: {json.dumps(resolved, sort_keys=True)}")


def _run_dir(out: Path, command: str, seed: int) -> Path:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    path = Path(out) / f"{command}-{stamp}-seed{seed}"
    path.mkdir(parents=True, exist_ok=False)
    return path


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (FileNotFoundError, DatasetFormatError) as exc:
            click.echo(f"error code=input message={exc}", err=True)
            sys.exit(EXIT_INPUT)
        except AuditError as exc:
            click.echo(f"error code=audit message={exc}", err=True)
            sys.exit(EXIT_AUDIT)
        except (DigitinkError, ValueError) as exc:
            click.echo(f"error code=runtime message={exc}", err=True)
            sys.exit(1)

    return wrapper


def train_options(fn):
    for option in reversed(
        [
            click.option("--model", default="polar1d", type=click.Choice(["bitmap2d", "polar1d"]), show_default=True),
            click.option("--input", "input_mode", default="both", type=click.Choice(["angle", "distance", "both"]), show_default=True),
            click.option("--lr", "base_learning_rate", default=0.01, show_default=True, help="base learning rate"),
            click.option("--momentum", default=0.9, show_default=True),
            click.option("--decay", "decay_rate", default=0.95, show_default=True, help="per-epoch staircase decay"),
            click.option("--batch", "batch_size", default=64, show_default=True),
            click.option("--max-epochs", default=120, show_default=True),
            click.option("--patience", default=18, show_default=True),
            click.option("--seed", default=0, show_default=True),
            click.option("--split-seed", default=0, show_default=True),
            click.option("--nesterov", is_flag=True, default=False),
        ]
    ):
        fn = option(fn)
    return fn


def _config_from(params: dict) -> TrainConfig:
    fields = TrainConfig.__dataclass_fields__
    return TrainConfig(**{k: v for k, v in params.items() if k in fields})


@click.group()
def main():
    """Online digit recognition from touchscreen strokes."""


@main.command("synth")
@click.option("--count", required=True, type=int)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--profile", default="default", type=click.Choice(["default", "none"]), show_default=True, help="'none' disables jitter/noise/resampling")
@_handle_errors
def synth_cmd(count, seed, out, profile):
    """Generate a balanced synthetic dataset file."""
    _print_config("synth", {"count": count, "seed": seed, "out": out, "profile": profile})
    noise = synth.NoiseProfile.none() if profile == "none" else synth.NoiseProfile()
    data = synth.generate(count, seed, noise)
    dataset_io.save_dataset(out, data)
    click.echo(f"wrote {len(data.glyphs)} glyphs to {out}")


@main.command("stats")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(path_type=Path))
@_handle_errors
def stats_cmd(dataset_path):
    """Print dataset statistics as JSON."""
    _print_config("stats", {"dataset": dataset_path})
    data = dataset_io.load_dataset(dataset_path)
    click.echo(json.dumps(dataset_io.dataset_stats(data), indent=2, sort_keys=True))


@main.command("train")
@train_options
@click.option("--dataset", "dataset_path", required=True, type=click.Path(path_type=Path))
@click.option("--out", default="runs", show_default=True, type=click.Path(path_type=Path))
@_handle_errors
def train_cmd(dataset_path, out, **params):
    """Train a model; writes checkpoint.ckpt and history.csv to a run dir."""
    config = _config_from(params)
    _print_config("train", {**asdict(config), "dataset": dataset_path, "out": out})
    data = dataset_io.load_dataset(dataset_path)
    run_dir = _run_dir(out, "train", config.seed)
    result = train(config, data, log=click.echo)
    ckpt_io.save(run_dir / "checkpoint.ckpt", result.checkpoint)
    save_history_csv(run_dir / "history.csv", result.history)
    (run_dir / "config.json").write_text(json.dumps(asdict(config), indent=2, sort_keys=True) + "\n")
    metrics = evaluate(result.checkpoint, data, "test")
    save_metrics_json(run_dir / "test_metrics.json", metrics)
    click.echo(
        f"best epoch {result.best_epoch} (val {result.best_val_accuracy:.4f}); "
        f"test accuracy {metrics.accuracy:.4f}; artifacts in {run_dir}"
    )


@main.command("eval")
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(path_type=Path))
@click.option("--dataset", "dataset_path", required=True, type=click.Path(path_type=Path))
@click.option("--bucket", default="test", type=click.Choice(["train", "validation", "test"]), show_default=True)
@click.option("--split-seed", default=None, type=int, help="defaults to the checkpoint's recorded seed")
@click.option("--out", default="runs", show_default=True, type=click.Path(path_type=Path))
@_handle_errors
def eval_cmd(checkpoint_path, dataset_path, bucket, split_seed, out):
    """Evaluate a checkpoint on one split bucket."""
    _print_config(
        "eval",
        {"checkpoint": checkpoint_path, "dataset": dataset_path, "bucket": bucket, "split_seed": split_seed},
    )
    ckpt = ckpt_io.load(checkpoint_path)
    data = dataset_io.load_dataset(dataset_path)
    metrics = evaluate(ckpt, data, bucket, split_seed=split_seed)
    run_dir = _run_dir(out, "eval", ckpt.train_seed)
    save_metrics_json(run_dir / "metrics.json", metrics)
    click.echo(f"accuracy {metrics.accuracy:.4f}; metrics in {run_dir}")


@main.command("ablate")
@train_options
@click.option("--dataset", "dataset_path", required=True, type=click.Path(path_type=Path))
@click.option("--out", default="runs", show_default=True, type=click.Path(path_type=Path))
@_handle_errors
def ablate_cmd(dataset_path, out, **params):
    """Train the 1D model with angle-only, distance-only and both inputs."""
    config = _config_from(params)
    _print_config("ablate", {**asdict(config), "dataset": dataset_path, "out": out})
    data = dataset_io.load_dataset(dataset_path)
    run_dir = _run_dir(out, "ablate", config.seed)
    result = experiments.ablation_run(config, data, log=click.echo)
    (run_dir / "ablation.json").write_text(json.dumps(result.rows, indent=2, sort_keys=True) + "\n")
    for mode, train_result in result.results.items():
        ckpt_io.save(run_dir / f"checkpoint-{mode}.ckpt", train_result.checkpoint)
    click.echo(result.format_table())
    click.echo(f"artifacts in {run_dir}")


@main.command("curve")
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(path_type=Path))
@click.option("--dataset", "dataset_path", required=True, type=click.Path(path_type=Path))
@click.option("--fractions", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0", show_default=True)
@click.option("--out", default="runs", show_default=True, type=click.Path(path_type=Path))
@_handle_errors
def curve_cmd(checkpoint_path, dataset_path, fractions, out):
    """Accuracy vs stroke-completion curve on the test bucket."""
    fracs = [float(f) for f in fractions.split(",") if f.strip()]
    _print_config(
        "curve",
        {"checkpoint": checkpoint_path, "dataset": dataset_path, "fractions": fracs},
    )
    ckpt = ckpt_io.load(checkpoint_path)
    data = dataset_io.load_dataset(dataset_path)
    curve = experiments.completion_curve(ckpt, data, fracs)
    run_dir = _run_dir(out, "curve", ckpt.train_seed)
    experiments.save_curve_csv(run_dir / "curve.csv", curve)
    experiments.plot_curve(run_dir / "curve.png", curve)
    rho = experiments.spearman_rho(curve.fractions(), curve.accuracies())
    for fraction, accuracy in curve.points:
        click.echo(f"completion {fraction:.2f}: accuracy {accuracy:.4f}")
    click.echo(f"spearman rho {rho:.3f}; artifacts in {run_dir}")


@main.command("gallery")
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(path_type=Path))
@click.option("--dataset", "dataset_path", required=True, type=click.Path(path_type=Path))
@click.option("-k", "--count", "k", default=12, show_default=True)
@click.option("--out", default="runs", show_default=True, type=click.Path(path_type=Path))
@_handle_errors
def gallery_cmd(checkpoint_path, dataset_path, k, out):
    """Render the k most confidently wrong test predictions."""
    _print_config("gallery", {"checkpoint": checkpoint_path, "dataset": dataset_path, "k": k})
    ckpt = ckpt_io.load(checkpoint_path)
    data = dataset_io.load_dataset(dataset_path)
    run_dir = _run_dir(out, "gallery", ckpt.train_seed)
    entries = experiments.error_gallery(ckpt, data, k, out_path=run_dir / "gallery.png")
    (run_dir / "gallery.json").write_text(
        json.dumps([asdict(e) for e in entries], indent=2) + "\n"
    )
    click.echo(f"{len(entries)} misclassifications rendered to {run_dir}/gallery.png")


@main.command("audit")
@click.option("--model", default="bitmap2d", type=click.Choice(["bitmap2d", "polar1d"]), show_default=True)
@click.option("--input", "input_mode", default="both", type=click.Choice(["angle", "distance", "both"]), show_default=True)
@_handle_errors
def audit_cmd(model, input_mode):
    """Check a model's shapes and parameter counts against the reference."""
    _print_config("audit", {"model": model, "input": input_mode})
    spec = build_model(model, input_mode)
    report = audit_model(spec)
    click.echo(report.format_table())
    click.echo(f"closed-form parameter total: {count_parameters(spec):,}")
    if not report.passed:
        raise AuditError("; ".join(report.failures))


@main.command("serve")
@click.option("--checkpoint", "checkpoint_paths", required=True, multiple=True, type=click.Path(path_type=Path))
@click.option("--bind", default="127.0.0.1:8720", show_default=True)
@click.option("--static-dir", default=None, type=click.Path(path_type=Path), help="directory with the built web UI")
@_handle_errors
def serve_cmd(checkpoint_paths, bind, static_dir):
    """Serve loaded checkpoints over HTTP until interrupted."""
    _print_config(
        "serve",
        {"checkpoints": [str(p) for p in checkpoint_paths], "bind": bind, "static_dir": static_dir},
    )
    for path in checkpoint_paths:
        if not Path(path).exists():
            raise FileNotFoundError(path)
    server.serve(list(checkpoint_paths), bind=bind, static_dir=static_dir)


@main.command("infer-file")
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(path_type=Path))
@click.option("--glyph", "glyph_path", required=True, type=click.Path(path_type=Path), help="JSON file with a strokes array (request schema, model field optional)")
@_handle_errors
def infer_file_cmd(checkpoint_path, glyph_path):
    """Run one inference without the HTTP service."""
    _print_config("infer-file", {"checkpoint": checkpoint_path, "glyph": glyph_path})
    glyph_path = Path(glyph_path)
    if not glyph_path.exists():
        raise FileNotFoundError(glyph_path)
    model = server.load_model(checkpoint_path)
    body = json.loads(glyph_path.read_text())
    body["model"] = model.name
    status, payload = server.run_inference({model.name: model}, body)
    click.echo(json.dumps(payload, indent=2, sort_keys=True))
    if status != 200:
        raise DigitinkError(f"inference failed with status {status}")


def entrypoint():
    main(auto_envvar_prefix="DIGITINK")


if __name__ == "__main__":
    entrypoint()
