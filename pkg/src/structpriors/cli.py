"""Command-line entry point.

Subcommands: sample-filters, eval-entropy, eval-correlation, eval-cappa,
train, ablation. A run is configured by a flat-sectioned JSON file plus
``--section.key=value`` overrides; the fully resolved config is echoed into
the output directory so every run can be reproduced from its artifacts.
Thread count is a pure runtime flag (``--threads``) and never enters
configs or reports: results are independent of it.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import datasets as ds
from . import evaluation as ev
from . import priors
from .errors import ConfigError, StructPriorsError
from .evaluation.reports import TIMING_KEY, config_fingerprint, write_csv, write_json_report
from .evaluation.training import TrainHyperparams
from .rng import SeededRng
from .tensor_nn import build_cnn, build_fcnn, infer_shapes

EXPERIMENTS = ("sample-filters", "eval-entropy", "eval-correlation", "eval-cappa", "train", "ablation")

DEFAULT_CONFIG: dict = {
    "experiment": None,  # filled from the subcommand
    "seed": None,  # must be explicit; no silent time-based seeding
    "out_dir": "runs",
    "dataset": {
        "name": "synthetic",  # mnist | fashion-mnist | cifar10 | synthetic | synthetic-rgb
        "data_dir": None,  # directory holding the real binary files
        "train_size": 12000,  # synthetic generation sizes
        "test_size": 2000,
        "subsample": None,  # stratified subsample of the evaluation split
        "class_a": 0,  # binary task (eval-cappa)
        "class_b": 1,
        "n_per_class": 1000,
    },
    "arch": {
        "family": "cnn",  # cnn | fcnn
        "depth": 1,
        "first_filters": 16,
        "width_cap": None,
        "first_width": 5,
        "later_width": 3,
        "hidden_units": 1024,
    },
    "prior": {
        "names": ["iid", "gabor"],  # any of iid, gabor, feats, gabor-feats
        "sigma_g": 0.0,
        "centered": True,
        "exemplars_per_class": 20,
        "final_std_mode": "covariance",  # N(mu, 0.1 I): covariance -> std sqrt(0.1); "std" -> 0.1
        "output_index": 0,  # correlation signal
    },
    "scale": {
        "draws": 100,  # entropy / cappa prior draws
        "corr_draws": 50,
        "pairs": 1000,
        "runs": 10,  # training runs (seeds)
        "ablation_runs": 5,
        "epochs": 3,
        "eval_every": 50,
        "batch_size": 512,  # evaluation forward chunk
        "test_subsample": 2000,
        "noisy_sigma": 0.02,  # ablation's noisy Gabor variant
    },
    "adam": {"lr": 1e-3, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8, "batch_size": 128},
    "filters": {"n_filters": 16, "filter_width": 5, "color": "grayscale", "sigma_g": 0.0},
}

PAPER_SCALE = {"draws": 500, "corr_draws": 50, "pairs": 10000, "runs": 10, "subsample": None}

# Standard file names inside a dataset directory.
IDX_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}
CIFAR_TRAIN = tuple(f"data_batch_{i}.bin" for i in range(1, 6))
CIFAR_TEST = ("test_batch.bin",)


def _coerce(raw: str):
    """Parse an override value: JSON if it parses, bare string otherwise."""
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_overrides(config: dict, overrides: list[str]) -> dict:
    """Apply --section.key=value (or --key=value) flags onto a config dict.

    Keys are validated against the config schema (DEFAULT_CONFIG); sections
    absent from the user's config are created.
    """
    for item in overrides:
        if not item.startswith("--") or "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form --section.key=value")
        dotted, _, raw = item[2:].partition("=")
        keys = dotted.split(".")
        schema = DEFAULT_CONFIG
        node = config
        for k in keys[:-1]:
            if k not in schema or not isinstance(schema[k], dict):
                raise ConfigError(f"unknown config section {k!r} in {dotted!r}")
            schema = schema[k]
            node = node.setdefault(k, {})
        if keys[-1] not in schema:
            raise ConfigError(f"unknown config field {dotted!r}")
        node[keys[-1]] = _coerce(raw)
    return config


def validate(config: dict) -> dict:
    """Fill defaults, check invariants, and return the normalized config."""
    merged = copy.deepcopy(DEFAULT_CONFIG)
    for key, value in config.items():
        if key not in merged:
            raise ConfigError(f"unknown config field {key!r}")
        if isinstance(merged[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config field {key!r} must be a section")
            for sub, subval in value.items():
                if sub not in merged[key]:
                    raise ConfigError(f"unknown config field {key}.{sub!r}")
                merged[key][sub] = subval
        else:
            merged[key] = value

    if merged["experiment"] not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {merged['experiment']!r}")
    if merged["seed"] is None:
        raise ConfigError("seed is required (explicit seeding only)")
    if not isinstance(merged["seed"], int):
        raise ConfigError("seed must be an integer")
    d = merged["dataset"]
    if d["name"] not in ("mnist", "fashion-mnist", "cifar10", "synthetic", "synthetic-rgb"):
        raise ConfigError(f"dataset.name {d['name']!r} is unknown")
    if d["name"] in ("mnist", "fashion-mnist", "cifar10"):
        if not d["data_dir"]:
            raise ConfigError(f"dataset.data_dir is required for {d['name']} (uncompressed files)")
        if not Path(d["data_dir"]).is_dir():
            raise ConfigError(f"dataset.data_dir {d['data_dir']!r} does not exist")
    a = merged["arch"]
    if a["family"] not in ("cnn", "fcnn"):
        raise ConfigError(f"arch.family {a['family']!r} is unknown")
    if a["depth"] < 1:
        raise ConfigError("arch.depth must be >= 1")
    p = merged["prior"]
    if isinstance(p["names"], str):
        p["names"] = [p["names"]]
    for name in p["names"]:
        if name not in ("iid", "gabor", "feats", "gabor-feats"):
            raise ConfigError(f"prior name {name!r} is unknown")
    if p["sigma_g"] < 0:
        raise ConfigError("prior.sigma_g must be >= 0")
    if p["final_std_mode"] not in ("covariance", "std"):
        raise ConfigError("prior.final_std_mode must be 'covariance' or 'std'")
    if merged["filters"]["sigma_g"] < 0:
        raise ConfigError("filters.sigma_g must be >= 0")
    if merged["filters"]["color"] not in ("grayscale", "rgb"):
        raise ConfigError("filters.color must be 'grayscale' or 'rgb'")
    s = merged["scale"]
    for field in ("draws", "corr_draws", "pairs", "runs", "ablation_runs", "epochs", "eval_every", "batch_size"):
        if s[field] < 1:
            raise ConfigError(f"scale.{field} must be >= 1")
    return merged


def final_weight_std(prior_cfg: dict) -> float:
    return math.sqrt(0.1) if prior_cfg["final_std_mode"] == "covariance" else 0.1


def load_datasets(config: dict) -> tuple:
    """(train, test) datasets per the config."""
    d = config["dataset"]
    name = d["name"]
    if name in ("synthetic", "synthetic-rgb"):
        rng = SeededRng(config["seed"], "dataset")
        color = name.endswith("rgb")
        train = ds.make_synthetic(rng.child("train"), d["train_size"], color=color, split="train")
        test = ds.make_synthetic(rng.child("test"), d["test_size"], color=color, split="test")
        return train, test
    root = Path(d["data_dir"])
    if name in ("mnist", "fashion-mnist"):
        train = ds.load_idx(root / IDX_FILES["train"][0], root / IDX_FILES["train"][1], "train")
        test = ds.load_idx(root / IDX_FILES["test"][0], root / IDX_FILES["test"][1], "test")
        return train, test
    train = ds.load_cifar10([root / f for f in CIFAR_TRAIN], "train")
    test = ds.load_cifar10([root / f for f in CIFAR_TEST], "test")
    return train, test


def build_network(config: dict, input_shape: tuple[int, int, int], n_outputs: int):
    a = config["arch"]
    if a["family"] == "fcnn":
        return build_fcnn(input_shape, a["depth"], n_outputs, a["hidden_units"])
    return build_cnn(
        input_shape,
        a["depth"],
        n_outputs,
        first_filters=a["first_filters"],
        width_cap=a["width_cap"],
        first_width=a["first_width"],
        later_width=a["later_width"],
    )


def make_prior(config: dict, net, name: str) -> priors.PriorSpec:
    p = config["prior"]
    return priors.make_prior_spec(
        net,
        name,
        sigma_g=p["sigma_g"],
        exemplars_per_class=p["exemplars_per_class"],
        weight_std=final_weight_std(p),
        centered=p["centered"],
    )


def run_dir_name(config: dict) -> str:
    prior_tag = "+".join(config["prior"]["names"])
    exp = config["experiment"].replace("eval-", "").replace("sample-", "")
    return (
        f"{exp}_{config['dataset']['name']}_{config['arch']['depth']}layer_"
        f"{prior_tag}_{config['seed']}"
    )


def _needs_exemplars(names) -> bool:
    return any(n in ("feats", "gabor-feats") for n in names)


def _report_config(config: dict, extra: dict | None = None) -> dict:
    """Config block embedded in reports (science fields only, no paths)."""
    block = {
        "experiment": config["experiment"],
        "seed": config["seed"],
        "dataset": config["dataset"],
        "arch": config["arch"],
        "prior": config["prior"],
        "scale": config["scale"],
        "adam": config["adam"],
    }
    if config["experiment"] == "sample-filters":
        block["filters"] = config["filters"]
    if extra:
        block = {**block, **extra}
    return block


def _exemplars_for(config, rng, train, names):
    if not _needs_exemplars(names):
        return None
    return ds.sample_exemplars(rng.child("exemplars"), train, config["prior"]["exemplars_per_class"])


def run_sample_filters(config: dict, out: Path, rng: SeededRng, threads: int) -> str:
    f = config["filters"]
    in_channels = 3 if f["color"] == "rgb" else 1
    bank = priors.sample_gabor_bank(
        rng.child("filters"),
        f["n_filters"],
        f["filter_width"],
        in_channels,
        sigma_g=f["sigma_g"],
        centered=config["prior"]["centered"],
    )
    paths = priors.export_filter_bank(out / "filters", bank)
    payload = {
        "kind": "filter_bank",
        "n_filters": f["n_filters"],
        "filter_width": f["filter_width"],
        "color": f["color"],
        "sigma_g": f["sigma_g"],
        "files": [p.name for p in paths],
        "config": _report_config(config),
        "fingerprint": config_fingerprint(_report_config(config)),
    }
    write_json_report(out / "report.json", payload)
    return f"wrote {f['n_filters']} {f['color']} filters to {out / 'filters'}"


def run_entropy(config: dict, out: Path, rng: SeededRng, threads: int) -> str:
    train, _ = load_datasets(config)
    if config["dataset"]["subsample"]:
        train = ds.stratified_subsample(rng.child("subsample"), train, config["dataset"]["subsample"])
    net = build_network(config, train.image_shape, train.n_classes)
    infer_shapes(net)
    names = config["prior"]["names"]
    exemplars = _exemplars_for(config, rng, train, names)
    rows = []
    draw_rows = []
    for name in names:
        prior = make_prior(config, net, name)
        report = ev.prior_predictive_entropy(
            rng.child(f"prior-{name}"),
            net,
            prior,
            train,
            n_draws=config["scale"]["draws"],
            exemplars=exemplars,
            batch_size=config["scale"]["batch_size"],
            threads=threads,
            config=_report_config(config, {"prior_name": name, "n_examples": len(train)}),
        )
        write_json_report(out / f"report_{name}.json", report.to_dict())
        rows.append([name, f"{report.mean_entropy:.6f}", f"{report.stderr:.6f}", report.n_draws, len(train)])
        for i, (h, ties) in enumerate(zip(report.entropies, report.tie_counts)):
            draw_rows.append([name, i, f"{h:.6f}", ties])
    write_csv(out / "summary.csv", ["prior", "mean_entropy", "stderr", "n_draws", "n_examples"], rows)
    write_csv(out / "draws.csv", ["prior", "draw", "entropy", "ties"], draw_rows)
    return "; ".join(f"{r[0]}: H={r[1]} +- {r[2]}" for r in rows)


def run_correlation(config: dict, out: Path, rng: SeededRng, threads: int) -> str:
    train, _ = load_datasets(config)
    if config["dataset"]["subsample"]:
        train = ds.stratified_subsample(rng.child("subsample"), train, config["dataset"]["subsample"])
    net = build_network(config, train.image_shape, train.n_classes)
    names = config["prior"]["names"]
    exemplars = _exemplars_for(config, rng, train, names)
    # One pair set shared by every prior (variance reduction).
    pairs = ev.sample_pairs(rng.child("pairs"), train, config["scale"]["pairs"])
    rows = []
    pair_rows = []
    for name in names:
        prior = make_prior(config, net, name)
        report = ev.activation_correlations(
            rng.child(f"prior-{name}"),
            net,
            prior,
            train,
            n_draws=config["scale"]["corr_draws"],
            pairs=pairs,
            output_index=config["prior"]["output_index"],
            exemplars=exemplars,
            batch_size=config["scale"]["batch_size"],
            threads=threads,
            keep_pair_values=True,
            config=_report_config(config, {"prior_name": name, "n_examples": len(train)}),
        )
        write_json_report(out / f"report_{name}.json", report.to_dict())
        rows.append(
            [
                name,
                f"{report.mean_same:.6f}",
                f"{report.mean_diff:.6f}",
                f"{report.mean_same - report.mean_diff:.6f}",
                report.n_draws,
                report.n_pairs,
                report.n_excluded_same,
                report.n_excluded_diff,
            ]
        )
        for kind, arr in (("same", report.same_correlations), ("diff", report.diff_correlations)):
            for i, r in enumerate(arr):
                pair_rows.append([name, kind, i, f"{r:.6f}"])
    write_csv(
        out / "summary.csv",
        ["prior", "mean_same", "mean_diff", "gap", "n_draws", "n_pairs", "excluded_same", "excluded_diff"],
        rows,
    )
    write_csv(out / "pairs.csv", ["prior", "pair_type", "pair", "correlation"], pair_rows)
    return "; ".join(f"{r[0]}: same={r[1]} diff={r[2]}" for r in rows)


def run_cappa(config: dict, out: Path, rng: SeededRng, threads: int) -> str:
    train, _ = load_datasets(config)
    d = config["dataset"]
    task = ds.binary_subset(train, d["class_a"], d["class_b"], d["n_per_class"])
    net = build_network(config, task.image_shape, 2)
    names = config["prior"]["names"]
    exemplars = _exemplars_for(config, rng, task, names)
    rows = []
    draw_rows = []
    for name in names:
        prior = make_prior(config, net, name)
        report = ev.cappa(
            rng.child(f"prior-{name}"),
            net,
            prior,
            task,
            n_draws=config["scale"]["draws"],
            exemplars=exemplars,
            batch_size=config["scale"]["batch_size"],
            threads=threads,
            task=f"{d['name']}:{d['class_a']}v{d['class_b']}",
            config=_report_config(config, {"prior_name": name}),
        )
        write_json_report(out / f"report_{name}.json", report.to_dict())
        rows.append([name, f"{report.mean_cappa:.6f}", f"{report.stderr:.6f}", report.n_draws, report.task])
        for i, (a, c) in enumerate(zip(report.accuracies, report.cappas)):
            draw_rows.append([name, i, f"{a:.6f}", f"{c:.6f}"])
    write_csv(out / "summary.csv", ["prior", "mean_cappa", "stderr", "n_draws", "task"], rows)
    write_csv(out / "draws.csv", ["prior", "draw", "accuracy", "cappa"], draw_rows)
    return "; ".join(f"{r[0]}: CAPPA={r[1]} +- {r[2]}" for r in rows)


def _hyperparams(config: dict) -> TrainHyperparams:
    a = config["adam"]
    s = config["scale"]
    return TrainHyperparams(
        lr=a["lr"],
        beta1=a["beta1"],
        beta2=a["beta2"],
        eps=a["eps"],
        batch_size=a["batch_size"],
        epochs=s["epochs"],
        eval_every=s["eval_every"],
        test_subsample=s["test_subsample"],
    )


def run_train(config: dict, out: Path, rng: SeededRng, threads: int) -> str:
    train, test = load_datasets(config)
    if config["dataset"]["subsample"]:
        train = ds.stratified_subsample(rng.child("subsample"), train, config["dataset"]["subsample"])
    net = build_network(config, train.image_shape, train.n_classes)
    hp = _hyperparams(config)
    names = config["prior"]["names"]
    exemplars = _exemplars_for(config, rng, train, names)
    step_rows = []
    agg_rows = []
    summary_rows = []
    for name in names:
        prior = make_prior(config, net, name)
        result = ev.train_experiment(
            rng,
            net,
            prior,
            train,
            test,
            hp,
            n_runs=config["scale"]["runs"],
            exemplars=exemplars,
            threads=threads,
            config=_report_config(config, {"prior_name": name}),
        )
        agg = result["aggregate"]
        payload = {
            "kind": "training",
            "prior": name,
            "aggregate": agg,
            "runs": [c.to_dict() for c in result["curves"]],
            "config": _report_config(config, {"prior_name": name}),
            "fingerprint": config_fingerprint(_report_config(config, {"prior_name": name})),
        }
        write_json_report(out / f"report_{name}.json", payload)
        for r, curve in enumerate(result["curves"]):
            for s_, l, acc in zip(curve.steps, curve.train_losses, curve.test_accuracies):
                step_rows.append([name, r, s_, f"{l:.6f}", f"{acc:.6f}"])
        for s_, m, e2 in zip(agg["steps"], agg["mean_test_accuracy"], agg["two_stderr"]):
            agg_rows.append([name, s_, f"{m:.6f}", f"{e2:.6f}"])
        summary_rows.append([name, f"{agg['final_mean_test_accuracy']:.6f}", agg["n_runs"]])
    write_csv(out / "steps.csv", ["prior", "run", "step", "train_loss", "test_accuracy"], step_rows)
    write_csv(out / "aggregate.csv", ["prior", "step", "mean_test_accuracy", "two_stderr"], agg_rows)
    write_csv(out / "summary.csv", ["prior", "final_mean_test_accuracy", "n_runs"], summary_rows)
    return "; ".join(f"{r[0]}: final acc={r[1]}" for r in summary_rows)


def run_ablation(config: dict, out: Path, rng: SeededRng, threads: int) -> str:
    train, test = load_datasets(config)
    if config["dataset"]["subsample"]:
        train = ds.stratified_subsample(rng.child("subsample"), train, config["dataset"]["subsample"])
    net = build_network(config, train.image_shape, train.n_classes)
    hp = _hyperparams(config)
    exemplars = ds.sample_exemplars(
        rng.child("exemplars"), train, config["prior"]["exemplars_per_class"]
    )
    results = ev.ablation_grid(
        rng,
        net,
        train,
        test,
        hp,
        n_runs=config["scale"]["ablation_runs"],
        exemplars=exemplars,
        noisy_sigma=config["scale"]["noisy_sigma"],
        threads=threads,
        config=_report_config(config),
    )
    step_rows = []
    summary_rows = []
    payload = {"kind": "ablation", "variants": {}, "config": _report_config(config)}
    payload["fingerprint"] = config_fingerprint(payload["config"])
    for variant, result in results.items():
        agg = result["aggregate"]
        payload["variants"][variant] = {
            "aggregate": agg,
            "runs": [c.to_dict() for c in result["curves"]],
        }
        for r, curve in enumerate(result["curves"]):
            for s_, l, acc in zip(curve.steps, curve.train_losses, curve.test_accuracies):
                step_rows.append([variant, r, s_, f"{l:.6f}", f"{acc:.6f}"])
        summary_rows.append([variant, f"{agg['final_mean_test_accuracy']:.6f}", agg["n_runs"]])
    write_json_report(out / "report.json", payload)
    write_csv(out / "steps.csv", ["variant", "run", "step", "train_loss", "test_accuracy"], step_rows)
    write_csv(out / "summary.csv", ["variant", "final_mean_test_accuracy", "n_runs"], summary_rows)
    return "; ".join(f"{r[0]}: final acc={r[1]}" for r in summary_rows)


RUNNERS = {
    "sample-filters": run_sample_filters,
    "eval-entropy": run_entropy,
    "eval-correlation": run_correlation,
    "eval-cappa": run_cappa,
    "train": run_train,
    "ablation": run_ablation,
}


def run(config: dict, threads: int = 1) -> Path:
    """Execute a validated config; returns the run directory."""
    out = Path(config["out_dir"]) / run_dir_name(config)
    out.mkdir(parents=True, exist_ok=True)
    write_json_report(out / "config.json", config)
    rng = SeededRng(config["seed"])
    t0 = time.time()
    summary = RUNNERS[config["experiment"]](config, out, rng, threads)
    elapsed = time.time() - t0
    # Timing lives in its own file so reports stay byte-stable across runs.
    write_json_report(out / f"{TIMING_KEY}.json", {"elapsed_seconds": elapsed})
    print(f"{config['experiment']}: {summary}")
    print(f"outputs in {out}")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="structpriors",
        description="Structured weight priors for small CNNs: sampling, export, and prior-quality experiments.",
        epilog=(
            "Real datasets are read as uncompressed binaries from --dataset.data_dir "
            "(IDX pairs for mnist/fashion-mnist, data_batch_*.bin for cifar10). "
            "Unknown flags of the form --section.key=value override config fields."
        ),
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="root seed (required here or in the config)")
        p.add_argument("--out", type=str, default=None, help="output root directory")
        p.add_argument("--threads", type=int, default=1, help="parallel draw/run workers (results independent of N)")
        p.add_argument(
            "--paper-scale",
            action="store_true",
            help="use the publication scale (500 draws, 50 draws x 10000 pairs, full sets)",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    args, overrides = parser.parse_known_args(argv)
    out_root = Path(args.out) if args.out else Path(DEFAULT_CONFIG["out_dir"])

    def fail(exc: Exception, code: int) -> int:
        out_root.mkdir(parents=True, exist_ok=True)
        write_json_report(out_root / "error.json", {"error": type(exc).__name__, "message": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return code

    try:
        config: dict = {}
        if args.config:
            path = Path(args.config)
            if not path.is_file():
                raise ConfigError(f"config file {path} does not exist")
            config = json.loads(path.read_text())
        config["experiment"] = args.experiment
        if args.seed is not None:
            config["seed"] = args.seed
        if args.out:
            config["out_dir"] = args.out
        config = apply_overrides(config, overrides)
        if args.paper_scale:
            scale = config.setdefault("scale", {})
            for key, value in PAPER_SCALE.items():
                if key == "subsample":
                    config.setdefault("dataset", {})["subsample"] = value
                else:
                    scale[key] = value
        config = validate(config)
        run(config, threads=max(1, args.threads))
        return 0
    except ConfigError as exc:
        return fail(exc, 2)
    except StructPriorsError as exc:
        return fail(exc, 1)
    except OSError as exc:
        return fail(exc, 1)


if __name__ == "__main__":
    sys.exit(main())
