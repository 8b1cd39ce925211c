"""CLI wiring: config validation, outputs, error reporting, determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from structpriors.cli import DEFAULT_CONFIG, apply_overrides, main, run_dir_name, validate
from structpriors.errors import ConfigError

FAST_ENTROPY = [
    "--dataset.train_size=300",
    "--dataset.test_size=50",
    "--scale.draws=3",
    "--scale.batch_size=128",
    "--arch.first_filters=8",
]


def read_json(path: Path) -> dict:
    return json.loads(path.read_text())


class TestValidate:
    def base(self, **kw):
        cfg = {"experiment": "eval-entropy", "seed": 1}
        cfg.update(kw)
        return cfg

    def test_defaults_filled(self):
        cfg = validate(self.base())
        assert cfg["adam"]["lr"] == 1e-3
        assert cfg["adam"]["beta1"] == 0.9
        assert cfg["scale"]["draws"] == 100
        assert cfg["prior"]["names"] == ["iid", "gabor"]

    def test_seed_required(self):
        with pytest.raises(ConfigError, match="seed"):
            validate({"experiment": "eval-entropy"})

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError, match="experiment"):
            validate({"experiment": "frobnicate", "seed": 1})

    def test_negative_sigma_rejected(self):
        with pytest.raises(ConfigError, match="sigma_g"):
            validate(self.base(prior={"sigma_g": -0.5}))

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="unknown config field"):
            validate(self.base(scale={"drawz": 5}))

    def test_real_dataset_needs_data_dir(self):
        with pytest.raises(ConfigError, match="data_dir"):
            validate(self.base(dataset={"name": "mnist"}))

    def test_depth3_paper_widths_shape_chain(self):
        # 28x28 input survives three conv+pool stages under the padding
        # scheme, even at paper widths.
        from structpriors.tensor_nn import build_cnn, infer_shapes

        net = build_cnn((28, 28, 1), 3, 10)
        shapes = infer_shapes(net)
        assert shapes[-1] == (10,)
        assert net.layers[0].out_channels == 16
        assert net.layers[3].out_channels == 256
        assert net.layers[6].out_channels == 4096

    def test_overrides_applied_and_checked(self):
        cfg = apply_overrides({"scale": {}}, ["--scale.draws=7", "--prior.names=[\"iid\"]"])
        assert cfg["scale"]["draws"] == 7
        assert cfg["prior"]["names"] == ["iid"]
        with pytest.raises(ConfigError):
            apply_overrides({}, ["--nonsense.key=1"])
        with pytest.raises(ConfigError):
            apply_overrides({}, ["badflag"])


class TestRunDirNaming:
    def test_pattern(self):
        cfg = validate({"experiment": "eval-entropy", "seed": 7})
        assert run_dir_name(cfg) == "entropy_synthetic_1layer_iid+gabor_7"


class TestSampleFilters:
    def test_grayscale_bank_outputs(self, tmp_path):
        code = main(["sample-filters", "--seed", "3", "--out", str(tmp_path)])
        assert code == 0
        out = tmp_path / "filters_synthetic_1layer_iid+gabor_3"
        pgms = sorted((out / "filters").glob("filter_*.pgm"))
        assert len(pgms) == 16
        assert (out / "filters" / "params.jsonl").exists()
        lines = (out / "filters" / "params.jsonl").read_text().splitlines()
        assert len(lines) == 16
        assert {"theta", "sigma", "wavelength", "psi", "gamma"} <= set(json.loads(lines[0]))
        assert (out / "config.json").exists()
        assert not (tmp_path / "error.json").exists()

    def test_rgb_bank_outputs(self, tmp_path):
        code = main(
            ["sample-filters", "--seed", "3", "--out", str(tmp_path), "--filters.color=rgb", "--filters.n_filters=4"]
        )
        assert code == 0
        out = tmp_path / "filters_synthetic_1layer_iid+gabor_3"
        assert len(list((out / "filters").glob("filter_*.ppm"))) == 4


class TestEntropyCommand:
    def test_two_priors_two_summary_rows(self, tmp_path):
        code = main(["eval-entropy", "--seed", "5", "--out", str(tmp_path)] + FAST_ENTROPY)
        assert code == 0
        out = tmp_path / "entropy_synthetic_1layer_iid+gabor_5"
        rows = (out / "summary.csv").read_text().splitlines()
        assert rows[0] == "prior,mean_entropy,stderr,n_draws,n_examples"
        assert len(rows) == 3 and rows[1].startswith("iid,") and rows[2].startswith("gabor,")
        report = read_json(out / "report_gabor.json")
        assert report["n_draws"] == 3
        assert len(report["entropies"]) == 3
        assert (out / "timing.json").exists()

    def test_resolved_config_echoed(self, tmp_path):
        main(["eval-entropy", "--seed", "5", "--out", str(tmp_path)] + FAST_ENTROPY)
        cfg = read_json(tmp_path / "entropy_synthetic_1layer_iid+gabor_5" / "config.json")
        assert cfg["seed"] == 5
        assert cfg["adam"]["lr"] == 1e-3  # defaults present
        assert cfg["dataset"]["train_size"] == 300  # override present
        assert "threads" not in json.dumps(cfg)  # runtime flag, not config


class TestErrors:
    def test_config_error_writes_report_and_exit_2(self, tmp_path):
        code = main(["eval-entropy", "--out", str(tmp_path), "--prior.sigma_g=-1", "--seed", "1"])
        assert code == 2
        err = read_json(tmp_path / "error.json")
        assert "sigma_g" in err["message"]

    def test_missing_seed(self, tmp_path):
        code = main(["eval-entropy", "--out", str(tmp_path)])
        assert code == 2
        assert "seed" in read_json(tmp_path / "error.json")["message"]

    def test_missing_config_file(self, tmp_path):
        code = main(["eval-entropy", "--seed", "1", "--out", str(tmp_path), "--config", str(tmp_path / "no.json")])
        assert code == 2

    def test_missing_data_dir_for_mnist(self, tmp_path):
        code = main(
            ["eval-entropy", "--seed", "1", "--out", str(tmp_path), "--dataset.name=mnist"]
        )
        assert code == 2
        assert "data_dir" in read_json(tmp_path / "error.json")["message"]


class TestCappaCommand:
    def test_binary_task_summary(self, tmp_path):
        code = main(
            [
                "eval-cappa",
                "--seed",
                "9",
                "--out",
                str(tmp_path),
                "--dataset.train_size=400",
                "--dataset.n_per_class=30",
                "--scale.draws=4",
                "--scale.batch_size=128",
                "--arch.first_filters=8",
                '--prior.names=["iid"]',
            ]
        )
        assert code == 0
        out = tmp_path / "cappa_synthetic_1layer_iid_9"
        report = read_json(out / "report_iid.json")
        assert all(0.5 <= c <= 1.0 for c in report["cappas"])
        assert report["task"] == "synthetic:0v1"


class TestTrainCommand:
    def test_small_training_run(self, tmp_path):
        code = main(
            [
                "train",
                "--seed",
                "2",
                "--out",
                str(tmp_path),
                "--dataset.train_size=300",
                "--dataset.test_size=100",
                "--scale.runs=2",
                "--scale.epochs=1",
                "--scale.eval_every=2",
                "--adam.batch_size=100",
                "--arch.first_filters=8",
                '--prior.names=["iid"]',
            ]
        )
        assert code == 0
        out = tmp_path / "train_synthetic_1layer_iid_2"
        steps = (out / "steps.csv").read_text().splitlines()
        assert steps[0] == "prior,run,step,train_loss,test_accuracy"
        report = read_json(out / "report_iid.json")
        assert report["aggregate"]["n_runs"] == 2


class TestDeterminismAcrossThreads:
    def test_reports_byte_identical(self, tmp_path):
        import shutil

        args = ["eval-entropy", "--seed", "11", "--out", str(tmp_path)] + FAST_ENTROPY
        run_dir = tmp_path / "entropy_synthetic_1layer_iid+gabor_11"
        main(args + ["--threads", "1"])
        snapshot = tmp_path / "snapshot"
        shutil.copytree(run_dir, snapshot)
        main(args + ["--threads", "8"])  # rerun in place
        for name in ("report_iid.json", "report_gabor.json", "summary.csv", "draws.csv", "config.json"):
            assert (snapshot / name).read_bytes() == (run_dir / name).read_bytes(), name
