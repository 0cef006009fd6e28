import json
import subprocess
import sys

import numpy as np
import pytest

import trigraph.cli as cli
import trigraph.embed as embed_mod
from trigraph.ingest import generate_synthetic, load_records, serialize_records, serialize_truth


@pytest.fixture()
def small_data(tmp_path):
    """Compact synthetic corpus: 5 entities, ~25 docs."""
    rs = generate_synthetic(5, 2.1, 5, 30, 0.9, seed=5)
    records = tmp_path / "records.tsv"
    truth = tmp_path / "truth.tsv"
    records.write_text(serialize_records(rs))
    truth.write_text(serialize_truth(rs))
    return records, truth


def run_cli(*argv) -> int:
    return cli.main([str(a) for a in argv])


def fast_flags(out, records, truth, epochs=6, runs=1, dim=5):
    return [
        "--records", records, "--truth", truth, "--name-ref", "focal",
        "--dim", dim, "--epochs", epochs, "--runs", runs, "--seed", 3,
        "--out", out,
    ]


class TestSynth:
    def test_writes_parseable_records_and_figure(self, tmp_path):
        out = tmp_path / "synth"
        code = run_cli("synth", "--entities", 4, "--docs-min", 3, "--pool", 20,
                       "--seed", 1, "--out", out)
        assert code == 0
        rs = load_records(out / "records.tsv", out / "truth.tsv")
        assert len(rs) >= 12
        assert (out / "class_sizes.png").stat().st_size > 0

    def test_deterministic_across_runs(self, tmp_path):
        args = ["synth", "--entities", 3, "--docs-min", 2, "--pool", 12, "--seed", 9]
        run_cli(*args, "--out", tmp_path / "a")
        run_cli(*args, "--out", tmp_path / "b")
        assert (tmp_path / "a/records.tsv").read_bytes() == (tmp_path / "b/records.tsv").read_bytes()
        assert (tmp_path / "a/truth.tsv").read_bytes() == (tmp_path / "b/truth.tsv").read_bytes()

    def test_refuses_overwrite_without_force(self, tmp_path, capsys):
        out = tmp_path / "synth"
        assert run_cli("synth", "--entities", 2, "--docs-min", 2, "--pool", 8, "--out", out) == 0
        assert run_cli("synth", "--entities", 2, "--docs-min", 2, "--pool", 8, "--out", out) == 1
        assert "exists" in capsys.readouterr().err
        assert run_cli("synth", "--entities", 2, "--docs-min", 2, "--pool", 8,
                       "--out", out, "--force") == 0


class TestAnonymize:
    def test_keymap_covers_all_keys(self, small_data, tmp_path):
        records, truth = small_data
        out = tmp_path / "anon"
        assert run_cli("anonymize", "--records", records, "--truth", truth,
                       "--seed", 2, "--out", out) == 0
        keymap = dict(
            line.split("\t") for line in (out / "keymap.tsv").read_text().splitlines()
        )
        original = load_records(records, truth)
        renamed = load_records(out / "records.tsv", out / "truth.tsv")
        assert len(renamed) == len(original)
        assert keymap["focal"] in renamed.records[0].author_keys()


class TestBuildGraphs:
    def test_dumps_are_tab_separated_ints(self, small_data, tmp_path):
        records, truth = small_data
        out = tmp_path / "graphs"
        assert run_cli("build-graphs", "--records", records, "--name-ref", "focal",
                       "--out", out) == 0
        for name in ("gpp.tsv", "gpd.tsv", "gdd.tsv"):
            for line in (out / name).read_text().splitlines():
                u, v, w = line.split("\t")
                assert int(w) > 0 and int(u) >= 0 and int(v) >= 0


class TestTrainClusterEval:
    def test_stage_chain(self, small_data, tmp_path):
        records, truth = small_data
        train_out = tmp_path / "train"
        assert run_cli("train", *fast_flags(train_out, records, truth)) == 0
        assert (train_out / "model.bin").exists()
        trace = (train_out / "trace.csv").read_text().splitlines()
        assert trace[0] == "epoch,loss,auc,rank_loss,reg_loss"
        assert len(trace) == 7
        assert (train_out / "trace.png").stat().st_size > 0

        cluster_out = tmp_path / "cluster"
        assert run_cli("cluster", "--records", records, "--truth", truth,
                       "--name-ref", "focal", "--model", train_out / "model.bin",
                       "--out", cluster_out) == 0
        assignment = (cluster_out / "assignment.csv").read_text().splitlines()
        assert assignment[0] == "doc_key,cluster_id"

        eval_out = tmp_path / "eval"
        assert run_cli("eval", "--records", records, "--truth", truth,
                       "--name-ref", "focal",
                       "--assignment", cluster_out / "assignment.csv",
                       "--seed", 3, "--out", eval_out) == 0
        report = json.loads((eval_out / "report.json").read_text())
        assert 0.0 <= report["macro_f1"] <= 1.0
        assert set(report["baselines"]) == {"rand", "authorlist"}


class TestPipeline:
    def test_report_fields_present_and_finite(self, small_data, tmp_path):
        records, truth = small_data
        out = tmp_path / "pipe"
        assert run_cli("pipeline", *fast_flags(out, records, truth, runs=2)) == 0
        report = json.loads((out / "report.json").read_text())
        assert np.isfinite(report["macro_f1"])
        assert report["method"] == "pipeline"
        assert len(report["per_run"]) == 2
        assert report["config"]["seed"] == 3
        runs = [json.loads(line) for line in (out / "runs.jsonl").read_text().splitlines()]
        methods = {r["method"] for r in runs}
        assert methods == {"pipeline", "rand", "authorlist"}
        assert all("runtime_ms" in r for r in runs)
        for artifact in ("model.bin", "trace.csv", "assignment.csv", "dendrogram.csv",
                         "trace.png", "class_sizes.png", "gpp.tsv", "gpd.tsv", "gdd.tsv"):
            assert (out / artifact).exists()

    def test_untrained_model_scores_in_random_band(self, small_data, tmp_path):
        records, truth = small_data
        out = tmp_path / "pipe0"
        assert run_cli("pipeline", *fast_flags(out, records, truth, epochs=0, runs=2)) == 0
        report = json.loads((out / "report.json").read_text())
        # random-init vectors cluster no better than chance-level assignment
        assert report["macro_f1"] <= report["baselines"]["rand"] + 0.15

    def test_reruns_byte_identical(self, small_data, tmp_path):
        records, truth = small_data
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert run_cli("pipeline", *fast_flags(out_a, records, truth, runs=2)) == 0
        assert run_cli("pipeline", *fast_flags(out_b, records, truth, runs=2)) == 0
        for name in ("report.json", "model.bin", "trace.csv", "assignment.csv", "dendrogram.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_seed_falls_back_to_environment(self, small_data, tmp_path, monkeypatch):
        records, truth = small_data
        monkeypatch.setenv("TRIGRAPH_SEED", "17")
        out = tmp_path / "env"
        args = ["pipeline", "--records", records, "--truth", truth, "--name-ref", "focal",
                "--dim", 4, "--epochs", 2, "--runs", 1, "--out", out]
        assert run_cli(*args) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["config"]["seed"] == 17

    def test_runs_without_truth_when_clusters_given(self, small_data, tmp_path):
        records, _ = small_data
        out = tmp_path / "notruth"
        assert run_cli("pipeline", "--records", records, "--name-ref", "focal",
                       "--clusters", 4, "--dim", 4, "--epochs", 3, "--runs", 1,
                       "--seed", 0, "--out", out) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["macro_f1"] is None and report["L"] == 4
        assert (out / "assignment.csv").exists()

    def test_missing_records_names_stage(self, tmp_path, capsys):
        code = run_cli("pipeline", "--records", tmp_path / "nope.tsv", "--truth",
                       tmp_path / "nope2.tsv", "--name-ref", "x", "--out", tmp_path / "o")
        assert code == 1
        assert "ingest" in capsys.readouterr().err


class TestSweeps:
    def test_sweep_dim_single_row(self, small_data, tmp_path):
        records, truth = small_data
        out = tmp_path / "sweep"
        assert run_cli("sweep-dim", *fast_flags(out, records, truth), "--dims", 6) == 0
        lines = (out / "sweep_dim.csv").read_text().splitlines()
        assert lines[0] == "k,mean_macro_f1,std"
        assert len(lines) == 2 and lines[1].startswith("6,")
        assert (out / "sweep_dim.png").stat().st_size > 0

    def test_sweep_l_trains_once_and_matches_pipeline(self, small_data, tmp_path, monkeypatch):
        records, truth = small_data
        calls = {"n": 0}
        real_train = embed_mod.train

        def counting_train(*args, **kwargs):
            calls["n"] += 1
            return real_train(*args, **kwargs)

        monkeypatch.setattr("trigraph.pipeline.train", counting_train)
        pipe_out = tmp_path / "pipe"
        assert run_cli("pipeline", *fast_flags(pipe_out, records, truth)) == 0
        pipeline_score = json.loads((pipe_out / "report.json").read_text())["macro_f1"]

        calls["n"] = 0
        sweep_out = tmp_path / "sweepl"
        rs = load_records(records, truth)
        true_l = len(set(rs.truth.values()))
        assert run_cli("sweep-l", *fast_flags(sweep_out, records, truth),
                       "--l-values", 2, 3, true_l) == 0
        assert calls["n"] == 1
        rows = dict(
            line.split(",") for line in (sweep_out / "sweep_l.csv").read_text().splitlines()[1:]
        )
        assert float(rows[str(true_l)]) == pytest.approx(pipeline_score)

    def test_sweep_l_out_of_range_rows_skipped(self, small_data, tmp_path, capsys):
        records, truth = small_data
        out = tmp_path / "sweepl2"
        assert run_cli("sweep-l", *fast_flags(out, records, truth),
                       "--l-values", 2, 10**6) == 0
        err = capsys.readouterr().err
        assert "failed" in err
        lines = (out / "sweep_l.csv").read_text().splitlines()
        assert len(lines) == 3 and lines[2].startswith("1000000,nan")


class TestAblation:
    def test_cumulative_masks_reported_verbatim(self, small_data, tmp_path):
        records, truth = small_data
        out = tmp_path / "abl"
        assert run_cli("ablation", *fast_flags(out, records, truth, epochs=4)) == 0
        lines = (out / "ablation.csv").read_text().splitlines()
        assert lines[0] == "components,mean_macro_f1,std"
        assert [line.split(",")[0] for line in lines[1:]] == ["pd", "pd+dd", "pd+dd+pp"]
        assert (out / "ablation.png").stat().st_size > 0

    def test_mask_only_runs_single_row(self, small_data, tmp_path):
        records, truth = small_data
        out = tmp_path / "ablmask"
        assert run_cli("ablation", *fast_flags(out, records, truth, epochs=3),
                       "--components", "pd", "--mask-only") == 0
        lines = (out / "ablation.csv").read_text().splitlines()
        assert len(lines) == 2 and lines[1].startswith("pd,")

    def test_pd_mask_never_touches_other_tables(self, small_data, tmp_path, monkeypatch):
        records, truth = small_data
        from trigraph.embed import Network, TripletSampler

        seen_networks = set()
        real_sample = TripletSampler.sample_network

        def spy(self, rng):
            net = real_sample(self, rng)
            seen_networks.add(net)
            return net

        monkeypatch.setattr(TripletSampler, "sample_network", spy)
        out = tmp_path / "spy"
        assert run_cli("ablation", *fast_flags(out, records, truth, epochs=3),
                       "--components", "pd", "--mask-only") == 0
        assert seen_networks == {Network.PD}


class TestExperimentShapes:
    """Reduced-scale versions of the sweep and ablation findings."""

    @pytest.fixture()
    def medium_data(self, tmp_path):
        rs = generate_synthetic(8, 2.1, 8, 80, 0.9, seed=3)
        records = tmp_path / "records.tsv"
        truth = tmp_path / "truth.tsv"
        records.write_text(serialize_records(rs))
        truth.write_text(serialize_truth(rs))
        return records, truth

    def test_dimension_sweep_interior_not_dominated(self, medium_data, tmp_path):
        records, truth = medium_data
        out = tmp_path / "sweep"
        assert run_cli("sweep-dim", "--records", records, "--truth", truth,
                       "--name-ref", "focal", "--epochs", 30, "--runs", 2,
                       "--seed", 0, "--dims", 10, 20, 30, 40, 50,
                       "--out", out) == 0
        rows = {
            int(k): float(mean)
            for k, mean, _ in (
                line.split(",") for line in (out / "sweep_dim.csv").read_text().splitlines()[1:]
            )
        }
        assert max(rows[20], rows[30]) >= max(rows[10], rows[50]) - 0.05

    def test_ablation_full_mask_not_below_authorship_only(self, medium_data, tmp_path):
        records, truth = medium_data
        out = tmp_path / "abl"
        assert run_cli("ablation", "--records", records, "--truth", truth,
                       "--name-ref", "focal", "--epochs", 30, "--runs", 3,
                       "--seed", 0, "--out", out) == 0
        rows = {
            name: float(mean)
            for name, mean, _ in (
                line.split(",") for line in (out / "ablation.csv").read_text().splitlines()[1:]
            )
        }
        assert rows["pd+dd+pp"] >= rows["pd"] - 0.02


def test_console_script_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "trigraph.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "pipeline" in proc.stdout
