"""
命令行测试：子命令输出文件与退出码
"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到 Python 路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import get_config
from core.formats import load_dataset, read_matrix
from harness import parse_results
from learners.model_io import load_model_record
from main import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from sampling import load_omega_sample

EXPERIMENT = """
task = motif-string
n_train = 24
n_test = 12
folds = 3
seed = 1
methods = {methods}
gamma_grid = 1.0
R_grid = 8
mu_grid = 0.1
k_grid = 1
"""


@pytest.fixture(autouse=True)
def results_dir(tmp_path, monkeypatch):
    path = tmp_path / "results"
    monkeypatch.setattr(get_config(), "results_dir", str(path))
    return path


@pytest.fixture
def strings(tmp_path):
    a = tmp_path / "a.str.txt"
    b = tmp_path / "b.str.txt"
    a.write_text("#alphabet abcd\n0 abc\n1 abcd\n", encoding="utf-8")
    b.write_text("#alphabet abcd\n0 abd\n1\n0 dcba\n", encoding="utf-8")
    return a, b


@pytest.fixture
def motif_files(tmp_path):
    train = tmp_path / "train.str.txt"
    test = tmp_path / "test.str.txt"
    assert main(["gen-synthetic", "--task", "motif-string", "--n", "40", "--seed", "1", "--out", str(train)]) == EXIT_OK
    assert main(["gen-synthetic", "--task", "motif-string", "--n", "20", "--seed", "2", "--out", str(test)]) == EXIT_OK
    return train, test


class TestGenSynthetic:
    """gen-synthetic"""

    def test_writes_balanced_dataset(self, tmp_path):
        out = tmp_path / "sine.ts.tsv"
        code = main(["gen-synthetic", "--task", "shifted-sine", "--n", "10", "--seed", "3", "--out", str(out)])
        assert code == EXIT_OK
        data = load_dataset(out)
        assert len(data) == 10
        assert np.bincount(data.labels).tolist() == [5, 5]

    def test_unknown_task_is_runtime_error(self, tmp_path):
        code = main(["gen-synthetic", "--task", "nope", "--n", "10", "--seed", "3",
                     "--out", str(tmp_path / "x.str.txt")])
        assert code != EXIT_OK


class TestDistance:
    """distance 打印制表符分隔的矩阵"""

    def test_edit_matrix(self, strings, capsys):
        a, b = strings
        assert main(["distance", "--measure", "edit", "--a", str(a), "--b", str(b)]) == EXIT_OK
        lines = [line for line in capsys.readouterr().out.splitlines() if line.strip()]
        assert lines == ["1\t3\t3", "1\t4\t4"]

    def test_dtw_prints_twelve_significant_digits(self, tmp_path, capsys):
        a = tmp_path / "a.ts.tsv"
        b = tmp_path / "b.ts.tsv"
        a.write_text("0 1 2 0 0\n", encoding="utf-8")
        b.write_text("0 1 2 1 1\n", encoding="utf-8")
        assert main(["distance", "--measure", "dtw", "--a", str(a), "--b", str(b)]) == EXIT_OK
        assert capsys.readouterr().out == "1.41421356237\n"

    def test_kind_mismatch_is_runtime_error(self, strings):
        a, b = strings
        assert main(["distance", "--measure", "dtw", "--a", str(a), "--b", str(b)]) == EXIT_RUNTIME

    def test_missing_file(self, strings, tmp_path):
        a, _ = strings
        code = main(["distance", "--measure", "edit", "--a", str(a), "--b", str(tmp_path / "none.str.txt")])
        assert code == EXIT_RUNTIME


class TestSampleAndEmbed:
    """sample 写出 ω，embed 用它生成特征矩阵"""

    def test_sample_then_embed(self, tmp_path, motif_files):
        train, _ = motif_files
        omega = tmp_path / "omega.str.txt"
        code = main(["sample", "--kind", "string", "--R", "6", "--seed", "5", "--out", str(omega),
                     "--length-min", "1", "--length-max", "4"])
        assert code == EXIT_OK
        sample = load_omega_sample(omega)
        assert len(sample) == 6
        assert sample.seed == 5

        features = tmp_path / "phi.txt"
        code = main(["embed", "--model", str(omega), "--gamma", "1.0", "--data", str(train), "--out", str(features)])
        assert code == EXIT_OK
        phi = read_matrix(features)
        assert phi.shape == (40, 6)
        assert np.all(phi > 0.0) and np.all(phi <= 1.0 / np.sqrt(6) + 1e-12)

    def test_sample_is_deterministic(self, tmp_path):
        paths = [tmp_path / f"o{i}.vset.jsonl" for i in range(2)]
        for path in paths:
            assert main(["sample", "--kind", "vector-set", "--R", "4", "--seed", "9", "--out", str(path)]) == EXIT_OK
        assert paths[0].read_text(encoding="utf-8") == paths[1].read_text(encoding="utf-8")


class TestTrainEvaluate:
    """train 写出模型记录，evaluate 重建 ω 并评估"""

    @pytest.mark.parametrize("extra", [[], ["--holdout"]])
    def test_train_then_evaluate(self, tmp_path, motif_files, extra):
        train, test = motif_files
        model = tmp_path / "model.json"
        code = main(["train", "--data", str(train), "--R", "16", "--gamma", "1.0", "--mu", "0.1",
                     "--seed", "4", "--out", str(model), *extra])
        assert code == EXIT_OK
        record = load_model_record(model)
        assert record["R"] == 16
        assert record["measure"] == "edit"
        assert 0.0 <= record["train_accuracy"] <= 100.0
        assert main(["evaluate", "--model", str(model), "--data", str(test)]) == EXIT_OK

    def test_evaluate_rejects_changed_holdout_source(self, tmp_path, motif_files):
        train, test = motif_files
        model = tmp_path / "model.json"
        assert main(["train", "--data", str(train), "--R", "8", "--gamma", "1.0", "--mu", "0.1",
                     "--seed", "4", "--out", str(model), "--holdout"]) == EXIT_OK
        train.write_text(train.read_text(encoding="utf-8") + "0 aaaa\n", encoding="utf-8")
        assert main(["evaluate", "--model", str(model), "--data", str(test)]) == EXIT_RUNTIME

    def test_evaluate_rejects_broken_model(self, tmp_path, motif_files):
        _, test = motif_files
        model = tmp_path / "model.json"
        model.write_text("{not json", encoding="utf-8")
        assert main(["evaluate", "--model", str(model), "--data", str(test)]) == EXIT_RUNTIME


class TestRun:
    """run 的退出码：0 成功，1 配置错误，2 全部失败"""

    def test_success_writes_results(self, tmp_path):
        config = tmp_path / "exp.cfg"
        config.write_text(EXPERIMENT.format(methods="knn"), encoding="utf-8")
        out = tmp_path / "results.tsv"
        assert main(["run", "--config", str(config), "--out", str(out), "--threads", "2"]) == EXIT_OK
        table = parse_results(out)
        assert [row.method for row in table.rows] == ["knn"]
        assert table.rows[0].success

    def test_default_output_in_results_dir(self, tmp_path, results_dir):
        config = tmp_path / "small.cfg"
        config.write_text(EXPERIMENT.format(methods="knn"), encoding="utf-8")
        assert main(["run", "--config", str(config)]) == EXIT_OK
        table = parse_results(results_dir / "small.tsv")
        assert [row.method for row in table.rows] == ["knn"]

    def test_json_format(self, tmp_path):
        config = tmp_path / "exp.cfg"
        config.write_text(EXPERIMENT.format(methods="knn"), encoding="utf-8")
        out = tmp_path / "results.json"
        assert main(["run", "--config", str(config), "--out", str(out), "--format", "json"]) == EXIT_OK
        assert isinstance(json.loads(out.read_text(encoding="utf-8")), (dict, list))

    def test_bad_config(self, tmp_path):
        config = tmp_path / "exp.cfg"
        config.write_text(EXPERIMENT.format(methods="svm-magic"), encoding="utf-8")
        assert main(["run", "--config", str(config)]) == EXIT_CONFIG
        assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG

    def test_all_rows_failed(self, tmp_path):
        config = tmp_path / "exp.cfg"
        config.write_text(EXPERIMENT.format(methods="knn") + "measure = dtw\n", encoding="utf-8")
        assert main(["run", "--config", str(config)]) == EXIT_RUNTIME


class TestReports:
    """analyze-kernel 与 timing 写出 JSON 报告"""

    def test_analyze_kernel(self, tmp_path):
        out = tmp_path / "convergence.json"
        code = main(["analyze-kernel", "--task", "motif-string", "--n", "6", "--R-list", "4,8", "--trials", "3",
                     "--gamma", "1.0", "--seed", "2", "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["R_list"] == [4, 8]
        assert len(report["ratios"]) == 1

    def test_analyze_kernel_rejects_few_trials(self):
        code = main(["analyze-kernel", "--task", "motif-string", "--n", "6", "--R-list", "4,8", "--trials", "1",
                     "--gamma", "1.0", "--seed", "2"])
        assert code == EXIT_RUNTIME

    def test_timing(self, tmp_path):
        out = tmp_path / "timing.json"
        code = main(["timing", "--task", "two-cluster", "--n-list", "4,6,8", "--R-list", "2,4,8", "--seed", "1",
                     "--repeats", "1", "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["n_list"] == [4, 6, 8]
        assert len(report["seconds"]) == 3 and len(report["seconds"][0]) == 3


class TestUsage:
    """参数错误按配置错误处理"""

    def test_missing_subcommand(self):
        assert main([]) == EXIT_CONFIG

    def test_missing_required_flag(self):
        assert main(["train", "--data", "x.str.txt"]) == EXIT_CONFIG

    def test_invalid_threads(self, tmp_path):
        code = main(["gen-synthetic", "--task", "motif-string", "--n", "10", "--seed", "1",
                     "--out", str(tmp_path / "x.str.txt"), "--threads", "0"])
        assert code == EXIT_CONFIG
