"""
D2KE 命令行入口

Author: gngdingghuan

使用方式:
    python main.py run --config experiment.cfg
    python main.py gen-synthetic --task motif-string --n 300 --seed 1 --out data.str.txt
    python main.py distance --measure edit --a a.str.txt --b b.str.txt

退出码: 0 成功，1 配置错误，2 运行时错误
"""

import argparse
import itertools
import json
import sys
from pathlib import Path
from typing import List, Optional

# 添加项目根目录到 Python 路径
sys.path.insert(0, str(Path(__file__).parent))

import numpy as np
from rich.console import Console
from rich.table import Table

from config import get_config, update_config
from core.dataset import Dataset
from core.formats import DEFAULT_ALPHABET, dataset_alphabet, file_checksum, load_dataset, write_dataset, write_matrix
from core.objects import ObjectKind
from core.synthetic import gen_synthetic
from distances.matrix import cross_distances
from distances.measures import get_measure, measure_for_kind
from embedding.convergence import kernel_convergence_sweep
from embedding.feature_map import EmbeddingModel, embed_dataset
from harness.experiment import load_experiment_config, run_experiment
from harness.results import ResultTable, emit_results, plain
from harness.timing import timing_scaling_report
from learners.linear import LinearModel, predict_linear, train_linear
from learners.model_io import load_model_record, save_model_record
from learners.validation import accuracy
from sampling.distributions import (
    DataHoldout,
    RandomString,
    RandomTimeSeries,
    RandomVectorSet,
    default_distribution,
    distribution_from_dict,
    with_length_max,
)
from sampling.sampler import derive_seed, load_omega_sample, sample_omegas, save_omega_sample
from utils.error_handler import ConfigError, D2keError, DataFormatError
from utils.logger import log, setup_logger
from utils.system_info import SystemInfo

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

console = Console()


class _Parser(argparse.ArgumentParser):
    """用法错误按配置错误处理（退出码 1）"""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"需要逗号分隔的整数，实际 {text!r}") from None


def _format_distance(value: float, measure) -> str:
    return str(int(round(value))) if measure.name == "edit" else f"{float(value):.12g}"


def _print_results(table: ResultTable) -> None:
    view = Table(title="D2KE 实验结果")
    for column in ("方法", "种子", "准确率 (%)", "耗时 (s)", "R", "CV (%)", "参数", "错误"):
        view.add_column(column)
    for row in table.rows:
        view.add_row(
            row.method,
            "mean" if row.seed is None else str(row.seed),
            "-" if row.accuracy is None else f"{row.accuracy:.2f}",
            f"{row.seconds:.2f}",
            "-" if row.R is None else str(row.R),
            "-" if row.cv_score is None else f"{row.cv_score:.2f}",
            json.dumps(row.params, sort_keys=True),
            row.error or "",
        )
    console.print(view)


# ---------------------------------------------------------------------------
# 子命令
# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    config = load_experiment_config(args.config)
    if args.seed is not None:
        config = config.model_copy(update={"seed": [args.seed]})
    table = run_experiment(config, threads=args.threads)
    _print_results(table)
    fmt = args.format or config.format
    # 未指定输出路径时写到结果目录，文件名取配置文件名
    out = args.out or config.output or Path(get_config().results_dir) / f"{Path(args.config).stem}.{fmt}"
    emit_results(table, out, fmt)
    failed = [row for row in table.rows if not row.success]
    return EXIT_RUNTIME if failed and len(failed) == len(table.rows) else EXIT_OK


def _load_pair(args):
    kind = ObjectKind(args.kind) if args.kind else None
    a = load_dataset(args.a, kind=kind)
    b = load_dataset(args.b, kind=kind)
    if a.kind is ObjectKind.STRING and dataset_alphabet(a) != dataset_alphabet(b):
        raise DataFormatError(f"两个文件的字母表不同: {dataset_alphabet(a)!r} vs {dataset_alphabet(b)!r}")
    return a, b


def cmd_distance(args) -> int:
    a, b = _load_pair(args)
    measure = get_measure(args.measure)
    D = cross_distances(a.objects, b.objects, measure, args.threads)
    for row in D:
        print("\t".join(_format_distance(v, measure) for v in row))
    return EXIT_OK


def cmd_sample(args) -> int:
    kind = ObjectKind(args.kind)
    alphabet = None
    if args.holdout:
        source = load_dataset(args.holdout, kind=kind)
        dist = DataHoldout(source, without_replacement=not args.with_replacement)
        if kind is ObjectKind.STRING:
            alphabet = dataset_alphabet(source)
    elif kind is ObjectKind.TIME_SERIES:
        dist = RandomTimeSeries(args.length_min or 2, args.length_max or 10, args.n_vars, args.element_std)
    elif kind is ObjectKind.STRING:
        alphabet = args.alphabet or DEFAULT_ALPHABET[: args.alphabet_size]
        dist = RandomString(args.length_min or 2, args.length_max or 10, len(alphabet))
    else:
        dist = RandomVectorSet(args.length_min or 3, args.length_max or 15, args.dim)
    sample = sample_omegas(dist, args.R, args.seed, args.threads)
    save_omega_sample(sample, args.out, alphabet=alphabet)
    console.print(f"[green]已写出 {len(sample)} 个 ω → {args.out}[/green]")
    return EXIT_OK


def cmd_embed(args) -> int:
    omegas = load_omega_sample(args.model)
    data = load_dataset(args.data)
    model = EmbeddingModel(omegas, args.gamma, args.measure or measure_for_kind(omegas.kind))
    features = embed_dataset(model, data, args.threads)
    write_matrix(features, args.out)
    console.print(f"[green]嵌入 {features.shape[0]}×{features.shape[1]} → {args.out}[/green]")
    return EXIT_OK


def cmd_train(args) -> int:
    data = load_dataset(args.data)
    measure = get_measure(args.measure) if args.measure else measure_for_kind(data.kind)
    if args.holdout:
        dist = DataHoldout(data)
    else:
        dist = default_distribution(data)
        if args.length_max:
            dist = with_length_max(dist, args.length_max)
    omegas = sample_omegas(dist, args.R, args.seed, args.threads)
    features = embed_dataset(EmbeddingModel(omegas, args.gamma, measure), data, args.threads)
    model = train_linear(features, data.labels, args.mu, args.loss)
    train_acc = 100.0 * accuracy(predict_linear(model, features), data.labels)

    record = {
        "model": {"kind": "linear", **model.to_dict()},
        "gamma": args.gamma,
        "R": args.R,
        "seed": args.seed,
        "measure": measure.name,
        "distribution": dist.to_dict(),
        "grid": {"gamma": [args.gamma], "R": [args.R], "mu": [args.mu], "selection": "fixed"},
        "label_mapping": data.metadata.get("label_mapping", {}),
        "alphabet": dataset_alphabet(data) if data.kind is ObjectKind.STRING else None,
        "data": {"path": str(args.data), "checksum": data.metadata.get("checksum")},
        "train_accuracy": train_acc,
        "environment": SystemInfo(args.threads).to_dict(),
    }
    save_model_record(plain(record), args.out)
    console.print(f"[green]训练准确率 {train_acc:.2f}% ，模型 → {args.out}[/green]")
    return EXIT_OK


def _holdout_source(record) -> Optional[Dataset]:
    info = record["distribution"].get("source", {})
    path = info.get("source_path")
    if not path:
        raise DataFormatError("DataHoldout 模型缺少来源数据路径")
    if info.get("checksum") and file_checksum(path) != info["checksum"]:
        raise DataFormatError("DataHoldout 来源数据的校验和与模型记录不符", path=path)
    return load_dataset(path)


def _aligned_labels(data: Dataset, model_mapping) -> np.ndarray:
    """把数据文件的标签映射到模型训练时的类别下标（未知标签记为 -1）"""
    if not model_mapping:
        return data.labels
    inverse = {index: token for token, index in data.metadata.get("label_mapping", {}).items()}
    return np.array([model_mapping.get(inverse.get(int(y)), -1) for y in data.labels], dtype=np.int64)


def cmd_evaluate(args) -> int:
    record = load_model_record(args.model)
    data = load_dataset(args.data)
    if record.get("alphabet") and dataset_alphabet(data) != record["alphabet"]:
        raise DataFormatError(f"数据字母表 {dataset_alphabet(data)!r} 与模型 {record['alphabet']!r} 不同")
    source = _holdout_source(record) if record["distribution"]["tag"] == DataHoldout.tag else None
    dist = distribution_from_dict(record["distribution"], source)
    omegas = sample_omegas(dist, int(record["R"]), int(record["seed"]), args.threads)
    features = embed_dataset(EmbeddingModel(omegas, float(record["gamma"]), record["measure"]), data, args.threads)
    model = LinearModel.from_dict(record["model"])
    labels = _aligned_labels(data, record.get("label_mapping"))
    acc = 100.0 * accuracy(predict_linear(model, features), labels)

    view = Table(title="评估结果")
    view.add_column("样本数")
    view.add_column("准确率 (%)")
    view.add_row(str(len(data)), f"{acc:.2f}")
    console.print(view)
    return EXIT_OK


def cmd_analyze_kernel(args) -> int:
    data = gen_synthetic(args.task, args.n, derive_seed(args.seed, "data"))
    measure = get_measure(args.measure) if args.measure else measure_for_kind(data.kind)
    dist = default_distribution(data)
    pairs = list(itertools.combinations(data.objects, 2))
    report = kernel_convergence_sweep(dist, args.gamma, measure, pairs, args.R_list, args.seed,
                                      args.trials, threads=args.threads)
    view = Table(title=f"核收敛 ({measure.name}, γ={args.gamma}, R_ref={report.reference_R})")
    view.add_column("R")
    view.add_column("平均最大误差")
    view.add_column("与下一级之比")
    ratios = report.ratios() + [None]
    for R, ratio in zip(report.R_list, ratios):
        view.add_row(str(R), f"{report.mean_errors[R]:.6f}", "-" if ratio is None else f"{ratio:.3f}")
    console.print(view)
    if args.out:
        Path(args.out).write_text(json.dumps(plain(report.to_dict()), sort_keys=True, indent=2) + "\n",
                                  encoding="utf-8")
    return EXIT_OK


def cmd_gen_synthetic(args) -> int:
    data = gen_synthetic(args.task, args.n, args.seed)
    write_dataset(data, args.out)
    console.print(f"[green]已生成 {len(data)} 个样本 → {args.out}[/green]")
    return EXIT_OK


def cmd_timing(args) -> int:
    data = gen_synthetic(args.task, max(args.n_list), derive_seed(args.seed, "data"))
    measure = get_measure(args.measure) if args.measure else measure_for_kind(data.kind)
    report = timing_scaling_report(measure, default_distribution(data), args.n_list, args.R_list, args.seed,
                                   objects=data.objects, repeats=args.repeats, threads=args.threads or 1)
    view = Table(title=f"嵌入耗时 ({measure.name})")
    view.add_column("n \\ R")
    for R in report.R_list:
        view.add_column(str(R))
    for n, row in zip(report.n_list, report.seconds):
        view.add_row(str(n), *(f"{s:.4f}" for s in row))
    console.print(view)
    console.print(f"n 斜率 {report.slope_n:.3f}，R 斜率 {report.slope_R:.3f}"
                  + ("（退化扫描）" if report.degenerate else ""))
    if args.out:
        Path(args.out).write_text(json.dumps(plain(report.to_dict()), sort_keys=True, indent=2) + "\n",
                                  encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# 参数解析
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="工作线程数上限")
    common.add_argument("--log-level", default=None, help="日志级别")

    parser = _Parser(prog="d2ke", description="D2KE: 由距离构造正定核的随机特征")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", parents=[common], help="按配置文件运行实验")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="覆盖配置中的种子")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["tsv", "json"], default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("distance", parents=[common], help="计算两个数据文件之间的距离")
    p.add_argument("--measure", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--kind", choices=[k.value for k in ObjectKind], default=None)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("sample", parents=[common], help="从 p(ω) 抽样并写出")
    p.add_argument("--kind", required=True, choices=[k.value for k in ObjectKind])
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--length-min", type=int, default=None)
    p.add_argument("--length-max", type=int, default=None)
    p.add_argument("--alphabet-size", type=int, default=4)
    p.add_argument("--alphabet", default=None)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n-vars", type=int, default=1)
    p.add_argument("--element-std", type=float, default=1.0)
    p.add_argument("--holdout", default=None, help="从该数据文件抽取（RSM）")
    p.add_argument("--with-replacement", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("embed", parents=[common], help="用 ω 文件嵌入数据")
    p.add_argument("--model", required=True, help="ω 文件")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--measure", default=None)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("train", parents=[common], help="训练 D2KE 线性模型")
    p.add_argument("--data", required=True)
    p.add_argument("--measure", default=None)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--loss", choices=["hinge-squared", "logistic"], default=None)
    p.add_argument("--length-max", type=int, default=None)
    p.add_argument("--holdout", action="store_true", help="ω 取自训练数据（RSM）")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common], help="评估模型文件")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("analyze-kernel", parents=[common], help="随机特征核的收敛分析")
    p.add_argument("--task", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R-list", dest="R_list", type=_int_list, required=True)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--measure", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze_kernel)

    p = sub.add_parser("gen-synthetic", parents=[common], help="生成合成数据集")
    p.add_argument("--task", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("timing", parents=[common], help="嵌入耗时规模分析")
    p.add_argument("--task", required=True)
    p.add_argument("--n-list", dest="n_list", type=_int_list, required=True)
    p.add_argument("--R-list", dest="R_list", type=_int_list, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--measure", default=None)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_timing)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            setup_logger(args.log_level.upper())
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError(f"--threads 必须 ≥ 1，实际 {args.threads}")
            update_config(threads=args.threads)
        return args.func(args)
    except ConfigError as e:
        console.print(f"[red]配置错误: {e}[/red]")
        return EXIT_CONFIG
    except (D2keError, OSError, ValueError, ArithmeticError, MemoryError) as e:
        log.error(f"运行失败: {type(e).__name__}: {e}")
        console.print(f"[red]运行失败: {e}[/red]")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
