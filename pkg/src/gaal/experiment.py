"""End-to-end active-learning sessions and replicated benchmarks.

One session: train the generator once on the whole unlabeled pool, seed the
labeled set with a random batch, then loop acquire -> oracle -> retrain ->
evaluate until the labeling budget (which counts every oracle interaction,
including skips and the initial batch) is spent. Replications across seeds
share the dataset and differ only in run randomness.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field

import numpy as np

from gaal import rng
from gaal import strategies as strat
from gaal.datasets import Dataset, ShiftSpec, apply_shift, filter_binary, load_idx, make_two_gaussians, normalize
from gaal.errors import ConfigError, ContractError
from gaal.gan import GanConfig, train_gan
from gaal.networks import GeneratorNet, load_network
from gaal.oracles import SKIP, GroundTruthOracle, NearestNeighborOracle
from gaal.svm import LabeledSet, SvmConfig, accuracy, empty_labeled_set, svm_train
from gaal.synthesis import SynthConfig, synthesize_queries

ORACLE_KINDS = ("ground_truth", "nearest_neighbor", "human")
STRATEGY_NAMES = ("gaal", "simple_gan", "svm_active", "random", "supervised", "mixed")


@dataclass
class TwoGaussiansSpec:
    n: int = 1000
    mean_pos: tuple = (0.6, 0.0)
    mean_neg: tuple = (-0.6, 0.0)
    sigma: float = 0.25
    test_n: int = 1000
    seed: int = 0  # dataset identity; run seeds never change the data
    shift: ShiftSpec | None = None

    kind = "two_gaussians"


@dataclass
class IdxSpec:
    train_images: str = ""
    train_labels: str = ""
    test_images: str = ""
    test_labels: str = ""
    class_a: int = 5
    class_b: int = 7

    kind = "idx"


@dataclass
class ExperimentConfig:
    strategy: str = "gaal"
    init_size: int = 50
    batch_size: int = 10
    budget: int = 100
    oracle: str = "ground_truth"
    skip_radius: float | None = None  # None: derived from the reference set
    seeds: tuple = (0,)
    image_shape: tuple | None = None  # for rendering queries to a labeler
    dataset: TwoGaussiansSpec | IdxSpec = field(default_factory=TwoGaussiansSpec)
    gan: GanConfig = field(default_factory=GanConfig)
    svm: SvmConfig = field(default_factory=SvmConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)

    def validate(self) -> None:
        if self.strategy not in STRATEGY_NAMES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.oracle not in ORACLE_KINDS:
            raise ConfigError(f"unknown oracle {self.oracle!r}")
        if self.init_size < 1:
            raise ConfigError(f"init_size must be >= 1, got {self.init_size}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.budget < self.init_size:
            raise ConfigError(
                f"budget ({self.budget}) must cover init_size ({self.init_size})"
            )
        if not self.seeds:
            raise ConfigError("seeds must not be empty")
        if self.oracle == "ground_truth" and self.dataset.kind != "two_gaussians":
            raise ConfigError("oracle ground_truth needs a synthetic dataset")
        self.gan.validate()
        self.svm.validate()
        self.synth.validate()


@dataclass
class LearningCurve:
    points: list  # [(labeled_count, accuracy)], labeled_count strictly increasing
    seed: int
    strategy: str


@dataclass
class RunResult:
    curve: LearningCurve
    labeled: int
    skipped: int
    oracle_interactions: int
    budget: int

    @property
    def budget_remaining(self) -> int:
        return self.budget - self.oracle_interactions


@dataclass
class CurveSummary:
    strategy: str
    points: list  # [(labeled_count, mean_accuracy, std_err)]
    n_seeds: int
    misaligned: bool = False


@dataclass
class ComparisonReport:
    summaries: list  # [CurveSummary]
    supervised_baseline: float


def build_datasets(spec, seed_offset: int = 0):
    """(pool dataset, test dataset, ground-truth fn or None) for a spec.

    The spec's own seed fixes the data; ``seed_offset`` exists only for
    tests that want a different draw.
    """
    if spec.kind == "two_gaussians":
        train_seed, test_seed, shift_seed = rng.split(spec.seed + seed_offset, 3)
        pool = make_two_gaussians(spec.n, spec.mean_pos, spec.mean_neg, spec.sigma, train_seed)
        test = make_two_gaussians(
            spec.test_n, spec.mean_pos, spec.mean_neg, spec.sigma, test_seed
        )
        if spec.shift is not None and not spec.shift.is_identity():
            test = apply_shift(test, spec.shift, shift_seed)
        mean_pos = np.asarray(spec.mean_pos, dtype=np.float64)
        mean_neg = np.asarray(spec.mean_neg, dtype=np.float64)

        def truth(x):
            # nearest true mode decides the class; boundary ties go positive
            return np.linalg.norm(x - mean_neg) - np.linalg.norm(x - mean_pos)

        return pool, test, truth
    if spec.kind == "idx":
        images, labels = load_idx(spec.train_images, spec.train_labels)
        pool = filter_binary(
            normalize(images).reshape(len(images), -1), labels, spec.class_a, spec.class_b,
            source_tag="idx",
        )
        t_images, t_labels = load_idx(spec.test_images, spec.test_labels)
        test = filter_binary(
            normalize(t_images).reshape(len(t_images), -1), t_labels,
            spec.class_a, spec.class_b, source_tag="idx",
        )
        return pool, test, None
    raise ConfigError(f"unknown dataset kind {spec.kind!r}")


def build_oracle(config: ExperimentConfig, pool: Dataset, truth_fn):
    if config.oracle == "ground_truth":
        if truth_fn is None:
            raise ConfigError("dataset provides no ground-truth function")
        return GroundTruthOracle(truth_fn)
    if config.oracle == "nearest_neighbor":
        reference = LabeledSet(pool.instances, pool.labels)
        return NearestNeighborOracle(reference, config.skip_radius)
    raise ConfigError(f"oracle {config.oracle!r} has no programmatic implementation")


def _needs_generator(strategy: str) -> bool:
    return strategy in ("gaal", "simple_gan", "mixed")


def run_active_learning(
    config: ExperimentConfig,
    seed: int,
    generator: GeneratorNet | None = None,
    query_dump_dir: str | None = None,
) -> RunResult:
    """One full session for one seed. ``generator`` short-circuits GAN
    training (e.g. a loaded checkpoint); otherwise the generator is trained
    exactly once, before the query loop. ``query_dump_dir`` writes every
    synthesized batch as PGM images plus a manifest."""
    config.validate()
    pool_data, test_data, truth_fn = build_datasets(config.dataset)
    oracle = build_oracle(config, pool_data, truth_fn)

    if config.strategy == "supervised":
        return _run_supervised(config, seed, pool_data, test_data, oracle)

    seed_gan, seed_init, seed_iters = rng.split(seed, 3)
    if generator is None and _needs_generator(config.strategy):
        if config.gan.checkpoint:
            generator = load_network(config.gan.checkpoint, GeneratorNet)
        else:
            gan_cfg = dataclasses.replace(
                config.gan, seed=int(rng.stream(seed_gan).integers(2**63 - 1))
            )
            generator, _, _ = train_gan(pool_data.instances, gan_cfg)

    pool = strat.Pool(pool_data.instances, pool_data.labels)
    labeled = skipped = interactions = 0
    training = empty_labeled_set(pool_data.feature_dim)
    points = []

    def consume(batch):
        nonlocal labeled, skipped, interactions, training
        fresh_x, fresh_y = [], []
        for i, item in enumerate(batch.items):
            resp = oracle.respond(item.x, f"q{interactions + i}")
            if resp.verdict == SKIP:
                skipped += 1
            else:
                fresh_x.append(item.x)
                fresh_y.append(resp.verdict)
                labeled += 1
        interactions += len(batch.items)
        if fresh_x:
            training = training.add(np.array(fresh_x), np.array(fresh_y))
        return bool(fresh_x)

    iter_rng = rng.stream(seed_iters)
    init_batch = strat.select_random(pool, config.init_size, seed_init)
    clf = None
    if consume(init_batch):
        clf = svm_train(training, config.svm)
        points.append((len(training), accuracy(clf, test_data.instances, test_data.labels)))

    iteration = 0
    while interactions < config.budget:
        k = min(config.batch_size, config.budget - interactions)
        kind = (
            strat.mixed_schedule(iteration)
            if config.strategy == "mixed"
            else strat.StrategyKind(config.strategy)
        )
        sub_seed = int(iter_rng.integers(2**63 - 1))
        if kind == strat.StrategyKind.GAAL:
            if clf is None:
                raise ContractError("synthesis needs a trained classifier")
            synth_cfg = dataclasses.replace(config.synth, seed=sub_seed)
            batch = synthesize_queries(clf, generator, k, synth_cfg)
            if query_dump_dir is not None:
                shape = config.image_shape or (1, pool_data.feature_dim)
                dump_queries(
                    batch,
                    os.path.join(query_dump_dir, f"iteration_{iteration:03d}"),
                    shape,
                    ids=[f"q{interactions + j}" for j in range(len(batch.items))],
                )
        elif kind == strat.StrategyKind.SIMPLE_GAN:
            batch = strat.select_simple_gan(generator, k, sub_seed)
        elif kind == strat.StrategyKind.SVM_ACTIVE:
            if pool.available_count() == 0:
                break
            batch = strat.select_svm_active(clf, pool, k)
        else:
            if pool.available_count() == 0:
                break
            batch = strat.select_random(pool, k, sub_seed)
        batch.iteration = iteration
        if not batch.items:
            break
        if consume(batch):
            clf = svm_train(training, config.svm)
            points.append(
                (len(training), accuracy(clf, test_data.instances, test_data.labels))
            )
        iteration += 1

    curve = LearningCurve(points=points, seed=seed, strategy=config.strategy)
    return RunResult(
        curve=curve,
        labeled=labeled,
        skipped=skipped,
        oracle_interactions=interactions,
        budget=config.budget,
    )


def _run_supervised(config, seed, pool_data, test_data, oracle) -> RunResult:
    """Passive baseline: label the whole pool, train once."""
    n = len(pool_data)
    verdicts = [oracle.respond(x, f"q{i}") for i, x in enumerate(pool_data.instances)]
    keep = [i for i, r in enumerate(verdicts) if r.verdict != SKIP]
    training = LabeledSet(
        pool_data.instances[keep], np.array([verdicts[i].verdict for i in keep], dtype=float)
    )
    clf = svm_train(training, config.svm)
    acc = accuracy(clf, test_data.instances, test_data.labels)
    curve = LearningCurve(points=[(len(training), acc)], seed=seed, strategy="supervised")
    return RunResult(
        curve=curve,
        labeled=len(training),
        skipped=n - len(training),
        oracle_interactions=n,
        budget=config.budget,
    )


def run_replicated(config: ExperimentConfig) -> CurveSummary:
    """Mean and standard error of the mean across the config's seeds,
    aligned on labeled counts shared by every replication."""
    config.validate()
    curves = [run_active_learning(config, s).curve for s in config.seeds]
    return summarize_curves(curves, config.strategy)


def summarize_curves(curves, strategy: str) -> CurveSummary:
    count_sets = [set(c for c, _ in curve.points) for curve in curves]
    common = sorted(set.intersection(*count_sets)) if count_sets else []
    misaligned = any(counts != set(common) for counts in count_sets)
    by_curve = [dict(curve.points) for curve in curves]
    points = []
    for count in common:
        vals = np.array([lookup[count] for lookup in by_curve])
        err = float(np.std(vals, ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
        points.append((count, float(vals.mean()), err))
    return CurveSummary(
        strategy=strategy, points=points, n_seeds=len(curves), misaligned=misaligned
    )


def compare_strategies(configs) -> ComparisonReport:
    """Replicated comparison over configs that share dataset and seeds,
    with the passive fully-supervised accuracy as the reference line."""
    configs = list(configs)
    if not configs:
        raise ConfigError("compare_strategies needs at least one config")
    base = configs[0]
    for other in configs[1:]:
        if other.dataset != base.dataset:
            raise ConfigError("configs must share the dataset")
        if tuple(other.seeds) != tuple(base.seeds):
            raise ConfigError("configs must share the seed list")
    summaries = [run_replicated(cfg) for cfg in configs]
    sup_cfg = dataclasses.replace(base, strategy="supervised")
    sup_accs = [run_active_learning(sup_cfg, s).curve.points[0][1] for s in base.seeds]
    return ComparisonReport(
        summaries=summaries, supervised_baseline=float(np.mean(sup_accs))
    )


# ---------------------------------------------------------------------------
# CSV emission


def write_curve_csv(path, curve: LearningCurve) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("labeled_count,accuracy\n")
        for count, acc in curve.points:
            fh.write(f"{count},{format(acc, '.17g')}\n")


def write_summary_csv(path, summary: CurveSummary) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("labeled_count,mean_accuracy,std_err\n")
        for count, mean_acc, err in summary.points:
            fh.write(f"{count},{format(mean_acc, '.17g')},{format(err, '.17g')}\n")


def write_comparison_csv(path, report: ComparisonReport) -> None:
    """One row per (strategy, curve point); the constant
    ``supervised_baseline`` column is the horizontal reference line."""
    with open(path, "w", newline="") as fh:
        fh.write("strategy,labeled_count,mean_accuracy,std_err,supervised_baseline\n")
        baseline = format(report.supervised_baseline, ".17g")
        for summary in report.summaries:
            for count, mean_acc, err in summary.points:
                fh.write(
                    f"{summary.strategy},{count},{format(mean_acc, '.17g')},"
                    f"{format(err, '.17g')},{baseline}\n"
                )
