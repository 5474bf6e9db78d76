"""Dataset generation, experiment configs, and training runs.

An experiment samples a compact box in the input space, labels it with a
target function evaluated through the algebra arithmetic, trains a
perceptron on one seeded stream, and scores it on an independent
held-out stream.  Everything downstream of the config seed is
deterministic, so reports are byte-reproducible.
"""

from __future__ import annotations

import dataclasses
import hashlib
import time
from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, embed, mul_direct, parse_algebra, serialize_algebra
from . import zoo
from .network import (
    HMLPParams,
    SplitActivation,
    init,
    loss_mse,
    train_sgd,
    _Engine,
)


class ConfigError(ValueError):
    """Bad experiment configuration (value or file syntax)."""


TARGET_SQUARE = "square"
TARGET_PRODUCT_PAIR = "product-pair"
TARGET_SPLIT_SIN = "split-sin"
TARGET_AFFINE = "affine"
TARGET_KINDS = (TARGET_SQUARE, TARGET_PRODUCT_PAIR, TARGET_SPLIT_SIN, TARGET_AFFINE)


@dataclass(frozen=True)
class TargetFunction:
    """Continuous target on the box: square (x*x), product-pair (x*y),
    split-sin (componentwise sine), or affine (a*x + b with fixed a, b)."""

    kind: str
    a: np.ndarray | None = None
    b: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in TARGET_KINDS:
            raise ConfigError(f"unknown target kind {self.kind!r}")

    @property
    def arity(self) -> int:
        return 2 if self.kind == TARGET_PRODUCT_PAIR else 1

    def resolved(self, algebra: Algebra) -> "TargetFunction":
        """Fill in affine defaults (a = 1, b = 0) for a concrete algebra."""
        if self.kind != TARGET_AFFINE:
            return self
        d = algebra.dim
        a = embed(1.0, d) if self.a is None else np.asarray(self.a, dtype=np.float64)
        b = np.zeros(d) if self.b is None else np.asarray(self.b, dtype=np.float64)
        if a.shape != (d,) or b.shape != (d,):
            raise ConfigError(f"affine constants must have length {d}")
        return TargetFunction(kind=self.kind, a=a, b=b)

    def apply(self, algebra: Algebra, xs: np.ndarray) -> np.ndarray:
        if self.kind == TARGET_SQUARE:
            return mul_direct(algebra, xs[0], xs[0])
        if self.kind == TARGET_PRODUCT_PAIR:
            return mul_direct(algebra, xs[0], xs[1])
        if self.kind == TARGET_SPLIT_SIN:
            return np.sin(xs[0])
        return mul_direct(algebra, self.a, xs[0]) + self.b


@dataclass(frozen=True)
class Dataset:
    algebra: Algebra
    n_inputs: int
    box: tuple[float, float]
    inputs: np.ndarray  # (samples, n_inputs, dim)
    targets: np.ndarray  # (samples, dim)
    seed: int


@dataclass(frozen=True)
class ExperimentConfig:
    algebra: Algebra
    algebra_label: str
    target: TargetFunction
    n_inputs: int
    hidden: int
    activation: SplitActivation
    samples: int
    box: tuple[float, float]
    epochs: int
    batch_size: int
    learning_rate: float
    seed: int


def make_config(
    algebra,
    target,
    hidden: int = 16,
    activation=SplitActivation.SIGMOID,
    samples: int = 1024,
    box: tuple[float, float] = (-1.0, 1.0),
    epochs: int = 200,
    batch_size: int = 64,
    learning_rate: float = 0.05,
    seed: int = 0,
) -> ExperimentConfig:
    """Build a validated config; algebra and target accept names."""
    if isinstance(algebra, Algebra):
        label = algebra.name or "(inline)"
    else:
        label = str(algebra)
        algebra = zoo.from_spec_string(label)
    if isinstance(target, str):
        target = TargetFunction(kind=target)
    target = target.resolved(algebra)
    lo, hi = float(box[0]), float(box[1])
    if not lo < hi:
        raise ConfigError(f"invalid box [{lo}, {hi}]")
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    if hidden < 1:
        raise ConfigError("hidden must be >= 1")
    if epochs < 0:
        raise ConfigError("epochs must be >= 0")
    if batch_size < 1:
        raise ConfigError("batch_size must be >= 1")
    if learning_rate < 0:
        raise ConfigError("learning_rate must be >= 0")
    if seed < 0:
        raise ConfigError("seed must be >= 0")
    if isinstance(activation, str):
        activation = SplitActivation.from_name(activation)
    return ExperimentConfig(
        algebra=algebra,
        algebra_label=label,
        target=target,
        n_inputs=target.arity,
        hidden=hidden,
        activation=activation,
        samples=samples,
        box=(lo, hi),
        epochs=epochs,
        batch_size=batch_size,
        learning_rate=learning_rate,
        seed=seed,
    )


_CONFIG_KEYS = {
    "algebra", "target", "target_a", "target_b", "inputs", "hidden",
    "activation", "samples", "box", "epochs", "batch_size",
    "learning_rate", "seed",
}


def parse_config(text: str, base_dir=None) -> ExperimentConfig:
    """Parse the `key: value` experiment-config grammar.

    Required keys: algebra (zoo name or spec-file path, resolved against
    base_dir) and target.  Everything else falls back to make_config's
    defaults.  `box` takes two numbers; `target_a`/`target_b` take
    per-coefficient values for the affine target.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unrecognized config line {line!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value.strip()
    for required in ("algebra", "target"):
        if required not in raw:
            raise ConfigError(f"config missing required key {required!r}")

    source = raw["algebra"]
    try:
        algebra = zoo.from_spec_string(source)
        label = source
    except ValueError:
        import os

        path = source if base_dir is None else os.path.join(base_dir, source)
        if not os.path.isfile(path):
            raise ConfigError(
                f"algebra {source!r} is neither a known name nor a readable file"
            ) from None
        with open(path, encoding="utf-8") as fh:
            algebra = parse_algebra(fh.read())
        label = algebra.name or source

    def coeffs(key):
        if key not in raw:
            return None
        try:
            return np.array([float(tok) for tok in raw[key].split()])
        except ValueError:
            raise ConfigError(f"bad numbers in {key!r}") from None

    target = TargetFunction(kind=raw["target"], a=coeffs("target_a"), b=coeffs("target_b"))

    kwargs = {}
    try:
        if "hidden" in raw:
            kwargs["hidden"] = int(raw["hidden"])
        if "activation" in raw:
            kwargs["activation"] = raw["activation"]
        if "samples" in raw:
            kwargs["samples"] = int(raw["samples"])
        if "box" in raw:
            lo, hi = raw["box"].split()
            kwargs["box"] = (float(lo), float(hi))
        if "epochs" in raw:
            kwargs["epochs"] = int(raw["epochs"])
        if "batch_size" in raw:
            kwargs["batch_size"] = int(raw["batch_size"])
        if "learning_rate" in raw:
            kwargs["learning_rate"] = float(raw["learning_rate"])
        if "seed" in raw:
            kwargs["seed"] = int(raw["seed"])
    except ValueError as exc:
        raise ConfigError(f"bad config value: {exc}") from None

    cfg = make_config(algebra, target, **kwargs)
    cfg = dataclasses.replace(cfg, algebra_label=label)
    if "inputs" in raw and int(raw["inputs"]) != cfg.n_inputs:
        raise ConfigError(
            f"target {cfg.target.kind!r} takes {cfg.n_inputs} input(s), "
            f"config says {raw['inputs']}"
        )
    return cfg


def canonical_text(cfg: ExperimentConfig) -> str:
    """Deterministic rendering of every resolved config field."""
    tgt = cfg.target
    lines = [
        f"activation: {cfg.activation.value}",
        f"algebra: {cfg.algebra_label}",
        f"batch_size: {cfg.batch_size}",
        f"box: {cfg.box[0]!r} {cfg.box[1]!r}",
        f"epochs: {cfg.epochs}",
        f"hidden: {cfg.hidden}",
        f"inputs: {cfg.n_inputs}",
        f"learning_rate: {cfg.learning_rate!r}",
        f"samples: {cfg.samples}",
        f"seed: {cfg.seed}",
        f"target: {tgt.kind}",
    ]
    if tgt.kind == TARGET_AFFINE:
        lines.append("target_a: " + " ".join(repr(float(v)) for v in tgt.a))
        lines.append("target_b: " + " ".join(repr(float(v)) for v in tgt.b))
    return "\n".join(lines) + "\n--algebra--\n" + serialize_algebra(cfg.algebra)


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_text(cfg).encode()).hexdigest()[:12]


def generate_dataset(cfg: ExperimentConfig) -> Dataset:
    """Sample inputs uniformly per coefficient and label them exactly."""
    lo, hi = cfg.box
    d = cfg.algebra.dim
    rng = np.random.default_rng(cfg.seed)
    inputs = rng.uniform(lo, hi, (cfg.samples, cfg.n_inputs, d))
    targets = np.empty((cfg.samples, d))
    for s in range(cfg.samples):
        targets[s] = cfg.target.apply(cfg.algebra, inputs[s])
    return Dataset(
        algebra=cfg.algebra,
        n_inputs=cfg.n_inputs,
        box=cfg.box,
        inputs=inputs,
        targets=targets,
        seed=cfg.seed,
    )


def dense_grid_dataset(cfg: ExperimentConfig, points_per_axis: int) -> Dataset:
    """Regular grid over the box for sup-error scans.

    Only offered for one input over algebras of dimension <= 2; anything
    larger would need exponentially many points.
    """
    d = cfg.algebra.dim
    if cfg.n_inputs != 1 or d > 2:
        raise ConfigError("dense grid needs one input and dimension <= 2")
    axes = [np.linspace(cfg.box[0], cfg.box[1], points_per_axis) for _ in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    inputs = np.stack([m.ravel() for m in mesh], axis=-1).reshape(-1, 1, d)
    targets = np.empty((inputs.shape[0], d))
    for s in range(inputs.shape[0]):
        targets[s] = cfg.target.apply(cfg.algebra, inputs[s])
    return Dataset(
        algebra=cfg.algebra,
        n_inputs=1,
        box=cfg.box,
        inputs=inputs,
        targets=targets,
        seed=0,
    )


def sup_error(params: HMLPParams, dataset: Dataset) -> float:
    """Largest per-sample absolute error |f(x) - net(x)| over the dataset."""
    engine = _Engine(params.algebra)
    _, _, out = engine.forward(params, dataset.inputs)
    diff = out - dataset.targets
    return float(np.max(np.sqrt(np.sum(diff * diff, axis=1))))


@dataclass
class RunReport:
    """Measured outcome of one experiment run."""

    config_hash: str
    algebra_label: str
    target_kind: str
    n_inputs: int
    hidden: int
    activation: str
    samples: int
    box: tuple[float, float]
    epochs: int
    batch_size: int
    learning_rate: float
    seed: int
    train_mse: float
    holdout_mse: float
    sup_error: float
    seconds: float
    loss_trace: tuple[float, ...]
    error: str | None = None

    def to_machine(self) -> str:
        """Byte-reproducible rendering: everything except wall-clock time."""
        lines = [
            f"config {self.config_hash}",
            f"algebra {self.algebra_label}",
            f"target {self.target_kind}",
            f"inputs {self.n_inputs}",
            f"hidden {self.hidden}",
            f"activation {self.activation}",
            f"samples {self.samples}",
            f"box {self.box[0]!r} {self.box[1]!r}",
            f"epochs {self.epochs}",
            f"batch_size {self.batch_size}",
            f"learning_rate {self.learning_rate!r}",
            f"seed {self.seed}",
            f"train_mse {self.train_mse!r}",
            f"holdout_mse {self.holdout_mse!r}",
            f"sup_error {self.sup_error!r}",
            "loss_trace " + " ".join(repr(v) for v in self.loss_trace),
        ]
        if self.error is not None:
            lines.append(f"error {self.error}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [
            f"run {self.config_hash}: {self.algebra_label} / {self.target_kind}",
            f"  hidden={self.hidden} activation={self.activation} "
            f"samples={self.samples} epochs={self.epochs} "
            f"batch_size={self.batch_size} lr={self.learning_rate} "
            f"seed={self.seed}",
        ]
        if self.error is not None:
            lines.append(f"  FAILED: {self.error}")
        else:
            lines.append(
                f"  train_mse={self.train_mse:.6g} "
                f"holdout_mse={self.holdout_mse:.6g} "
                f"sup_error={self.sup_error:.6g}"
            )
        lines.append(f"  wall_clock={self.seconds:.3f}s")
        return "\n".join(lines) + "\n"

    def csv_row(self) -> str:
        if self.error is not None:
            metrics = ["nan", "nan", "nan"]
        else:
            metrics = [repr(self.train_mse), repr(self.holdout_mse), repr(self.sup_error)]
        err = (self.error or "").replace(",", ";").replace("\n", " ")
        return ",".join(
            [
                self.config_hash,
                self.algebra_label,
                self.target_kind,
                str(self.hidden),
                self.activation,
                *metrics,
                repr(self.seconds),
                err,
            ]
        )


CSV_HEADER = (
    "config_hash,algebra,target,hidden,activation,"
    "train_mse,holdout_mse,sup_error,seconds,error"
)


def reports_to_csv(reports) -> str:
    return "\n".join([CSV_HEADER, *(r.csv_row() for r in reports)]) + "\n"


def _derive_seed(base: int, role: int) -> int:
    """Disjoint deterministic child streams for data/init/shuffle."""
    state = np.random.SeedSequence([int(base), role]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def _execute(cfg: ExperimentConfig):
    """Run one experiment; returns (report, trained params)."""
    t0 = time.perf_counter()
    train_cfg = dataclasses.replace(cfg, seed=_derive_seed(cfg.seed, 0))
    holdout_cfg = dataclasses.replace(cfg, seed=_derive_seed(cfg.seed, 1))
    train_ds = generate_dataset(train_cfg)
    holdout_ds = generate_dataset(holdout_cfg)
    params = init(
        cfg.algebra, cfg.n_inputs, cfg.hidden, cfg.activation,
        _derive_seed(cfg.seed, 2),
    )
    if cfg.epochs >= 1:
        params, trace = train_sgd(
            params,
            (train_ds.inputs, train_ds.targets),
            epochs=cfg.epochs,
            batch_size=cfg.batch_size,
            learning_rate=cfg.learning_rate,
            seed=_derive_seed(cfg.seed, 3),
        )
    else:
        trace = [loss_mse(params, train_ds.inputs, train_ds.targets)]
    report = RunReport(
        config_hash=config_hash(cfg),
        algebra_label=cfg.algebra_label,
        target_kind=cfg.target.kind,
        n_inputs=cfg.n_inputs,
        hidden=cfg.hidden,
        activation=cfg.activation.value,
        samples=cfg.samples,
        box=cfg.box,
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        learning_rate=cfg.learning_rate,
        seed=cfg.seed,
        train_mse=loss_mse(params, train_ds.inputs, train_ds.targets),
        holdout_mse=loss_mse(params, holdout_ds.inputs, holdout_ds.targets),
        sup_error=sup_error(params, holdout_ds),
        seconds=time.perf_counter() - t0,
        loss_trace=tuple(trace),
    )
    return report, params


def run_experiment(cfg: ExperimentConfig) -> RunReport:
    """Train on one seeded stream, score on a disjoint held-out stream."""
    report, _ = _execute(cfg)
    return report


def sweep(cfgs) -> list[RunReport]:
    """Run each config in order; a failed run becomes an error row."""
    if not cfgs:
        raise ConfigError("sweep needs at least one config")
    reports = []
    for cfg in cfgs:
        t0 = time.perf_counter()
        try:
            reports.append(run_experiment(cfg))
        except Exception as exc:  # error recorded in-row, sweep continues
            reports.append(
                RunReport(
                    config_hash=config_hash(cfg),
                    algebra_label=cfg.algebra_label,
                    target_kind=cfg.target.kind,
                    n_inputs=cfg.n_inputs,
                    hidden=cfg.hidden,
                    activation=cfg.activation.value,
                    samples=cfg.samples,
                    box=cfg.box,
                    epochs=cfg.epochs,
                    batch_size=cfg.batch_size,
                    learning_rate=cfg.learning_rate,
                    seed=cfg.seed,
                    train_mse=float("nan"),
                    holdout_mse=float("nan"),
                    sup_error=float("nan"),
                    seconds=time.perf_counter() - t0,
                    loss_trace=(),
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return reports
