"""Fine-tuning: encoder + dropout + linear head trained with weighted cross-entropy.

The training recipe is deliberately plain: AdamW, fixed epoch count, no
early stopping, final-epoch checkpoint. One seed controls parameter
initialization, batch shuffling, and dropout masks; identical config and
seed reproduce identical epoch losses on the CPU backend.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import torch
from torch import nn

from . import metrics
from .encoders import build_encoder
from .errors import AllConfigsFailed, CheckpointMismatch, ShapeMismatch
from .tasks import TaskSpec, get_task
from .textprep import (
    DEFAULT_NORMALIZATION,
    NormalizationConfig,
    TokenizedSample,
    normalize,
    tokenize,
)

CLAMP_EPS = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    """Complete hyperparameter record for one fine-tuning run."""

    task_id: str
    encoder_id: str
    dropout_rate: float
    class_weights: dict[str, float]
    seed: int
    max_seq_len: int = 128
    batch_size: int = 16
    epochs: int = 3
    learning_rate: float = 4e-5
    optimizer: str = "AdamW"
    reduction: str = "weighted_mean"

    def __post_init__(self):
        task = get_task(self.task_id)
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if set(self.class_weights) != set(task.labels):
            raise ValueError(
                f"class_weights keys {sorted(self.class_weights)} must equal task labels {sorted(task.labels)}"
            )
        if any(w <= 0 for w in self.class_weights.values()):
            raise ValueError("class weights must all be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.optimizer != "AdamW":
            raise ValueError(f"unsupported optimizer {self.optimizer!r}")
        if self.max_seq_len < 2:
            raise ValueError("max_seq_len must be >= 2")

    @property
    def task(self) -> TaskSpec:
        return get_task(self.task_id)

    def weight_vector(self) -> list[float]:
        return [float(self.class_weights[label]) for label in self.task.labels]

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "encoder_id": self.encoder_id,
            "dropout_rate": self.dropout_rate,
            "class_weights": dict(self.class_weights),
            "seed": self.seed,
            "max_seq_len": self.max_seq_len,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "optimizer": self.optimizer,
            "reduction": self.reduction,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


def default_config(task_id: str, encoder_id: str = "tiny", dropout_rate: float = 0.2, seed: int = 0) -> TrainConfig:
    """The standard recipe: weight 4.0 on the minority class, defaults elsewhere."""
    task = get_task(task_id)
    return TrainConfig(
        task_id=task_id,
        encoder_id=encoder_id,
        dropout_rate=dropout_rate,
        class_weights=task.default_class_weights(),
        seed=seed,
    )


class ModelAssembly(nn.Module):
    """Encoder -> dropout -> affine head -> softmax over C classes."""

    def __init__(self, encoder: nn.Module, hidden_size: int, num_classes: int, dropout_rate: float):
        super().__init__()
        self.encoder = encoder
        self.dropout = nn.Dropout(dropout_rate)
        self.head = nn.Linear(hidden_size, num_classes)
        # Zero-initialized head: predictions start uniform, so even very
        # short runs at small learning rates move the decision boundary in
        # the gradient direction instead of fighting a random head.
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)

    def forward(self, token_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        pooled = self.encoder(token_ids, attention_mask)
        return self.head(self.dropout(pooled))


def collate(samples, pad_id: int) -> tuple[torch.Tensor, torch.Tensor]:
    """Pad a batch of tokenized samples to a rectangular id/mask pair."""
    width = max(len(s.token_ids) for s in samples)
    ids = torch.full((len(samples), width), pad_id, dtype=torch.long)
    mask = torch.zeros((len(samples), width), dtype=torch.long)
    for row, sample in enumerate(samples):
        n = len(sample.token_ids)
        ids[row, :n] = torch.tensor(sample.token_ids, dtype=torch.long)
        mask[row, :n] = torch.tensor(sample.attention_mask, dtype=torch.long)
    return ids, mask


def weighted_ce_terms(
    logits: torch.Tensor, targets: torch.Tensor, weight_vector: torch.Tensor
) -> tuple[torch.Tensor, torch.Tensor]:
    """Per-sample weighted loss terms and the applied weights.

    Mirrors skewkit.losses: softmax, clamp at CLAMP_EPS, natural log,
    weight attached to the true class.
    """
    if logits.ndim != 2 or logits.shape[0] != targets.shape[0]:
        raise ShapeMismatch(f"logits {tuple(logits.shape)} vs targets {tuple(targets.shape)}")
    probs = torch.softmax(logits, dim=1)
    true_probs = probs.gather(1, targets.unsqueeze(1)).squeeze(1)
    nll = -torch.log(true_probs.clamp(min=CLAMP_EPS))
    applied = weight_vector[targets]
    return applied * nll, applied


def _reduce_terms(terms: torch.Tensor, applied: torch.Tensor, reduction: str) -> torch.Tensor:
    if reduction == "weighted_mean":
        return terms.sum() / applied.sum()
    if reduction == "mean":
        return terms.mean()
    if reduction == "sum":
        return terms.sum()
    raise ValueError(f"unknown reduction {reduction!r}")


def forward(assembly: ModelAssembly, samples, pad_id: int, mode: str = "eval") -> np.ndarray:
    """Probability matrix (N, C) for a batch of tokenized samples."""
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    assembly.train(mode == "train")
    ids, mask = collate(samples, pad_id)
    grad_mode = torch.enable_grad if mode == "train" else torch.no_grad
    with grad_mode():
        logits = assembly(ids, mask)
        probs = torch.softmax(logits, dim=1)
    assembly.eval()
    return probs.detach().numpy().astype(np.float64)


@dataclass
class Checkpoint:
    """Final weights plus everything needed to rebuild the assembly."""

    config: TrainConfig
    normalization: NormalizationConfig
    state_dict: dict
    path: Path | None = None

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save(
            {
                "config": self.config.to_dict(),
                "normalization": self.normalization.to_dict(),
                "state_dict": self.state_dict,
            },
            path,
        )
        self.path = path
        return path

    @classmethod
    def load(cls, path: str | Path) -> "Checkpoint":
        payload = torch.load(Path(path), weights_only=False)
        return cls(
            config=TrainConfig.from_dict(payload["config"]),
            normalization=NormalizationConfig.from_dict(payload["normalization"]),
            state_dict=payload["state_dict"],
            path=Path(path),
        )


@dataclass
class TrainingRun:
    """Loss trajectory and final checkpoint for one configuration."""

    config: TrainConfig
    epoch_losses: tuple[float, ...]
    checkpoint: Checkpoint
    wallclock: float
    dev_history: tuple[metrics.EvalResult, ...] = ()

    def __post_init__(self):
        if len(self.epoch_losses) != self.config.epochs:
            raise ValueError("one loss per configured epoch required")
        if any(loss < 0 for loss in self.epoch_losses):
            raise ValueError("losses must be nonnegative")


def _prepare(split, tokenizer, norm_config: NormalizationConfig, max_seq_len: int):
    return [
        tokenize(normalize(s.text, norm_config), tokenizer, max_seq_len, s.id)
        for s in split.samples
    ]


def _rebuild_assembly(checkpoint: Checkpoint):
    config = checkpoint.config
    encoder, tokenizer, hidden = build_encoder(config.encoder_id, config.seed)
    assembly = ModelAssembly(encoder, hidden, config.task.num_classes, config.dropout_rate)
    assembly.load_state_dict(checkpoint.state_dict)
    assembly.eval()
    return assembly, tokenizer


def train(
    config: TrainConfig,
    train_split,
    dev_split=None,
    norm_config: NormalizationConfig = DEFAULT_NORMALIZATION,
    run_dir: str | Path | None = None,
) -> TrainingRun:
    """Fine-tune under ``config`` and return the per-epoch loss trajectory.

    The epoch loss is the exact weighted mean (or configured reduction)
    over all samples seen in that epoch. Dev-set evaluation runs after
    every epoch when a dev split is given.
    """
    task = config.task
    started = time.perf_counter()
    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)

    encoder, tokenizer, hidden = build_encoder(config.encoder_id, config.seed)
    assembly = ModelAssembly(encoder, hidden, task.num_classes, config.dropout_rate)
    optimizer = torch.optim.AdamW(assembly.parameters(), lr=config.learning_rate)
    weight_vector = torch.tensor(config.weight_vector(), dtype=torch.float32)

    samples = _prepare(train_split, tokenizer, norm_config, config.max_seq_len)
    targets = [task.label_index(s.label) for s in train_split.samples]
    dev_samples = _prepare(dev_split, tokenizer, norm_config, config.max_seq_len) if dev_split else None

    epoch_losses: list[float] = []
    dev_history: list[metrics.EvalResult] = []
    order = list(range(len(samples)))
    for _ in range(config.epochs):
        rng.shuffle(order)
        assembly.train()
        term_total = 0.0
        weight_total = 0.0
        count_total = 0
        for start in range(0, len(order), config.batch_size):
            batch_idx = order[start : start + config.batch_size]
            batch = [samples[i] for i in batch_idx]
            ids, mask = collate(batch, tokenizer.pad_id)
            batch_targets = torch.tensor([targets[i] for i in batch_idx], dtype=torch.long)
            terms, applied = weighted_ce_terms(assembly(ids, mask), batch_targets, weight_vector)
            loss = _reduce_terms(terms, applied, config.reduction)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            term_total += float(terms.detach().sum())
            weight_total += float(applied.sum())
            count_total += len(batch)
        if config.reduction == "weighted_mean":
            epoch_losses.append(term_total / weight_total)
        elif config.reduction == "mean":
            epoch_losses.append(term_total / count_total)
        else:
            epoch_losses.append(term_total)

        if dev_samples is not None:
            probs = forward(assembly, dev_samples, tokenizer.pad_id, mode="eval")
            pred = [task.labels[i] for i in np.argmax(probs, axis=1)]
            dev_history.append(metrics.evaluate(dev_split.labels(), pred, task.labels))

    assembly.eval()
    checkpoint = Checkpoint(
        config=config,
        normalization=norm_config,
        state_dict={k: v.detach().clone() for k, v in assembly.state_dict().items()},
    )
    if run_dir is not None:
        checkpoint.save(Path(run_dir) / "checkpoint.pt")

    return TrainingRun(
        config=config,
        epoch_losses=tuple(epoch_losses),
        checkpoint=checkpoint,
        wallclock=time.perf_counter() - started,
        dev_history=tuple(dev_history),
    )


def predict(checkpoint: Checkpoint | str | Path, split) -> list[str]:
    """Deterministic argmax labels for a split; ties go to the lower class index."""
    if not isinstance(checkpoint, Checkpoint):
        checkpoint = Checkpoint.load(checkpoint)
    task = checkpoint.config.task
    if tuple(split.task.labels) != tuple(task.labels):
        raise CheckpointMismatch(
            f"checkpoint trained for labels {task.labels}, split carries {split.task.labels}"
        )
    assembly, tokenizer = _rebuild_assembly(checkpoint)
    samples = _prepare(split, tokenizer, checkpoint.normalization, checkpoint.config.max_seq_len)
    probs = forward(assembly, samples, tokenizer.pad_id, mode="eval")
    # numpy argmax picks the first maximum, which is the documented tie rule
    return [task.labels[i] for i in np.argmax(probs, axis=1)]


@dataclass
class SweepCell:
    """One dropout rate's outcome inside a sweep; failures are recorded, not raised."""

    dropout_rate: float
    run: TrainingRun | None = None
    dev_eval: metrics.EvalResult | None = None
    test_eval: metrics.EvalResult | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class SweepReport:
    base_config: TrainConfig
    cells: list[SweepCell] = field(default_factory=list)

    def loss_curve_rows(self) -> list[tuple[int, float, float]]:
        """(epoch, dropout_rate, loss) rows for every successful cell."""
        rows = []
        for cell in self.cells:
            if cell.run is None:
                continue
            for epoch, loss in enumerate(cell.run.epoch_losses, start=1):
                rows.append((epoch, cell.dropout_rate, loss))
        return rows


def dropout_sweep(
    base_config: TrainConfig,
    rates,
    train_split,
    dev_split=None,
    test_split=None,
    norm_config: NormalizationConfig = DEFAULT_NORMALIZATION,
    run_dir: str | Path | None = None,
) -> SweepReport:
    """Train once per dropout rate; a failing cell is marked and the sweep continues."""
    report = SweepReport(base_config=base_config)
    labels = base_config.task.labels
    for rate in sorted(rates):
        cell = SweepCell(dropout_rate=float(rate))
        cell_dir = Path(run_dir) / f"dropout_{rate:g}" if run_dir is not None else None
        try:
            config = replace(base_config, dropout_rate=float(rate))
            cell.run = train(config, train_split, dev_split, norm_config, cell_dir)
            if dev_split is not None:
                pred = predict(cell.run.checkpoint, dev_split)
                cell.dev_eval = metrics.evaluate(dev_split.labels(), pred, labels)
            if test_split is not None:
                pred = predict(cell.run.checkpoint, test_split)
                cell.test_eval = metrics.evaluate(test_split.labels(), pred, labels)
        except Exception as exc:  # keep sweeping; the cell records its failure
            cell.error = f"{type(exc).__name__}: {exc}"
        report.cells.append(cell)
    return report


@dataclass
class SearchTrial:
    overrides: dict
    config: TrainConfig | None = None
    dev_micro_f1: float | None = None
    error: str | None = None


@dataclass
class SearchResult:
    best_config: TrainConfig
    trials: list[SearchTrial]


def hyperparameter_search(
    space: dict[str, list],
    budget: int,
    seed: int,
    base_config: TrainConfig,
    train_split,
    dev_split,
    norm_config: NormalizationConfig = DEFAULT_NORMALIZATION,
) -> SearchResult:
    """Randomized grid search over TrainConfig fields.

    Samples ``budget`` cells uniformly without replacement from the grid
    (seeded, so the visit order is reproducible; budget >= grid size means
    every cell is visited once) and returns the config maximizing dev
    micro-F1. Ties break toward lower dropout, then lower learning rate.
    """
    if not space:
        raise ValueError("search space must not be empty")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    names = sorted(space)
    grid = [dict(zip(names, values)) for values in itertools.product(*(space[n] for n in names))]
    rng = random.Random(seed)
    rng.shuffle(grid)
    visits = grid[: min(budget, len(grid))]

    trials: list[SearchTrial] = []
    for overrides in visits:
        trial = SearchTrial(overrides=overrides)
        try:
            trial.config = replace(base_config, **overrides)
            run = train(trial.config, train_split, dev_split, norm_config)
            trial.dev_micro_f1 = run.dev_history[-1].micro_f1 if run.dev_history else 0.0
        except Exception as exc:
            trial.error = f"{type(exc).__name__}: {exc}"
        trials.append(trial)

    succeeded = [t for t in trials if t.error is None]
    if not succeeded:
        raise AllConfigsFailed(f"all {len(trials)} sampled configs failed")
    best = max(
        succeeded,
        key=lambda t: (t.dev_micro_f1, -t.config.dropout_rate, -t.config.learning_rate),
    )
    return SearchResult(best_config=best.config, trials=trials)
