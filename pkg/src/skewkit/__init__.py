"""skewkit: experiments for binary text classification on imbalanced corpora.

Library surface: dataset ingestion and audits (corpus), Arabic text
normalization and tokenization (textprep), weighted cross-entropy math
(losses), encoder fine-tuning with dropout sweeps (finetune), micro/macro
F1 scoring (metrics), zero/few-shot probing of chat models (llm_probe),
and config-driven experiment orchestration (expman).
"""

from . import corpus, expman, finetune, fixtures, llm_probe, losses, metrics, reference, tasks, textprep
from .corpus import DatasetSplit, LabeledSample, class_distribution, load_split, write_predictions
from .finetune import TrainConfig, default_config, dropout_sweep, hyperparameter_search, predict, train
from .losses import cross_entropy, weighted_cross_entropy
from .metrics import EvalResult, confusion, evaluate, macro_f1, micro_f1, score_files
from .tasks import TASK_1A, TASK_2A, TaskSpec, get_task
from .textprep import DEFAULT_NORMALIZATION, NormalizationConfig, normalize, tokenize

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_NORMALIZATION",
    "DatasetSplit",
    "EvalResult",
    "LabeledSample",
    "NormalizationConfig",
    "TASK_1A",
    "TASK_2A",
    "TaskSpec",
    "TrainConfig",
    "class_distribution",
    "confusion",
    "corpus",
    "cross_entropy",
    "default_config",
    "dropout_sweep",
    "evaluate",
    "expman",
    "finetune",
    "fixtures",
    "get_task",
    "hyperparameter_search",
    "llm_probe",
    "load_split",
    "losses",
    "macro_f1",
    "metrics",
    "micro_f1",
    "normalize",
    "predict",
    "reference",
    "score_files",
    "tasks",
    "textprep",
    "tokenize",
    "train",
    "weighted_cross_entropy",
    "write_predictions",
]
