"""Task registry: label vocabularies, class weights, and response aliases.

Label vocabularies are configured per task rather than hard-coded so the
same pipeline serves both supported binary tasks (and any custom one).
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TaskSpec:
    """One binary classification task.

    labels: class vocabulary, index order is the class index order used by
        models and confusion matrices.
    positive_label: the "phenomenon present" class (used for alias mapping).
    minority_label: class that receives the heavy loss weight under the
        default imbalance recipe.
    aliases: response strings (lowercase) that map onto a label when
        post-processing free-text model output.
    """

    task_id: str
    labels: tuple[str, str]
    positive_label: str
    minority_label: str
    aliases: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.labels) != len(set(self.labels)):
            raise ValueError("duplicate labels in vocabulary")
        if self.positive_label not in self.labels:
            raise ValueError(f"positive label {self.positive_label!r} not in vocabulary")
        if self.minority_label not in self.labels:
            raise ValueError(f"minority label {self.minority_label!r} not in vocabulary")

    @property
    def num_classes(self) -> int:
        return len(self.labels)

    def label_index(self, label: str) -> int:
        return self.labels.index(label)

    def default_class_weights(self) -> dict[str, float]:
        """Imbalance recipe: weight 4.0 on the minority class, 1.0 elsewhere.

        Stored as an explicit label -> weight map, never positionally.
        """
        return {lab: 4.0 if lab == self.minority_label else 1.0 for lab in self.labels}


TASK_1A = TaskSpec(
    task_id="1A",
    labels=("prop", "non-prop"),
    positive_label="prop",
    minority_label="non-prop",
    aliases={
        "prop": ("prop", "propaganda", "propagandistic", "persuasion", "true", "yes", "نعم"),
        "non-prop": ("non-prop", "not propagandistic", "no persuasion", "false", "no", "لا"),
    },
)

TASK_2A = TaskSpec(
    task_id="2A",
    labels=("disinfo", "no-disinfo"),
    positive_label="disinfo",
    minority_label="disinfo",
    aliases={
        "disinfo": ("disinfo", "disinformation", "disinformative", "true", "yes", "نعم"),
        "no-disinfo": ("no-disinfo", "not disinformative", "no disinformation", "false", "no", "لا"),
    },
)

TASKS: dict[str, TaskSpec] = {t.task_id: t for t in (TASK_1A, TASK_2A)}


def get_task(task_id: str) -> TaskSpec:
    try:
        return TASKS[task_id]
    except KeyError:
        raise KeyError(f"unknown task {task_id!r}; known: {sorted(TASKS)}") from None
