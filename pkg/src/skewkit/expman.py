"""Experiment orchestration: config-driven runs, immutable manifests, reports.

A manifest is the single record of one experiment: the full config
snapshot, input-file fingerprints, results, and artifact paths. Manifests
are written atomically once the run completes, and every report (score
tables, loss curves, comparisons against the built-in reference values)
is regenerated from the manifest alone, so two renderings are
byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import fixtures, llm_probe, metrics, reference
from .corpus import load_split, write_predictions
from .errors import (
    ConfigInvalid,
    NoReferenceForMode,
    NoTrainingRuns,
)
from .finetune import TrainConfig, dropout_sweep, hyperparameter_search, predict, train
from .llm_probe import (
    HttpChatProvider,
    MockChatProvider,
    ProviderConfig,
    ResponseCache,
    gold_responder,
    run_probe,
)
from .tasks import get_task
from .textprep import DEFAULT_NORMALIZATION, NormalizationConfig

MODES = ("train", "sweep", "search", "probe", "score")


# --- manifest ----------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentManifest:
    """Immutable record of one completed experiment."""

    experiment_id: str
    mode: str
    task_id: str
    created_at: str
    config: dict
    data_fingerprints: dict[str, str]
    results: dict
    artifacts: dict[str, str]
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentManifest":
        return cls(**d)


def write_manifest(manifest: ExperimentManifest, out_dir: str | Path) -> Path:
    """Atomic write: a failed run never leaves a partial manifest behind."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "manifest.json"
    tmp = out_dir / ".manifest.json.tmp"
    payload = json.dumps(manifest.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
    tmp.write_text(payload + "\n", encoding="utf-8")
    os.replace(tmp, path)
    return path


def load_manifest(path: str | Path) -> ExperimentManifest:
    return ExperimentManifest.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _fingerprint(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# --- config parsing ----------------------------------------------------------


def _require(section: dict, field_name: str, context: str = ""):
    key = f"{context}.{field_name}" if context else field_name
    if field_name not in section:
        raise ConfigInvalid(key, "missing")
    return section[field_name]


def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        config = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigInvalid(str(path), f"cannot read: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(str(path), f"not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigInvalid(str(path), "top level must be an object")
    mode = _require(config, "mode")
    if mode not in MODES:
        raise ConfigInvalid("mode", f"must be one of {MODES}, got {mode!r}")
    task_id = _require(config, "task")
    try:
        get_task(task_id)
    except KeyError as exc:
        raise ConfigInvalid("task", str(exc)) from exc
    return config


def _train_config_from(config: dict, task_id: str, seed: int) -> TrainConfig:
    section = _require(config, "train")
    task = get_task(task_id)
    required = ("encoder_id", "dropout_rate", "learning_rate", "batch_size", "epochs", "max_seq_len")
    for field_name in required:
        _require(section, field_name, "train")
    class_weights = section.get("class_weights", task.default_class_weights())
    try:
        return TrainConfig(
            task_id=task_id,
            encoder_id=str(section["encoder_id"]),
            dropout_rate=float(section["dropout_rate"]),
            class_weights={str(k): float(v) for k, v in class_weights.items()},
            seed=seed,
            max_seq_len=int(section["max_seq_len"]),
            batch_size=int(section["batch_size"]),
            epochs=int(section["epochs"]),
            learning_rate=float(section["learning_rate"]),
            optimizer=str(section.get("optimizer", "AdamW")),
            reduction=str(section.get("reduction", "weighted_mean")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid("train", str(exc)) from exc


def _normalization_from(config: dict) -> NormalizationConfig:
    if "normalization" not in config:
        return DEFAULT_NORMALIZATION
    try:
        return NormalizationConfig.from_dict(config["normalization"])
    except TypeError as exc:
        raise ConfigInvalid("normalization", str(exc)) from exc


def _load_data(config: dict, task_id: str, needed: tuple[str, ...]):
    section = _require(config, "data")
    splits = {}
    fingerprints = {}
    for name in needed:
        path = Path(_require(section, name, "data"))
        splits[name] = load_split(path, task_id, name if name in ("train", "dev", "test") else "test")
        fingerprints[name] = _fingerprint(path)
    for name in ("train", "dev", "test"):
        if name not in needed and name in section:
            path = Path(section[name])
            splits[name] = load_split(path, task_id, name)
            fingerprints[name] = _fingerprint(path)
    return splits, fingerprints


def _experiment_id(mode: str, task_id: str, config: dict) -> str:
    digest = hashlib.sha256(json.dumps(config, sort_keys=True).encode("utf-8")).hexdigest()
    return f"{mode}-{task_id}-{digest[:12]}"


def _eval_dict(result: metrics.EvalResult | None) -> dict | None:
    return result.to_dict() if result is not None else None


# --- mode runners -------------------------------------------------------------


def _run_train(config: dict, task_id: str, seed: int, out_dir: Path):
    train_config = _train_config_from(config, task_id, seed)
    norm = _normalization_from(config)
    splits, fingerprints = _load_data(config, task_id, ("train",))
    run = train(train_config, splits["train"], splits.get("dev"), norm, out_dir)

    results: dict = {"epoch_losses": list(run.epoch_losses)}
    artifacts: dict[str, str] = {}
    if run.checkpoint.path is not None:
        artifacts["checkpoint"] = str(run.checkpoint.path)
    if run.dev_history:
        results["dev_per_epoch"] = [r.to_dict() for r in run.dev_history]
        results["dev"] = run.dev_history[-1].to_dict()
    if "test" in splits:
        pred = predict(run.checkpoint, splits["test"])
        results["test"] = metrics.evaluate(
            splits["test"].labels(), pred, train_config.task.labels
        ).to_dict()
        pred_path = out_dir / "predictions_test.tsv"
        write_predictions(splits["test"].ids(), pred, pred_path)
        artifacts["test_predictions"] = str(pred_path)

    extras = {
        "loss_curves": [
            {"epoch": e, "dropout_rate": train_config.dropout_rate, "loss": loss}
            for e, loss in enumerate(run.epoch_losses, start=1)
        ],
        "wallclock": run.wallclock,
        "train_config": train_config.to_dict(),
        "normalization": norm.to_dict(),
    }
    return results, artifacts, extras, fingerprints


def _run_sweep(config: dict, task_id: str, seed: int, out_dir: Path):
    train_config = _train_config_from(config, task_id, seed)
    norm = _normalization_from(config)
    sweep_section = _require(config, "sweep")
    rates = [float(r) for r in _require(sweep_section, "rates", "sweep")]
    splits, fingerprints = _load_data(config, task_id, ("train",))

    report = dropout_sweep(
        train_config,
        rates,
        splits["train"],
        splits.get("dev"),
        splits.get("test"),
        norm,
        out_dir,
    )
    rows = []
    for cell in report.cells:
        rows.append(
            {
                "dropout_rate": cell.dropout_rate,
                "epoch_losses": list(cell.run.epoch_losses) if cell.run else None,
                "dev": _eval_dict(cell.dev_eval),
                "test": _eval_dict(cell.test_eval),
                "error": cell.error,
            }
        )
    results = {"sweep": rows}
    extras = {
        "loss_curves": [
            {"epoch": e, "dropout_rate": rate, "loss": loss}
            for e, rate, loss in report.loss_curve_rows()
        ],
        "train_config": train_config.to_dict(),
        "normalization": norm.to_dict(),
    }
    artifacts: dict[str, str] = {}
    curve_path = out_dir / "loss_curves.csv"
    _write_loss_curves(extras["loss_curves"], curve_path)
    artifacts["loss_curves"] = str(curve_path)
    return results, artifacts, extras, fingerprints


def _run_search(config: dict, task_id: str, seed: int, out_dir: Path):
    train_config = _train_config_from(config, task_id, seed)
    norm = _normalization_from(config)
    section = _require(config, "search")
    space = _require(section, "space", "search")
    budget = int(_require(section, "budget", "search"))
    if not isinstance(space, dict) or not space:
        raise ConfigInvalid("search.space", "must be a nonempty object of parameter lists")
    splits, fingerprints = _load_data(config, task_id, ("train", "dev"))

    outcome = hyperparameter_search(
        space, budget, seed, train_config, splits["train"], splits["dev"], norm
    )
    results = {
        "best_config": outcome.best_config.to_dict(),
        "trials": [
            {
                "overrides": t.overrides,
                "dev_micro_f1": t.dev_micro_f1,
                "error": t.error,
            }
            for t in outcome.trials
        ],
    }
    extras = {"train_config": train_config.to_dict(), "normalization": norm.to_dict()}
    return results, {}, extras, fingerprints


def _build_provider(provider_section: dict):
    provider_config = ProviderConfig(
        model_id=str(_require(provider_section, "model_id", "probe.provider")),
        temperature=float(provider_section.get("temperature", 0.0)),
        max_retries=int(provider_section.get("max_retries", 3)),
        timeout=float(provider_section.get("timeout", 30.0)),
        rate_limit=float(provider_section.get("rate_limit", 60.0)),
        backoff_base=float(provider_section.get("backoff_base", 0.5)),
        base_url=str(provider_section.get("base_url", "https://api.openai.com/v1")),
        api_key_env=str(provider_section.get("api_key_env", llm_probe.API_KEY_ENV)),
    )
    return provider_config


def _run_probe(config: dict, task_id: str, seed: int, out_dir: Path):
    section = _require(config, "probe")
    k = int(_require(section, "k", "probe"))
    provider_section = _require(section, "provider", "probe")
    provider_config = _build_provider(provider_section)
    kind = provider_section.get("kind", "http")

    needed = ("eval", "train") if k > 0 else ("eval",)
    splits, fingerprints = _load_data(config, task_id, needed)
    eval_split = splits["eval"]

    if kind == "http":
        provider = HttpChatProvider(provider_config)
    elif kind == "echo-gold":
        provider = MockChatProvider(gold_responder(eval_split))
    else:
        raise ConfigInvalid("probe.provider.kind", f"unknown kind {kind!r}")

    cache_path = Path(section.get("cache_path", out_dir / "cache.jsonl"))
    cache = ResponseCache(cache_path)
    report = run_probe(
        task_id,
        eval_split,
        k,
        provider,
        provider_config,
        cache,
        train_split=splits.get("train"),
        seed=seed,
        max_error_fraction=float(section.get("max_error_fraction", 0.0)),
    )

    pred_path = out_dir / "predictions_probe.tsv"
    write_predictions(
        [r.sample_id for r in report.records], [r.predicted for r in report.records], pred_path
    )
    results = {
        "probe": {
            "k": k,
            "micro_f1": report.result.micro_f1,
            "macro_f1": report.result.macro_f1,
            "errors": report.errors,
            "eval": report.result.to_dict(),
        }
    }
    extras = {
        "provider": provider_config.to_dict(),
        "prompt_template_version": llm_probe.PROMPT_REGISTRY[task_id].version,
        "records": [
            {
                "id": r.sample_id,
                "gold": r.gold,
                "predicted": r.predicted,
                "parsed": r.parsed,
                "fallback_used": r.fallback_used,
                "cached": r.cached,
                "error": r.error,
            }
            for r in report.records
        ],
    }
    artifacts = {"predictions": str(pred_path), "cache": str(cache_path)}
    return results, artifacts, extras, fingerprints


def _run_score(config: dict, task_id: str, seed: int, out_dir: Path):
    section = _require(config, "score")
    gold_path = Path(_require(section, "gold", "score"))
    pred_path = Path(_require(section, "pred", "score"))
    task = get_task(task_id)
    result = metrics.score_files(gold_path, pred_path, task.labels)

    report_path = out_dir / "score_report.txt"
    report_path.write_text(metrics.format_report(result), encoding="utf-8")
    results = {"score": result.to_dict()}
    artifacts = {"report": str(report_path)}
    fingerprints = {"gold": _fingerprint(gold_path), "pred": _fingerprint(pred_path)}
    return results, artifacts, {}, fingerprints


_RUNNERS = {
    "train": _run_train,
    "sweep": _run_sweep,
    "search": _run_search,
    "probe": _run_probe,
    "score": _run_score,
}


def run(config_path: str | Path, out_dir: str | Path | None = None,
        task_override: str | None = None, seed_override: int | None = None) -> ExperimentManifest:
    """Execute one experiment described by a config file; returns its manifest."""
    config = load_config(config_path)
    if task_override is not None:
        config["task"] = task_override
    if seed_override is not None:
        config["seed"] = seed_override
    mode = config["mode"]
    task_id = config["task"]
    seed = int(config.get("seed", 0))

    experiment_id = _experiment_id(mode, task_id, config)
    out = Path(out_dir) if out_dir is not None else Path(config.get("out", f"runs/{experiment_id}"))
    out.mkdir(parents=True, exist_ok=True)

    results, artifacts, extras, fingerprints = _RUNNERS[mode](config, task_id, seed, out)
    artifacts = {**artifacts, "manifest": str(out / "manifest.json")}
    manifest = ExperimentManifest(
        experiment_id=experiment_id,
        mode=mode,
        task_id=task_id,
        created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        config=config,
        data_fingerprints=fingerprints,
        results=results,
        artifacts=artifacts,
        extras=extras,
    )
    write_manifest(manifest, out)
    return manifest


# --- loss curves ---------------------------------------------------------------


def _write_loss_curves(rows: list[dict], path: Path) -> None:
    lines = ["epoch,dropout_rate,loss"]
    for row in rows:
        lines.append(f"{row['epoch']},{row['dropout_rate']:g},{row['loss']:.10f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_loss_curves(manifest: ExperimentManifest, path: str | Path) -> Path:
    """Write the manifest's (epoch, dropout_rate, loss) table; byte-stable."""
    rows = manifest.extras.get("loss_curves") or []
    if not rows:
        raise NoTrainingRuns(f"manifest {manifest.experiment_id} holds no training runs")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _write_loss_curves(rows, path)
    return path


def plot_loss_curves(manifest: ExperimentManifest, path: str | Path) -> Path:
    """Optional rendered plot of the loss curves (needs matplotlib)."""
    rows = manifest.extras.get("loss_curves") or []
    if not rows:
        raise NoTrainingRuns(f"manifest {manifest.experiment_id} holds no training runs")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_rate: dict[float, list[tuple[int, float]]] = {}
    for row in rows:
        by_rate.setdefault(row["dropout_rate"], []).append((row["epoch"], row["loss"]))
    fig, ax = plt.subplots(figsize=(6, 4))
    for rate, points in sorted(by_rate.items()):
        points.sort()
        ax.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=f"dropout {rate:g}")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


# --- dataset audit ---------------------------------------------------------------


@dataclass(frozen=True)
class AuditRow:
    split_name: str
    label: str
    observed: int
    expected: int

    @property
    def matches(self) -> bool:
        return self.observed == self.expected


@dataclass(frozen=True)
class AuditReport:
    task_id: str
    rows: tuple[AuditRow, ...]
    computed_totals: dict[str, int]
    stored_totals: dict[str, int]

    @property
    def passed(self) -> bool:
        return all(row.matches for row in self.rows)

    @property
    def totals_note(self) -> str | None:
        if self.stored_totals != self.computed_totals:
            if not reference.totals_consistent(self.task_id):
                return (
                    "stored total row is internally inconsistent with the stored "
                    "per-split counts; totals recomputed from splits"
                )
            return "computed totals diverge from the stored total row"
        return None

    def render(self) -> str:
        lines = [f"dataset audit, task {self.task_id}", ""]
        lines.append(f"{'split':<8} {'label':<12} {'observed':>9} {'expected':>9}  status")
        for row in self.rows:
            status = "ok" if row.matches else "DIVERGENT"
            lines.append(
                f"{row.split_name:<8} {row.label:<12} {row.observed:>9} {row.expected:>9}  {status}"
            )
        lines.append("")
        lines.append(f"computed totals: {json.dumps(self.computed_totals, sort_keys=True)}")
        lines.append(f"stored totals:   {json.dumps(self.stored_totals, sort_keys=True)}")
        if self.totals_note:
            lines.append(f"note: {self.totals_note}")
        lines.append("")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


def audit_dataset(task_id: str, split_paths: dict[str, str | Path]) -> AuditReport:
    """Compare a dataset's class counts against the built-in reference counts."""
    task = get_task(task_id)
    rows: list[AuditRow] = []
    computed_totals = {label: 0 for label in task.labels}
    for split_name, path in sorted(split_paths.items(), key=lambda kv: ("train", "dev", "test").index(kv[0])):
        split = load_split(path, task_id, split_name)
        counts = {label: 0 for label in task.labels}
        for sample in split.samples:
            counts[sample.label] += 1
            computed_totals[sample.label] += 1
        expected = reference.CLASS_COUNTS[task_id][split_name]
        for label in task.labels:
            rows.append(AuditRow(split_name, label, counts[label], expected[label]))
    return AuditReport(
        task_id=task_id,
        rows=tuple(rows),
        computed_totals=computed_totals,
        stored_totals=dict(reference.CLASS_COUNTS[task_id]["total"]),
    )


def audit_fixture(task_id: str, out_dir: str | Path, seed: int = 0) -> AuditReport:
    """Audit the bundled synthetic fixture (used when the official data is absent)."""
    paths = fixtures.write_fixture(task_id, out_dir, seed)
    return audit_dataset(task_id, paths)


# --- comparison against built-in reference values --------------------------------


@dataclass(frozen=True)
class ReportRow:
    setting: str
    metric: str
    obtained: float | None
    reference_value: float | None

    @property
    def delta(self) -> float | None:
        if self.obtained is None or self.reference_value is None:
            return None
        return self.obtained - self.reference_value


@dataclass(frozen=True)
class ReportTable:
    title: str
    rows: tuple[ReportRow, ...]

    def render(self) -> str:
        lines = [self.title, ""]
        lines.append(f"{'setting':<28} {'metric':<16} {'obtained':>9} {'reference':>9} {'delta':>8}")
        for row in self.rows:
            obtained = f"{row.obtained:.3f}" if row.obtained is not None else ""
            ref = f"{row.reference_value:.3f}" if row.reference_value is not None else ""
            delta = f"{row.delta:+.3f}" if row.delta is not None else ""
            lines.append(f"{row.setting:<28} {row.metric:<16} {obtained:>9} {ref:>9} {delta:>8}")
        return "\n".join(lines) + "\n"


def _reference_model_key(encoder_id: str) -> str | None:
    lowered = encoder_id.lower()
    for key in ("arabert", "marbert", "qarib"):
        if key in lowered:
            return key
    return None


def _sweep_reference(task_id: str, model: str | None, rate: float) -> dict[str, float | None]:
    table = reference.SWEEP_1A if task_id == "1A" else reference.SWEEP_2A
    if model is None:
        return {}
    return table.get((model, round(rate, 3)), {})


def _get_metric(eval_dict: dict | None, name: str) -> float | None:
    if eval_dict is None:
        return None
    return eval_dict.get(name)


def compare_to_reference(manifest: ExperimentManifest) -> ReportTable:
    """Side-by-side table of obtained scores vs the built-in reference values.

    Reference cells absent from the published tables stay absent (never 0).
    """
    task_id = manifest.task_id
    rows: list[ReportRow] = []

    if manifest.mode == "sweep":
        encoder_id = manifest.extras.get("train_config", {}).get("encoder_id", "")
        model = _reference_model_key(encoder_id)
        for cell in manifest.results.get("sweep", []):
            rate = cell["dropout_rate"]
            ref = _sweep_reference(task_id, model, rate)
            setting = f"{encoder_id} dropout={rate:g}"
            pairs = [
                ("micro_f1_dev", _get_metric(cell.get("dev"), "micro_f1")),
                ("macro_f1_dev", _get_metric(cell.get("dev"), "macro_f1")),
                ("micro_f1_test", _get_metric(cell.get("test"), "micro_f1")),
                ("macro_f1_test", _get_metric(cell.get("test"), "macro_f1")),
            ]
            for metric_name, obtained in pairs:
                if obtained is None and metric_name not in ref:
                    continue
                rows.append(ReportRow(setting, metric_name, obtained, ref.get(metric_name)))
        return ReportTable(title=f"dropout sweep vs reference, task {task_id}", rows=tuple(rows))

    if manifest.mode == "train":
        encoder_id = manifest.extras.get("train_config", {}).get("encoder_id", "")
        rate = manifest.extras.get("train_config", {}).get("dropout_rate", 0.0)
        model = _reference_model_key(encoder_id)
        ref = _sweep_reference(task_id, model, rate)
        setting = f"{encoder_id} dropout={rate:g}"
        for metric_name in ("micro_f1_dev", "macro_f1_dev", "micro_f1_test", "macro_f1_test"):
            split_key = "dev" if metric_name.endswith("_dev") else "test"
            obtained = _get_metric(manifest.results.get(split_key), metric_name.replace(f"_{split_key}", ""))
            if obtained is None and metric_name not in ref:
                continue
            rows.append(ReportRow(setting, metric_name, obtained, ref.get(metric_name)))
        return ReportTable(title=f"fine-tune run vs reference, task {task_id}", rows=tuple(rows))

    if manifest.mode == "probe":
        k = manifest.results.get("probe", {}).get("k", 0)
        ref = reference.SHOT_RESULTS.get((task_id, int(k)), {})
        setting = f"{k}-shot"
        rows.append(
            ReportRow(setting, "micro_f1_test", manifest.results["probe"]["micro_f1"], ref.get("micro_f1_test"))
        )
        rows.append(
            ReportRow(setting, "macro_f1_test", manifest.results["probe"]["macro_f1"], ref.get("macro_f1_test"))
        )
        return ReportTable(title=f"llm probe vs reference, task {task_id}", rows=tuple(rows))

    raise NoReferenceForMode(f"no built-in reference values for mode {manifest.mode!r}")


def render_results_table(manifest: ExperimentManifest) -> str:
    """Deterministic text rendering of a manifest's headline numbers."""
    lines = [f"experiment {manifest.experiment_id} (mode={manifest.mode}, task={manifest.task_id})", ""]
    if manifest.mode == "sweep":
        lines.append(f"{'dropout':>8} {'micro_dev':>9} {'macro_dev':>9} {'micro_test':>10} {'macro_test':>10}  status")
        for cell in manifest.results.get("sweep", []):
            if cell.get("error"):
                lines.append(f"{cell['dropout_rate']:>8g} {'':>9} {'':>9} {'':>10} {'':>10}  failed: {cell['error']}")
                continue
            micro_dev = _get_metric(cell.get("dev"), "micro_f1")
            macro_dev = _get_metric(cell.get("dev"), "macro_f1")
            micro_test = _get_metric(cell.get("test"), "micro_f1")
            macro_test = _get_metric(cell.get("test"), "macro_f1")
            fmt = lambda v, w: (f"{v:>{w}.3f}" if v is not None else " " * w)  # noqa: E731
            lines.append(
                f"{cell['dropout_rate']:>8g} {fmt(micro_dev, 9)} {fmt(macro_dev, 9)} "
                f"{fmt(micro_test, 10)} {fmt(macro_test, 10)}  ok"
            )
    elif manifest.mode == "probe":
        probe = manifest.results.get("probe", {})
        lines.append(f"{probe.get('k', 0)}-shot: micro_f1 {probe.get('micro_f1'):.3f}, macro_f1 {probe.get('macro_f1'):.3f}")
    elif manifest.mode == "score":
        score = manifest.results.get("score", {})
        lines.append(f"micro_f1 {score.get('micro_f1'):.6f}")
        lines.append(f"macro_f1 {score.get('macro_f1'):.6f}")
    elif manifest.mode == "train":
        losses = " ".join(f"{loss:.6f}" for loss in manifest.results.get("epoch_losses", []))
        lines.append(f"epoch losses: {losses}")
        for split_key in ("dev", "test"):
            if split_key in manifest.results:
                ev = manifest.results[split_key]
                lines.append(f"{split_key}: micro_f1 {ev['micro_f1']:.3f}, macro_f1 {ev['macro_f1']:.3f}")
    elif manifest.mode == "search":
        best = manifest.results.get("best_config", {})
        lines.append(f"best config: {json.dumps(best, sort_keys=True)}")
        for trial in manifest.results.get("trials", []):
            score = f"{trial['dev_micro_f1']:.3f}" if trial.get("dev_micro_f1") is not None else "failed"
            lines.append(f"  {json.dumps(trial['overrides'], sort_keys=True)}: {score}")
    return "\n".join(lines) + "\n"
