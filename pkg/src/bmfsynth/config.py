from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from .bmf import DEFAULT_TAUS, WEIGHT_MODES, AssoConfig
from .boolmat import Semiring
from .errors import ConfigError
from .explore import DEFAULT_PROBE_SAMPLES
from .qor import DEFAULT_SAMPLES, Metric, OutputInterpretation


def _default_workers() -> int:
    return max(os.cpu_count() or 1, 1)


@dataclass(frozen=True)
class RunConfig:
    input: Optional[Path] = None
    k: int = 10
    m: int = 10
    metric: Metric = Metric.RELATIVE
    thresholds: Tuple[float, ...] = (0.05,)
    taus: Tuple[float, ...] = DEFAULT_TAUS
    semiring: Semiring = Semiring.OR
    weights: str = "pow2"
    samples: int = DEFAULT_SAMPLES
    probe_samples: int = DEFAULT_PROBE_SAMPLES
    seed: int = 0
    output_dir: Path = Path("data/runs")
    words: Optional[str] = None
    workers: int = field(default_factory=_default_workers)

    @property
    def threshold(self) -> float:
        """The exploration runs to the loosest requested threshold."""
        return max(self.thresholds)

    @classmethod
    def from_dict(cls, payload: dict, base_path: Optional[Path] = None) -> "RunConfig":
        if not payload:
            return cls()
        defaults = cls()

        def _path(value: object) -> Optional[Path]:
            if value is None or value == "":
                return None
            raw = Path(str(value)).expanduser()
            if base_path and not raw.is_absolute():
                return (base_path / raw).resolve()
            return raw

        raw_thresholds = payload.get("thresholds", payload.get("threshold", defaults.thresholds))
        if not isinstance(raw_thresholds, (list, tuple)):
            raw_thresholds = [raw_thresholds]
        raw_taus = payload.get("taus", defaults.taus)
        if isinstance(raw_taus, str):
            raw_taus = [item for item in raw_taus.split(",") if item.strip()]

        try:
            samples = int(payload.get("samples", defaults.samples))
            config = cls(
                input=_path(payload.get("input")),
                k=int(payload.get("k", defaults.k)),
                m=int(payload.get("m", defaults.m)),
                metric=Metric.parse(payload.get("metric", defaults.metric)),
                thresholds=tuple(float(value) for value in raw_thresholds),
                taus=tuple(float(value) for value in raw_taus),
                semiring=Semiring.parse(payload.get("semiring", defaults.semiring)),
                weights=str(payload.get("weights", defaults.weights)).lower(),
                samples=samples,
                probe_samples=int(payload.get("probe_samples", min(defaults.probe_samples, samples))),
                seed=int(payload.get("seed", defaults.seed)),
                output_dir=_path(payload.get("output_dir", payload.get("out"))) or defaults.output_dir,
                words=payload.get("words") or None,
                workers=int(payload.get("workers", defaults.workers)),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"Invalid run configuration: {exc}") from exc
        return config.validate()

    def validate(self) -> "RunConfig":
        if self.k < 1 or self.m < 1:
            raise ConfigError(f"Cut bounds must be positive, got k={self.k}, m={self.m}")
        if not self.thresholds or any(not t > 0 for t in self.thresholds):
            raise ConfigError(f"Thresholds must be positive, got {list(self.thresholds)}")
        if not self.taus or any(not 0.0 < t <= 1.0 for t in self.taus):
            raise ConfigError(f"Association thresholds must lie in (0, 1], got {list(self.taus)}")
        if self.weights not in WEIGHT_MODES:
            raise ConfigError(f"Unknown weights mode {self.weights!r}; expected one of {sorted(WEIGHT_MODES)}")
        if not self.samples >= self.probe_samples >= 1:
            raise ConfigError(
                f"Sample counts must satisfy samples >= probe_samples >= 1, got {self.samples} and {self.probe_samples}"
            )
        if self.workers < 1:
            raise ConfigError(f"Worker count must be at least 1, got {self.workers}")
        if self.words is not None:
            OutputInterpretation.parse(self.words)
        return self

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Command-line values win over the file; ``None`` means not given."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        if "metric" in changes:
            changes["metric"] = Metric.parse(changes["metric"])
        if "semiring" in changes:
            changes["semiring"] = Semiring.parse(changes["semiring"])
        for key in ("thresholds", "taus"):
            if key in changes:
                changes[key] = tuple(float(value) for value in changes[key])
        if "samples" in changes and "probe_samples" not in changes:
            changes["probe_samples"] = min(self.probe_samples, int(changes["samples"]))
        return replace(self, **changes).validate()

    def asso_config(self) -> AssoConfig:
        return AssoConfig(taus=self.taus, semiring=self.semiring, weight_mode=self.weights)

    def interpretation(self) -> Optional[OutputInterpretation]:
        return OutputInterpretation.parse(self.words) if self.words else None

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["input"] = str(self.input) if self.input else None
        payload["output_dir"] = str(self.output_dir)
        payload["metric"] = self.metric.value
        payload["semiring"] = self.semiring.value
        payload["thresholds"] = list(self.thresholds)
        payload["taus"] = list(self.taus)
        return payload


def load_run_config(path: Path) -> RunConfig:
    path = Path(path).expanduser().resolve()
    if not path.exists():
        raise FileNotFoundError(f"Run configuration not found: {path}")
    if path.suffix.lower() in {".yaml", ".yml"}:
        try:
            import yaml  # type: ignore
        except ImportError as exc:  # pragma: no cover - optional dependency
            raise RuntimeError(f"YAML configuration requested but PyYAML is not installed: {path}") from exc
        try:
            payload = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise ConfigError(f"Failed to parse run configuration {path}: {exc}") from exc
    else:
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Failed to parse run configuration {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("Configuration file must define an object/dict at the top level.")
    return RunConfig.from_dict(payload, base_path=path.parent)
