"""Experiment files: YAML documents validated by pydantic models."""

import copy
import itertools
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import structlog
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..config.settings import config
from ..utils.constants import Algorithm
from ..utils.exceptions import ConfigError

logger = structlog.get_logger(__name__)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ExperimentSection(_Section):
    name: str = Field(min_length=1, pattern=r"^[A-Za-z0-9_.\-]+$")
    master_seed: int = Field(default=0, ge=0)
    n_seeds: int = Field(default=1, ge=1)
    record_wall_time: bool = True


class ProblemSection(_Section):
    id: str
    params: Dict[str, Any] = Field(default_factory=dict)


class AlgorithmSection(_Section):
    name: Algorithm


class SmoothingSection(_Section):
    delta: float = Field(gt=0)
    smoothing_constant: float = Field(default=config.SMOOTHING_CONSTANT, gt=0)


class RunSection(_Section):
    reference_batch: int = Field(default=config.REFERENCE_BATCH, ge=0)
    divergence_bound: float = Field(default=config.DIVERGENCE_BOUND, gt=0)


class ExplicitSection(_Section):
    eta: float = Field(gt=0)
    horizon: int = Field(ge=1)
    rounds: int = Field(default=1, ge=1)
    batch: int = Field(default=1, ge=1)
    # Recorded with two-phase runs; the explicit (eta, T, S, B) do not depend on them
    target: float = Field(default=0.5, gt=0, lt=1)
    confidence: float = Field(default=0.5, gt=0, lt=1)


class ScheduleSection(_Section):
    target: float = Field(gt=0, lt=1)
    confidence: float = Field(gt=0, lt=1)
    value_gap: Optional[float] = Field(default=None, gt=0)
    lipschitz: Optional[float] = Field(default=None, gt=0)
    # Overrides the scheduled T; eta is then scheduled for this T
    horizon: Optional[int] = Field(default=None, ge=1)


class CapsSection(_Section):
    max_horizon: int = Field(default=config.MAX_HORIZON, ge=1)
    max_batch: int = Field(default=config.MAX_BATCH, ge=1)


class SweepSection(_Section):
    grid: Dict[str, List[Any]] = Field(default_factory=dict)
    max_points: int = Field(default=config.MAX_GRID_POINTS, ge=1)


class ExperimentConfig(_Section):
    experiment: ExperimentSection
    problem: ProblemSection
    algorithm: AlgorithmSection
    smoothing: SmoothingSection
    run: RunSection = Field(default_factory=RunSection)
    explicit: Optional[ExplicitSection] = None
    schedule: Optional[ScheduleSection] = None
    caps: CapsSection = Field(default_factory=CapsSection)

    @model_validator(mode="after")
    def exactly_one_parameter_block(self):
        if (self.explicit is None) == (self.schedule is None):
            raise ValueError("provide exactly one of 'explicit' or 'schedule'")
        return self


class SweepConfig(ExperimentConfig):
    sweep: SweepSection = Field(default_factory=SweepSection)


def _key_line(text: str, key: str) -> Optional[int]:
    """1-based line of the last occurrence of ``key:`` in the source, if any"""
    pattern = re.compile(rf"^\s*{re.escape(key)}\s*:", re.MULTILINE)
    matches = list(pattern.finditer(text))
    if not matches:
        return None
    return text.count("\n", 0, matches[-1].start()) + 1


def _config_error(exc: ValidationError, text: str) -> ConfigError:
    first = exc.errors()[0]
    loc = [str(part) for part in first["loc"]]
    key = ".".join(loc) or None
    line = None
    for part in reversed(loc):
        if not part.isdigit():
            line = _key_line(text, part)
            if line is not None:
                break
    message = "; ".join(
        f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
    )
    return ConfigError(message, line=line, key=key)


def parse_document(text: str) -> Dict[str, Any]:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = None if mark is None else mark.line + 1
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"invalid YAML: {problem}", line=line)
    if not isinstance(raw, dict):
        raise ConfigError("an experiment file must be a mapping at the top level", line=1)
    return raw


def validate_experiment(raw: Dict[str, Any], text: str = "") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise _config_error(exc, text)


def load_experiment(path) -> Tuple[ExperimentConfig, Dict[str, Any]]:
    """Parse and validate a run file; returns the model and the raw document"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}")
    raw = parse_document(text)
    experiment = validate_experiment(raw, text)
    logger.info("Experiment loaded", path=str(path), name=experiment.experiment.name,
                algorithm=experiment.algorithm.name.value)
    return experiment, raw


def load_sweep(path) -> Tuple[SweepConfig, Dict[str, Any], str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}")
    raw = parse_document(text)
    try:
        sweep = SweepConfig.model_validate(raw)
    except ValidationError as exc:
        raise _config_error(exc, text)
    logger.info("Sweep loaded", path=str(path), name=sweep.experiment.name,
                axes=list(sweep.sweep.grid))
    return sweep, raw, text


def set_dotted(document: Dict[str, Any], dotted_key: str, value: Any) -> None:
    """document['a']['b']['c'] = value for 'a.b.c', creating mappings on the way"""
    parts = dotted_key.split(".")
    node = document
    for part in parts[:-1]:
        child = node.get(part)
        if child is None:
            child = node[part] = {}
        if not isinstance(child, dict):
            raise ConfigError(f"grid key {dotted_key!r} passes through a non-mapping at {part!r}",
                              key=f"sweep.grid.{dotted_key}")
        node = child
    node[parts[-1]] = value


def grid_points(grid: Dict[str, List[Any]]) -> List[Dict[str, Any]]:
    """Cross product of the axes in file order; no axes or an empty axis gives no points"""
    if not grid or any(len(values) == 0 for values in grid.values()):
        return []
    axes = list(grid)
    return [dict(zip(axes, combo)) for combo in itertools.product(*(grid[a] for a in axes))]


def expand_sweep(raw: Dict[str, Any], grid: Dict[str, List[Any]], text: str = "") -> List[Tuple[Dict[str, Any], ExperimentConfig]]:
    """One validated ExperimentConfig per grid point"""
    base = {k: v for k, v in raw.items() if k != "sweep"}
    expanded = []
    for point in grid_points(grid):
        document = copy.deepcopy(base)
        for key, value in point.items():
            set_dotted(document, key, value)
        expanded.append((point, validate_experiment(document, text)))
    return expanded
