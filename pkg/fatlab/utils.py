import json
import os
import re
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Tuple

from mergedeep import Strategy, merge

from fatlab.exceptions import InvalidPatternError

__all__ = ("OUTPUT_FORMATS", "PRESETS_ENV", "Config", "load_config", "parse_integers")

OUTPUT_FORMATS = ("text", "json", "csv")
PRESETS_ENV = "FATLAB_PRESETS"

integer_list_regexp = re.compile(r"^\s*-?\d+(\s*,\s*-?\d+)*\s*$")


@dataclass(frozen=True)
class Config:
    seed: int = 1729
    sample_budget: int = 200
    output: str = "text"
    presets_dir: Optional[str] = None
    budgets: Dict[str, int] = field(default_factory=dict)
    workers: int = 4

    def __post_init__(self) -> None:
        if self.sample_budget < 1:
            raise ValueError(f"sample_budget must be at least 1, {self.sample_budget} given")
        if self.output not in OUTPUT_FORMATS:
            raise ValueError(f"Unknown output format {self.output}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, {self.workers} given")

    def budget_for(self, claim_id: str) -> int:
        return self.budgets.get(claim_id, self.sample_budget)


def load_config(overrides: Optional[Dict[str, Any]] = None, config_file: Optional[str] = None) -> Config:
    """Defaults, then the JSON config file, then FATLAB_PRESETS, then explicit overrides."""
    layers: Dict[str, Any] = asdict(Config())
    if config_file:
        with open(config_file, encoding="utf-8") as handle:
            merge(layers, json.load(handle), strategy=Strategy.REPLACE)
    if os.environ.get(PRESETS_ENV):
        layers["presets_dir"] = os.environ[PRESETS_ENV]
    merge(layers, {key: value for key, value in (overrides or {}).items() if value is not None}, strategy=Strategy.REPLACE)
    unknown = set(layers) - set(asdict(Config()))
    if unknown:
        raise ValueError(f"Unknown configuration keys {sorted(unknown)}")
    return Config(**layers)


def parse_integers(text: str, count: Optional[int] = None) -> Tuple[int, ...]:
    if not integer_list_regexp.match(text):
        raise InvalidPatternError(f"Cannot parse integers from {text!r}")
    values = tuple(int(part) for part in text.split(","))
    if count is not None and len(values) != count:
        raise InvalidPatternError(f"Expected {count} integers, got {len(values)} in {text!r}")
    return values
