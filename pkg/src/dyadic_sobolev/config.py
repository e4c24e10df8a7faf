"""Run configuration for the command-line front end."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

COMMANDS = ("verify", "norm", "capacity", "bmos", "embed", "opnorm", "suite")
MAX_DEPTH = 14


class ConfigError(ValueError):
    """An invalid setting; ``flag`` names the offending option."""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass
class RunConfig:
    """Settings for one CLI invocation.

    Defaults give depth 8, solve depth 12, seed 42 and 200 trials.  Values
    from a JSON config file are merged under explicit flags.
    """

    command: str = "verify"
    s_values: list[float] = field(default_factory=lambda: [0.25, 0.75])
    depth: int = 8
    depths: list[int] | None = None
    solve_depth: int = 12
    seed: int = 42
    trials: int = 200
    mode: str = "auto"
    output: str | None = None
    format: str | None = None
    jobs: int | None = None
    allow_depth_4: bool = False
    tol: float | None = None
    max_iters: int | None = None
    alpha: float = 0.0
    input: str | None = None
    set: str | None = None
    op: str = "paraproduct"
    suites: list[str] | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown command {self.command!r}")
        if not self.s_values:
            raise ConfigError("--s", "at least one value is required")
        for s in self.s_values:
            if not 0.0 < s < 1.0:
                raise ConfigError("--s", f"{s} is outside (0, 1)")
        for d in [self.depth] + list(self.depths or []):
            if not 0 <= d <= MAX_DEPTH:
                raise ConfigError("--depth", f"{d} is outside [0, {MAX_DEPTH}]")
        if self.solve_depth is not None and not 0 <= self.solve_depth <= MAX_DEPTH:
            raise ConfigError("--solve-depth", f"{self.solve_depth} is outside [0, {MAX_DEPTH}]")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("--seed", "must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise ConfigError("--trials", "must be positive")
        if self.mode not in ("auto", "exact", "heuristic"):
            raise ConfigError("--mode", f"unknown mode {self.mode!r}")
        if self.format not in (None, "csv", "json"):
            raise ConfigError("--format", f"unknown format {self.format!r}")
        if self.jobs is not None and self.jobs < 1:
            raise ConfigError("--jobs", "must be positive")
        if self.tol is not None and self.tol <= 0:
            raise ConfigError("--tol", "must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ConfigError("--max-iters", "must be positive")
        return self

    def merged(self, overrides: dict) -> "RunConfig":
        names = {f.name for f in fields(self)}
        unknown = set(overrides) - names
        if unknown:
            raise ConfigError("--config", f"unknown keys {sorted(unknown)}")
        return RunConfig(**{**asdict(self), **overrides})

    @classmethod
    def from_file(cls, path: str) -> dict:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("--config", str(exc)) from exc
        if not isinstance(data, dict):
            raise ConfigError("--config", "expected a JSON object")
        return data

    def to_json(self) -> dict:
        return asdict(self)
