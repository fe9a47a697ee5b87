"""Flat key=value run configuration.

Dotted keys group into sections (model, kernel, schedule, ensemble, output);
``#`` starts a comment; unknown keys are rejected with their line number.
Every run writes the resolved configuration next to its outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending line."""


_KNOWN_KEYS: dict[str, type] = {
    "model.N": int,
    "model.alpha": float,
    "model.beta": float,
    "model.kappa": float,
    "model.theta": float,
    "model.theta_N": float,
    "kernel.kind": str,            # nn | longjump
    "kernel.gamma": float,
    "kernel.series_tol": float,
    "schedule.times": str,         # comma-separated macroscopic times
    "schedule.profile": str,       # step | linear | constant | bump
    "schedule.profile_value": float,
    "ensemble.replicas": int,
    "ensemble.seed": int,
    "ensemble.threads": int,
    "ensemble.sampler": str,       # auto | exact | thinning
    "ensemble.event_cap": int,
    "output.dir": str,
}


@dataclass
class RunConfig:
    values: dict[str, object] = field(default_factory=dict)

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def times(self) -> tuple[float, ...]:
        raw = self.values.get("schedule.times", "")
        if not raw:
            return ()
        return tuple(float(tok) for tok in str(raw).split(",") if tok.strip())

    def merged(self, overrides: dict) -> "RunConfig":
        vals = dict(self.values)
        for k, v in overrides.items():
            if v is not None:
                vals[k] = v
        return RunConfig(vals)

    def dump(self, path: Path) -> None:
        lines = ["# resolved run configuration"]
        for key in sorted(self.values):
            lines.append(f"{key}={self.values[key]}")
        Path(path).write_text("\n".join(lines) + "\n")


def parse_config(path: str | Path) -> RunConfig:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        caster = _KNOWN_KEYS[key]
        try:
            values[key] = caster(val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: cannot parse {val!r} as "
                              f"{caster.__name__} for {key}: {exc}") from None
    return RunConfig(values)
