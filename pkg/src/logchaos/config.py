"""Run configuration.

Two interchangeable on-disk forms: a flat text file of dotted keys
(`model.d = 1`, `#` comments) and JSON (nested or flat).  Round-trips
are lossless; floats serialize via repr.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import ParameterError
from .params import ModelParams


def _int_list(v):
    if isinstance(v, str):
        return [int(t) for t in v.replace(",", " ").split()]
    return [int(t) for t in v]


def _str_list(v):
    if isinstance(v, str):
        return [t for t in v.replace(",", " ").split()]
    return [str(t) for t in v]


@dataclass
class RunConfig:
    model_d: int = 1
    model_gamma: float = 1.0
    model_T: float = 0.5
    grid_radius: float = 1.0
    grid_cells_per_axis: int = 64
    grid_epsilon_rule: str = "h"
    mc_n: int = 100000
    mc_bank_id: int = 1
    mc_stream_keys: list = field(default_factory=lambda: [101, 102, 103])
    tol_quad: float = 1e-10
    tol_repair_gate: float = 1e-6
    tol_se_gate: float = 3.0
    out_directory: str = "out"
    out_formats: list = field(default_factory=lambda: ["json"])

    def __post_init__(self):
        if self.tol_quad <= 0 or self.tol_se_gate <= 0:
            raise ParameterError("quadTol and seGateMultiplier must be positive")
        if self.tol_repair_gate < 0:
            raise ParameterError("repairGate must be nonnegative")
        for f in self.out_formats:
            if f not in ("json", "csv"):
                raise ParameterError(f"unknown output format {f!r}")

    def params(self) -> ModelParams:
        return ModelParams(d=self.model_d, gamma=self.model_gamma, T=self.model_T)

    def epsilon(self, spacing: float):
        """Mollification scale from the epsilon rule: 'h' ties it to the
        grid spacing, '<c>h' scales it, a bare number is absolute."""
        rule = self.grid_epsilon_rule.strip()
        if rule == "h":
            return None  # covariance_factor defaults to the spacing
        if rule.endswith("h"):
            return float(rule[:-1]) * spacing
        return float(rule)

    def to_flat(self) -> dict:
        return {
            "model.d": self.model_d,
            "model.gamma": self.model_gamma,
            "model.T": self.model_T,
            "grid.radius": self.grid_radius,
            "grid.cellsPerAxis": self.grid_cells_per_axis,
            "grid.epsilonRule": self.grid_epsilon_rule,
            "mc.N": self.mc_n,
            "mc.bankId": self.mc_bank_id,
            "mc.streamKeys": list(self.mc_stream_keys),
            "tolerances.quadTol": self.tol_quad,
            "tolerances.repairGate": self.tol_repair_gate,
            "tolerances.seGateMultiplier": self.tol_se_gate,
            "output.directory": self.out_directory,
            "output.formats": list(self.out_formats),
        }

    def to_nested(self) -> dict:
        out: dict = {}
        for key, val in self.to_flat().items():
            group, name = key.split(".", 1)
            out.setdefault(group, {})[name] = val
        return out

    def to_text(self) -> str:
        lines = []
        for key, val in self.to_flat().items():
            if isinstance(val, list):
                val = ",".join(str(v) for v in val)
            elif isinstance(val, float):
                val = repr(val)
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(self.to_nested(), indent=2, sort_keys=True) + "\n"


_SETTERS = {
    "model.d": ("model_d", int),
    "model.gamma": ("model_gamma", float),
    "model.T": ("model_T", float),
    "grid.radius": ("grid_radius", float),
    "grid.cellsPerAxis": ("grid_cells_per_axis", int),
    "grid.epsilonRule": ("grid_epsilon_rule", str),
    "mc.N": ("mc_n", int),
    "mc.bankId": ("mc_bank_id", int),
    "mc.streamKeys": ("mc_stream_keys", _int_list),
    "tolerances.quadTol": ("tol_quad", float),
    "tolerances.repairGate": ("tol_repair_gate", float),
    "tolerances.seGateMultiplier": ("tol_se_gate", float),
    "output.directory": ("out_directory", str),
    "output.formats": ("out_formats", _str_list),
}


def _apply(base: RunConfig, flat: dict) -> RunConfig:
    updates = {}
    for key, raw in flat.items():
        if key not in _SETTERS:
            raise ParameterError(f"unknown config key {key!r}")
        attr, conv = _SETTERS[key]
        updates[attr] = conv(raw)
    return replace(base, **updates)


def _flatten(nested: dict) -> dict:
    flat = {}
    for group, sub in nested.items():
        if isinstance(sub, dict):
            for name, val in sub.items():
                flat[f"{group}.{name}"] = val
        else:
            flat[group] = sub  # already a dotted key
    return flat


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    base = base if base is not None else RunConfig()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _apply(base, _flatten(json.loads(text)))
    flat = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno} has no '=': {line!r}")
        key, val = line.split("=", 1)
        flat[key.strip()] = val.strip()
    return _apply(base, flat)


def load_config(path: str, base: RunConfig | None = None) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), base)
