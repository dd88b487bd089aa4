"""Declarative run configuration: laws, grid, seed, outputs, suites.

One TOML file configures every CLI command; flag overrides are applied
after parsing.  Serializing a parsed config reproduces an equivalent
config (tested), so experiment files stay archivable and diffable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from . import toml_lite
from .info import InfoModel
from .laws import ContinuousPin, DiscretePins, LengthLaw, PinLaw
from .random_bridge import RandomBridgeModel


class ConfigError(ValueError):
    pass


def _require(mapping: Dict[str, Any], key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"missing {key!r} in [{where}]")
    return mapping[key]


@dataclass(frozen=True)
class Config:
    seed: int = 42
    paths: int = 10
    length_spec: Dict[str, Any] = field(default_factory=lambda: {"kind": "exponential", "rate": 0.1})
    pin_spec: Dict[str, Any] = field(default_factory=lambda: {"kind": "gaussian_pin", "mean": 0.0, "std": 1.0})
    t_max: float = 25.0
    n_steps: int = 500
    out_dir: str = "out"
    suites: Tuple[str, ...] = ()
    size_factor: float = 1.0

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> "Config":
        grid = data.get("grid", {})
        out = data.get("output", {})
        verify = data.get("verify", {})
        cfg = cls(
            seed=int(data.get("seed", 42)),
            paths=int(data.get("paths", 10)),
            length_spec=dict(data.get("length", {"kind": "exponential", "rate": 0.1})),
            pin_spec=dict(data.get("pin", {"kind": "gaussian_pin", "mean": 0.0, "std": 1.0})),
            t_max=float(grid.get("t_max", 25.0)),
            n_steps=int(grid.get("n_steps", 500)),
            out_dir=str(out.get("dir", "out")),
            suites=tuple(verify.get("suites", ())),
            size_factor=float(verify.get("size_factor", 1.0)),
        )
        cfg.validate()
        return cfg

    @classmethod
    def from_toml(cls, text: str) -> "Config":
        try:
            return cls.from_mapping(toml_lite.loads(text))
        except toml_lite.TomlError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str) -> "Config":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_toml(fh.read())

    def to_mapping(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "seed": self.seed,
            "paths": self.paths,
            "length": dict(self.length_spec),
            "pin": dict(self.pin_spec),
            "grid": {"t_max": self.t_max, "n_steps": self.n_steps},
            "output": {"dir": self.out_dir},
        }
        if self.suites or self.size_factor != 1.0:
            data["verify"] = {"suites": list(self.suites),
                              "size_factor": self.size_factor}
        return data

    def to_toml(self) -> str:
        return toml_lite.dumps(self.to_mapping())

    def validate(self) -> None:
        if self.n_steps <= 0:
            raise ConfigError("grid.n_steps must be positive")
        if self.t_max <= 0.0:
            raise ConfigError("grid.t_max must be positive")
        if self.paths <= 0:
            raise ConfigError("paths must be positive")
        self.length_law()
        self.pin_law()

    # -- law construction ----------------------------------------------------

    def length_law(self) -> LengthLaw:
        spec = self.length_spec
        kind = _require(spec, "kind", "length")
        try:
            if kind == "exponential":
                return LengthLaw.exponential(float(_require(spec, "rate", "length")),
                                             shift=float(spec.get("shift", 0.0)))
            if kind == "two_point":
                return LengthLaw.two_point(float(_require(spec, "t1", "length")),
                                           float(_require(spec, "t2", "length")),
                                           p1=float(spec.get("p1", 0.5)))
            if kind == "point_mass":
                return LengthLaw.point_mass(float(_require(spec, "t", "length")))
            if kind == "uniform":
                return LengthLaw.uniform(float(_require(spec, "lo", "length")),
                                         float(_require(spec, "hi", "length")))
            if kind == "table":
                return LengthLaw.table(_require(spec, "ts", "length"),
                                       _require(spec, "density", "length"))
        except ValueError as exc:
            raise ConfigError(f"invalid [length]: {exc}") from exc
        raise ConfigError(f"unknown length kind {kind!r}")

    def pin_law(self) -> PinLaw:
        spec = self.pin_spec
        kind = _require(spec, "kind", "pin")
        try:
            if kind == "discrete_pins":
                return DiscretePins(tuple(float(p) for p in _require(spec, "points", "pin")),
                                    tuple(float(p) for p in _require(spec, "probs", "pin")))
            if kind == "gaussian_pin":
                return ContinuousPin.gaussian(float(spec.get("mean", 0.0)),
                                              float(spec.get("std", 1.0)))
        except ValueError as exc:
            raise ConfigError(f"invalid [pin]: {exc}") from exc
        raise ConfigError(f"unknown pin kind {kind!r}")

    def bridge_model(self) -> RandomBridgeModel:
        return RandomBridgeModel(self.length_law(), self.pin_law())

    def info_model(self) -> InfoModel:
        pin = self.pin_law()
        if not isinstance(pin, DiscretePins) or len(pin.points) != 2:
            raise ConfigError("this command needs a two-point pin law "
                              "(pin.kind = \"discrete_pins\" with 2 points)")
        return InfoModel(self.length_law(), pin.points[0], pin.points[1],
                         pin.probs[0])
