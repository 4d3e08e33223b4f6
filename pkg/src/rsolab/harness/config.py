"""Experiment configuration: typed fields, flat string mapping round trip, validation."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from ..errors import ConfigError


def parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def parse_ints(text: str) -> tuple[int, ...]:
    out = []
    for x in text.replace(",", " ").split():
        value = float(x)
        if value != int(value):
            raise ValueError(f"{x!r} is not an integer")
        out.append(int(value))
    return tuple(out)


def parse_int(text: str) -> int:
    (value,) = parse_ints(text)
    return value


def parse_float(text: str) -> float:
    return float(text)


def format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of the ensemble experiments.

    ``alphas`` and ``deltas`` span the parameter grid of the phase sweep;
    the other drivers use their first entries.
    """

    d: int = 1
    alphas: tuple[float, ...] = (0.5,)
    deltas: tuple[float, ...] = (1.0,)
    M: int = 4
    L_ladder: tuple[int, ...] = (20, 40)
    K: int = 10
    seed: int = 0
    eps: float = 0.1
    etas: tuple[float, ...] = (1e-3, 1e-2, 1e-1)
    energy: float = -0.5
    a_exponent: float = 1.0
    tau_grow: float = 1.5
    tau_sat: float = 1.2
    tol: float = 1e-10
    workers: int = 1
    out: str | None = field(default=None, compare=False)

    _PARSERS = {
        "d": parse_int,
        "alphas": parse_floats,
        "deltas": parse_floats,
        "M": parse_int,
        "L_ladder": parse_ints,
        "K": parse_int,
        "seed": parse_int,
        "eps": parse_float,
        "etas": parse_floats,
        "energy": parse_float,
        "a_exponent": parse_float,
        "tau_grow": parse_float,
        "tau_sat": parse_float,
        "tol": parse_float,
        "workers": parse_int,
        "out": str,
    }

    def __post_init__(self):
        self.validate()

    def validate(self):
        def bad(key, why):
            raise ConfigError(f"invalid config key {key!r}: {why}")

        if self.d not in (1, 2, 3):
            bad("d", f"must be 1, 2 or 3, got {self.d}")
        if not self.alphas or any(not (a >= 0 and math.isfinite(a)) for a in self.alphas):
            bad("alphas", "need at least one finite alpha >= 0")
        if not self.deltas or any(not (x > 0 and math.isfinite(x)) for x in self.deltas):
            bad("deltas", "need at least one finite delta > 0")
        if self.M < 1:
            bad("M", "must be >= 1")
        ladder = self.L_ladder
        if not ladder or any(L < 2 or L % 2 for L in ladder) or any(b <= a for a, b in zip(ladder, ladder[1:])):
            bad("L_ladder", f"must be ascending even integers >= 2, got {ladder}")
        if self.K < 1:
            bad("K", "must be >= 1")
        if self.seed < 0:
            bad("seed", "must be a nonnegative integer")
        if not self.eps > 0:
            bad("eps", "must be positive")
        if not self.etas or any(e <= 0 for e in self.etas) or any(b <= a for a, b in zip(self.etas, self.etas[1:])):
            bad("etas", "must be ascending positive values")
        if not self.tau_sat < self.tau_grow:
            bad("tau_sat", "must be smaller than tau_grow")
        if not self.tol > 0:
            bad("tol", "must be positive")
        if self.workers < 1:
            bad("workers", "must be >= 1")

    @classmethod
    def keys(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_mapping(cls, mapping) -> "ExperimentConfig":
        """Build from string values; unknown keys are rejected."""
        kwargs = {}
        for key, text in mapping.items():
            if key not in cls._PARSERS:
                raise ConfigError(f"unknown config key {key!r} (known: {', '.join(cls.keys())})")
            try:
                kwargs[key] = cls._PARSERS[key](str(text).strip())
            except ValueError as exc:
                raise ConfigError(f"cannot parse config key {key!r} = {text!r}: {exc}") from None
        return cls(**kwargs)

    def to_mapping(self) -> dict[str, str]:
        """String form of every field (``out`` only when set)."""
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "out" and value is None:
                continue
            out[f.name] = format_value(value)
        return out

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)
