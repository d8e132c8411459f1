"""
Data models for command-line runs: configuration and result rows.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from core.errors import ConfigError, DleError
from models.physics import QuenchSpec, RampShape, SystemParams

TWO_PI = 2.0 * math.pi
UNITS = ("ghz_linear", "angular")
FORMATS = ("csv", "json")
SWEEPABLE = ("omega1", "omega2", "e0", "lambda")
TOLERANCE_KEYS = ("tol_convergence", "tol_rtol", "tol_atol", "tol_top_fock")

RUN_KEYS = ("omega1", "omega2", "e0", "lambda", "unit", "cutoff", "sweep", "output", "format",
            "shape", "tau_min", "tau_max", "points", "drive") + TOLERANCE_KEYS


def to_angular(value: float, unit: str) -> float:
    """Convert a user frequency to internal angular units."""
    return value * TWO_PI if unit == "ghz_linear" else value


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter: name=start:stop:steps."""
    name: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise ConfigError(f"Cannot sweep '{self.name}'; choose one of {SWEEPABLE}", parameter="sweep")
        if self.steps < 2:
            raise ConfigError(f"Sweep needs at least 2 steps, got {self.steps}", parameter="sweep")

    @classmethod
    def from_string(cls, text: str) -> "SweepSpec":
        """Parse 'omega2=3.8:4.6:10'."""
        try:
            name, rng = text.split("=", 1)
            start, stop, steps = rng.split(":")
            return cls(name.strip(), float(start), float(stop), int(steps))
        except ValueError as e:
            raise ConfigError(f"Cannot parse sweep '{text}' (expected name=start:stop:steps)",
                              parameter="sweep") from e

    def user_grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)

    def internal_grid(self, unit: str) -> np.ndarray:
        """Grid in internal units, spaced after conversion."""
        return np.linspace(to_angular(self.start, unit), to_angular(self.stop, unit), self.steps)


@dataclass(frozen=True)
class RampSettings:
    """Ramp-scan options for the evolve command (durations in units of 1/omega1)."""
    shape: RampShape = RampShape.SMOOTHSTEP
    tau_min: float = 1e-3
    tau_max: float = 1e3
    points: int = 7
    drive: bool = True


@dataclass(frozen=True)
class RunConfig:
    """Fully parsed run: internal-unit physics plus output options."""
    params: SystemParams
    quench: QuenchSpec
    cutoff: int
    unit: str
    sweep: Optional[SweepSpec] = None
    output: Optional[str] = None
    fmt: str = "csv"
    tolerances: Dict[str, float] = field(default_factory=dict)
    ramp: RampSettings = field(default_factory=RampSettings)

    def tolerance(self, key: str, default: float) -> float:
        return self.tolerances.get(key, default)

    def with_value(self, name: str, internal_value: float) -> Tuple[SystemParams, QuenchSpec]:
        """Params and quench with one swept quantity replaced (internal units)."""
        params, quench = self.params, self.quench
        if name == "omega1":
            quench = QuenchSpec(internal_value, quench.omega2)
        elif name == "omega2":
            quench = QuenchSpec(quench.omega1, internal_value)
        elif name == "e0":
            params = SystemParams(internal_value, params.coupling)
        else:
            params = params.with_coupling(internal_value)
        return params, quench

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "RunConfig":
        """
        Build a RunConfig from merged file/flag values (strings or numbers).

        Raises:
            ConfigError for unknown keys, missing or malformed values
        """
        unknown = sorted(k for k, v in values.items() if k not in RUN_KEYS and v is not None)
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}", parameter=unknown[0])

        unit = _require(values, "unit")
        if unit not in UNITS:
            raise ConfigError(f"unit must be one of {UNITS}, got '{unit}'", parameter="unit")

        fmt = str(values.get("format") or "csv")
        if fmt not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got '{fmt}'", parameter="format")

        def freq(key: str) -> float:
            return to_angular(_number(values, key), unit)

        sweep = values.get("sweep")
        if isinstance(sweep, str) and sweep.strip():
            sweep = SweepSpec.from_string(sweep)

        try:
            params = SystemParams(freq("e0"), freq("lambda"))
            quench = QuenchSpec(freq("omega1"), freq("omega2"))
        except DleError as e:
            raise ConfigError(str(e), parameter=e.parameter) from e

        cutoff = int(_number(values, "cutoff", 20))
        if cutoff < 2:
            raise ConfigError(f"cutoff must be at least 2, got {cutoff}", parameter="cutoff")

        tolerances = {key: _number(values, key) for key in TOLERANCE_KEYS if values.get(key) not in (None, "")}

        run = cls(
            params=params,
            quench=quench,
            cutoff=cutoff,
            unit=unit,
            sweep=sweep or None,
            output=values.get("output") or None,
            fmt=fmt,
            tolerances=tolerances,
            ramp=_ramp_settings(values),
        )
        if run.sweep is not None:
            run.check_sweep_range()
        return run

    def check_sweep_range(self) -> None:
        """
        Validate both grid endpoints.

        The valid values of each swept quantity form an interval, so
        valid endpoints imply a valid grid.
        """
        grid = self.sweep.internal_grid(self.unit)
        for value in (grid[0], grid[-1]):
            try:
                self.with_value(self.sweep.name, float(value))
            except DleError as e:
                raise ConfigError(f"Sweep over {self.sweep.name} leaves the valid range: {e}",
                                  parameter="sweep") from e


def _require(values: Mapping[str, Any], key: str) -> Any:
    value = values.get(key)
    if value is None or value == "":
        raise ConfigError(f"Missing required setting '{key}'", parameter=key)
    return value


def _number(values: Mapping[str, Any], key: str, default: Optional[float] = None) -> float:
    raw = values.get(key)
    if raw is None or raw == "":
        if default is None:
            raise ConfigError(f"Missing required setting '{key}'", parameter=key)
        return default
    try:
        return float(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Setting '{key}' is not a number: {raw!r}", parameter=key) from e


def _ramp_settings(values: Mapping[str, Any]) -> RampSettings:
    base = RampSettings()
    shape = values.get("shape") or base.shape.value
    try:
        shape = RampShape(shape)
    except ValueError as e:
        raise ConfigError(f"Unknown ramp shape '{shape}'", parameter="shape") from e
    drive = values.get("drive")
    if isinstance(drive, str):
        drive = drive.strip().lower() not in ("0", "false", "no", "off")
    return RampSettings(
        shape=shape,
        tau_min=_number(values, "tau_min", base.tau_min),
        tau_max=_number(values, "tau_max", base.tau_max),
        points=int(_number(values, "points", base.points)),
        drive=base.drive if drive is None else bool(drive),
    )


@dataclass(frozen=True)
class ResultRow:
    """One line of sweep output; column order is fixed."""
    swept_value: Optional[float]
    w_10: float
    w_01: float
    w_11: float
    c_1: float
    c_2: float
    a_1_10: float
    a_0_11: float
    a_2_11: float
    a_2_00: float
    validity_warning: bool

    COLUMNS = ("swept_value", "w_10", "w_01", "w_11", "c_1", "c_2",
               "a_1_10", "a_0_11", "a_2_11", "a_2_00", "validity_warning")

    def as_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in self.COLUMNS}
