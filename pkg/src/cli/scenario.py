"""Scenario files: flat ``dotted.key = value`` lines validated by pydantic.

Example::

    # matched coherent system
    lambda = 1.0
    backend = both
    system.kind = gaussian
    system.width = 0.7071067811865476
    grid.n = 64
    grid.length = 20

Superpositions list packets by index (``system.packets.0.coefficient = 0.6``).
Per-axis lattice overrides use ``grid.system.n``, ``grid.meterX.length`` and so on.
"""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError, field_validator

from ..grid.lattice import AXIS_LABELS, AxisSpec, GridState, WavePacket, init_superposition
from ..gaussian.moments import coherent_system
from ..utils.errors import ScenarioError


class PacketConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    coefficient: float = 1.0
    mean_x: float = 0.0
    mean_p: float = 0.0
    width: float = Field(gt=0)


class SystemConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["gaussian", "superposition"] = "gaussian"
    mean_x: float = 0.0
    mean_p: float = 0.0
    width: PositiveFloat | None = None
    packets: list[PacketConfig] = Field(default_factory=list)


class AxisConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int | None = None
    length: PositiveFloat | None = None


class GridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    n: int = 64
    length: float = Field(default=20.0, gt=0)
    edge_margin: float = Field(default=6.0, gt=0)
    on_unresolved: Literal["raise", "warn"] = "raise"
    overlap_warning: float = Field(default=1e-3, gt=0)
    system: AxisConfig = Field(default_factory=AxisConfig)
    meter_x: AxisConfig = Field(default_factory=AxisConfig, alias="meterX")
    meter_p: AxisConfig = Field(default_factory=AxisConfig, alias="meterP")

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, n: int) -> int:
        if n < 8 or n & (n - 1):
            raise ValueError("must be a power of two >= 8")
        return n

    def axes(self) -> tuple[AxisSpec, AxisSpec, AxisSpec]:
        overrides = (self.system, self.meter_x, self.meter_p)
        return tuple(
            AxisSpec(o.n or self.n, o.length or self.length, label)
            for o, label in zip(overrides, AXIS_LABELS)
        )


class Scenario(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    hbar: float = Field(default=1.0, gt=0)
    lam: float = Field(alias="lambda", gt=0)
    coupling: float = 1.0
    backend: Literal["gaussian", "grid", "both"] = "gaussian"
    seed: int = 0
    region_fraction: float = Field(default=0.25, gt=0, le=0.5)
    lambdas: list[float] = Field(default_factory=list)
    system: SystemConfig
    grid: GridConfig = Field(default_factory=GridConfig)

    @field_validator("lambdas", mode="before")
    @classmethod
    def _split_list(cls, value):
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    def packets(self) -> list[WavePacket]:
        s = self.system
        if s.kind == "gaussian":
            return [WavePacket(1.0, s.mean_x, s.mean_p, s.width)]
        return [WavePacket(p.coefficient, p.mean_x, p.mean_p, p.width) for p in s.packets]

    def system_block(self):
        """Mean and covariance of a Gaussian system, for the moment backend."""
        if self.system.kind != "gaussian":
            raise ScenarioError("the gaussian backend needs a gaussian system", field="system.kind")
        s = self.system
        return coherent_system(s.width, s.mean_x, s.mean_p, self.hbar)

    def initial_grid_state(self, lam: float | None = None) -> GridState:
        g = self.grid
        return init_superposition(
            g.axes(),
            self.packets(),
            self.lam if lam is None else lam,
            self.hbar,
            coupling=self.coupling,
            edge_margin=g.edge_margin,
            on_unresolved=g.on_unresolved,
            overlap_warning=g.overlap_warning,
        )

    def backends(self) -> list[str]:
        return ["gaussian", "grid"] if self.backend == "both" else [self.backend]


# ===== Parsing =====


def parse_lines(text: str) -> dict[str, tuple[str, int]]:
    """Map each dotted key to its raw value and 1-based line number."""
    entries: dict[str, tuple[str, int]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ScenarioError(f"line {number}: expected 'key = value', got '{raw.strip()}'", line=number)
        if key in entries:
            raise ScenarioError(f"duplicate key (first set on line {entries[key][1]})", field=key, line=number)
        entries[key] = (value, number)
    return entries


def _nest(entries: dict[str, tuple[str, int]]) -> dict:
    root: dict = {}
    for key, (value, number) in entries.items():
        parts = key.split(".")
        node = root
        for depth, part in enumerate(parts[:-1]):
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ScenarioError("key is both a value and a section", field=".".join(parts[: depth + 1]), line=number)
            node = child
        if isinstance(node.get(parts[-1]), dict):
            raise ScenarioError("key is both a value and a section", field=key, line=number)
        node[parts[-1]] = value
    return {key: _listify(value, f"{key}.") for key, value in root.items()}


def _merge_defaults(data: dict, defaults: dict) -> None:
    """Fill keys the file leaves unset; nested dicts merge section by section."""
    for key, value in defaults.items():
        if isinstance(value, dict) and isinstance(data.get(key, {}), dict):
            _merge_defaults(data.setdefault(key, {}), value)
        else:
            data.setdefault(key, value)


def _listify(node, prefix: str):
    """Turn sections whose keys are all integers into lists."""
    if not isinstance(node, dict):
        return node
    converted = {k: _listify(v, f"{prefix}{k}.") for k, v in node.items()}
    if converted and all(k.isdigit() for k in converted):
        indices = sorted(int(k) for k in converted)
        if indices != list(range(len(indices))):
            raise ScenarioError("list indices must run 0, 1, 2, ... without gaps", field=prefix.rstrip("."))
        return [converted[str(i)] for i in indices]
    return converted


def _dotted(loc: tuple) -> str:
    return ".".join(str(part) for part in loc)


def _line_for(field: str, entries: dict[str, tuple[str, int]]) -> int | None:
    if field in entries:
        return entries[field][1]
    # Fall back to the first key inside the offending section
    for key, (_, number) in entries.items():
        if key.startswith(field + "."):
            return number
    return None


def scenario_from_text(text: str, defaults: dict | None = None) -> Scenario:
    entries = parse_lines(text)
    data = _nest(entries)
    _merge_defaults(data, defaults or {})
    try:
        scenario = Scenario.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = _dotted(error["loc"])
        raise ScenarioError(error["msg"], field=field, line=_line_for(field, entries)) from exc

    system = scenario.system
    if system.kind == "gaussian" and system.width is None:
        raise ScenarioError("a gaussian system needs a width", field="system.width", line=_line_for("system", entries))
    if system.kind == "superposition" and not system.packets:
        raise ScenarioError(
            "a superposition needs at least one packet", field="system.packets", line=_line_for("system", entries)
        )
    return scenario


def load_scenario(path: str | Path, defaults: dict | None = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    return scenario_from_text(text, defaults)
