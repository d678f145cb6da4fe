import math
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

OPT_LEVELS = ("none", "place", "part", "full")


class PartitionConfig(BaseModel):
    mode: Literal["topology_aware", "uniform", "none"] = "topology_aware"
    # None resolves to the circuit's qubit count
    threshold: Optional[int] = Field(default=None, ge=1)
    uniform_stride: int = Field(default=5, ge=1)

    def resolved_threshold(self, num_qubits: int) -> int:
        return self.threshold if self.threshold is not None else num_qubits

    @classmethod
    def parse_flag(cls, value: str) -> "PartitionConfig":
        """Build a config from the CLI form: topo, topo:T, uniform:K or none."""
        name, _, arg = value.partition(":")
        if name == "none" and not arg:
            return cls(mode="none")
        if name == "uniform":
            return cls(mode="uniform", uniform_stride=int(arg) if arg else 5)
        if name in ("topo", "topology_aware"):
            return cls(mode="topology_aware", threshold=int(arg) if arg else None)
        raise ValueError(f"Invalid partition mode '{value}'; expected topo[:T], uniform:K or none")


class CompileConfig(BaseModel):
    grid: Tuple[int, int] = (4, 4)
    placement_opt: bool = True
    partition: PartitionConfig = Field(default_factory=PartitionConfig)
    iterations: int = Field(default=1000, ge=1)
    timeout_ms: int = Field(default=2000, ge=1)
    seeds_per_layer: int = Field(default=2, ge=1)
    exploration_c: float = Field(default=math.sqrt(2), ge=0.0)
    rng_seed: int = Field(default=0, ge=0)
    spacing: int = Field(default=2, ge=1)
    debug_validate: bool = False

    @field_validator("grid")
    @classmethod
    def check_grid(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        if value[0] < 1 or value[1] < 1:
            raise ValueError(f"Grid dimensions must be at least 1, got {value[0]}x{value[1]}")
        return value

    @property
    def capacity(self) -> int:
        return self.grid[0] * self.grid[1]

    @classmethod
    def for_level(cls, level: str, grid: Tuple[int, int] = (4, 4), **overrides: Any) -> "CompileConfig":
        """Preset for one of the optimisation levels none, place, part or full."""
        if level not in OPT_LEVELS:
            raise ValueError(f"Unknown optimisation level '{level}'; expected one of {', '.join(OPT_LEVELS)}")
        placement_opt = level in ("place", "full")
        if level in ("part", "full"):
            partition = PartitionConfig(mode="topology_aware")
        else:
            partition = PartitionConfig(mode="uniform", uniform_stride=5)
        values: Dict[str, Any] = {"grid": grid, "placement_opt": placement_opt, "partition": partition}
        values.update(overrides)
        return cls(**values)


def parse_grid(value: str) -> Tuple[int, int]:
    """Parse a WxH grid flag."""
    parts = value.lower().split("x")
    if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
        raise ValueError(f"Invalid grid '{value}'; expected WxH, e.g. 4x4")
    width, height = (int(p) for p in parts)
    if width < 1 or height < 1:
        raise ValueError(f"Grid dimensions must be at least 1, got {value}")
    return width, height


def square_grid(num_qubits: int) -> Tuple[int, int]:
    """Smallest square grid holding num_qubits patches."""
    side = max(1, math.isqrt(max(num_qubits, 1) - 1) + 1)
    return side, side


class CompileReport(BaseModel):
    volume: int
    footprint: Tuple[int, int]
    time_steps: int
    temporal_extent: int
    compile_time_ms: int
    fallback_layer_count: int
    layer_count: int
    replaced_by_baseline: bool = False
    verified: Optional[bool] = None
    residual: Optional[float] = None
    layer_stats: List[Dict[str, Any]] = Field(default_factory=list)
    config: CompileConfig
