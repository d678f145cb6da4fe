import logging
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from ..pipe import PipeDiagram, Position, space_time_volume
from ..zx import ZxDiagram, iter_primitives
from .routing import Region

logger = logging.getLogger(__name__)


def anchor_xy(qubit: int, grid: Tuple[int, int], spacing: int) -> Tuple[int, int]:
    """Patch coordinates of a logical qubit on the grid, row by row."""
    width = grid[0]
    return spacing * (qubit % width), spacing * (qubit // width)


def grid_extent(grid: Tuple[int, int], spacing: int) -> Tuple[int, int]:
    """Largest x and y a construction may use, one routing channel past the last patch."""
    return spacing * (grid[0] - 1) + 1, spacing * (grid[1] - 1) + 1


class EmbeddingState:
    """A partially embedded block: the pipe diagram so far and the spider placements."""

    def __init__(
        self,
        diagram: ZxDiagram,
        pipe: PipeDiagram,
        grid: Tuple[int, int],
        spacing: int,
        z_floor: int,
        placed: Optional[Dict[int, int]] = None,
        reserved: FrozenSet[Position] = frozenset(),
        primitives: Optional[Set[int]] = None,
    ):
        self.diagram = diagram
        self.pipe = pipe
        self.grid = grid
        self.spacing = spacing
        self.z_floor = z_floor
        # ZX node id -> cube id, block inputs included
        self.placed: Dict[int, int] = dict(placed or {})
        # cube id -> spider id, spiders only
        self.phi: Dict[int, int] = {}
        self.frontier_ports: List[Tuple[int, int]] = []
        self.current_layer = 0
        self.reserved = reserved
        self.primitives = primitives if primitives is not None else set(iter_primitives(diagram))
        # highest plane the current layer may build on
        self.z_cap: Optional[int] = None
        # exit cube ids, set once the outputs of the block are routed
        self.exits: Optional[List[int]] = None

    @property
    def footprint(self) -> Tuple[int, int]:
        return self.grid

    @property
    def x_max(self) -> int:
        return grid_extent(self.grid, self.spacing)[0]

    @property
    def y_max(self) -> int:
        return grid_extent(self.grid, self.spacing)[1]

    def top_z(self) -> int:
        return max((p[2] for p in self.pipe.positions()), default=self.z_floor)

    def region(self, z_max: Optional[int] = None, capped: bool = True) -> Region:
        """Cells usable above the block floor, with one plane of headroom by default."""
        if z_max is None:
            z_max = self.top_z() + 1
        if capped and self.z_cap is not None:
            z_max = min(z_max, self.z_cap)
        return Region(self.x_max, self.y_max, self.z_floor + 1, z_max, self.reserved)

    def is_free(self, cell: Position) -> bool:
        return self.region(max(cell[2], self.z_floor + 1)).contains(cell) and not self.pipe.is_occupied(cell)

    def volume(self) -> int:
        return space_time_volume(self.pipe)

    def cube_count(self) -> int:
        return len(self.pipe.cubes)

    def pending(self, spider: int) -> int:
        """Connections of a spider whose other end is not embedded yet."""
        return sum(
            1 for u in self.diagram.incident(spider)
            if u not in self.primitives and u not in self.placed
        )

    def refresh_frontier(self, layer_spiders: List[int]) -> None:
        self.frontier_ports = [
            (v, self.placed[v]) for v in layer_spiders if v in self.placed and self.pending(v) > 0
        ]

    def copy(self) -> "EmbeddingState":
        other = EmbeddingState.__new__(EmbeddingState)
        other.diagram = self.diagram
        other.pipe = self.pipe.copy()
        other.grid = self.grid
        other.spacing = self.spacing
        other.z_floor = self.z_floor
        other.placed = dict(self.placed)
        other.phi = dict(self.phi)
        other.frontier_ports = list(self.frontier_ports)
        other.current_layer = self.current_layer
        other.reserved = self.reserved
        other.primitives = self.primitives
        other.z_cap = self.z_cap
        other.exits = list(self.exits) if self.exits is not None else None
        return other

    def __repr__(self) -> str:
        return (
            f"EmbeddingState(layer {self.current_layer}, {len(self.phi)} spiders, "
            f"{self.cube_count()} cubes, volume {self.volume()})"
        )
