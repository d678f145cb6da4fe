"""Spider placement: candidate cells, routing to embedded neighbours, leaves."""
import logging
import math
from typing import Iterator, List, Optional, Tuple

from ..config import CompileConfig
from ..errors import CompileError, InvalidDiagramError
from ..pipe import AXES, Color, CubeKind, Position, ensure_valid, step
from ..zx import NodeKind
from .routing import Route, apply_route, attach_leaf, endpoint_blues, free_sides, plan_route
from .state import EmbeddingState

logger = logging.getLogger(__name__)

ABOVE = (("z", 1),)
NEIGHBOURHOOD = (("z", 1), ("x", 1), ("x", -1), ("y", 1), ("y", -1), ("z", -1))

Action = Tuple[int, Position, Optional[str]]


def route_connection(state: EmbeddingState, from_id: int, to_id: int) -> Optional[Route]:
    """Shortest valid path between two embedded cubes, within one plane of headroom."""
    pipe = state.pipe
    return plan_route(
        pipe,
        from_id,
        pipe.cubes[to_id].position,
        lambda axis: endpoint_blues(pipe, to_id, axis),
        state.region(),
        target_id=to_id,
    )


def candidate_cells(state: EmbeddingState, spider: int, placement_opt: bool) -> List[Position]:
    """Vacant cells next to the spider's embedded neighbours, cells above first."""
    moves = NEIGHBOURHOOD if placement_opt else ABOVE
    bases = [
        state.pipe.cubes[state.placed[u]].position
        for u in state.diagram.neighbors(spider)
        if u in state.placed
    ]
    cells: List[Position] = []
    for axis, sign in moves:
        for base in bases:
            cell = step(base, axis, sign)
            if cell not in cells and state.is_free(cell):
                cells.append(cell)
    return cells


def leaves_of(state: EmbeddingState, spider: int) -> List[Tuple[NodeKind, float]]:
    diagram = state.diagram
    leaves = []
    if diagram.kind(spider) in (NodeKind.Z, NodeKind.X) and diagram.phase(spider) != 0.0:
        leaves.append((diagram.kind(spider), diagram.phase(spider)))
    for u in diagram.incident(spider):
        if u in state.primitives:
            leaves.append((diagram.kind(u), diagram.phase(u)))
    return leaves


def try_place(
    state: EmbeddingState, spider: int, cell: Position, orientation: Optional[str], debug: bool = False
) -> Optional[EmbeddingState]:
    """Place one spider at a cell and connect it; None when anything does not fit."""
    diagram = state.diagram
    child = state.copy()
    kind = diagram.kind(spider)
    if kind == NodeKind.HBOX:
        cube = child.pipe.add_cube(cell, CubeKind.HADAMARD)
    else:
        color = Color.BLUE if kind == NodeKind.Z else Color.RED
        cube = child.pipe.add_cube(cell, CubeKind.STANDARD, orientation, color)

    for u in diagram.incident(spider):
        if u in state.primitives or u not in state.placed:
            continue
        route = route_connection(child, cube.id, child.placed[u])
        if route is None:
            return None
        apply_route(child.pipe, route)

    region = child.region()
    for leaf_kind, phase in leaves_of(state, spider):
        if not attach_leaf(child.pipe, cube.id, leaf_kind, phase, region):
            return None

    child.placed[spider] = cube.id
    child.phi[cube.id] = spider
    if child.pending(spider) > free_sides(child.pipe, cube.id, child.region(child.top_z() + 1)):
        return None
    if buried(child):
        return None

    if debug:
        try:
            ensure_valid(child.pipe, "partial embedding", partial=True)
        except InvalidDiagramError as exc:
            raise CompileError(f"Expansion of spider {spider} broke the diagram: {exc}") from exc
    return child


def buried(state: EmbeddingState) -> bool:
    """True when some embedded spider has fewer open sides than connections it still owes."""
    region = state.region(state.top_z() + 1, capped=False)
    for cube_id, spider in state.phi.items():
        owed = state.pending(spider)
        if owed and owed > free_sides(state.pipe, cube_id, region):
            return True
    return False


def iter_candidates(state: EmbeddingState, spider: int, config: CompileConfig) -> Iterator[Tuple[Action, EmbeddingState]]:
    """Lazily yield every feasible placement of a spider, in a fixed order."""
    orientations = (None,) if state.diagram.kind(spider) == NodeKind.HBOX else AXES
    for cell in candidate_cells(state, spider, config.placement_opt):
        for orientation in orientations:
            child = try_place(state, spider, cell, orientation, config.debug_validate)
            if child is not None:
                yield (spider, cell, orientation), child


def expand_spider(state: EmbeddingState, spider: int, config: CompileConfig) -> List[EmbeddingState]:
    """All successor states embedding the spider; an empty list means infeasible."""
    return [child for _, child in iter_candidates(state, spider, config)]


def rollout(state: EmbeddingState, remaining: List[int], config: CompileConfig) -> Tuple[float, Optional[EmbeddingState]]:
    """Finish a layer greedily with the first feasible placement of each spider.

    Returns the negative volume of the completed state, or -inf and None when
    some spider cannot be placed.
    """
    current = state
    for spider in remaining:
        found = next(iter_candidates(current, spider, config), None)
        if found is None:
            return -math.inf, None
        current = found[1]
    return -float(current.volume()), current
