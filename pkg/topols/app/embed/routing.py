"""Shortest valid pipe paths and single-wire primitives on a pipe diagram.

Routes are planned with A* over states (cell, incoming direction, blue axis of
the incoming pipe). The orientation and colour of every intermediate cube follow
from the turn it makes, so a route that needs to change colour does so through
its corners.
"""
import heapq
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..pipe import (
    AXES,
    Color,
    CubeKind,
    PipeDiagram,
    Position,
    hadamard_blue,
    step,
    third_axis,
)
from ..zx import NodeKind, normalize_phase

logger = logging.getLogger(__name__)

MOVES = tuple((axis, sign) for axis in AXES for sign in (1, -1))
LEAF_MOVES = (("x", 1), ("x", -1), ("y", 1), ("y", -1), ("z", -1), ("z", 1))

# Allowed blue axes for a pipe arriving along an axis; None accepts anything
BlueOptions = Callable[[str], Optional[Sequence[str]]]


@dataclass(frozen=True)
class Region:
    """Box of cells a construction may use, minus reserved cells."""

    x_max: int
    y_max: int
    z_min: int
    z_max: int
    reserved: FrozenSet[Position] = frozenset()

    def contains(self, cell: Position) -> bool:
        x, y, z = cell
        return (
            0 <= x <= self.x_max
            and 0 <= y <= self.y_max
            and self.z_min <= z <= self.z_max
            and cell not in self.reserved
        )


@dataclass(frozen=True)
class Route:
    source: int
    target: Optional[int]
    target_position: Position
    cells: Tuple[Position, ...]
    # one entry per pipe, source side first
    directions: Tuple[str, ...]
    blues: Tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.directions)


def endpoint_blues(pipe: PipeDiagram, cube_id: int, axis: str) -> List[str]:
    """Blue axes a new pipe along `axis` may carry at an existing cube."""
    cube = pipe.cubes[cube_id]
    perpendicular = [a for a in AXES if a != axis]
    if cube.kind == CubeKind.STANDARD:
        if axis == cube.orientation:
            return []
        if cube.color == Color.BLUE:
            return [cube.orientation]
        return [third_axis(axis, cube.orientation)]
    existing = pipe.pipes_of(cube_id)
    if cube.kind == CubeKind.HADAMARD:
        if len(existing) >= 2:
            return []
        if not existing:
            return perpendicular
        return [hadamard_blue(existing[0], axis)]
    return [] if existing else perpendicular


def turn(incoming: str, outgoing: str, blue: str) -> Tuple[str, Color, str]:
    """Orientation and colour of a path cube and the blue axis of the pipe leaving it."""
    if incoming == outgoing:
        return blue, Color.BLUE, blue
    orientation = third_axis(incoming, outgoing)
    if blue == orientation:
        return orientation, Color.BLUE, orientation
    return orientation, Color.RED, incoming


def plan_route(
    pipe: PipeDiagram,
    source_id: int,
    target_position: Position,
    target_blues: Optional[BlueOptions],
    region: Region,
    target_id: Optional[int] = None,
) -> Optional[Route]:
    """Shortest constraint-satisfying path from a cube to a target cell.

    target_blues gives the blue axes the target accepts per arrival axis; pass
    None for a target cube that does not exist yet and takes any pipe.
    """
    start = pipe.cubes[source_id].position
    target_position = tuple(target_position)

    def accepts(axis: str, blue: str) -> bool:
        if target_blues is None:
            return True
        allowed = target_blues(axis)
        return allowed is None or blue in allowed

    def heuristic(cell: Position) -> int:
        return sum(abs(a - b) for a, b in zip(cell, target_position))

    def free(cell: Position) -> bool:
        return region.contains(cell) and not pipe.is_occupied(cell)

    parents: Dict[tuple, Optional[tuple]] = {}
    best_cost: Dict[tuple, int] = {}
    heap: List[tuple] = []

    for axis, sign in MOVES:
        cell = step(start, axis, sign)
        for blue in endpoint_blues(pipe, source_id, axis):
            if cell == target_position:
                if target_id is not None and pipe.has_pipe(source_id, target_id):
                    continue
                if accepts(axis, blue):
                    return Route(source_id, target_id, target_position, (), (axis,), (blue,))
                continue
            if not free(cell):
                continue
            key = (cell, axis, sign, blue)
            if key not in best_cost:
                best_cost[key] = 1
                parents[key] = None
                h = heuristic(cell)
                heapq.heappush(heap, (1 + h, cell[2], h, cell, axis, sign, blue, 1))

    closed = set()
    while heap:
        _, _, _, cell, axis, sign, blue, cost = heapq.heappop(heap)
        key = (cell, axis, sign, blue)
        if key in closed or cost > best_cost.get(key, math.inf):
            continue
        closed.add(key)
        ancestors = _chain_cells(parents, key)
        for out_axis, out_sign in MOVES:
            if out_axis == axis and out_sign == -sign:
                continue
            nxt = step(cell, out_axis, out_sign)
            _, _, out_blue = turn(axis, out_axis, blue)
            if nxt == target_position:
                if accepts(out_axis, out_blue):
                    return _build_route(parents, key, source_id, target_id, target_position, out_axis, out_blue)
                continue
            if not free(nxt) or nxt in ancestors:
                continue
            next_key = (nxt, out_axis, out_sign, out_blue)
            if cost + 1 < best_cost.get(next_key, math.inf):
                best_cost[next_key] = cost + 1
                parents[next_key] = key
                h = heuristic(nxt)
                heapq.heappush(heap, (cost + 1 + h, nxt[2], h, nxt, out_axis, out_sign, out_blue, cost + 1))
    return None


def _chain_cells(parents: Dict[tuple, Optional[tuple]], key: tuple) -> set:
    cells = set()
    while key is not None:
        cells.add(key[0])
        key = parents[key]
    return cells


def _build_route(parents, key, source_id, target_id, target_position, last_axis, last_blue) -> Route:
    chain = []
    while key is not None:
        chain.append(key)
        key = parents[key]
    chain.reverse()
    cells = tuple(k[0] for k in chain)
    directions = tuple(k[1] for k in chain) + (last_axis,)
    blues = tuple(k[3] for k in chain) + (last_blue,)
    return Route(source_id, target_id, target_position, cells, directions, blues)


def apply_route(pipe: PipeDiagram, route: Route, target_kind: Optional[CubeKind] = None) -> int:
    """Build a planned route into the diagram and return the target cube id.

    For a route to a free cell, target_kind picks what is created there: a
    Standard anchor cube oriented so a later pipe can continue along z, or a
    boundary port.
    """
    ids = [route.source]
    for index, cell in enumerate(route.cells):
        orientation, color, _ = turn(route.directions[index], route.directions[index + 1], route.blues[index])
        ids.append(pipe.add_cube(cell, CubeKind.STANDARD, orientation, color).id)

    target = route.target
    if target is None:
        arrival, blue = route.directions[-1], route.blues[-1]
        if target_kind in (None, CubeKind.STANDARD):
            if arrival == "z":
                target = pipe.add_cube(route.target_position, CubeKind.STANDARD, blue, Color.BLUE).id
            else:
                orientation = third_axis(arrival, "z")
                color = Color.BLUE if blue == orientation else Color.RED
                target = pipe.add_cube(route.target_position, CubeKind.STANDARD, orientation, color).id
        else:
            target = pipe.add_cube(route.target_position, target_kind).id
    ids.append(target)

    for a, b, blue in zip(ids, ids[1:], route.blues):
        pipe.add_pipe(a, b, blue)
    return target


def leaf_kind_for(phase: float) -> CubeKind:
    return CubeKind.YCAP if math.isclose(normalize_phase(phase), math.pi / 2, abs_tol=1e-9) else CubeKind.INJECTION


def _add_port(pipe: PipeDiagram, cell: Position, phase: float) -> int:
    kind = leaf_kind_for(phase)
    angle = normalize_phase(phase) if kind == CubeKind.INJECTION else None
    return pipe.add_cube(cell, kind, angle=angle).id


def attach_leaf(pipe: PipeDiagram, junction_id: int, kind: NodeKind, phase: float, region: Region) -> bool:
    """Hang a single-wire phase primitive off a junction cube.

    A Z-type leaf is one YCap or injection cube next to the junction; an X-type
    leaf goes through a Hadamard cube first. Returns False, leaving the diagram
    untouched, when no neighbouring cells fit.
    """
    junction = pipe.cubes[junction_id]

    def free(cell: Position) -> bool:
        return region.contains(cell) and not pipe.is_occupied(cell)

    for axis, sign in LEAF_MOVES:
        blues = endpoint_blues(pipe, junction_id, axis)
        first = step(junction.position, axis, sign)
        if not blues or not free(first):
            continue
        if kind == NodeKind.Z:
            port = _add_port(pipe, first, phase)
            pipe.add_pipe(junction_id, port, blues[0])
            return True
        for axis2, sign2 in LEAF_MOVES:
            second = step(first, axis2, sign2)
            if second == junction.position or not free(second):
                continue
            box = pipe.add_cube(first, CubeKind.HADAMARD).id
            inner = pipe.add_pipe(junction_id, box, blues[0])
            port = _add_port(pipe, second, phase)
            pipe.add_pipe(box, port, hadamard_blue(inner, axis2))
            return True
    return False


def free_sides(pipe: PipeDiagram, cube_id: int, region: Region) -> int:
    """Neighbouring cells a new pipe could still leave through."""
    cube = pipe.cubes[cube_id]
    count = 0
    for axis, sign in MOVES:
        if not endpoint_blues(pipe, cube_id, axis):
            continue
        cell = step(cube.position, axis, sign)
        if region.contains(cell) and not pipe.is_occupied(cell):
            count += 1
    if cube.kind == CubeKind.HADAMARD:
        count = min(count, 2 - pipe.degree(cube_id))
    return count

