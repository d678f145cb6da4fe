"""Pipe diagrams: cubes and unit pipes in integer space-time, with z as time.

A Standard cube has an orientation axis and a colour; every pipe stores its
direction plus the axes carrying its blue and red boundaries. The colour of a
pipe along an axis is blue when the axis is its blue orientation and red when it
is its red orientation.
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from .errors import InvalidDiagramError
from .zx import NodeKind, ZxDiagram, remove_identities

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

AXES = ("x", "y", "z")
AXIS_INDEX = {"x": 0, "y": 1, "z": 2}

Position = Tuple[int, int, int]


class CubeKind(str, Enum):
    STANDARD = "Standard"
    HADAMARD = "Hadamard"
    YCAP = "YCap"
    INJECTION = "InjectionPort"
    BOUNDARY = "BoundaryPort"


class Color(str, Enum):
    BLUE = "blue"
    RED = "red"


PORT_KINDS = (CubeKind.YCAP, CubeKind.INJECTION, CubeKind.BOUNDARY)


@dataclass(frozen=True)
class Cube:
    id: int
    position: Position
    kind: CubeKind
    orientation: Optional[str] = None
    color: Optional[Color] = None
    angle: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"id": self.id, "pos": list(self.position), "kind": self.kind.value}
        if self.orientation is not None:
            data["orientation"] = self.orientation
        if self.color is not None:
            data["color"] = self.color.value
        if self.angle is not None:
            data["angle"] = self.angle
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Cube":
        color = data.get("color")
        return cls(
            id=int(data["id"]),
            position=tuple(int(c) for c in data["pos"]),
            kind=CubeKind(data["kind"]),
            orientation=data.get("orientation"),
            color=Color(color) if color is not None else None,
            angle=data.get("angle"),
        )


@dataclass(frozen=True)
class Pipe:
    a: int
    b: int
    direction: str
    blue: str
    red: str

    def other(self, cube_id: int) -> int:
        return self.b if cube_id == self.a else self.a

    def to_dict(self) -> Dict[str, Any]:
        return {"a": self.a, "b": self.b, "dir": self.direction, "blue": self.blue, "red": self.red}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Pipe":
        return cls(int(data["a"]), int(data["b"]), data["dir"], data["blue"], data["red"])


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    cube_ids: Tuple[int, ...] = field(default_factory=tuple)
    pipe_ids: Tuple[int, ...] = field(default_factory=tuple)

    def __str__(self) -> str:
        return f"[{self.kind}] {self.message}"


def third_axis(a: str, b: str) -> str:
    if a == b:
        raise ValueError(f"Axes must differ, got {a} twice")
    (rest,) = set(AXES) - {a, b}
    return rest


def pipe_color(pipe: Pipe, axis: str) -> Optional[Color]:
    if axis == pipe.blue:
        return Color.BLUE
    if axis == pipe.red:
        return Color.RED
    return None


def hadamard_blue(first: Pipe, direction: str) -> str:
    """Blue axis a second pipe along `direction` needs at a Hadamard cube holding `first`."""
    if direction == first.direction:
        return first.red
    normal = third_axis(first.direction, direction)
    return first.direction if pipe_color(first, normal) == Color.BLUE else normal


def step(position: Position, axis: str, sign: int) -> Position:
    moved = list(position)
    moved[AXIS_INDEX[axis]] += sign
    return tuple(moved)


def axis_between(a: Position, b: Position) -> Optional[str]:
    """Axis along which two positions are unit neighbours, else None."""
    delta = [q - p for p, q in zip(a, b)]
    if sum(abs(d) for d in delta) != 1:
        return None
    return AXES[[abs(d) for d in delta].index(1)]


class PipeDiagram:
    def __init__(self):
        self.cubes: Dict[int, Cube] = {}
        self.pipes: List[Pipe] = []
        self.input_ports: List[int] = []
        self.output_ports: List[int] = []
        self._by_position: Dict[Position, int] = {}
        self._incidence: Dict[int, List[int]] = {}
        self._next_id = 0

    # construction

    def add_cube(
        self,
        position: Position,
        kind: CubeKind,
        orientation: Optional[str] = None,
        color: Optional[Color] = None,
        angle: Optional[float] = None,
        cube_id: Optional[int] = None,
    ) -> Cube:
        if cube_id is None:
            cube_id = self._next_id
        if cube_id in self.cubes:
            raise ValueError(f"Cube id {cube_id} already in use")
        self._next_id = max(self._next_id, cube_id + 1)
        cube = Cube(cube_id, tuple(position), CubeKind(kind), orientation, color, angle)
        self.cubes[cube_id] = cube
        self._by_position.setdefault(cube.position, cube_id)
        self._incidence[cube_id] = []
        return cube

    def update_cube(self, cube_id: int, **changes: Any) -> Cube:
        cube = replace(self.cubes[cube_id], **changes)
        self.cubes[cube_id] = cube
        return cube

    def add_pipe(self, a: int, b: int, blue: str, red: Optional[str] = None) -> Pipe:
        direction = axis_between(self.cubes[a].position, self.cubes[b].position)
        if direction is None:
            raise ValueError(f"Cubes {a} and {b} are not unit neighbours")
        if red is None:
            red = third_axis(direction, blue)
        return self.append_pipe(Pipe(a, b, direction, blue, red))

    def append_pipe(self, pipe: Pipe) -> Pipe:
        index = len(self.pipes)
        self.pipes.append(pipe)
        self._incidence.setdefault(pipe.a, []).append(index)
        self._incidence.setdefault(pipe.b, []).append(index)
        return pipe

    # queries

    def cube_at(self, position: Position) -> Optional[Cube]:
        cube_id = self._by_position.get(tuple(position))
        return self.cubes[cube_id] if cube_id is not None else None

    def is_occupied(self, position: Position) -> bool:
        return tuple(position) in self._by_position

    def pipe_indices(self, cube_id: int) -> List[int]:
        return list(self._incidence.get(cube_id, []))

    def pipes_of(self, cube_id: int) -> List[Pipe]:
        return [self.pipes[i] for i in self._incidence.get(cube_id, [])]

    def degree(self, cube_id: int) -> int:
        return len(self._incidence.get(cube_id, []))

    def has_pipe(self, a: int, b: int) -> bool:
        return any(pipe.other(a) == b for pipe in self.pipes_of(a))

    def positions(self) -> List[Position]:
        return [cube.position for cube in self.cubes.values()]

    @property
    def next_id(self) -> int:
        return self._next_id

    def copy(self) -> "PipeDiagram":
        other = PipeDiagram()
        other.cubes = dict(self.cubes)
        other.pipes = list(self.pipes)
        other.input_ports = list(self.input_ports)
        other.output_ports = list(self.output_ports)
        other._by_position = dict(self._by_position)
        other._incidence = {k: list(v) for k, v in self._incidence.items()}
        other._next_id = self._next_id
        return other

    # serialization

    def to_dict(self) -> Dict[str, Any]:
        pipes = sorted(self.pipes, key=lambda p: (min(p.a, p.b), max(p.a, p.b), p.direction, p.blue))
        return {
            "version": FORMAT_VERSION,
            "cubes": [self.cubes[i].to_dict() for i in sorted(self.cubes)],
            "pipes": [pipe.to_dict() for pipe in pipes],
            "inputs": list(self.input_ports),
            "outputs": list(self.output_ports),
            "meta": {"volume": space_time_volume(self), "time_steps": time_steps(self)},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PipeDiagram":
        version = data.get("version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ValueError(f"Unsupported pipe diagram version {version}")
        diagram = cls()
        for item in data["cubes"]:
            cube = Cube.from_dict(item)
            diagram.add_cube(cube.position, cube.kind, cube.orientation, cube.color, cube.angle, cube_id=cube.id)
        for item in data["pipes"]:
            diagram.append_pipe(Pipe.from_dict(item))
        diagram.input_ports = [int(i) for i in data["inputs"]]
        diagram.output_ports = [int(i) for i in data["outputs"]]
        return diagram

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PipeDiagram):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f"PipeDiagram({len(self.cubes)} cubes, {len(self.pipes)} pipes, volume {space_time_volume(self)})"


# validation

def _check_structure(p: PipeDiagram, violations: List[Violation]) -> List[int]:
    sound = []
    seen: Dict[frozenset, int] = {}
    for index, pipe in enumerate(p.pipes):
        if pipe.a not in p.cubes or pipe.b not in p.cubes:
            violations.append(Violation("structure", f"pipe {index} references a missing cube", (), (index,)))
            continue
        if pipe.a == pipe.b:
            violations.append(Violation("structure", f"pipe {index} is a loop", (pipe.a,), (index,)))
            continue
        if {pipe.direction, pipe.blue, pipe.red} != set(AXES):
            violations.append(Violation(
                "structure", f"pipe {index} axes {pipe.direction}/{pipe.blue}/{pipe.red} are not orthogonal",
                (pipe.a, pipe.b), (index,),
            ))
            continue
        axis = axis_between(p.cubes[pipe.a].position, p.cubes[pipe.b].position)
        if axis != pipe.direction:
            violations.append(Violation(
                "structure", f"pipe {index} is not a unit segment along {pipe.direction}",
                (pipe.a, pipe.b), (index,),
            ))
            continue
        key = frozenset((pipe.a, pipe.b))
        if key in seen:
            violations.append(Violation(
                "geometry", f"pipes {seen[key]} and {index} overlap", (pipe.a, pipe.b), (seen[key], index),
            ))
            continue
        seen[key] = index
        sound.append(index)

    for cube in p.cubes.values():
        if cube.kind == CubeKind.STANDARD:
            if cube.orientation not in AXES or cube.color is None:
                violations.append(Violation(
                    "structure", f"standard cube {cube.id} lacks orientation or colour", (cube.id,),
                ))
        elif cube.orientation is not None or cube.color is not None:
            violations.append(Violation(
                "structure", f"{cube.kind.value} cube {cube.id} must not carry orientation or colour", (cube.id,),
            ))
        if (cube.kind == CubeKind.INJECTION) != (cube.angle is not None):
            violations.append(Violation(
                "structure", f"cube {cube.id}: an angle is required on injection ports only", (cube.id,),
            ))
        elif cube.angle is not None and not math.isfinite(cube.angle):
            violations.append(Violation("structure", f"injection port {cube.id} has a non-finite angle", (cube.id,)))
    return sound


def validate_pipe_diagram(p: PipeDiagram, partial: bool = False) -> List[Violation]:
    """Every rule violation of the diagram; an empty list means it is valid.

    With partial=True, ports and Hadamard cubes still waiting for their pipes and
    boundary ports not yet listed are accepted.
    """
    violations: List[Violation] = []
    sound = set(_check_structure(p, violations))

    counts = Counter(cube.position for cube in p.cubes.values())
    for position, count in sorted(counts.items()):
        if count > 1:
            ids = tuple(sorted(c.id for c in p.cubes.values() if c.position == position))
            violations.append(Violation("geometry", f"{count} cubes share position {position}", ids))

    for cube in sorted(p.cubes.values(), key=lambda c: c.id):
        indices = [i for i in p.pipe_indices(cube.id) if i in sound]
        if cube.kind == CubeKind.STANDARD and cube.orientation in AXES:
            for i in indices:
                pipe = p.pipes[i]
                if pipe.direction == cube.orientation:
                    violations.append(Violation(
                        "direction", f"pipe {i} runs along the orientation {cube.orientation} of cube {cube.id}",
                        (cube.id,), (i,),
                    ))
                elif pipe_color(pipe, cube.orientation) != cube.color:
                    violations.append(Violation(
                        "color", f"pipe {i} is not {cube.color.value if cube.color else '?'} along "
                                 f"{cube.orientation} at cube {cube.id}",
                        (cube.id,), (i,),
                    ))
        elif cube.kind == CubeKind.HADAMARD:
            degree = p.degree(cube.id)
            if degree > 2 or (degree < 2 and not partial):
                violations.append(Violation(
                    "hadamard", f"Hadamard cube {cube.id} has {p.degree(cube.id)} pipes, needs exactly 2",
                    (cube.id,), tuple(p.pipe_indices(cube.id)),
                ))
            elif len(indices) == 2:
                first, second = (p.pipes[i] for i in indices)
                if second.blue != hadamard_blue(first, second.direction):
                    violations.append(Violation(
                        "hadamard", f"pipes at Hadamard cube {cube.id} do not swap colours",
                        (cube.id,), tuple(indices),
                    ))
        elif cube.kind in PORT_KINDS and (p.degree(cube.id) > 1 or (p.degree(cube.id) == 0 and not partial)):
            violations.append(Violation(
                "port", f"{cube.kind.value} {cube.id} has {p.degree(cube.id)} pipes, needs exactly 1",
                (cube.id,), tuple(p.pipe_indices(cube.id)),
            ))

    listed = Counter(p.input_ports + p.output_ports)
    for cube_id in listed:
        cube = p.cubes.get(cube_id)
        if cube is None or cube.kind != CubeKind.BOUNDARY:
            violations.append(Violation("boundary", f"port list entry {cube_id} is not a boundary port", (cube_id,)))
    for cube in p.cubes.values():
        if cube.kind == CubeKind.BOUNDARY and listed[cube.id] != 1 and not (partial and listed[cube.id] == 0):
            violations.append(Violation(
                "boundary", f"boundary port {cube.id} appears {listed[cube.id]} times in the port lists", (cube.id,),
            ))
    return violations


def ensure_valid(p: PipeDiagram, context: str = "pipe diagram", partial: bool = False) -> None:
    violations = validate_pipe_diagram(p, partial)
    if violations:
        summary = "; ".join(str(v) for v in violations[:5])
        raise InvalidDiagramError(f"Invalid {context}: {len(violations)} violation(s): {summary}", violations)


# metrics

def _extent(values: List[int]) -> int:
    return max(values) - min(values) + 1 if values else 0


def space_time_volume(p: PipeDiagram) -> int:
    """Bounding-box volume of every cube except boundary ports."""
    positions = [c.position for c in p.cubes.values() if c.kind != CubeKind.BOUNDARY]
    if not positions:
        return 0
    volume = 1
    for axis in range(3):
        volume *= _extent([pos[axis] for pos in positions])
    return volume


def time_steps(p: PipeDiagram) -> int:
    return _extent([c.position[2] for c in p.cubes.values() if c.kind != CubeKind.BOUNDARY])


def temporal_extent(p: PipeDiagram) -> int:
    """Number of z planes spanned, port planes included."""
    return _extent([c.position[2] for c in p.cubes.values()])


def footprint(p: PipeDiagram) -> Tuple[int, int]:
    positions = [c.position for c in p.cubes.values() if c.kind != CubeKind.BOUNDARY]
    return _extent([pos[0] for pos in positions]), _extent([pos[1] for pos in positions])


# interpretation

def interpret_pipe_as_zx(p: PipeDiagram, check: bool = True) -> ZxDiagram:
    """Read a valid pipe diagram back as a ZX diagram, with identity spiders removed."""
    if check:
        ensure_valid(p)
    diagram = ZxDiagram()
    node_of: Dict[int, int] = {}
    for cube_id in p.input_ports:
        node_of[cube_id] = diagram.add_node(NodeKind.BOUNDARY)
    for cube_id in p.output_ports:
        node_of[cube_id] = diagram.add_node(NodeKind.BOUNDARY)
    for cube_id in sorted(p.cubes):
        cube = p.cubes[cube_id]
        if cube.kind == CubeKind.BOUNDARY:
            continue
        if cube.kind == CubeKind.STANDARD:
            kind = NodeKind.Z if cube.color == Color.BLUE else NodeKind.X
            node_of[cube_id] = diagram.add_node(kind)
        elif cube.kind == CubeKind.HADAMARD:
            node_of[cube_id] = diagram.add_node(NodeKind.HBOX)
        elif cube.kind == CubeKind.YCAP:
            node_of[cube_id] = diagram.add_node(NodeKind.Z, math.pi / 2)
        else:
            node_of[cube_id] = diagram.add_node(NodeKind.Z, cube.angle)
    for pipe in p.pipes:
        diagram.add_edge(node_of[pipe.a], node_of[pipe.b])
    diagram.inputs = [node_of[c] for c in p.input_ports]
    diagram.outputs = [node_of[c] for c in p.output_ports]
    remove_identities(diagram)
    return diagram


def canonical_cnot() -> PipeDiagram:
    """Reference CNOT between adjacent patches: control at x=0, target at x=1."""
    p = PipeDiagram()
    blue = Color.BLUE
    red = Color.RED
    in_c = p.add_cube((0, 0, 0), CubeKind.BOUNDARY).id
    in_t = p.add_cube((1, 0, 0), CubeKind.BOUNDARY).id
    control = p.add_cube((0, 0, 1), CubeKind.STANDARD, "x", blue).id
    control_top = p.add_cube((0, 0, 2), CubeKind.STANDARD, "x", blue).id
    target_low = p.add_cube((1, 0, 1), CubeKind.STANDARD, "y", blue).id
    target = p.add_cube((1, 0, 2), CubeKind.STANDARD, "x", red).id
    turn = p.add_cube((0, 1, 1), CubeKind.STANDARD, "x", blue).id
    rise = p.add_cube((0, 1, 2), CubeKind.STANDARD, "y", red).id
    cross = p.add_cube((1, 1, 2), CubeKind.STANDARD, "z", blue).id
    out_c = p.add_cube((0, 0, 3), CubeKind.BOUNDARY).id
    out_t = p.add_cube((1, 0, 3), CubeKind.BOUNDARY).id

    for a, b in ((in_c, control), (control, control_top), (control_top, out_c)):
        p.add_pipe(a, b, blue="x")
    for a, b in ((in_t, target_low), (target_low, target), (target, out_t)):
        p.add_pipe(a, b, blue="y")
    p.add_pipe(control, turn, blue="x")
    p.add_pipe(turn, rise, blue="x")
    p.add_pipe(rise, cross, blue="z")
    p.add_pipe(cross, target, blue="z")
    p.input_ports = [in_c, in_t]
    p.output_ports = [out_c, out_t]
    return p
