"""Gate-by-gate baseline compiler.

Every gate gets its own time window and all other wires idle through it: a
Hadamard cube for H, a junction plus a phase primitive for the phase gates, and
the two-step merge pattern for CNOT. It is the reference the search is measured
against and the fallback for blocks the search cannot embed.
"""
import logging
from typing import List, Optional, Sequence, Tuple

from ..circuit import Circuit, Gate
from ..config import CompileConfig
from ..errors import CapacityError, CompileError, InvalidDiagramError
from ..pipe import Color, CubeKind, PipeDiagram, ensure_valid, third_axis
from ..zx import NodeKind
from .routing import Region, apply_route, attach_leaf, endpoint_blues, plan_route
from .state import anchor_xy, grid_extent

logger = logging.getLogger(__name__)

CNOT_HEIGHTS = range(2, 7)


def checkerboard_blue(qubit: int, grid: Tuple[int, int]) -> str:
    """Blue axis of the wire leaving the input port of a qubit."""
    i, j = qubit % grid[0], qubit // grid[0]
    return "x" if (i + j) % 2 == 0 else "y"


def check_capacity(circuit: Circuit, config: CompileConfig) -> None:
    if circuit.num_qubits > config.capacity:
        raise CapacityError(
            f"Circuit has {circuit.num_qubits} qubits but the "
            f"{config.grid[0]}x{config.grid[1]} grid holds {config.capacity}"
        )


class BaselineBuilder:
    """Grows one worldline per qubit upward from its anchor cube."""

    def __init__(self, pipe: PipeDiagram, config: CompileConfig, anchors: Sequence[int]):
        self.pipe = pipe
        self.config = config
        self.grid = config.grid
        self.x_max, self.y_max = grid_extent(config.grid, config.spacing)
        self.top: List[int] = list(anchors)
        self.blue: List[str] = []
        for qubit, cube_id in enumerate(anchors):
            cube = pipe.cubes[cube_id]
            if cube.kind == CubeKind.BOUNDARY:
                self.blue.append(checkerboard_blue(qubit, config.grid))
            else:
                options = endpoint_blues(pipe, cube_id, "z")
                if not options:
                    raise CompileError(f"Anchor cube {cube_id} cannot continue along z")
                self.blue.append(options[0])
        self.floor = max((pipe.cubes[c].position[2] for c in anchors), default=0)
        self.columns = [pipe.cubes[c].position[:2] for c in anchors]

    def z_of(self, qubit: int) -> int:
        return self.pipe.cubes[self.top[qubit]].position[2]

    def plane(self) -> int:
        """Highest plane any wire has reached."""
        return max((self.z_of(q) for q in range(len(self.top))), default=self.floor)

    def _reserved(self, z_low: int, z_high: int) -> frozenset:
        return frozenset((x, y, z) for x, y in self.columns for z in range(z_low, z_high + 1))

    def _stack(self, qubit: int, kind: CubeKind, orientation: Optional[str] = None, color: Optional[Color] = None) -> int:
        x, y = self.columns[qubit]
        cube = self.pipe.add_cube((x, y, self.z_of(qubit) + 1), kind, orientation, color)
        self.pipe.add_pipe(self.top[qubit], cube.id, self.blue[qubit])
        self.top[qubit] = cube.id
        return cube.id

    def extend(self, qubit: int, z: int) -> None:
        """Idle a wire up to plane z."""
        while self.z_of(qubit) < z:
            self._stack(qubit, CubeKind.STANDARD, self.blue[qubit], Color.BLUE)

    def extend_all(self, z: int) -> None:
        for qubit in range(len(self.top)):
            self.extend(qubit, z)

    def hadamard(self, qubit: int) -> None:
        z = self.plane() + 1
        self.extend(qubit, z - 1)
        self._stack(qubit, CubeKind.HADAMARD)
        self.blue[qubit] = third_axis("z", self.blue[qubit])
        self.extend_all(z)

    def phase(self, qubit: int, kind: NodeKind, phase: float) -> None:
        """Junction on the wire with a single-wire phase primitive beside it."""
        z = self.plane() + 1
        self.extend(qubit, z - 1)
        if kind == NodeKind.Z:
            junction = self._stack(qubit, CubeKind.STANDARD, self.blue[qubit], Color.BLUE)
        else:
            junction = self._stack(qubit, CubeKind.STANDARD, third_axis("z", self.blue[qubit]), Color.RED)
        region = Region(self.x_max, self.y_max, z, z, self._reserved(z, z))
        if not attach_leaf(self.pipe, junction, kind, phase, region):
            raise CompileError(f"No room for a phase primitive on qubit {qubit} at z={z}")
        self.extend_all(z)

    def cnot(self, control: int, target: int) -> None:
        z1 = self.plane() + 1
        snapshot = (self.pipe.copy(), list(self.top), list(self.blue))
        for height in CNOT_HEIGHTS:
            self.pipe, self.top, self.blue = snapshot[0].copy(), list(snapshot[1]), list(snapshot[2])
            self.extend(target, z1)
            c_junction = self._stack_at(control, z1, self.blue[control], Color.BLUE)
            t_junction = self._stack_at(target, z1 + 1, third_axis("z", self.blue[target]), Color.RED)
            self.extend_all(z1 + height - 1)
            reserved = self._reserved(z1, z1 + height - 1)
            region = Region(self.x_max, self.y_max, z1, z1 + height - 1, reserved)
            target_cube = self.pipe.cubes[t_junction]
            route = plan_route(
                self.pipe, c_junction, target_cube.position,
                lambda axis: endpoint_blues(self.pipe, t_junction, axis),
                region, target_id=t_junction,
            )
            if route is not None:
                apply_route(self.pipe, route)
                if height > 2:
                    logger.debug(f"CNOT {control}->{target} needed a {height}-step window")
                return
        raise CompileError(f"Grid too small to route CNOT from qubit {control} to qubit {target}")

    def _stack_at(self, qubit: int, z: int, orientation: str, color: Color) -> int:
        self.extend(qubit, z - 1)
        return self._stack(qubit, CubeKind.STANDARD, orientation, color)

    def apply(self, gate: Gate) -> None:
        if gate.kind == "CNOT":
            self.cnot(*gate.qubits)
        elif gate.kind == "H":
            self.hadamard(gate.qubits[0])
        elif gate.kind == "X":
            self.phase(gate.qubits[0], NodeKind.X, gate.phase)
        else:
            self.phase(gate.qubits[0], NodeKind.Z, gate.phase)

    def run(self, circuit: Circuit) -> None:
        for gate in circuit.gates:
            self.apply(gate)
        if not circuit.gates:
            self.extend_all(self.plane() + 1)

    def finish(self, final: bool) -> List[int]:
        """Close the worldlines: output ports above each wire, or Standard anchors on one plane.

        Returns the cube ids the next stage continues from.
        """
        if final:
            ends = []
            for qubit in range(len(self.top)):
                ends.append(self._stack(qubit, CubeKind.BOUNDARY))
            self.top = ends
            return ends
        if any(self.pipe.cubes[c].kind != CubeKind.STANDARD for c in self.top):
            self.extend_all(self.plane() + 1)
        return list(self.top)


def place_input_ports(pipe: PipeDiagram, num_qubits: int, config: CompileConfig) -> List[int]:
    ports = []
    for qubit in range(num_qubits):
        x, y = anchor_xy(qubit, config.grid, config.spacing)
        ports.append(pipe.add_cube((x, y, 0), CubeKind.BOUNDARY).id)
    pipe.input_ports = list(ports)
    return ports


def compile_baseline(circuit: Circuit, config: Optional[CompileConfig] = None) -> PipeDiagram:
    """Compile a circuit gate by gate, one time window per gate."""
    config = config or CompileConfig()
    check_capacity(circuit, config)
    pipe = PipeDiagram()
    ports = place_input_ports(pipe, circuit.num_qubits, config)
    builder = BaselineBuilder(pipe, config, ports)
    builder.run(circuit)
    pipe = builder.pipe
    pipe.output_ports = builder.finish(final=True)
    try:
        ensure_valid(pipe, "baseline diagram")
    except InvalidDiagramError as exc:
        raise CompileError(str(exc)) from exc
    logger.info(f"Baseline compiled {circuit!r} into {pipe!r}")
    return pipe


def compile_block_baseline(
    pipe: PipeDiagram, circuit: Circuit, config: CompileConfig, anchors: Sequence[int], final: bool
) -> Tuple[PipeDiagram, List[int]]:
    """Baseline for one block, continuing from the block's anchor cubes."""
    builder = BaselineBuilder(pipe, config, anchors)
    builder.run(circuit)
    ends = builder.finish(final)
    return builder.pipe, ends

