"""End-to-end compilation: partition, embed layer by layer, fall back per block."""
import logging
import time
from typing import Any, Callable, Dict, List, Optional, Tuple

from ..circuit import Circuit
from ..config import CompileConfig, CompileReport
from ..errors import CompileError, InvalidDiagramError
from ..pipe import CubeKind, PipeDiagram, ensure_valid, space_time_volume, temporal_extent, time_steps
from ..schedule import BlockSlice, SliceSchedule, partition_program
from .baseline import check_capacity, compile_baseline, compile_block_baseline, place_input_ports
from .mcts import embed_layer_mcts
from .routing import Region, apply_route, plan_route
from .state import EmbeddingState, anchor_xy

logger = logging.getLogger(__name__)


class CompileResult:
    def __init__(
        self,
        pipe: PipeDiagram,
        layer_stats: List[Dict[str, Any]],
        fallback_layers: List[int],
        schedule: SliceSchedule,
        baseline_volume: int,
        replaced_by_baseline: bool = False,
        compile_time_ms: int = 0,
    ):
        self.pipe = pipe
        self.layer_stats = layer_stats
        self.fallback_layers = fallback_layers
        self.schedule = schedule
        self.baseline_volume = baseline_volume
        self.replaced_by_baseline = replaced_by_baseline
        self.compile_time_ms = compile_time_ms

    @property
    def volume(self) -> int:
        return space_time_volume(self.pipe)

    @property
    def time_steps(self) -> int:
        return time_steps(self.pipe)

    @property
    def temporal_extent(self) -> int:
        return temporal_extent(self.pipe)

    def report(self, config: CompileConfig) -> CompileReport:
        return CompileReport(
            volume=self.volume,
            footprint=config.grid,
            time_steps=self.time_steps,
            temporal_extent=self.temporal_extent,
            compile_time_ms=self.compile_time_ms,
            fallback_layer_count=len(self.fallback_layers),
            layer_count=self.schedule.layer_count,
            replaced_by_baseline=self.replaced_by_baseline,
            layer_stats=self.layer_stats,
            config=config,
        )

    def __repr__(self) -> str:
        return (
            f"CompileResult(volume {self.volume}, {len(self.layer_stats)} layers, "
            f"{len(self.fallback_layers)} fallback)"
        )


# extra planes an exit plane may sit above the top of a block
EXIT_HEADROOM = 3


def _exit_sources(state: EmbeddingState, num_qubits: int) -> Optional[List[int]]:
    diagram = state.diagram
    sources = []
    for q in range(num_qubits):
        (last,) = diagram.incident(diagram.outputs[q])
        source = state.placed.get(last)
        if source is None:
            return None
        sources.append(source)
    return sources


def _route_wires(
    state: EmbeddingState, pipe: PipeDiagram, sources: List[int], z_exit: int, order: List[int], kind: CubeKind
) -> Optional[Dict[int, int]]:
    """Route each wire to its anchor or straight above its source on the exit plane."""
    anchors = [(*anchor_xy(q, state.grid, state.spacing), z_exit) for q in range(len(sources))]
    ends: Dict[int, int] = {}
    for q in order:
        reserved = frozenset(cell for k, cell in enumerate(anchors) if k != q and k not in ends)
        region = Region(state.x_max, state.y_max, state.z_floor + 1, z_exit, reserved | state.reserved)
        x, y, _ = pipe.cubes[sources[q]].position
        targets = [anchors[q]]
        own = (x, y, z_exit)
        if own != anchors[q] and region.contains(own) and not pipe.is_occupied(own):
            targets.append(own)
        routes = [route for route in (plan_route(pipe, sources[q], t, None, region) for t in targets) if route]
        if not routes:
            return None
        ends[q] = apply_route(pipe, min(routes, key=lambda route: route.length), kind)
    return ends


def route_exits(state: EmbeddingState, num_qubits: int, final: bool) -> Optional[List[int]]:
    """Bring every wire of a block to a common exit plane above the block.

    Exit planes from the first free one up to EXIT_HEADROOM planes higher are
    tried, each with the wires in qubit order and then reversed. A wire ends at
    its anchor or in its own column, whichever is shorter. Returns the exit cube
    ids in qubit order, or None when no plane works.
    """
    sources = _exit_sources(state, num_qubits)
    if sources is None:
        return None
    kind = CubeKind.BOUNDARY if final else CubeKind.STANDARD
    base = max(state.top_z() + 1, state.z_floor + 1)
    for z_exit in range(base, base + EXIT_HEADROOM):
        for order in (list(range(num_qubits)), list(reversed(range(num_qubits)))):
            pipe = state.pipe.copy()
            ends = _route_wires(state, pipe, sources, z_exit, order, kind)
            if ends is not None:
                state.pipe = pipe
                return [ends[q] for q in range(num_qubits)]
    logger.debug(f"No exit plane between {base} and {base + EXIT_HEADROOM - 1} fits {num_qubits} wires")
    return None


def exit_finisher(num_qubits: int, final: bool) -> Callable[[EmbeddingState], Optional[EmbeddingState]]:
    """Completion hook for the last layer of a block: route its exits or reject it."""

    def finish(state: EmbeddingState) -> Optional[EmbeddingState]:
        done = state.copy()
        exits = route_exits(done, num_qubits, final)
        if exits is None:
            return None
        done.exits = exits
        for out, cube_id in zip(done.diagram.outputs, exits):
            done.placed[out] = cube_id
        return done

    return finish


def embed_block(
    block: BlockSlice, pipe: PipeDiagram, anchors: List[int], config: CompileConfig, final: bool
) -> Optional[Tuple[EmbeddingState, List[int], List[Dict[str, Any]]]]:
    """Embed one block layer by layer with the search; None when any layer fails.

    The last layer is searched together with the exit routing, so an embedding
    whose wires cannot leave the block is never chosen.
    """
    diagram = block.diagram
    num_qubits = block.circuit.num_qubits
    z_floor = max(pipe.cubes[c].position[2] for c in anchors)
    placed = {node: anchors[q] for q, node in enumerate(diagram.inputs)}
    state = EmbeddingState(diagram, pipe.copy(), config.grid, config.spacing, z_floor, placed)
    stats = []
    for local in range(1, block.layer_count + 1):
        layer = block.global_layer(local)
        spiders = block.layer(local)
        finish = exit_finisher(num_qubits, final) if local == block.layer_count else None
        result = embed_layer_mcts(state, spiders, config, block.index, layer, finish)
        if result is None:
            logger.warning(f"Search found no embedding for layer {layer} of block {block.index}")
            return None
        state = result
        stats.append({
            "layer": layer,
            "block": block.index,
            "spiders": len(spiders),
            "placeholders": len(state.frontier_ports),
            "volume": state.volume(),
            "fallback": False,
        })
    exits = state.exits if state.exits is not None else route_exits(state, num_qubits, final)
    if exits is None:
        logger.warning(f"Could not route the exits of block {block.index}")
        return None
    return state, exits, stats


def _fallback_stats(block: BlockSlice, schedule: SliceSchedule, volume: int) -> List[Dict[str, Any]]:
    return [
        {
            "layer": layer,
            "block": block.index,
            "spiders": len(schedule.layer(layer)),
            "placeholders": 0,
            "volume": volume,
            "fallback": True,
        }
        for layer in (block.global_layer(i) for i in range(1, block.layer_count + 1))
    ]


def compile_full(circuit: Circuit, config: Optional[CompileConfig] = None) -> CompileResult:
    """Compile a circuit with partitioning, layer-wise search and baseline fallback."""
    config = config or CompileConfig()
    check_capacity(circuit, config)
    started = time.monotonic()

    schedule = partition_program(circuit, config.partition)
    baseline = compile_baseline(circuit, config)
    baseline_volume = space_time_volume(baseline)

    pipe = PipeDiagram()
    anchors = place_input_ports(pipe, circuit.num_qubits, config)
    layer_stats: List[Dict[str, Any]] = []
    fallback_layers: List[int] = []
    blocks = schedule.parts
    for block in blocks:
        final = block is blocks[-1]
        embedded = embed_block(block, pipe, anchors, config, final)
        if embedded is not None:
            state, anchors, stats = embedded
            pipe = state.pipe
            layer_stats.extend(stats)
            continue

        layers = [block.global_layer(i) for i in range(1, block.layer_count + 1)]
        logger.warning(f"Block {block.index} falls back to the baseline for layers {layers}")
        pipe, anchors = compile_block_baseline(pipe.copy(), block.circuit, config, anchors, final)
        fallback_layers.extend(layers)
        layer_stats.extend(_fallback_stats(block, schedule, space_time_volume(pipe)))
    pipe.output_ports = list(anchors)

    try:
        ensure_valid(pipe, "compiled diagram")
    except InvalidDiagramError as exc:
        raise CompileError(str(exc)) from exc

    elapsed = int((time.monotonic() - started) * 1000)
    volume = space_time_volume(pipe)
    if volume > baseline_volume:
        logger.info(f"Search volume {volume} exceeds baseline {baseline_volume}; keeping the baseline")
        baseline_stats = [row for block in blocks for row in _fallback_stats(block, schedule, baseline_volume)]
        every_layer = list(range(1, schedule.layer_count + 1))
        return CompileResult(baseline, baseline_stats, every_layer, schedule, baseline_volume, True, elapsed)

    extent = temporal_extent(pipe)
    if extent > schedule.layer_count + 2:
        logger.warning(f"Temporal extent {extent} exceeds {schedule.layer_count} layers plus port planes")
    logger.info(
        f"Compiled {circuit!r}: volume {volume} (baseline {baseline_volume}), "
        f"{len(fallback_layers)} fallback layer(s) in {elapsed} ms"
    )
    return CompileResult(pipe, layer_stats, fallback_layers, schedule, baseline_volume, False, elapsed)
