"""Layer slicing of fused ZX diagrams and partitioning of circuits into blocks."""
import logging
from typing import Dict, List, Optional, Tuple

from .circuit import Circuit
from .config import PartitionConfig
from .zx import NodeKind, ZxDiagram, circuit_to_zx, fuse_all, iter_primitives

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class BlockSlice:
    """One partition block: its circuit window, fused diagram and local layers."""

    def __init__(
        self,
        index: int,
        circuit: Circuit,
        span: Tuple[int, int],
        diagram: ZxDiagram,
        layer_of: Dict[int, int],
        layer_count: int,
        node_offset: int = 0,
        first_layer: int = 1,
    ):
        self.index = index
        self.circuit = circuit
        self.span = span
        self.diagram = diagram
        self.layer_of = layer_of
        self.layer_count = layer_count
        self.node_offset = node_offset
        self.first_layer = first_layer

    def layer(self, i: int) -> List[int]:
        return sorted(v for v, layer in self.layer_of.items() if layer == i)

    def global_layer(self, local: int) -> int:
        return self.first_layer + local - 1

    def __repr__(self) -> str:
        return f"BlockSlice({self.index}, depths {self.span}, {self.layer_count} layers)"


class SliceSchedule:
    def __init__(
        self,
        diagram: ZxDiagram,
        layer_of: Dict[int, int],
        blocks: Optional[List[Tuple[int, int]]] = None,
        parts: Optional[List[BlockSlice]] = None,
        warnings: Optional[List[str]] = None,
    ):
        self.diagram = diagram
        self.layer_of = layer_of
        self.primitives = set(iter_primitives(diagram))
        self.inputs, self.outputs, self.inner = _classify(diagram, layer_of, self.primitives)
        count = self.layer_count
        self.blocks = blocks if blocks is not None else ([(1, count)] if count else [])
        self.parts = parts or []
        self.warnings = warnings or []

    @property
    def layer_count(self) -> int:
        return max(self.layer_of.values(), default=0)

    def layer(self, i: int) -> List[int]:
        return sorted(v for v, layer in self.layer_of.items() if layer == i)

    def frontier(self, i: int) -> List[int]:
        """Spiders of layer i carrying a connection forward (S_i)."""
        return sorted({u for u, _ in self.outputs.get(i, [])})

    def frontier_sizes(self) -> List[int]:
        return [len(self.frontier(i)) for i in range(1, self.layer_count + 1)]

    def placeholder_counts(self) -> List[int]:
        """Placeholder ports opened per layer; the last layer's wires leave through exits."""
        sizes = self.frontier_sizes()
        return sizes[:-1] + [0] if sizes else []

    def __repr__(self) -> str:
        return f"SliceSchedule({self.layer_count} layers, {len(self.blocks)} blocks)"


def _classify(
    diagram: ZxDiagram, layer_of: Dict[int, int], primitives
) -> Tuple[Dict[int, List[Edge]], Dict[int, List[Edge]], Dict[int, List[Edge]]]:
    inputs: Dict[int, List[Edge]] = {}
    outputs: Dict[int, List[Edge]] = {}
    inner: Dict[int, List[Edge]] = {}
    input_set = set(diagram.inputs)
    output_set = set(diagram.outputs)
    for u, v in diagram.edges():
        if u in primitives or v in primitives:
            continue
        lu, lv = layer_of.get(u), layer_of.get(v)
        if lu is not None and lv is not None:
            if lu == lv:
                inner.setdefault(lu, []).append((u, v))
            else:
                low, high = (u, v) if lu < lv else (v, u)
                outputs.setdefault(layer_of[low], []).append((low, high))
                inputs.setdefault(layer_of[high], []).append((low, high))
        elif lu is not None or lv is not None:
            spider, other = (u, v) if lu is not None else (v, u)
            if other in input_set:
                inputs.setdefault(layer_of[spider], []).append((other, spider))
            elif other in output_set:
                outputs.setdefault(layer_of[spider], []).append((spider, other))
    return inputs, outputs, inner


def _assign_layers(diagram: ZxDiagram, warnings: List[str]) -> Dict[int, int]:
    primitives = set(iter_primitives(diagram))
    layered = [v for v in diagram.spiders() if v not in primitives]
    layered_set = set(layered)
    layer_of: Dict[int, int] = {}

    frontier = sorted({
        u for b in diagram.inputs for u in diagram.neighbors(b) if u in layered_set
    })
    level = 1
    while frontier:
        for v in frontier:
            layer_of[v] = level
        following = set()
        for v in frontier:
            for u in diagram.neighbors(v):
                if u in layered_set and u not in layer_of:
                    following.add(u)
        frontier = sorted(following)
        level += 1

    unreached = [v for v in layered if v not in layer_of]
    if unreached:
        message = f"{len(unreached)} spider(s) unreachable from any input; layered from the outputs"
        logger.warning(message)
        warnings.append(message)
        top = max(layer_of.values(), default=0) + 1
        distance: Dict[int, int] = {}
        frontier = sorted({
            u for b in diagram.outputs for u in diagram.neighbors(b) if u in unreached
        })
        depth = 0
        while frontier:
            for v in frontier:
                distance[v] = depth
            following = set()
            for v in frontier:
                for u in diagram.neighbors(v):
                    if u in layered_set and u not in layer_of and u not in distance:
                        following.add(u)
            frontier = sorted(following)
            depth += 1
        for v in unreached:
            layer_of[v] = max(1, top - distance.get(v, 0)) if v in distance else top
    return layer_of


def slice_layers(diagram: ZxDiagram) -> SliceSchedule:
    """Assign BFS layers starting from the spiders adjacent to input boundaries.

    Single-wire phase spiders are primitives of the spider they hang off and get
    no layer of their own.
    """
    warnings: List[str] = []
    layer_of = _assign_layers(diagram, warnings)
    schedule = SliceSchedule(diagram, layer_of, warnings=warnings)
    logger.debug(f"Sliced {diagram!r} into {schedule.layer_count} layers")
    return schedule


def _pad_outputs(diagram: ZxDiagram, layer_of: Dict[int, int], layer_count: int) -> None:
    """Chain idle Z(0) spiders onto every output wire so it reaches the last layer."""
    for out in diagram.outputs:
        (u,) = diagram.incident(out)
        start = layer_of.get(u, 0)
        if start >= layer_count:
            continue
        diagram.graph.remove_edge(u, out)
        previous = u
        for layer in range(start + 1, layer_count + 1):
            idle = diagram.add_node(NodeKind.Z)
            layer_of[idle] = layer
            diagram.add_edge(previous, idle)
            previous = idle
        diagram.add_edge(previous, out)


def _build_block(index: int, circuit: Circuit, span: Tuple[int, int], final: bool,
                 warnings: List[str]) -> BlockSlice:
    window = circuit.window(*span)
    diagram = fuse_all(circuit_to_zx(window))
    layer_of = _assign_layers(diagram, warnings)
    layer_count = max(layer_of.values(), default=0)
    if not final:
        _pad_outputs(diagram, layer_of, layer_count)
    return BlockSlice(index, window, span, diagram, layer_of, layer_count)


def _max_frontier(block: BlockSlice) -> int:
    schedule = SliceSchedule(block.diagram, block.layer_of)
    sizes = schedule.frontier_sizes()
    # the last layer hands one wire per qubit to the next block
    return max(sizes[:-1], default=0)


def _topology_aware_spans(circuit: Circuit, threshold: int, warnings: List[str]) -> List[Tuple[int, int]]:
    depth = circuit.depth()
    spans: List[Tuple[int, int]] = []
    start = 0
    while start < depth:
        scratch: List[str] = []
        whole = _build_block(0, circuit, (start, depth), True, scratch)
        if _max_frontier(whole) <= threshold:
            spans.append((start, depth))
            break

        end = min(start + 2, depth)
        passing = None
        while end <= depth:
            block = _build_block(0, circuit, (start, end), end == depth, scratch)
            if _max_frontier(block) > threshold:
                break
            passing = end
            end += 1
        if passing is None:
            single = _build_block(0, circuit, (start, start + 1), start + 1 == depth, scratch)
            worst = _max_frontier(single)
            if worst > threshold:
                message = (
                    f"Single-depth block at depth {start + 1} has frontier {worst} "
                    f"above threshold {threshold}"
                )
                logger.warning(message)
                warnings.append(message)
            passing = start + 1
        spans.append((start, passing))
        start = passing
    return spans


def _report_breaches(schedule: SliceSchedule, threshold: int) -> None:
    """Warn about every layer of the stitched schedule whose frontier exceeds the threshold."""
    for layer, size in enumerate(schedule.frontier_sizes(), start=1):
        if size > threshold:
            message = f"Layer {layer} has frontier {size} above threshold {threshold}"
            logger.warning(message)
            schedule.warnings.append(message)


def _assemble(blocks: List[BlockSlice]) -> Tuple[ZxDiagram, Dict[int, int]]:
    first = blocks[0]
    diagram = first.diagram.copy()
    layer_of = dict(first.layer_of)
    layer_total = first.layer_count
    for block in blocks[1:]:
        offset = max(diagram.nodes(), default=-1) + 1
        block.node_offset = offset
        block.first_layer = layer_total + 1
        for v in block.diagram.nodes():
            diagram.add_node(block.diagram.kind(v), block.diagram.phase(v), node_id=v + offset)
        for u, v in block.diagram.edges():
            diagram.add_edge(u + offset, v + offset)
        for v, layer in block.layer_of.items():
            layer_of[v + offset] = layer + layer_total

        stitched_outputs = []
        for previous_out, next_in, next_out in zip(diagram.outputs, block.diagram.inputs, block.diagram.outputs):
            next_in += offset
            (a,) = diagram.incident(previous_out)
            (b,) = diagram.incident(next_in)
            diagram.remove_node(previous_out)
            diagram.remove_node(next_in)
            diagram.add_edge(a, b)
            stitched_outputs.append(next_out + offset)
        diagram.outputs = stitched_outputs
        layer_total += block.layer_count
    return diagram, layer_of


def partition_program(circuit: Circuit, config: Optional[PartitionConfig] = None) -> SliceSchedule:
    """Split a circuit into blocks, slice each, and stitch them into one schedule."""
    config = config or PartitionConfig()
    threshold = config.resolved_threshold(circuit.num_qubits)
    if threshold < 1:
        raise ValueError(f"Partition threshold must be at least 1, got {threshold}")

    warnings: List[str] = []
    depth = circuit.depth()
    if config.mode == "none" or depth == 0:
        spans = [(0, depth)]
    elif config.mode == "uniform":
        stride = config.uniform_stride
        spans = [(start, min(start + stride, depth)) for start in range(0, depth, stride)]
    else:
        spans = _topology_aware_spans(circuit, threshold, warnings)

    blocks = [
        _build_block(index, circuit, span, index == len(spans) - 1, warnings)
        for index, span in enumerate(spans)
    ]
    diagram, layer_of = _assemble(blocks)
    ranges = []
    for block in blocks:
        if block.layer_count:
            ranges.append((block.first_layer, block.first_layer + block.layer_count - 1))

    schedule = SliceSchedule(diagram, layer_of, blocks=ranges, parts=blocks, warnings=warnings)
    if config.mode == "topology_aware":
        _report_breaches(schedule, threshold)
    logger.info(
        f"Partitioned {circuit!r} ({config.mode}) into {len(blocks)} block(s), "
        f"{schedule.layer_count} layers, max frontier {max(schedule.frontier_sizes(), default=0)}"
    )
    return schedule
