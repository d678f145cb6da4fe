"""ZX-diagram intermediate representation.

A diagram is a multigraph of Z/X spiders, Hadamard boxes and boundary nodes.
Circuits translate into diagrams, spider fusion simplifies them, and small
diagrams can be evaluated to their linear map by tensor contraction.
"""
import logging
import math
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np

from .circuit import Circuit
from .errors import TensorSizeError

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
PHASE_TOL = 1e-12
MAX_TENSOR_WIRES = 20

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2)


class NodeKind(str, Enum):
    Z = "Z"
    X = "X"
    HBOX = "H"
    BOUNDARY = "B"


SPIDER_KINDS = (NodeKind.Z, NodeKind.X)


def normalize_phase(phase: float) -> float:
    """Reduce a phase into [0, 2pi), snapping values within tolerance of 0."""
    phase = math.fmod(phase, TWO_PI)
    if phase < 0:
        phase += TWO_PI
    if phase < PHASE_TOL or TWO_PI - phase < PHASE_TOL:
        return 0.0
    return phase


def phases_equal(a: float, b: float) -> bool:
    return normalize_phase(a - b) == 0.0


class ZxDiagram:
    def __init__(self):
        self.graph = nx.MultiGraph()
        self.inputs: List[int] = []
        self.outputs: List[int] = []
        self._next_id = 0

    def add_node(self, kind: NodeKind, phase: float = 0.0, node_id: Optional[int] = None) -> int:
        kind = NodeKind(kind)
        if node_id is None:
            node_id = self._next_id
        if node_id in self.graph:
            raise ValueError(f"Node id {node_id} already in use")
        self._next_id = max(self._next_id, node_id + 1)
        phase = normalize_phase(phase) if kind in SPIDER_KINDS else 0.0
        self.graph.add_node(node_id, kind=kind, phase=phase)
        return node_id

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"Self-loop on node {u} is not allowed")
        self.graph.add_edge(u, v)

    def remove_node(self, v: int) -> None:
        self.graph.remove_node(v)

    def kind(self, v: int) -> NodeKind:
        return self.graph.nodes[v]["kind"]

    def phase(self, v: int) -> float:
        return self.graph.nodes[v]["phase"]

    def set_phase(self, v: int, phase: float) -> None:
        self.graph.nodes[v]["phase"] = normalize_phase(phase)

    def degree(self, v: int) -> int:
        return self.graph.degree(v)

    def neighbors(self, v: int) -> List[int]:
        """Distinct neighbours in ascending id order."""
        return sorted(self.graph.neighbors(v))

    def incident(self, v: int) -> List[int]:
        """Neighbour per incident edge, so parallel edges repeat."""
        return sorted(u for _, u in self.graph.edges(v))

    def edge_count(self, u: int, v: int) -> int:
        return self.graph.number_of_edges(u, v)

    def is_boundary(self, v: int) -> bool:
        return self.kind(v) == NodeKind.BOUNDARY

    def nodes(self) -> List[int]:
        return sorted(self.graph.nodes)

    def spiders(self) -> List[int]:
        """Every non-boundary node: Z/X spiders and Hadamard boxes."""
        return [v for v in self.nodes() if not self.is_boundary(v)]

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((min(u, v), max(u, v)) for u, v in self.graph.edges())

    def num_spiders(self) -> int:
        return len(self.spiders())

    def copy(self) -> "ZxDiagram":
        other = ZxDiagram()
        other.graph = self.graph.copy()
        other.inputs = list(self.inputs)
        other.outputs = list(self.outputs)
        other._next_id = self._next_id
        return other

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nodes": [
                {"id": v, "kind": self.kind(v).value, "phase": self.phase(v)} for v in self.nodes()
            ],
            "edges": [list(e) for e in self.edges()],
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ZxDiagram":
        diagram = cls()
        for node in data["nodes"]:
            diagram.add_node(NodeKind(node["kind"]), node.get("phase", 0.0), node_id=node["id"])
        for u, v in data["edges"]:
            diagram.add_edge(u, v)
        diagram.inputs = list(data["inputs"])
        diagram.outputs = list(data["outputs"])
        return diagram

    def structurally_equal(self, other: "ZxDiagram") -> bool:
        if self.inputs != other.inputs or self.outputs != other.outputs:
            return False
        if self.nodes() != other.nodes() or self.edges() != other.edges():
            return False
        return all(
            self.kind(v) == other.kind(v) and phases_equal(self.phase(v), other.phase(v))
            for v in self.nodes()
        )

    def validate(self) -> List[str]:
        """Structural problems of the diagram; empty when well formed."""
        problems = []
        ports = self.inputs + self.outputs
        if len(set(ports)) != len(ports):
            problems.append("a boundary node appears more than once in inputs/outputs")
        for v in self.nodes():
            kind = self.kind(v)
            if kind == NodeKind.BOUNDARY:
                if self.degree(v) != 1:
                    problems.append(f"boundary {v} has degree {self.degree(v)}")
                if v not in ports:
                    problems.append(f"boundary {v} is neither an input nor an output")
            elif kind == NodeKind.HBOX and self.degree(v) != 2:
                problems.append(f"Hadamard box {v} has degree {self.degree(v)}")
        for u, v in self.graph.edges():
            if u == v:
                problems.append(f"self-loop on {u}")
        return problems

    def __repr__(self) -> str:
        return (
            f"ZxDiagram({len(self.inputs)} in, {len(self.outputs)} out, "
            f"{self.num_spiders()} spiders, {self.graph.number_of_edges()} edges)"
        )


def circuit_to_zx(circuit: Circuit) -> ZxDiagram:
    """Translate a circuit gate by gate; inputs take ids 0..n-1, outputs come last."""
    diagram = ZxDiagram()
    n = circuit.num_qubits
    wire_end = [diagram.add_node(NodeKind.BOUNDARY) for _ in range(n)]
    diagram.inputs = list(wire_end)

    def extend(qubit: int, node: int) -> None:
        diagram.add_edge(wire_end[qubit], node)
        wire_end[qubit] = node

    for gate in circuit.gates:
        if gate.kind == "CNOT":
            control, target = gate.qubits
            z = diagram.add_node(NodeKind.Z)
            x = diagram.add_node(NodeKind.X)
            extend(control, z)
            extend(target, x)
            diagram.add_edge(z, x)
        elif gate.kind == "H":
            extend(gate.qubits[0], diagram.add_node(NodeKind.HBOX))
        elif gate.kind == "X":
            extend(gate.qubits[0], diagram.add_node(NodeKind.X, math.pi))
        else:
            extend(gate.qubits[0], diagram.add_node(NodeKind.Z, gate.phase))

    for qubit in range(n):
        out = diagram.add_node(NodeKind.BOUNDARY)
        diagram.add_edge(wire_end[qubit], out)
        diagram.outputs.append(out)
    return diagram


# Rewrites

def remove_identities(diagram: ZxDiagram) -> int:
    """Drop degree-2 phase-0 spiders in place; returns the number removed."""
    removed = 0
    changed = True
    while changed:
        changed = False
        for v in diagram.nodes():
            if diagram.kind(v) not in SPIDER_KINDS or diagram.degree(v) != 2:
                continue
            if diagram.phase(v) != 0.0:
                continue
            a, b = diagram.incident(v)
            if a == b:
                continue
            diagram.remove_node(v)
            diagram.add_edge(a, b)
            removed += 1
            changed = True
    return removed


def _fusion_candidate(diagram: ZxDiagram, v: int, max_degree: int) -> Optional[int]:
    kind = diagram.kind(v)
    if kind not in SPIDER_KINDS:
        return None
    for u in diagram.neighbors(v):
        if diagram.kind(u) != kind or diagram.edge_count(u, v) != 1:
            continue
        merged_degree = diagram.degree(u) + diagram.degree(v) - 2
        needs_port = normalize_phase(diagram.phase(u) + diagram.phase(v)) != 0.0
        if merged_degree + int(needs_port) <= max_degree:
            return u
    return None


def fuse_pair(diagram: ZxDiagram, u: int, v: int) -> int:
    """Fuse two adjacent same-kind spiders; the smaller id survives."""
    keep, drop = min(u, v), max(u, v)
    phase = diagram.phase(keep) + diagram.phase(drop)
    moved = [w for w in diagram.incident(drop) if w != keep]
    diagram.remove_node(drop)
    for w in moved:
        diagram.add_edge(keep, w)
    diagram.set_phase(keep, phase)
    return keep


def fuse_with_counts(diagram: ZxDiagram, max_degree: int = 4) -> Tuple[ZxDiagram, Dict[str, int]]:
    """Fuse adjacent same-kind spiders under a degree cap, then drop identities.

    A merge is applied only while the merged degree, plus one wire for the
    injection port a nonzero phase needs, stays within max_degree. Pairs joined
    by parallel edges are never fused. Returns the fused copy and the number of
    Z and X merges.
    """
    result = diagram.copy()
    counts = {NodeKind.Z.value: 0, NodeKind.X.value: 0}
    while True:
        fused = False
        for v in result.nodes():
            u = _fusion_candidate(result, v, max_degree)
            if u is None:
                continue
            counts[result.kind(v).value] += 1
            fuse_pair(result, u, v)
            fused = True
            break
        if fused:
            continue
        if remove_identities(result) == 0:
            break
    logger.debug(f"Fusion applied {counts['Z']} Z and {counts['X']} X merges; {result!r}")
    return result, counts


def fuse_all(diagram: ZxDiagram, max_degree: int = 4) -> ZxDiagram:
    return fuse_with_counts(diagram, max_degree)[0]


# Tensor semantics

def _spider_tensor(kind: NodeKind, phase: float, degree: int) -> np.ndarray:
    if degree == 0:
        return np.array(1.0 + np.exp(1j * phase), dtype=complex)
    tensor = np.zeros((2,) * degree, dtype=complex)
    tensor[(0,) * degree] = 1.0
    tensor[(1,) * degree] = np.exp(1j * phase)
    if kind == NodeKind.X:
        for axis in range(degree):
            tensor = np.moveaxis(np.tensordot(_HADAMARD, tensor, axes=([1], [axis])), 0, axis)
    return tensor


def _trace_repeats(tensor: np.ndarray, labels: List[Any]) -> Tuple[np.ndarray, List[Any]]:
    while True:
        seen: Dict[Any, int] = {}
        pair = None
        for axis, label in enumerate(labels):
            if label in seen:
                pair = (seen[label], axis)
                break
            seen[label] = axis
        if pair is None:
            return tensor, labels
        tensor = np.trace(tensor, axis1=pair[0], axis2=pair[1])
        labels = [label for axis, label in enumerate(labels) if axis not in pair]


def _contract(a: Tuple[np.ndarray, List[Any]], b: Tuple[np.ndarray, List[Any]]) -> Tuple[np.ndarray, List[Any]]:
    ta, la = a
    tb, lb = b
    shared = [label for label in la if label in lb]
    axes_a = [la.index(label) for label in shared]
    axes_b = [lb.index(label) for label in shared]
    tensor = np.tensordot(ta, tb, axes=(axes_a, axes_b))
    labels = [label for label in la if label not in shared] + [label for label in lb if label not in shared]
    return tensor, labels


def evaluate_tensor(diagram: ZxDiagram) -> np.ndarray:
    """Linear map of a diagram as a (2^m, 2^n) matrix, qubit 0 most significant."""
    n, m = len(diagram.inputs), len(diagram.outputs)
    if n + m > MAX_TENSOR_WIRES:
        raise TensorSizeError(
            f"Diagram has {n + m} boundary wires; tensor evaluation supports at most {MAX_TENSOR_WIRES}"
        )

    edge_labels: Dict[int, List[Any]] = {v: [] for v in diagram.nodes()}
    for index, (u, v, _) in enumerate(sorted(diagram.graph.edges(keys=True))):
        edge_labels[u].append(index)
        edge_labels[v].append(index)

    open_label = {}
    for k, v in enumerate(diagram.inputs):
        open_label[v] = ("in", k)
    for k, v in enumerate(diagram.outputs):
        open_label[v] = ("out", k)

    tensors: List[Tuple[np.ndarray, List[Any]]] = []
    for v in diagram.nodes():
        kind = diagram.kind(v)
        labels = edge_labels[v]
        if kind == NodeKind.BOUNDARY:
            tensor = np.eye(2, dtype=complex)
            labels = labels + [open_label[v]]
        elif kind == NodeKind.HBOX:
            if len(labels) != 2:
                raise ValueError(f"Hadamard box {v} has degree {len(labels)}")
            tensor = _HADAMARD.copy()
        else:
            tensor = _spider_tensor(kind, diagram.phase(v), len(labels))
        tensors.append(_trace_repeats(tensor, list(labels)))

    if not tensors:
        return np.ones((1, 1), dtype=complex)

    while len(tensors) > 1:
        best = None
        for i in range(len(tensors)):
            for j in range(i + 1, len(tensors)):
                shared = len(set(tensors[i][1]) & set(tensors[j][1]))
                rank = len(tensors[i][1]) + len(tensors[j][1]) - 2 * shared
                key = (shared == 0, rank, i, j)
                if best is None or key < best:
                    best = key
        _, _, i, j = best
        merged = _contract(tensors[i], tensors[j])
        tensors = [t for k, t in enumerate(tensors) if k not in (i, j)] + [merged]

    tensor, labels = tensors[0]
    order = [("out", k) for k in range(m)] + [("in", k) for k in range(n)]
    tensor = np.transpose(tensor, [labels.index(label) for label in order]) if order else tensor
    return np.asarray(tensor).reshape(2 ** m, 2 ** n)


def proportionality_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Smallest max-norm distance between a and a multiple of b, both max-normalised.

    Returns 0.0 when both are zero and inf when exactly one of them is.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"Cannot compare maps of shape {a.shape} and {b.shape}")
    norm_a = float(np.max(np.abs(a))) if a.size else 0.0
    norm_b = float(np.max(np.abs(b))) if b.size else 0.0
    scale = max(norm_a, norm_b)
    if scale == 0.0:
        return 0.0
    if norm_a <= 1e-12 * scale or norm_b <= 1e-12 * scale:
        return math.inf
    a = a / norm_a
    b = b / norm_b
    index = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    ratio = a[index] / b[index]
    return float(np.max(np.abs(a - ratio * b)))


def equivalent_up_to_scalar(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff a equals a nonzero multiple of b within tol, relative to their max norms."""
    return proportionality_residual(a, b) <= tol


def spider_counts(diagram: ZxDiagram) -> Dict[str, int]:
    counts = {kind.value: 0 for kind in NodeKind}
    for v in diagram.nodes():
        counts[diagram.kind(v).value] += 1
    return counts


def iter_primitives(diagram: ZxDiagram) -> Iterable[int]:
    """Single-wire spiders attached to another spider: injected phases."""
    for v in diagram.nodes():
        if diagram.kind(v) in SPIDER_KINDS and diagram.degree(v) == 1:
            (u,) = diagram.incident(v)
            if not diagram.is_boundary(u):
                yield v
