import math
import unittest

import numpy as np

from topols.app.circuit import Circuit, ghz, random_circuit
from topols.app.errors import TensorSizeError
from topols.app.schedule import slice_layers
from topols.app.verify import circuit_unitary
from topols.app.zx import (
    NodeKind,
    ZxDiagram,
    circuit_to_zx,
    equivalent_up_to_scalar,
    evaluate_tensor,
    fuse_all,
    fuse_with_counts,
    iter_primitives,
    normalize_phase,
    proportionality_residual,
    remove_identities,
    spider_counts,
)


def random_diagram(seed, max_wires=8):
    """Connected Z/X diagram with random phases and at most max_wires boundary wires."""
    rng = np.random.default_rng(seed)
    wires = int(rng.integers(1, max_wires + 1))
    n_in = int(rng.integers(0, wires + 1))
    count = int(rng.integers(1, 9))
    diagram = ZxDiagram()
    inputs = [diagram.add_node(NodeKind.BOUNDARY) for _ in range(n_in)]
    kinds = (NodeKind.Z, NodeKind.X)
    spiders = [
        diagram.add_node(kinds[int(rng.integers(0, 2))], int(rng.integers(0, 8)) * math.pi / 4)
        for _ in range(count)
    ]
    outputs = [diagram.add_node(NodeKind.BOUNDARY) for _ in range(wires - n_in)]
    for k in range(1, count):
        diagram.add_edge(spiders[k], spiders[int(rng.integers(0, k))])
    if count > 1:
        for _ in range(int(rng.integers(0, count + 1))):
            a, b = rng.choice(count, size=2, replace=False)
            diagram.add_edge(spiders[int(a)], spiders[int(b)])
    for boundary in inputs + outputs:
        diagram.add_edge(boundary, spiders[int(rng.integers(0, count))])
    diagram.inputs, diagram.outputs = inputs, outputs
    return diagram


class TestPhases(unittest.TestCase):
    def test_normalize_phase(self):
        self.assertEqual(normalize_phase(2 * math.pi), 0.0)
        self.assertEqual(normalize_phase(-1e-15), 0.0)
        self.assertAlmostEqual(normalize_phase(-math.pi / 2), 3 * math.pi / 2)
        self.assertAlmostEqual(normalize_phase(5 * math.pi), math.pi)


class TestCircuitToZx(unittest.TestCase):
    def test_boundary_ids(self):
        diagram = circuit_to_zx(Circuit(2).add("H", 0).add("CNOT", 0, 1))

        self.assertEqual(diagram.inputs, [0, 1])
        self.assertEqual(diagram.outputs, [5, 6])
        self.assertEqual(diagram.kind(2), NodeKind.HBOX)
        self.assertEqual(diagram.kind(3), NodeKind.Z)
        self.assertEqual(diagram.kind(4), NodeKind.X)
        self.assertEqual(diagram.degree(3), 3)
        self.assertEqual(diagram.validate(), [])

    def test_gate_translation(self):
        diagram = circuit_to_zx(Circuit(1).add("T", 0).add("X", 0).add("Rz", 0, angle=0.7))
        spiders = diagram.spiders()

        self.assertEqual([diagram.kind(v) for v in spiders], [NodeKind.Z, NodeKind.X, NodeKind.Z])
        self.assertAlmostEqual(diagram.phase(spiders[0]), math.pi / 4)
        self.assertAlmostEqual(diagram.phase(spiders[1]), math.pi)
        self.assertAlmostEqual(diagram.phase(spiders[2]), 0.7)

    def test_tensor_matches_unitary(self):
        for seed in range(10):
            circuit = random_circuit(3, 8, seed=seed)
            diagram = circuit_to_zx(circuit)
            self.assertTrue(
                equivalent_up_to_scalar(evaluate_tensor(diagram), circuit_unitary(circuit)),
                f"seed {seed}",
            )

    def test_cnot_tensor(self):
        tensor = evaluate_tensor(circuit_to_zx(Circuit(2).add("CNOT", 0, 1)))
        cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        self.assertLess(proportionality_residual(tensor, cnot), 1e-12)

    def test_dict_round_trip(self):
        diagram = circuit_to_zx(random_circuit(2, 6, seed=3))
        self.assertTrue(ZxDiagram.from_dict(diagram.to_dict()).structurally_equal(diagram))


class TestRewrites(unittest.TestCase):
    def test_remove_identities(self):
        diagram = ZxDiagram()
        a = diagram.add_node(NodeKind.BOUNDARY)
        idle = diagram.add_node(NodeKind.Z)
        phased = diagram.add_node(NodeKind.X, math.pi)
        b = diagram.add_node(NodeKind.BOUNDARY)
        diagram.add_edge(a, idle)
        diagram.add_edge(idle, phased)
        diagram.add_edge(phased, b)
        diagram.inputs, diagram.outputs = [a], [b]

        # Only the phase-free spider goes
        self.assertEqual(remove_identities(diagram), 1)
        self.assertNotIn(idle, diagram.nodes())
        self.assertEqual(diagram.neighbors(phased), [a, b])

    def test_fusion_preserves_semantics(self):
        for seed in range(20):
            circuit = random_circuit(3, 10, seed=100 + seed)
            before = circuit_to_zx(circuit)
            after = fuse_all(before)
            self.assertLess(
                proportionality_residual(evaluate_tensor(before), evaluate_tensor(after)), 1e-9,
                f"seed {seed}",
            )

    def test_fusion_does_not_modify_input(self):
        diagram = circuit_to_zx(ghz(4))
        count = diagram.num_spiders()
        fuse_all(diagram)
        self.assertEqual(diagram.num_spiders(), count)

    def test_degree_cap(self):
        fanout = Circuit(6)
        for target in range(1, 6):
            fanout.add("CNOT", 0, target)
        fused = fuse_all(circuit_to_zx(fanout))

        for v in fused.spiders():
            needs_port = int(fused.phase(v) != 0.0)
            self.assertLessEqual(fused.degree(v) + needs_port, 4)
        # five controls on qubit 0 merge pairwise, a third merge would reach degree 5
        self.assertEqual(spider_counts(fused)["Z"], 3)
        self.assertEqual(spider_counts(fused)["X"], 5)

    def test_alternating_kinds_do_not_fuse(self):
        diagram = circuit_to_zx(ghz(8))
        fused = fuse_all(diagram)

        self.assertEqual(spider_counts(fused), spider_counts(diagram))

    def test_fusion_counts_phase_port(self):
        diagram = ZxDiagram()
        inputs = [diagram.add_node(NodeKind.BOUNDARY) for _ in range(2)]
        first = diagram.add_node(NodeKind.Z, math.pi / 4)
        second = diagram.add_node(NodeKind.Z)
        outputs = [diagram.add_node(NodeKind.BOUNDARY) for _ in range(2)]
        diagram.add_edge(inputs[0], first)
        diagram.add_edge(inputs[1], first)
        diagram.add_edge(first, second)
        diagram.add_edge(second, outputs[0])
        diagram.add_edge(second, outputs[1])
        diagram.inputs, diagram.outputs = inputs, outputs

        # Merged degree 4 plus the injection port exceeds the cap
        fused = fuse_all(diagram)
        self.assertEqual(fused.num_spiders(), 2)

        diagram.set_phase(first, 0.0)
        self.assertEqual(fuse_all(diagram).num_spiders(), 1)

    def test_parallel_edges_block_fusion(self):
        diagram = ZxDiagram()
        a = diagram.add_node(NodeKind.BOUNDARY)
        u = diagram.add_node(NodeKind.Z)
        v = diagram.add_node(NodeKind.Z)
        b = diagram.add_node(NodeKind.BOUNDARY)
        diagram.add_edge(a, u)
        diagram.add_edge(u, v)
        diagram.add_edge(u, v)
        diagram.add_edge(v, b)
        diagram.inputs, diagram.outputs = [a], [b]

        fused = fuse_all(diagram)
        self.assertEqual(fused.edge_count(u, v), 2)

    def test_self_loop_rejected(self):
        diagram = ZxDiagram()
        v = diagram.add_node(NodeKind.Z)
        with self.assertRaises(ValueError):
            diagram.add_edge(v, v)

    def test_primitives(self):
        diagram = ZxDiagram()
        a = diagram.add_node(NodeKind.BOUNDARY)
        junction = diagram.add_node(NodeKind.Z)
        leaf = diagram.add_node(NodeKind.Z, math.pi / 4)
        b = diagram.add_node(NodeKind.BOUNDARY)
        diagram.add_edge(a, junction)
        diagram.add_edge(junction, leaf)
        diagram.add_edge(junction, b)
        diagram.inputs, diagram.outputs = [a], [b]

        self.assertEqual(list(iter_primitives(diagram)), [leaf])

    def test_fusion_preserves_random_diagrams(self):
        for seed in range(200):
            before = random_diagram(seed)
            after = fuse_all(before)
            self.assertLessEqual(after.num_spiders(), before.num_spiders())
            self.assertLess(
                proportionality_residual(evaluate_tensor(before), evaluate_tensor(after)), 1e-9,
                f"seed {seed}",
            )

    def test_fusion_is_idempotent(self):
        for seed in range(20):
            once = fuse_all(random_diagram(500 + seed))
            twice, counts = fuse_with_counts(once)
            self.assertEqual(counts, {"Z": 0, "X": 0}, f"seed {seed}")
            self.assertTrue(twice.structurally_equal(once), f"seed {seed}")

    def test_fusion_counts_on_small_circuit(self):
        circuit = Circuit(3)
        circuit.add("S", 0).add("CNOT", 0, 1).add("CNOT", 2, 1).add("S", 0)
        circuit.add("H", 0).add("H", 1).add("S", 2).add("S", 1).add("H", 1)
        self.assertEqual(circuit.depth(), 6)

        fused, counts = fuse_with_counts(circuit_to_zx(circuit))
        # both S gates on qubit 0 merge into its control, S on qubit 2 into its
        # control, and the two targets on qubit 1 into one X spider
        self.assertEqual(counts, {"Z": 3, "X": 1})
        self.assertEqual(slice_layers(fused).layer_count, 4)
        self.assertTrue(equivalent_up_to_scalar(evaluate_tensor(fused), circuit_unitary(circuit)))


class TestTensorChecks(unittest.TestCase):
    def test_residual(self):
        a = np.array([[1, 2j], [0, 1]])

        self.assertLess(proportionality_residual(a, 3j * a), 1e-12)
        self.assertGreater(proportionality_residual(a, np.eye(2)), 0.1)
        self.assertEqual(proportionality_residual(np.zeros((2, 2)), np.zeros((2, 2))), 0.0)
        self.assertEqual(proportionality_residual(a, np.zeros((2, 2))), math.inf)
        with self.assertRaises(ValueError):
            proportionality_residual(a, np.eye(4))

    def test_size_guard(self):
        with self.assertRaises(TensorSizeError):
            evaluate_tensor(circuit_to_zx(Circuit(11)))

    def test_validate_reports_bad_boundary(self):
        diagram = ZxDiagram()
        b = diagram.add_node(NodeKind.BOUNDARY)
        diagram.add_node(NodeKind.Z)
        diagram.inputs = [b]
        self.assertTrue(any("degree" in p for p in diagram.validate()))


if __name__ == "__main__":
    unittest.main()
