import math
import unittest

from topols.app.circuit import (
    Circuit,
    Gate,
    bv,
    dj,
    generate_benchmark,
    ghz,
    ladder,
    parse_qasm,
    random_circuit,
)
from topols.app.errors import QasmError


class TestGate(unittest.TestCase):
    def test_phases(self):
        self.assertAlmostEqual(Gate("S", [0]).phase, math.pi / 2)
        self.assertAlmostEqual(Gate("Tdg", [0]).phase, -math.pi / 4)
        self.assertAlmostEqual(Gate("Rz", [1], angle=0.3).phase, 0.3)
        self.assertIsNone(Gate("H", [0]).phase)

    def test_software_only(self):
        self.assertTrue(Gate("X", [0]).software_only)
        self.assertTrue(Gate("Z", [0]).software_only)
        self.assertFalse(Gate("T", [0]).software_only)

    def test_invalid_gates(self):
        with self.assertRaises(ValueError):
            Gate("CCX", [0, 1, 2])
        with self.assertRaises(ValueError):
            Gate("CNOT", [1, 1])
        with self.assertRaises(ValueError):
            Gate("Rz", [0])
        with self.assertRaises(ValueError):
            Gate("Rz", [0], angle=math.inf)
        with self.assertRaises(ValueError):
            Gate("H", [0], angle=1.0)


class TestCircuit(unittest.TestCase):
    def test_levels_and_depth(self):
        circuit = Circuit(3).add("H", 0).add("H", 2).add("CNOT", 0, 1).add("CNOT", 1, 2)

        self.assertEqual(circuit.gate_levels(), [1, 1, 2, 3])
        self.assertEqual(circuit.depth(), 3)
        self.assertEqual(circuit.moments(), [[0, 1], [2], [3]])

    def test_window(self):
        circuit = ghz(4)

        # Level 1 is H, levels 2..4 are the CNOT chain
        window = circuit.window(1, 3)
        self.assertEqual([g.kind for g in window.gates], ["CNOT", "CNOT"])
        self.assertEqual(window.num_qubits, 4)

    def test_qubit_out_of_range(self):
        with self.assertRaises(ValueError):
            Circuit(2).add("H", 2)

    def test_dict_round_trip(self):
        circuit = Circuit(2).add("Rz", 0, angle=1.25).add("CNOT", 1, 0)
        self.assertEqual(Circuit.from_dict(circuit.to_dict()), circuit)


class TestParseQasm(unittest.TestCase):
    def test_parse_basic_program(self):
        text = """OPENQASM 2.0;
include "qelib1.inc";
// two qubits
qreg q[2];
h q[0];
cx q[0],q[1];
rz(pi/4) q[1];
sdg q[0];
"""
        circuit = parse_qasm(text)

        self.assertEqual(circuit.num_qubits, 2)
        self.assertEqual([g.kind for g in circuit.gates], ["H", "CNOT", "Rz", "Sdg"])
        self.assertEqual(circuit.gates[1].qubits, (0, 1))
        self.assertAlmostEqual(circuit.gates[2].angle, math.pi / 4)

    def test_angle_expressions(self):
        circuit = parse_qasm("qreg q[1]; rz(-pi/2 + 0.5*2) q[0]; rz(3*pi/4) q[0];")
        self.assertAlmostEqual(circuit.gates[0].angle, -math.pi / 2 + 1.0)
        self.assertAlmostEqual(circuit.gates[1].angle, 3 * math.pi / 4)

    def test_round_trip_through_qasm(self):
        circuit = random_circuit(3, 12, seed=7)
        self.assertEqual(parse_qasm(circuit.to_qasm()), circuit)

    def test_measurement_rejected(self):
        with self.assertRaises(QasmError) as ctx:
            parse_qasm("qreg q[1];\ncreg c[1];\n")
        self.assertEqual(ctx.exception.line, 2)

        with self.assertRaises(QasmError):
            parse_qasm("qreg q[1]; measure q[0] -> c[0];")

    def test_unknown_gate(self):
        with self.assertRaises(QasmError) as ctx:
            parse_qasm("qreg q[2];\nccx q[0],q[1];")
        self.assertIn("ccx", str(ctx.exception))
        self.assertEqual(ctx.exception.line, 2)

    def test_index_out_of_range(self):
        with self.assertRaises(QasmError):
            parse_qasm("qreg q[2]; h q[2];")

    def test_wrong_arity_and_duplicates(self):
        with self.assertRaises(QasmError):
            parse_qasm("qreg q[2]; cx q[0];")
        with self.assertRaises(QasmError):
            parse_qasm("qreg q[2]; cx q[1],q[1];")

    def test_angle_misuse(self):
        with self.assertRaises(QasmError):
            parse_qasm("qreg q[1]; rz q[0];")
        with self.assertRaises(QasmError):
            parse_qasm("qreg q[1]; h(0.5) q[0];")

    def test_syntax_error_has_position(self):
        with self.assertRaises(QasmError) as ctx:
            parse_qasm("qreg q[1];\nh q[0]\n")
        self.assertIsNotNone(ctx.exception.line)

    def test_missing_register(self):
        with self.assertRaises(QasmError):
            parse_qasm("OPENQASM 2.0;")
        with self.assertRaises(QasmError):
            parse_qasm("qreg q[1]; qreg r[1];")
        with self.assertRaises(QasmError):
            parse_qasm("qreg q[1]; h r[0];")


class TestBenchmarks(unittest.TestCase):
    def test_ghz_and_ladder(self):
        self.assertEqual([g.kind for g in ghz(3).gates], ["H", "CNOT", "CNOT"])
        self.assertEqual(len(ladder(5)), 4)
        self.assertEqual(ladder(5).gates[-1].qubits, (3, 4))

    def test_bv_frame(self):
        circuit = bv(4)

        # X on the ancilla, H on all, one CNOT per data qubit, H on data
        self.assertEqual(circuit.gates[0].kind, "X")
        self.assertEqual(circuit.gates[0].qubits, (3,))
        cnots = [g for g in circuit.gates if g.kind == "CNOT"]
        self.assertEqual([g.qubits for g in cnots], [(0, 3), (1, 3), (2, 3)])
        self.assertEqual(len(circuit), 1 + 4 + 3 + 3)

    def test_dj_has_no_oracle_gates(self):
        circuit = dj(4)
        self.assertFalse(any(g.kind == "CNOT" for g in circuit.gates))

    def test_random_circuit_is_seeded(self):
        self.assertEqual(random_circuit(3, 10, seed=1), random_circuit(3, 10, seed=1))
        clifford = generate_benchmark("random_clifford", 3, seed=2)
        self.assertEqual(len(clifford), 12)
        self.assertTrue(all(g.kind in ("H", "S", "CNOT") for g in clifford.gates))

    def test_unknown_family(self):
        with self.assertRaises(ValueError):
            generate_benchmark("qft", 4)
        with self.assertRaises(ValueError):
            generate_benchmark("ghz", 1)


if __name__ == "__main__":
    unittest.main()
