"""Gate-level circuits: the QASM subset reader and the benchmark generators."""
import logging
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pyparsing import (
    Group,
    Keyword,
    OpAssoc,
    Opt,
    ParseException,
    ParseResults,
    ParserElement,
    Regex,
    Suppress,
    Word,
    ZeroOrMore,
    alphanums,
    alphas,
    col,
    cpp_style_comment,
    infix_notation,
    lineno,
    one_of,
    pyparsing_common,
)

from .errors import QasmError

logger = logging.getLogger(__name__)

SINGLE_QUBIT_GATES = ("H", "S", "Sdg", "T", "Tdg", "Rz", "X", "Z")
GATE_KINDS = SINGLE_QUBIT_GATES + ("CNOT",)
SOFTWARE_ONLY = ("X", "Z")

# Phase carried by the Z or X spider of each phase gate
PHASES = {
    "S": math.pi / 2,
    "Sdg": -math.pi / 2,
    "T": math.pi / 4,
    "Tdg": -math.pi / 4,
    "Z": math.pi,
    "X": math.pi,
}

_QASM_NAMES = {
    "h": "H", "s": "S", "sdg": "Sdg", "t": "T", "tdg": "Tdg",
    "x": "X", "z": "Z", "rz": "Rz", "cx": "CNOT",
}
_REJECTED = ("measure", "reset", "if", "barrier", "creg", "gate", "opaque")


class Gate:
    def __init__(self, kind: str, qubits: Sequence[int], angle: Optional[float] = None):
        if kind not in GATE_KINDS:
            raise ValueError(f"Unsupported gate kind: {kind}")
        qubits = tuple(int(q) for q in qubits)
        expected = 2 if kind == "CNOT" else 1
        if len(qubits) != expected:
            raise ValueError(f"{kind} acts on {expected} qubit(s), got {len(qubits)}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"Duplicate qubit in {kind}: {qubits}")
        if kind == "Rz":
            if angle is None or not math.isfinite(angle):
                raise ValueError(f"Rz needs a finite angle, got {angle}")
            angle = float(angle)
        elif angle is not None:
            raise ValueError(f"{kind} does not take an angle")
        self.kind = kind
        self.qubits = qubits
        self.angle = angle

    @property
    def software_only(self) -> bool:
        """Pauli X/Z gates are tracked in software on hardware."""
        return self.kind in SOFTWARE_ONLY

    @property
    def phase(self) -> Optional[float]:
        if self.kind == "Rz":
            return self.angle
        return PHASES.get(self.kind)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind, "qubits": list(self.qubits)}
        if self.angle is not None:
            data["angle"] = self.angle
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Gate":
        return cls(data["kind"], data["qubits"], data.get("angle"))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        if self.kind != other.kind or self.qubits != other.qubits:
            return False
        if self.angle is None or other.angle is None:
            return self.angle is other.angle
        return math.isclose(self.angle, other.angle, rel_tol=0.0, abs_tol=1e-12)

    def __repr__(self) -> str:
        args = ",".join(str(q) for q in self.qubits)
        if self.angle is not None:
            return f"{self.kind}({self.angle:.6g})[{args}]"
        return f"{self.kind}[{args}]"


class Circuit:
    def __init__(self, num_qubits: int, gates: Optional[List[Gate]] = None):
        if num_qubits < 1:
            raise ValueError(f"A circuit needs at least one qubit, got {num_qubits}")
        self.num_qubits = num_qubits
        self.gates: List[Gate] = []
        for gate in gates or []:
            self.append(gate)

    def append(self, gate: Gate) -> None:
        for q in gate.qubits:
            if not 0 <= q < self.num_qubits:
                raise ValueError(f"Qubit index {q} out of range for {self.num_qubits} qubits")
        self.gates.append(gate)

    def add(self, kind: str, *qubits: int, angle: Optional[float] = None) -> "Circuit":
        self.append(Gate(kind, qubits, angle))
        return self

    def gate_levels(self) -> List[int]:
        """ASAP level (1-based) of every gate."""
        frontier = [0] * self.num_qubits
        levels = []
        for gate in self.gates:
            level = max(frontier[q] for q in gate.qubits) + 1
            for q in gate.qubits:
                frontier[q] = level
            levels.append(level)
        return levels

    def depth(self) -> int:
        levels = self.gate_levels()
        return max(levels) if levels else 0

    def moments(self) -> List[List[int]]:
        """Gate indices grouped by ASAP level, in textual order within a level."""
        moments: List[List[int]] = [[] for _ in range(self.depth())]
        for index, level in enumerate(self.gate_levels()):
            moments[level - 1].append(index)
        return moments

    def window(self, start: int, end: int) -> "Circuit":
        """Sub-circuit made of the gates on ASAP levels [start, end)."""
        levels = self.gate_levels()
        gates = [g for g, level in zip(self.gates, levels) if start < level <= end]
        return Circuit(self.num_qubits, gates)

    def to_qasm(self) -> str:
        lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.num_qubits}];"]
        names = {v: k for k, v in _QASM_NAMES.items()}
        for gate in self.gates:
            operands = ",".join(f"q[{q}]" for q in gate.qubits)
            if gate.kind == "Rz":
                lines.append(f"rz({gate.angle!r}) {operands};")
            else:
                lines.append(f"{names[gate.kind]} {operands};")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> Dict[str, Any]:
        return {"num_qubits": self.num_qubits, "gates": [g.to_dict() for g in self.gates]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Circuit":
        return cls(data["num_qubits"], [Gate.from_dict(g) for g in data["gates"]])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.num_qubits == other.num_qubits and self.gates == other.gates

    def __len__(self) -> int:
        return len(self.gates)

    def __repr__(self) -> str:
        return f"Circuit({self.num_qubits} qubits, {len(self.gates)} gates)"


# QASM grammar

ParserElement.enable_packrat()


def _apply_sign(tokens):
    sign, value = tokens[0]
    return -value if sign == "-" else value


def _fold(tokens):
    items = tokens[0]
    value = items[0]
    for op, operand in zip(items[1::2], items[2::2]):
        if op == "+":
            value += operand
        elif op == "-":
            value -= operand
        elif op == "*":
            value *= operand
        elif operand == 0:
            raise ParseException("", 0, "division by zero in angle expression")
        else:
            value /= operand
    return value


def _build_grammar():
    identifier = Word(alphas + "_", alphanums + "_")

    def indexed(name):
        return Suppress("[") + pyparsing_common.integer(name) + Suppress("]")

    operand_ref = Group(identifier("register") + indexed("index"))

    number = pyparsing_common.number.copy().set_parse_action(lambda t: float(t[0]))
    pi = Keyword("pi").set_parse_action(lambda: math.pi)
    angle = infix_notation(
        number | pi,
        [
            (one_of("+ -"), 1, OpAssoc.RIGHT, _apply_sign),
            (one_of("* /"), 2, OpAssoc.LEFT, _fold),
            (one_of("+ -"), 2, OpAssoc.LEFT, _fold),
        ],
    )

    header = Suppress(Keyword("OPENQASM") + Regex(r"[0-9]+(\.[0-9]+)?") + ";")
    include = Suppress(Keyword("include") + Regex(r'"[^"]*"') + ";")
    qreg = Group(Keyword("qreg")("keyword") + identifier("register") + indexed("size") + Suppress(";"))
    rejected = Group(
        one_of(" ".join(_REJECTED), as_keyword=True)("rejected") + Regex(r"[^;]*") + Suppress(";")
    )
    arguments = Suppress("(") + angle("angle") + Suppress(")")
    statement = Group(
        identifier("name")
        + Opt(arguments)
        + operand_ref
        + ZeroOrMore(Suppress(",") + operand_ref)
        + Suppress(";")
    )

    def locate(s, loc, tokens):
        tokens[0]["loc"] = loc

    for element in (qreg, rejected, statement):
        element.add_parse_action(locate)

    program = ZeroOrMore(header | include) + ZeroOrMore(qreg | rejected | statement)
    program.ignore(cpp_style_comment)
    return program


_GRAMMAR = _build_grammar()


def parse_qasm(text: str) -> Circuit:
    """Parse a program in the supported QASM 2 subset into a Circuit."""
    try:
        results = _GRAMMAR.parse_string(text, parse_all=True)
    except ParseException as exc:
        raise QasmError(f"Syntax error: {exc.msg}", exc.lineno, exc.col) from None

    def where(item):
        loc = item["loc"]
        return lineno(loc, text), col(loc, text)

    register = None
    size = 0
    circuit: Optional[Circuit] = None
    for item in results:
        if "rejected" in item:
            keyword = item["rejected"]
            raise QasmError(f"Unsupported statement '{keyword}': circuits must be measurement-free", *where(item))
        if "keyword" in item:
            if register is not None:
                raise QasmError("Only one quantum register is supported", *where(item))
            register = item["register"]
            size = int(item["size"])
            if size < 1:
                raise QasmError(f"Register size must be positive, got {size}", *where(item))
            circuit = Circuit(size)
            continue

        name = item["name"]
        if circuit is None:
            raise QasmError(f"Gate '{name}' used before any qreg declaration", *where(item))
        if name not in _QASM_NAMES:
            raise QasmError(f"Unsupported gate '{name}'", *where(item))
        kind = _QASM_NAMES[name]
        refs = [part for part in item if isinstance(part, ParseResults)]
        qubits = []
        for ref in refs:
            if ref["register"] != register:
                raise QasmError(f"Unknown register '{ref['register']}'", *where(item))
            q = int(ref["index"])
            if not 0 <= q < size:
                raise QasmError(f"Qubit index {q} out of range for register of size {size}", *where(item))
            qubits.append(q)
        expected = 2 if kind == "CNOT" else 1
        if len(qubits) != expected:
            raise QasmError(f"'{name}' takes {expected} operand(s), got {len(qubits)}", *where(item))
        if len(set(qubits)) != len(qubits):
            raise QasmError(f"Duplicate qubit in '{name}'", *where(item))
        has_angle = "angle" in item
        if kind == "Rz" and not has_angle:
            raise QasmError("rz needs an angle argument", *where(item))
        if kind != "Rz" and has_angle:
            raise QasmError(f"'{name}' does not take an angle argument", *where(item))
        angle = float(item["angle"]) if has_angle else None
        if angle is not None and not math.isfinite(angle):
            raise QasmError("Angle must be finite", *where(item))
        circuit.append(Gate(kind, qubits, angle))

    if circuit is None:
        raise QasmError("Program declares no qreg")
    logger.debug(f"Parsed {circuit!r} with depth {circuit.depth()}")
    return circuit


# Benchmark families

BENCHMARK_FAMILIES = ("ghz", "ladder", "bv", "dj", "random_clifford")


def ghz(n: int) -> Circuit:
    circuit = Circuit(n).add("H", 0)
    for q in range(n - 1):
        circuit.add("CNOT", q, q + 1)
    return circuit


def ladder(n: int) -> Circuit:
    circuit = Circuit(n)
    for q in range(n - 1):
        circuit.add("CNOT", q, q + 1)
    return circuit


def _oracle_frame(n: int) -> Circuit:
    ancilla = n - 1
    circuit = Circuit(n).add("X", ancilla)
    for q in range(n):
        circuit.add("H", q)
    return circuit


def bv(n: int) -> Circuit:
    """Bernstein-Vazirani with the all-ones hidden string; qubit n-1 is the ancilla."""
    circuit = _oracle_frame(n)
    for q in range(n - 1):
        circuit.add("CNOT", q, n - 1)
    for q in range(n - 1):
        circuit.add("H", q)
    return circuit


def dj(n: int) -> Circuit:
    """Deutsch-Jozsa with the constant-zero oracle."""
    circuit = _oracle_frame(n)
    for q in range(n - 1):
        circuit.add("H", q)
    return circuit


def random_circuit(num_qubits: int, num_gates: int, seed: int,
                   gate_set: Sequence[str] = ("H", "S", "T", "Rz", "CNOT", "X", "Z")) -> Circuit:
    """Seeded circuit drawing each gate uniformly from gate_set."""
    rng = np.random.default_rng(seed)
    kinds = [k for k in gate_set if num_qubits > 1 or k != "CNOT"]
    if not kinds:
        raise ValueError(f"Gate set {tuple(gate_set)} is empty for {num_qubits} qubit(s)")
    circuit = Circuit(num_qubits)
    for _ in range(num_gates):
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "CNOT":
            control, target = (int(q) for q in rng.choice(num_qubits, size=2, replace=False))
            circuit.add("CNOT", control, target)
        elif kind == "Rz":
            circuit.add("Rz", int(rng.integers(num_qubits)), angle=float(rng.uniform(0.0, 2 * math.pi)))
        else:
            circuit.add(kind, int(rng.integers(num_qubits)))
    return circuit


def generate_benchmark(family: str, n: int, seed: int = 0, num_gates: Optional[int] = None) -> Circuit:
    """Build one of the standard benchmark circuits on n qubits."""
    if family not in BENCHMARK_FAMILIES:
        raise ValueError(f"Unknown benchmark family '{family}'; expected one of {', '.join(BENCHMARK_FAMILIES)}")
    if n < 2:
        raise ValueError(f"Benchmarks need at least 2 qubits, got {n}")
    if family == "ghz":
        return ghz(n)
    if family == "ladder":
        return ladder(n)
    if family == "bv":
        return bv(n)
    if family == "dj":
        return dj(n)
    return random_circuit(n, num_gates if num_gates is not None else 4 * n, seed, ("H", "S", "CNOT"))
