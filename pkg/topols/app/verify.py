"""Correctness checks: tensor comparison of compiled diagrams and the Rz injection protocol."""
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from .circuit import Circuit, Gate
from .errors import TensorSizeError
from .pipe import PipeDiagram, interpret_pipe_as_zx
from .zx import circuit_to_zx, evaluate_tensor, proportionality_residual

logger = logging.getLogger(__name__)

DEFAULT_MAX_QUBITS = 5
MAX_UNITARY_QUBITS = 10
NORM_TOL = 1e-10

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)
_MINUS = np.array([1, -1], dtype=complex) / math.sqrt(2)


def phase_gate(angle: float) -> np.ndarray:
    """diag(1, e^{i angle}); equal to the usual Rz up to a global phase."""
    return np.diag([1.0, np.exp(1j * angle)]).astype(complex)


def gate_matrix(gate: Gate) -> np.ndarray:
    """Matrix of a gate on its own qubits, first qubit most significant."""
    if gate.kind == "CNOT":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if gate.kind == "H":
        return _H
    if gate.kind == "X":
        return _X
    return phase_gate(gate.phase)


def _apply(unitary: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], num_qubits: int) -> np.ndarray:
    """Left-multiply a gate acting on some qubits, qubit 0 most significant."""
    k = len(qubits)
    columns = unitary.reshape((2,) * num_qubits + (-1,))
    gate = matrix.reshape((2,) * (2 * k))
    moved = np.tensordot(gate, columns, axes=(list(range(k, 2 * k)), list(qubits)))
    moved = np.moveaxis(moved, list(range(k)), list(qubits))
    return moved.reshape(unitary.shape)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Product of the gate matrices, qubit 0 most significant."""
    n = circuit.num_qubits
    if n > MAX_UNITARY_QUBITS:
        raise TensorSizeError(f"Refusing to build a {n}-qubit unitary")
    unitary = np.eye(2 ** n, dtype=complex)
    for gate in circuit.gates:
        unitary = _apply(unitary, gate_matrix(gate), list(gate.qubits), n)
    return unitary


def check_tensor_size(circuit: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> None:
    if circuit.num_qubits > max_qubits:
        raise TensorSizeError(
            f"Circuit has {circuit.num_qubits} qubits; tensor checks are limited to {max_qubits}"
        )


def semantic_residual(circuit: Circuit, pipe: PipeDiagram, max_qubits: int = DEFAULT_MAX_QUBITS) -> float:
    """Worst entry-wise distance between the circuit's map and a rescaled map of the diagram."""
    check_tensor_size(circuit, max_qubits)
    expected = evaluate_tensor(circuit_to_zx(circuit))
    actual = evaluate_tensor(interpret_pipe_as_zx(pipe))
    if expected.shape != actual.shape:
        logger.warning(f"Diagram map has shape {actual.shape}, circuit map {expected.shape}")
        return math.inf
    return proportionality_residual(expected, actual)


def check_semantic_equivalence(
    circuit: Circuit, pipe: PipeDiagram, tol: float = 1e-9, max_qubits: int = DEFAULT_MAX_QUBITS
) -> bool:
    """True iff the pipe diagram implements the circuit up to a nonzero scalar."""
    residual = semantic_residual(circuit, pipe, max_qubits)
    logger.debug(f"Semantic residual {residual:.3e} (tolerance {tol:.1e})")
    return residual <= tol


# Rz injection protocol

def _normalized(alpha: complex, beta: complex) -> np.ndarray:
    state = np.array([alpha, beta], dtype=complex)
    norm = float(np.vdot(state, state).real)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"Input state is not normalised: |alpha|^2 + |beta|^2 = {norm}")
    return state


def _renormalize(state: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(state)
    if norm < NORM_TOL:
        raise ValueError("Measurement outcome has zero probability for this input")
    return state / norm


def simulate_rz_injection(
    alpha: complex,
    beta: complex,
    theta: float,
    zz_outcome: int,
    x_outcome: str,
    x_byproduct: bool = False,
) -> Tuple[np.ndarray, Tuple[str, ...]]:
    """Run the injection of Rz(theta) through a |+> ancilla with forced outcomes.

    The data qubit first meets the ancilla in a joint ZZ measurement, the ancilla
    then receives theta (or -theta for odd parity or a pending X on the data),
    and is finally measured in the X basis. Returns the data-qubit state and the
    byproducts ("Z", "X") that map it onto alpha|0> + e^{i theta} beta|1>.
    """
    if zz_outcome not in (0, 1):
        raise ValueError(f"zz_outcome must be 0 or 1, got {zz_outcome}")
    if x_outcome not in ("+", "-"):
        raise ValueError(f"x_outcome must be '+' or '-', got {x_outcome!r}")
    data = _normalized(alpha, beta)
    if x_byproduct:
        data = _X @ data

    # data (x) ancilla, data most significant
    joint = np.kron(data, _PLUS)
    parity = np.array([0, 1, 1, 0])
    joint = _renormalize(np.where(parity == zz_outcome, joint, 0))

    angle = theta
    if zz_outcome == 1:
        angle = -angle
    if x_byproduct:
        angle = -angle
    joint = np.kron(_I, phase_gate(angle)) @ joint

    bra = _PLUS if x_outcome == "+" else _MINUS
    result = _renormalize(joint.reshape(2, 2) @ bra.conj())

    byproducts = []
    if x_outcome == "-":
        byproducts.append("Z")
    if x_byproduct:
        byproducts.append("X")
    return result, tuple(byproducts)


def apply_byproducts(state: np.ndarray, byproducts: Sequence[str]) -> np.ndarray:
    """Undo reported byproducts, Z before X."""
    corrected = np.asarray(state, dtype=complex)
    if "Z" in byproducts:
        corrected = _Z @ corrected
    if "X" in byproducts:
        corrected = _X @ corrected
    return corrected


def rz_injection_fidelity(
    alpha: complex,
    beta: complex,
    theta: float,
    zz_outcome: int,
    x_outcome: str,
    x_byproduct: bool = False,
) -> float:
    """|<target|corrected>|^2 for one branch of the protocol."""
    state, byproducts = simulate_rz_injection(alpha, beta, theta, zz_outcome, x_outcome, x_byproduct)
    corrected = apply_byproducts(state, byproducts)
    target = phase_gate(theta) @ np.array([alpha, beta], dtype=complex)
    return float(abs(np.vdot(target, corrected)) ** 2)


def random_state(rng: np.random.Generator) -> Tuple[complex, complex]:
    """Haar-like random single-qubit amplitudes."""
    vector = rng.normal(size=2) + 1j * rng.normal(size=2)
    vector /= np.linalg.norm(vector)
    return complex(vector[0]), complex(vector[1])


def injection_self_check(trials: int, seed: int = 0, x_byproduct: Optional[bool] = None) -> float:
    """Worst fidelity defect over random states, angles and all outcome branches."""
    rng = np.random.default_rng(seed)
    variants = (False, True) if x_byproduct is None else (x_byproduct,)
    worst = 0.0
    for _ in range(trials):
        alpha, beta = random_state(rng)
        theta = float(rng.uniform(-math.pi, math.pi))
        for zz in (0, 1):
            for outcome in ("+", "-"):
                for pending in variants:
                    fidelity = rz_injection_fidelity(alpha, beta, theta, zz, outcome, pending)
                    worst = max(worst, 1.0 - fidelity)
    return worst
