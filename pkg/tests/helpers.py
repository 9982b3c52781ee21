"""Shared test machinery: random Clifford circuits applied both densely
and symbolically, and explicit matrix builders used as oracles for the
reshape-based gate kernels."""

from __future__ import annotations

import random

import numpy as np

from pqw import statevector as sv
from pqw.stabilizer import Tableau, conjugate, zero_state_tableau

GATE_ARITY = {"H": 1, "X": 1, "Z": 1, "CZ": 2, "CNOT": 2}


def random_circuit(rng: random.Random, n_qubits: int, depth: int):
    ops = []
    for _ in range(depth):
        gate = rng.choice(tuple(GATE_ARITY))
        if GATE_ARITY[gate] == 1 or n_qubits == 1:
            gate = gate if GATE_ARITY[gate] == 1 else "Z"
            ops.append((gate, (rng.randrange(n_qubits),)))
        else:
            targets = rng.sample(range(n_qubits), 2)
            ops.append((gate, tuple(targets)))
    return ops


def run_dense(n_qubits: int, ops) -> sv.StateVector:
    state = sv.new_zero(n_qubits)
    for gate, targets in ops:
        state = sv.apply_gate(state, gate, targets)
    return state


def run_tableau(n_qubits: int, ops) -> Tableau:
    tableau = zero_state_tableau(n_qubits)
    for gate, targets in ops:
        tableau = conjugate(tableau, gate, targets)
    return tableau


# Explicit matrix construction, deliberately different from the reshape
# kernels: single-qubit gates by Kronecker products, two-qubit gates by
# basis-index arithmetic.

H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
Z_MAT = np.array([[1, 0], [0, -1]], dtype=complex)


def single_qubit_matrix(mat: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    # qubit 0 is the least significant bit, so it sits rightmost in the
    # Kronecker chain
    out = np.eye(2 ** (n_qubits - 1 - qubit), dtype=complex)
    out = np.kron(out, mat)
    return np.kron(out, np.eye(2**qubit, dtype=complex))


def apply_matrix_oracle(amps: np.ndarray, gate: str, targets) -> np.ndarray:
    n = amps.size.bit_length() - 1
    if gate in ("H", "X", "Z"):
        mat = {"H": H_MAT, "X": X_MAT, "Z": Z_MAT}[gate]
        return single_qubit_matrix(mat, targets[0], n) @ amps
    if gate == "CZ":
        a, b = targets
        signs = np.array(
            [-1.0 if (i >> a) & 1 and (i >> b) & 1 else 1.0 for i in range(amps.size)]
        )
        return amps * signs
    if gate == "CNOT":
        control, target = targets
        out = np.zeros_like(amps)
        for i, amp in enumerate(amps):
            out[i ^ (((i >> control) & 1) << target)] = amp
        return out
    raise ValueError(gate)


def random_state(rng: np.random.Generator, n_qubits: int) -> sv.StateVector:
    amps = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return sv.from_amplitudes(amps, normalize=True)
