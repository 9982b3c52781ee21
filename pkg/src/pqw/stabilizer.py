"""Bit-packed Pauli algebra and stabilizer tableau.

A Pauli operator is stored in the normal form

    i^phase * prod_k X_k^{x_k} * prod_k Z_k^{z_k}

with x and z packed into Python ints (bit k = qubit k) and phase mod 4.
The site value x_k = z_k = 1 therefore means X_k Z_k = -i Y_k; a plain
Y_k is phase=1, x=z=1.  Every conjugation and multiplication rule below
is derived in this normal form; none of them are copied from elsewhere,
and the dense engine cross-checks all of them in the test suite.

The protocol circuits only ever produce generators with real signs, but
products computed along the way pass through imaginary phases, so the
phase is tracked mod 4 throughout and collapsed to a sign only at the
boundary (the .sign property).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import StateVector


def _parity(mask: int) -> int:
    return mask.bit_count() & 1


@dataclass(frozen=True)
class PauliString:
    n_qubits: int
    x_bits: int
    z_bits: int
    phase: int = 0  # exponent of i, mod 4

    def __post_init__(self):
        limit = 1 << self.n_qubits
        if not (0 <= self.x_bits < limit and 0 <= self.z_bits < limit):
            raise ValueError("bit masks exceed the qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @property
    def sign(self) -> int:
        """+1 or -1; raises if the operator carries an imaginary phase."""
        if self.phase % 2:
            raise ValueError(f"phase i^{self.phase} is not a real sign")
        return 1 if self.phase == 0 else -1

    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit counts differ")
        # Moving other's X block left past self's Z block anticommutes
        # once per overlapping site.
        swaps = (self.z_bits & other.x_bits).bit_count()
        return PauliString(
            self.n_qubits,
            self.x_bits ^ other.x_bits,
            self.z_bits ^ other.z_bits,
            (self.phase + other.phase + 2 * swaps) % 4,
        )

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit counts differ")
        return (
            _parity(self.x_bits & other.z_bits) ^ _parity(self.z_bits & other.x_bits)
        ) == 0

    def same_paulis(self, other: "PauliString") -> bool:
        """Equal up to phase."""
        return self.x_bits == other.x_bits and self.z_bits == other.z_bits

    def apply_to(self, state: StateVector) -> StateVector:
        """Dense action: amplitude j picks up i^phase (-1)^{|j & z|}, then
        the X block permutes j to j ^ x."""
        if state.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        indices = np.arange(state.amplitudes.size, dtype=np.uint64)
        z_par = np.bitwise_count(indices & np.uint64(self.z_bits)) & np.uint64(1)
        signs = 1.0 - 2.0 * z_par.astype(float)
        out = np.empty_like(state.amplitudes)
        out[indices ^ np.uint64(self.x_bits)] = (
            (1j**self.phase) * signs * state.amplitudes
        )
        return StateVector(state.n_qubits, out)

    def label(self) -> str:
        """Readable form like '-XZ.ZX' with '.' for identity sites."""
        site = {(0, 0): ".", (1, 0): "X", (0, 1): "Z", (1, 1): "XZ"}
        body = ""
        for k in range(self.n_qubits):
            body += site[((self.x_bits >> k) & 1, (self.z_bits >> k) & 1)]
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        return prefix + body


def single_x(n_qubits: int, qubit: int) -> PauliString:
    return PauliString(n_qubits, 1 << qubit, 0)


def single_z(n_qubits: int, qubit: int) -> PauliString:
    return PauliString(n_qubits, 0, 1 << qubit)


def _conj_one(p: PauliString, gate: str, targets) -> PauliString:
    """Conjugate p by the gate: returns U p U^dagger in normal form.

    Sign bookkeeping, derived once in the X^x Z^z normal form:
      H(q):    swap x_q and z_q; an occupied XZ site reorders, phase += 2.
      X(q):    Z_q present flips sign.
      Z(q):    X_q present flips sign.
      CZ(a,b): z_a ^= x_b, z_b ^= x_a; both X's present, phase += 2.
      CNOT(c,t): x_t ^= x_c, z_c ^= z_t; no phase change in this form.
    """
    x, z, phase = p.x_bits, p.z_bits, p.phase
    if gate == "H":
        (q,) = targets
        bit = 1 << q
        if x & z & bit:
            phase += 2
        xq, zq = x & bit, z & bit
        x = (x & ~bit) | zq
        z = (z & ~bit) | xq
    elif gate == "X":
        (q,) = targets
        if z & (1 << q):
            phase += 2
    elif gate == "Z":
        (q,) = targets
        if x & (1 << q):
            phase += 2
    elif gate == "CZ":
        a, b = targets
        if (x >> a) & (x >> b) & 1:
            phase += 2
        if (x >> b) & 1:
            z ^= 1 << a
        if (x >> a) & 1:
            z ^= 1 << b
    elif gate == "CNOT":
        control, target = targets
        if (x >> control) & 1:
            x ^= 1 << target
        if (z >> target) & 1:
            z ^= 1 << control
    else:
        raise ValueError(f"unknown gate {gate!r}")
    return PauliString(p.n_qubits, x, z, phase % 4)


@dataclass(frozen=True)
class Tableau:
    """A stabilizer group given by n_qubits commuting generators."""

    n_qubits: int
    generators: tuple[PauliString, ...]

    def __post_init__(self):
        for g in self.generators:
            if g.n_qubits != self.n_qubits:
                raise ValueError("generator qubit count mismatch")
            if g.phase % 2:
                raise ValueError(f"generator {g.label()} has imaginary phase")


def zero_state_tableau(n_qubits: int) -> Tableau:
    return Tableau(n_qubits, tuple(single_z(n_qubits, q) for q in range(n_qubits)))


def conjugate(tableau: Tableau, gate: str, targets) -> Tableau:
    targets = tuple(targets)
    for q in targets:
        if not 0 <= q < tableau.n_qubits:
            raise ValueError(f"qubit {q} out of range")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")
    return Tableau(
        tableau.n_qubits,
        tuple(_conj_one(g, gate, targets) for g in tableau.generators),
    )


def _reduce(generators: tuple[PauliString, ...], target: PauliString) -> PauliString:
    """Divide target by the group via Gauss-Jordan over GF(2).

    Brings the generator rows to reduced form (each pivot bit present in
    exactly one row), then clears every pivot bit of the target.  The
    returned residual is the identity iff +-target or +-i*target lies in
    the group.  Generators commute pairwise, so no multiplication order
    can change a sign.
    """
    rows = list(generators)
    used_rows: set[int] = set()
    pivots: list[tuple[int, int, int]] = []  # (which, bit, row)
    for which in (0, 1):  # x block first, then z block
        for bit in range(target.n_qubits):
            pick = None
            for i, row in enumerate(rows):
                if i in used_rows:
                    continue
                mask = row.x_bits if which == 0 else row.z_bits
                if (mask >> bit) & 1:
                    pick = i
                    break
            if pick is None:
                continue
            used_rows.add(pick)
            pivot_row = rows[pick]
            for i, row in enumerate(rows):
                if i == pick:
                    continue
                mask = row.x_bits if which == 0 else row.z_bits
                if (mask >> bit) & 1:
                    rows[i] = row * pivot_row
            pivots.append((which, bit, pick))
    residual = target
    for which, bit, i in pivots:
        mask = residual.x_bits if which == 0 else residual.z_bits
        if (mask >> bit) & 1:
            residual = residual * rows[i]
    return residual


def extract_sign(tableau: Tableau, target: PauliString):
    """Return +1 or -1 if (sign * target) lies in the generated group,
    else None ("absent")."""
    if target.n_qubits != tableau.n_qubits:
        raise ValueError("qubit counts differ")
    residual = _reduce(tableau.generators, target)
    if not residual.is_identity():
        return None
    # residual = target * (product of generators); the product carries the
    # group element's phase, so target's sign is the residual's inverse.
    if residual.phase % 2:
        return None
    return 1 if residual.phase == 0 else -1


class ZeroProbabilityBranch(ValueError):
    """Forced measurement outcome conflicts with a determined stabilizer."""


def measure_z(tableau: Tableau, qubit: int, forced_outcome: int) -> Tableau:
    """Measure Z on one qubit with an outcome imposed by the caller.

    The verifier enumerates outcomes exogenously, so instead of sampling
    this installs (-1)^forced_outcome Z_qubit.  When the measurement is
    already determined and disagrees with the forced outcome, the branch
    has probability zero and is rejected loudly.
    """
    if not 0 <= qubit < tableau.n_qubits:
        raise ValueError(f"qubit {qubit} out of range")
    if forced_outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {forced_outcome}")
    z_target = single_z(tableau.n_qubits, qubit)
    anti = [i for i, g in enumerate(tableau.generators) if (g.x_bits >> qubit) & 1]
    if not anti:
        # deterministic: +-Z_qubit is in the group
        have = extract_sign(tableau, z_target)
        if have is None:
            raise AssertionError("full-rank tableau must determine Z here")
        want = 1 if forced_outcome == 0 else -1
        if have != want:
            raise ZeroProbabilityBranch(
                f"outcome {forced_outcome} on qubit {qubit} has probability 0"
            )
        return tableau
    pivot = tableau.generators[anti[0]]
    replacement = PauliString(
        tableau.n_qubits, 0, 1 << qubit, 2 * forced_outcome
    )
    new_gens = []
    for i, g in enumerate(tableau.generators):
        if i == anti[0]:
            new_gens.append(replacement)
        elif i in anti:
            new_gens.append(g * pivot)
        else:
            new_gens.append(g)
    return Tableau(tableau.n_qubits, tuple(new_gens))


def measure_z_sampled(tableau: Tableau, qubit: int, rng) -> tuple[int, Tableau]:
    """Sampling wrapper: draws a uniform bit when the outcome is
    indeterminate, otherwise returns the determined outcome."""
    anti = [g for g in tableau.generators if (g.x_bits >> qubit) & 1]
    if anti:
        outcome = int(rng.integers(0, 2))
    else:
        sign = extract_sign(tableau, single_z(tableau.n_qubits, qubit))
        outcome = 0 if sign == 1 else 1
    return outcome, measure_z(tableau, qubit, outcome)


def check_stabilizes(state: StateVector, tableau: Tableau, tol: float = 1e-10) -> bool:
    """True iff every generator fixes the state with eigenvalue +1."""
    if state.n_qubits != tableau.n_qubits:
        raise ValueError("qubit counts differ")
    for g in tableau.generators:
        moved = g.apply_to(state)
        overlap = np.vdot(state.amplitudes, moved.amplitudes)
        if abs(overlap - 1.0) > tol:
            return False
    return True
