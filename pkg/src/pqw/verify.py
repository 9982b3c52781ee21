"""Exhaustive verification: every outcome of every prepared graph is
checked against the target state, symbolic signs are checked against
the dense run, and noise curves are swept with their closed-form
overlays.

Everything here is exact; nothing is sampled statistically.  The only
randomness is the choice of spot-check outcomes for very large outcome
sets, and that is driven by a caller-controlled generator.  Reports are
plain data and render elsewhere; two runs over the same inputs produce
equal reports.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import statevector as sv
from .graphs import Graph, graph_state, stabilizer_generators
from .noise import (
    CHANNEL_ALIASES,
    NoiseChannel,
    NoiseReport,
    f_star_dep,
    f_star_pd,
    noisy_protocol_fidelity,
)
from .protocol import (
    Outcome,
    apply_correction,
    correction_plan,
    run_protocol,
    run_protocol_tableau,
)
from .stabilizer import extract_sign

FIDELITY_TOL = 1e-12
PROBABILITY_TOL = 1e-12

# exhaustive sign checking is cheap up to this many outcomes; beyond it
# the check falls back to random spot checks
EXHAUSTIVE_OUTCOME_LIMIT = 4096


@dataclass(frozen=True)
class OutcomeRecord:
    index: int
    probability: float
    fidelity: float


@dataclass(frozen=True)
class VerificationReport:
    graph_name: str
    correction_kind: str
    outcome_count: int
    min_fidelity: float
    max_fidelity: float
    max_probability_deviation: float
    records: tuple[OutcomeRecord, ...]

    @property
    def passed(self) -> bool:
        return (
            self.min_fidelity >= 1.0 - FIDELITY_TOL
            and self.max_probability_deviation <= PROBABILITY_TOL
        )


def _check_outcomes(
    graph: Graph, correction_kind: str, indices, target: sv.StateVector
) -> list[OutcomeRecord]:
    records = []
    for index in indices:
        outcome = Outcome.from_index(graph, index)
        prob, data = run_protocol(graph, outcome)
        plan = correction_plan(graph, outcome, correction_kind)
        fid = sv.fidelity(apply_correction(data, plan), target)
        records.append(OutcomeRecord(index, prob, fid))
    return records


def verify_all_outcomes(
    graph: Graph,
    correction_kind: str = "universal",
    jobs: int = 1,
    name: str | None = None,
) -> VerificationReport:
    """Run the protocol for every outcome, correct, and compare with the
    target graph state.

    Work is split over outcome-index chunks; the per-outcome records are
    concatenated back in index order, so the report does not depend on
    the degree of parallelism.
    """
    if name is None:
        name = f"graph-{graph.n_vertices}v-{graph.n_edges}e"
    count = graph.outcome_count()
    target = graph_state(graph)
    if jobs < 1:
        raise ValueError(f"jobs must be at least 1, got {jobs}")
    if jobs == 1:
        records = _check_outcomes(graph, correction_kind, range(count), target)
    else:
        chunk = max(1, count // (jobs * 8))
        spans = [range(lo, min(lo + chunk, count)) for lo in range(0, count, chunk)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(
                lambda span: _check_outcomes(graph, correction_kind, span, target),
                spans,
            )
            records = [rec for part in parts for rec in part]
    expected = 1.0 / count
    return VerificationReport(
        graph_name=name,
        correction_kind=correction_kind,
        outcome_count=count,
        min_fidelity=min(r.fidelity for r in records),
        max_fidelity=max(r.fidelity for r in records),
        max_probability_deviation=max(abs(r.probability - expected) for r in records),
        records=tuple(records),
    )


def phase_lemma_check(
    graph: Graph, sample_count: int = 64, rng: random.Random | None = None
) -> bool:
    """Confirm the symbolic run: for each vertex v the tableau after the
    protocol contains K_v with sign (-1)^{g_v}, g_v the XOR of far-side
    bits at v.

    All outcomes are checked when there are at most 4096; otherwise
    sample_count outcomes are drawn without replacement.
    """
    count = graph.outcome_count()
    if count <= EXHAUSTIVE_OUTCOME_LIMIT:
        indices = range(count)
    else:
        if rng is None:
            rng = random.Random(2024)
        indices = sorted(rng.sample(range(count), min(sample_count, count)))
    generators = stabilizer_generators(graph).generators
    for index in indices:
        outcome = Outcome.from_index(graph, index)
        tableau = run_protocol_tableau(graph, outcome)
        for v, k_v in zip(graph.vertices, generators):
            expected = -1 if outcome.g(v) else 1
            if extract_sign(tableau, k_v) != expected:
                return False
    return True


@dataclass(frozen=True)
class CutRecord:
    cut: sv.Bipartition
    rank_a: int
    rank_b: int


@dataclass(frozen=True)
class LcReport:
    records: tuple[CutRecord, ...]

    @property
    def inequivalent(self) -> bool:
        """A single differing Schmidt rank separates the two states
        under local unitaries, hence under local Cliffords."""
        return any(r.rank_a != r.rank_b for r in self.records)


def lc_check(
    state_a: sv.StateVector, state_b: sv.StateVector, bipartitions
) -> LcReport:
    """Schmidt ranks of both states across each cut.

    Ranks are invariant under local unitaries, so differing ranks prove
    the states inequivalent; equal ranks prove nothing.
    """
    if state_a.n_qubits != state_b.n_qubits:
        raise ValueError(
            f"qubit counts differ: {state_a.n_qubits} vs {state_b.n_qubits}"
        )
    records = []
    for cut in bipartitions:
        if cut.qubits() != frozenset(range(state_a.n_qubits)):
            raise ValueError("bipartition must cover exactly the state's qubits")
        records.append(
            CutRecord(cut, sv.schmidt_rank(state_a, cut), sv.schmidt_rank(state_b, cut))
        )
    return LcReport(tuple(records))


def noise_sweep(
    graph: Graph,
    channel_kind: str,
    p_grid,
    correction_kind: str = "universal",
    insertion: str = "post_prep",
    metric: str = "strict",
    jobs: int = 1,
    max_qubits: int | None = None,
    max_terms: int | None = None,
) -> NoiseReport:
    """Enumerate the exact fidelity on each grid point and attach the
    closed-form curve where one exists (depolarizing and phase damping;
    amplitude damping has none and gets no overlay)."""
    kind = CHANNEL_ALIASES.get(channel_kind, channel_kind)
    grid = tuple(float(p) for p in p_grid)
    k = 2 * graph.n_edges

    def one(p: float) -> float:
        return noisy_protocol_fidelity(
            graph,
            NoiseChannel(kind, p),
            correction_kind=correction_kind,
            insertion=insertion,
            metric=metric,
            max_qubits=max_qubits,
            max_terms=max_terms,
        )

    if jobs == 1 or len(grid) <= 1:
        fidelities = tuple(one(p) for p in grid)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            fidelities = tuple(pool.map(one, grid))
    if kind == "depolarizing":
        analytic = tuple(f_star_dep(p, k) for p in grid)
    elif kind == "phase_damping":
        analytic = tuple(f_star_pd(p, k) for p in grid)
    else:
        analytic = None
    return NoiseReport(grid, fidelities, analytic, k)
