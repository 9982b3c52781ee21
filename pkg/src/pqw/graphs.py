"""Target graphs, the named-topology catalog, and graph-state builders.

A graph state |G> is prepared by applying CZ along every edge of G to
|+> on every vertex; it is the unique joint +1 eigenstate of the
generators K_v = X_v * prod_{u~v} Z_u.  Vertex order is significant
here: it fixes qubit indices, measurement-outcome indexing, and report
ordering, which is why Graph keeps ordered tuples instead of sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from . import statevector as sv
from .stabilizer import PauliString, Tableau


class CatalogError(KeyError):
    """Unknown catalog name."""


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        seen = set()
        adjacency = {v: set() for v in self.vertices}
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u not in adjacency or v not in adjacency:
                raise ValueError(f"edge ({u},{v}) mentions an unknown vertex")
            key = frozenset((u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add(key)
            adjacency[u].add(v)
            adjacency[v].add(u)
        # connectivity required: the universal correction argument only
        # covers connected graphs
        if self.vertices:
            frontier = [self.vertices[0]]
            reached = {self.vertices[0]}
            while frontier:
                for u in adjacency[frontier.pop()]:
                    if u not in reached:
                        reached.add(u)
                        frontier.append(u)
            if reached != set(self.vertices):
                raise ValueError("graph is not connected")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex_index(self, v: str) -> int:
        return self.vertices.index(v)

    def neighbors(self, v: str) -> tuple[str, ...]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return tuple(out)

    def degree(self, v: str) -> int:
        return len(self.neighbors(v))

    def incident_edges(self, v: str) -> tuple[tuple[str, str], ...]:
        return tuple(e for e in self.edges if v in e)

    def other_end(self, edge: tuple[str, str], v: str) -> str:
        a, b = edge
        if v == a:
            return b
        if v == b:
            return a
        raise ValueError(f"{v} is not an endpoint of {edge}")

    def is_tree(self) -> bool:
        # connected is guaranteed, so the edge count decides
        return self.n_edges == self.n_vertices - 1

    def outcome_count(self) -> int:
        """Number of measurement records the protocol can produce: two
        resource qubits per edge, so 4**|E|."""
        return 4**self.n_edges


def _load_catalog() -> dict:
    text = resources.files("pqw.data").joinpath("catalog.json").read_text()
    return json.loads(text)


_CATALOG = _load_catalog()

TABLE_ORDER: tuple[str, ...] = tuple(_CATALOG["table_order"])


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    graph: Graph

    @property
    def expected_outcome_count(self) -> int:
        return self.graph.outcome_count()


def catalog_names() -> tuple[str, ...]:
    return tuple(_CATALOG["graphs"]) + tuple(_CATALOG["aliases"])


def catalog_lookup(name: str) -> Graph:
    """Resolve a catalog name (or alias) to its documented graph."""
    resolved = _CATALOG["aliases"].get(name, name)
    try:
        raw = _CATALOG["graphs"][resolved]
    except KeyError:
        raise CatalogError(
            f"unknown graph {name!r}; valid names: {', '.join(sorted(catalog_names()))}"
        ) from None
    return Graph(
        tuple(raw["vertices"]),
        tuple((u, v) for u, v in raw["edges"]),
    )


def catalog_entries() -> tuple[CatalogEntry, ...]:
    """The verification table rows, in documented order."""
    return tuple(CatalogEntry(name, catalog_lookup(name)) for name in TABLE_ORDER)


def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list file format: one 'u v' pair per line.

    Blank lines and lines starting with '#' are skipped.  Vertices are
    ordered by first appearance, which keeps qubit indices reproducible
    for a given file.
    """
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ValueError(f"line {line_no}: expected 'u v', got {line!r}")
        u, v = parts
        for label in (u, v):
            if not label.isalnum():
                raise ValueError(f"line {line_no}: label {label!r} is not alphanumeric")
            if label not in vertices:
                vertices.append(label)
        edges.append((u, v))
    if not edges:
        raise ValueError("edge list is empty")
    return Graph(tuple(vertices), tuple(edges))


def graph_state(graph: Graph, max_qubits: int | None = None) -> sv.StateVector:
    """CZ along every edge applied to |+> everywhere; qubit k hosts
    vertex graph.vertices[k]."""
    state = sv.new_plus(graph.n_vertices, max_qubits=max_qubits)
    for u, v in graph.edges:
        state = sv.apply_gate(state, "CZ", (graph.vertex_index(u), graph.vertex_index(v)))
    return state


def stabilizer_generators(graph: Graph) -> Tableau:
    """One generator per vertex: X there, Z on each neighbor."""
    n = graph.n_vertices
    gens = []
    for v in graph.vertices:
        x_bits = 1 << graph.vertex_index(v)
        z_bits = 0
        for u in graph.neighbors(v):
            z_bits |= 1 << graph.vertex_index(u)
        gens.append(PauliString(n, x_bits, z_bits))
    return Tableau(n, tuple(gens))


def ghz_state(n_qubits: int = 4) -> sv.StateVector:
    """(|0...0> + |1...1>)/sqrt(2)."""
    amps = [0.0] * (2**n_qubits)
    amps[0] = amps[-1] = 1.0
    return sv.from_amplitudes(amps, normalize=True)


def ghz_from_star() -> sv.StateVector:
    """The four-qubit GHZ state built from the K1_3 graph state by a
    Hadamard on each leaf; equals ghz_state(4) exactly."""
    star = catalog_lookup("K1_3")
    state = graph_state(star)
    for leaf in ("B", "C", "D"):
        state = sv.apply_gate(state, "H", (star.vertex_index(leaf),))
    return state
