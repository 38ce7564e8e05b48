"""Searching for a coupling map that supports a circuit's cx gates natively.

Picking directed edges for a device is cast as a knapsack: each candidate
edge is an item of weight 1, the budget is the number of edges the device
may have, and an edge's profit is how much cx support it buys, counting

    1.0 for every circuit cx it supports directly, plus
    0.5 for every circuit cx it supports in reverse (four added h gates).

The tabu engine then maximizes total profit within the edge budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Sequence

from .qasm import Program, parse
from .routing import CouplingMap, RoutingError, RoutingReport, direct_support_count, route
from .statevector import MAX_QUBITS, Gate, GateOp
from .tabu import KnapsackInstance, SearchConfig, SearchResult, fitness, qts_run

DIRECT_EDGE_PROFIT = 1.0
REVERSED_EDGE_PROFIT = 0.5
DEFAULT_EDGE_BUDGET = 6

# Two bundled five-qubit layouts used by the teleport bench and as handy
# non-trivial fixtures. Both support the teleport circuit's cx gates
# directly.
REFERENCE_MAP_EDGES: dict[str, tuple[tuple[int, int], ...]] = {
    "ref1": ((0, 1), (0, 2), (1, 2), (3, 2), (3, 4), (4, 2)),
    "ref2": ((0, 1), (0, 4), (1, 2), (1, 3), (1, 4), (3, 4)),
}


def reference_map(name: str) -> CouplingMap:
    """One of the bundled five-qubit reference layouts ('ref1' or 'ref2')."""
    if name not in REFERENCE_MAP_EDGES:
        raise ValueError(f"unknown reference map {name!r}")
    return CouplingMap(5, REFERENCE_MAP_EDGES[name])


@dataclass(frozen=True)
class MapSearchProblem:
    """A circuit, the directed edges a device could have, and an edge budget."""

    circuit: Program
    candidate_edges: tuple[tuple[int, int], ...]
    edge_budget: int = DEFAULT_EDGE_BUDGET

    def __post_init__(self) -> None:
        seen: set[tuple[int, int]] = set()
        for a, b in self.candidate_edges:
            if a == b:
                raise ValueError(f"candidate edge ({a}, {b}) is a self-loop")
            if a < 0 or b < 0:
                raise ValueError(f"candidate edge ({a}, {b}) has a negative endpoint")
            if (a, b) in seen:
                raise ValueError(f"duplicate candidate edge ({a}, {b})")
            seen.add((a, b))
        if not self.candidate_edges:
            raise ValueError("need at least one candidate edge")
        if self.edge_budget < 0:
            raise ValueError("edge_budget must be >= 0")


def all_directed_pairs(n_physical: int) -> tuple[tuple[int, int], ...]:
    """Every directed edge over ``n_physical`` qubits, lexicographic order."""
    return tuple(
        (a, b) for a in range(n_physical) for b in range(n_physical) if a != b
    )


def _cx_pairs(circuit: Program) -> list[tuple[int, int]]:
    return [
        (ins.control, ins.target)
        for ins in circuit.instructions
        if isinstance(ins, GateOp) and ins.kind is Gate.CX and ins.control is not None
    ]


def derive_knapsack(problem: MapSearchProblem) -> KnapsackInstance:
    """Translate edge selection into a knapsack instance (one item per edge)."""
    if len(problem.candidate_edges) > MAX_QUBITS:
        raise ValueError(
            f"{len(problem.candidate_edges)} candidate edges exceed the "
            f"{MAX_QUBITS}-item population limit"
        )
    pairs = _cx_pairs(problem.circuit)
    profits = []
    for edge in problem.candidate_edges:
        direct = sum(1 for pair in pairs if pair == edge)
        reverse = sum(1 for pair in pairs if pair == (edge[1], edge[0]))
        profits.append(DIRECT_EDGE_PROFIT * direct + REVERSED_EDGE_PROFIT * reverse)
    weights = (1.0,) * len(problem.candidate_edges)
    return KnapsackInstance(tuple(profits), weights, float(problem.edge_budget))


def decode(bits: Sequence[int], problem: MapSearchProblem) -> CouplingMap:
    """Turn a selection vector back into a coupling map.

    The map spans at least the circuit's qubits, growing only as far as the
    selected edges reach.
    """
    if len(bits) != len(problem.candidate_edges):
        raise ValueError(
            f"expected {len(problem.candidate_edges)} bits, got {len(bits)}"
        )
    edges = tuple(
        edge for edge, bit in zip(problem.candidate_edges, bits) if bit
    )
    n_physical = max(
        problem.circuit.n_qubits,
        1 + max((max(a, b) for a, b in edges), default=-1),
    )
    return CouplingMap(n_physical, edges)


def support_score(circuit: Program, cmap: CouplingMap) -> float:
    """How well a map supports a circuit's cx gates, counted per gate:
    1.0 when the edge is present, 0.5 when only its reverse is."""
    direct, reverse, _ = direct_support_count(circuit, cmap)
    return DIRECT_EDGE_PROFIT * direct + REVERSED_EDGE_PROFIT * reverse


@dataclass
class ScoredMap:
    """A searched map with its knapsack score and, when routable, a report."""

    map: CouplingMap
    score: float
    routing: RoutingReport | None
    search: SearchResult


def search_best_map(problem: MapSearchProblem, config: SearchConfig | None = None) -> ScoredMap:
    """Run the tabu engine over edge selections and score the winner.

    The reported score is the knapsack fitness recomputed from the returned
    selection. Routing the circuit on the winning map can fail (for example
    with a budget of zero); the report is then None.
    """
    instance = derive_knapsack(problem)
    result = qts_run(instance, config)
    cmap = decode(result.best_solution, problem)
    score = fitness(instance, result.best_solution)
    try:
        _, report = route(problem.circuit, cmap)
    except RoutingError:
        report = None
    return ScoredMap(map=cmap, score=score, routing=report, search=result)


def load_teleport() -> Program:
    """The bundled three-qubit teleportation circuit (qubit 0 into qubit 2)."""
    text = resources.files("qtabu").joinpath("assets/teleport.qasm").read_text()
    return parse(text)
