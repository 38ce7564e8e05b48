"""Quantum-inspired tabu search for 0/1 knapsack-style selection problems.

The population is a statevector over one qubit per item. Candidates are
drawn from it by Born-rule sampling, improved by single-bit-flip moves
under a tabu list with an aspiration rule, and when the search stagnates
the population itself is perturbed with a gate (an entangling cx or an h)
before resampling.

Fitness is profit times a soft capacity penalty:

    f(s) = (sum_i b_i s_i) * (1 - max(0, sum_i w_i s_i - max_capacity))

which goes negative when the load exceeds capacity by more than one unit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .statevector import MAX_QUBITS, Gate, GateOp, StateVector, apply_gate, probabilities, zero_state

PopulationMode = str  # "with_replacement" | "without_replacement"
CandidateSolution = tuple[int, ...]  # one 0/1 selection bit per item

_MODES = ("with_replacement", "without_replacement")


@dataclass(frozen=True)
class KnapsackInstance:
    """Item profits and weights with a capacity bound."""

    profits: tuple[float, ...]
    weights: tuple[float, ...]
    max_capacity: float

    def __post_init__(self) -> None:
        if len(self.profits) != len(self.weights):
            raise ValueError(
                f"{len(self.profits)} profits vs {len(self.weights)} weights"
            )
        if not self.profits:
            raise ValueError("instance must have at least one item")

    @property
    def n_items(self) -> int:
        return len(self.profits)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.profits, dtype=float), np.asarray(self.weights, dtype=float)


def parse_instance(text: str) -> KnapsackInstance:
    """Parse the instance file format: ``n max_capacity`` then n ``b w`` lines."""
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise ValueError("empty instance file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"header must be 'n max_capacity', got {lines[0]!r}")
    n = int(header[0])
    max_capacity = float(header[1])
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} item lines, got {len(lines) - 1}")
    profits: list[float] = []
    weights: list[float] = []
    for line in lines[1:]:
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(f"item line must be 'profit weight', got {line!r}")
        profits.append(float(fields[0]))
        weights.append(float(fields[1]))
    return KnapsackInstance(tuple(profits), tuple(weights), max_capacity)


def fitness(instance: KnapsackInstance, bits: Sequence[int]) -> float:
    """Evaluate one selection; overweight selections are penalized, not clamped."""
    if len(bits) != instance.n_items:
        raise ValueError(f"expected {instance.n_items} bits, got {len(bits)}")
    profits, weights = instance.arrays()
    chosen = np.asarray(bits, dtype=float)
    profit = float(profits @ chosen)
    load = float(weights @ chosen)
    return profit * (1.0 - max(0.0, load - instance.max_capacity))


@dataclass(frozen=True)
class SearchConfig:
    """Engine knobs. ``tabu_tenure=None`` derives ``max(2, n_items // 4)``."""

    max_iterations: int = 500
    stagnation_limit: int = 20
    tabu_tenure: int | None = None
    population_mode: PopulationMode = "with_replacement"
    seed: int | None = None


@dataclass
class SearchState:
    """Mutable state threaded through one search run."""

    population: StateVector
    current: CandidateSolution
    best_solution: CandidateSolution
    best_evaluation: float
    best_iteration: int
    iteration: int
    tabu_list: deque[tuple[int, int]]  # (item index, last iteration it stays tabu)
    trace: list[tuple[int, float, float]] = field(default_factory=list)


@dataclass
class SearchResult:
    best_solution: CandidateSolution
    best_evaluation: float
    best_iteration: int
    iterations_run: int
    trace: list[tuple[int, float, float]]


def init_population(
    n_items: int,
    mode: PopulationMode = "with_replacement",
    rng: np.random.Generator | None = None,
) -> StateVector:
    """Prepare the population state.

    ``with_replacement`` puts every qubit in ``|+>`` (uniform over all
    selections). ``without_replacement`` entangles item pairs (2k, 2k+1)
    into Bell states so paired items are sampled together, with a lone
    trailing item left in ``|+>``. ``rng`` is accepted for interface
    symmetry with the sampling ops; preparation itself is deterministic.
    """
    if not 1 <= n_items <= MAX_QUBITS:
        raise ValueError(f"n_items must be in 1..{MAX_QUBITS}, got {n_items}")
    if mode not in _MODES:
        raise ValueError(f"unknown population mode {mode!r}")
    state = zero_state(n_items)
    if mode == "with_replacement":
        for qubit in range(n_items):
            apply_gate(state, GateOp(Gate.H, qubit))
    else:
        for qubit in range(0, n_items - 1, 2):
            apply_gate(state, GateOp(Gate.H, qubit))
            apply_gate(state, GateOp(Gate.CX, qubit + 1, control=qubit))
        if n_items % 2 == 1:
            apply_gate(state, GateOp(Gate.H, n_items - 1))
    return state


def sample_candidate(population: StateVector, rng: np.random.Generator) -> CandidateSolution:
    """Draw one selection from the population without collapsing it."""
    probs = probabilities(population)
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    index = int(np.searchsorted(cdf, rng.random(), side="right"))
    index = min(index, probs.size - 1)
    return tuple((index >> k) & 1 for k in range(population.n_qubits))


def neighborhood(bits: Sequence[int]) -> list[CandidateSolution]:
    """All single-bit-flip neighbors, in item order."""
    base = list(bits)
    neighbors = []
    for k in range(len(base)):
        flipped = list(base)
        flipped[k] ^= 1
        neighbors.append(tuple(flipped))
    return neighbors


def _flip_scores(instance: KnapsackInstance, bits: Sequence[int]) -> np.ndarray:
    """Fitness of every single-flip neighbor, computed in one vector pass."""
    profits, weights = instance.arrays()
    chosen = np.asarray(bits, dtype=float)
    sign = 1.0 - 2.0 * chosen
    flip_profit = float(profits @ chosen) + profits * sign
    flip_load = float(weights @ chosen) + weights * sign
    return flip_profit * (1.0 - np.maximum(0.0, flip_load - instance.max_capacity))


def select_move(
    state: SearchState, instance: KnapsackInstance
) -> tuple[CandidateSolution, int]:
    """Pick the next selection from the flip neighborhood of ``state.current``.

    Tabu moves are skipped unless they beat ``best_evaluation`` (aspiration).
    The best admissible score wins, ties to the lowest item index. If every
    move is tabu and none aspirates, the oldest tabu move is taken. Expired
    tabu entries are purged first.
    """
    while state.tabu_list and state.tabu_list[0][1] < state.iteration:
        state.tabu_list.popleft()
    scores = _flip_scores(instance, state.current)
    tabu_items = {item for item, _ in state.tabu_list}
    best_k = -1
    for k in range(len(scores)):
        if k in tabu_items and scores[k] <= state.best_evaluation:
            continue
        if best_k == -1 or scores[k] > scores[best_k]:
            best_k = k
    if best_k == -1:
        best_k = state.tabu_list[0][0]
    flipped = list(state.current)
    flipped[best_k] ^= 1
    return tuple(flipped), best_k


def escape(state: SearchState, rng: np.random.Generator) -> SearchState:
    """Perturb the population out of a stagnated region and resample.

    If the two leading bits of the best solution differ, entangle them with
    cx(0, 1); otherwise spread qubit 1 with h (qubit 0 when there is only
    one item). The current selection is replaced by a fresh draw and the
    stagnation clock restarts; ``best_solution`` and ``best_evaluation``
    are kept.
    """
    bits = state.best_solution
    if len(bits) >= 2 and bits[0] != bits[1]:
        apply_gate(state.population, GateOp(Gate.CX, 1, control=0))
    else:
        apply_gate(state.population, GateOp(Gate.H, 1 if len(bits) >= 2 else 0))
    state.current = sample_candidate(state.population, rng)
    state.best_iteration = state.iteration
    return state


def qts_run(instance: KnapsackInstance, config: SearchConfig | None = None) -> SearchResult:
    """Run the full search loop and return the best selection found.

    Deterministic for a fixed config seed: the same instance and config
    reproduce the identical result, trace included.
    """
    if config is None:
        config = SearchConfig()
    n = instance.n_items
    if n > MAX_QUBITS:
        raise ValueError(f"instance has {n} items, population supports at most {MAX_QUBITS}")
    if config.max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    if config.stagnation_limit < 1:
        raise ValueError("stagnation_limit must be >= 1")
    tenure = config.tabu_tenure if config.tabu_tenure is not None else max(2, n // 4)
    if tenure < 1:
        raise ValueError("tabu_tenure must be >= 1")
    if tenure >= config.max_iterations:
        raise ValueError(
            f"tabu_tenure {tenure} must be smaller than max_iterations {config.max_iterations}"
        )
    rng = np.random.default_rng(config.seed)
    population = init_population(n, config.population_mode)
    current = sample_candidate(population, rng)
    state = SearchState(
        population=population,
        current=current,
        best_solution=current,
        best_evaluation=fitness(instance, current),
        best_iteration=0,
        iteration=0,
        tabu_list=deque(maxlen=tenure),
        trace=[],
    )
    for iteration in range(1, config.max_iterations + 1):
        state.iteration = iteration
        if iteration - state.best_iteration > config.stagnation_limit:
            escape(state, rng)
        chosen, flipped = select_move(state, instance)
        state.current = chosen
        state.tabu_list.append((flipped, iteration + tenure))
        current_eval = fitness(instance, chosen)
        if current_eval > state.best_evaluation:
            state.best_solution = chosen
            state.best_evaluation = current_eval
            state.best_iteration = iteration
        state.trace.append((iteration, current_eval, state.best_evaluation))
    return SearchResult(
        best_solution=state.best_solution,
        best_evaluation=state.best_evaluation,
        best_iteration=state.best_iteration,
        iterations_run=config.max_iterations,
        trace=state.trace,
    )
