"""Quantum-inspired tabu search with a small statevector simulator.

Subpackages split by concern: `statevector` (dense simulation),
`qasm` (circuit text format), `routing` (coupling-map rewriting),
`tabu` (the search engine), `mapsearch` (coupling-map search),
`cli` (command-line harness).
"""

__all__ = ["statevector", "qasm", "routing", "tabu", "mapsearch", "cli"]
