"""Slow, loop-based reference checks that read the circuit directly.

These deliberately avoid the vectorised arrays in :mod:`gcpart.graph` and
:mod:`gcpart.model` so they can serve as independent oracles.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .circuit import U, Circuit, Diagonality, classify_single_qubit
from .graph import GateGroup
from .network import QpuNetwork


def edge_walk_cost_simple(circuit: Circuit, a: np.ndarray, net: QpuNetwork) -> float:
    w = net.weights
    total = 0
    for layer in range(circuit.depth - 1):
        for q in range(circuit.n_q):
            total += w[a[layer][q]][a[layer + 1][q]]
    for g in circuit.gates:
        if g.is_two_qubit:
            x, y = g.qubits
            total += w[a[g.layer][x]][a[g.layer][y]]
    return total


def edge_walk_cost_extended(
    circuit: Circuit, groups: Sequence[GateGroup], a: np.ndarray, net: QpuNetwork
) -> float:
    w = net.weights
    total = 0
    for layer in range(circuit.depth - 1):
        for q in range(circuit.n_q):
            total += w[a[layer][q]][a[layer + 1][q]]
    for grp in groups:
        lead = grp.lead
        home = None
        remotes: set[int] = set()
        last_layer = None
        for _, layer, partner in grp.members:
            moved = last_layer is not None and any(
                a[t][lead] != a[t + 1][lead] for t in range(last_layer, layer)
            )
            if home is None or moved:
                total += sum(w[home][r] for r in remotes) if home is not None else 0
                home, remotes = a[layer][lead], set()
            if a[layer][partner] != home:
                remotes.add(a[layer][partner])
            last_layer = layer
        if home is not None:
            total += sum(w[home][r] for r in remotes)
    return total


def static_cut(circuit: Circuit, row: Sequence[int], net: QpuNetwork) -> float:
    w = net.weights
    return sum(w[row[g.qubits[0]]][row[g.qubits[1]]] for g in circuit.gates if g.is_two_qubit)


def audit_groups(circuit: Circuit, groups: Sequence[GateGroup]) -> list[str]:
    """Return a list of violated grouping conditions (empty when all hold)."""
    problems = []
    cps = [g for g in circuit.gates if g.is_two_qubit]
    seen: dict[int, int] = {}
    for gi, grp in enumerate(groups):
        layers = []
        for k, layer, partner in grp.members:
            if k in seen:
                problems.append(f"gate {k} in groups {seen[k]} and {gi}")
            seen[k] = gi
            gate = cps[k]
            if grp.lead not in gate.qubits:
                problems.append(f"group {gi}: gate {k} does not touch lead qubit {grp.lead}")
            if set(gate.qubits) != {grp.lead, partner} or gate.layer != layer:
                problems.append(f"group {gi}: member record for gate {k} is inconsistent")
            layers.append(layer)
        if layers != sorted(layers):
            problems.append(f"group {gi}: members out of time order")
        first, last = min(layers), max(layers)
        for g in circuit.gates:
            if (
                not g.is_two_qubit
                and g.qubits[0] == grp.lead
                and first < g.layer < last
                and isinstance(g.kind, U)
                and classify_single_qubit(g.kind) is Diagonality.GENERAL
            ):
                problems.append(f"group {gi}: general gate on lead {grp.lead} at layer {g.layer}")
    missing = set(range(len(cps))) - set(seen)
    if missing:
        problems.append(f"gates not in any group: {sorted(missing)}")
    return problems
