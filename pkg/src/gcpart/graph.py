"""Extended circuit interaction graph and greedy gate grouping.

Nodes are ``(slot, layer)`` pairs. Slots ``0..n_q-1`` hold the logical qubits
and slots ``n_q..n_phys-1`` are idle padding, so that every layer can be
filled to exact QPU capacity. State edges join a slot to itself in the next
layer; gate edges join the two qubits of a CP in its layer. In extended mode
gate edges are also collected into groups that share a lead control qubit
and can be distributed over one link per remote QPU.
"""
from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .circuit import U, Circuit, Diagonality, classify_single_qubit
from .network import QpuNetwork


class Mode(str, enum.Enum):
    SIMPLE = "simple"
    EXTENDED = "extended"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class GateGroup:
    """Gate edges merged onto one original control node.

    ``members`` holds ``(gate, layer, partner)`` triples ordered by layer,
    where ``gate`` indexes the circuit's two-qubit gates.
    """

    lead: int
    members: tuple[tuple[int, int, int], ...]

    @property
    def control_layer(self) -> int:
        return self.members[0][1]

    @property
    def original_control(self) -> tuple[int, int]:
        return (self.lead, self.control_layer)

    @property
    def span(self) -> tuple[int, int]:
        return (self.members[0][1], self.members[-1][1])

    def __len__(self) -> int:
        return len(self.members)


def _breaks_group(kind: U) -> bool:
    return classify_single_qubit(kind) is Diagonality.GENERAL


def group_gates(circuit: Circuit) -> list[GateGroup]:
    """Greedy grouping of CP gates onto lead control qubits.

    A candidate is a maximal run of CPs on one qubit with no general
    single-qubit gate on that qubit in between. Candidates are claimed largest
    first, counting only gates not already taken; ties go to the lower qubit
    and then the earlier run. Every CP ends up in exactly one group.
    """
    two_q = {id(g): k for k, g in enumerate(circuit.two_qubit_gates)}
    gates = circuit.two_qubit_gates
    runs: list[tuple[int, list[int]]] = []
    for t in range(circuit.n_q):
        current: list[int] = []
        for g in circuit.timeline(t):
            if g.is_two_qubit:
                current.append(two_q[id(g)])
            elif _breaks_group(g.kind) and current:
                runs.append((t, current))
                current = []
        if current:
            runs.append((t, current))

    claimed = np.zeros(len(gates), dtype=bool)
    heap = [(-len(members), t, gates[members[0]].layer, r) for r, (t, members) in enumerate(runs)]
    heapq.heapify(heap)
    groups: list[GateGroup] = []
    while heap:
        neg_size, t, _, r = heapq.heappop(heap)
        free = [k for k in runs[r][1] if not claimed[k]]
        if not free:
            continue
        if len(free) != -neg_size:
            heapq.heappush(heap, (-len(free), t, gates[free[0]].layer, r))
            continue
        claimed[free] = True
        members = []
        for k in free:
            a, b = gates[k].qubits
            members.append((k, gates[k].layer, b if a == t else a))
        groups.append(GateGroup(t, tuple(members)))
    groups.sort(key=lambda grp: (grp.control_layer, grp.lead))
    return groups


def singleton_groups(circuit: Circuit) -> list[GateGroup]:
    return [GateGroup(g.qubits[0], ((k, g.layer, g.qubits[1]),)) for k, g in enumerate(circuit.two_qubit_gates)]


@dataclass(frozen=True, eq=False)
class InteractionGraph:
    circuit: Circuit
    n_phys: int
    mode: Mode
    groups: tuple[GateGroup, ...]
    gate_layer: np.ndarray = field(repr=False)
    gate_a: np.ndarray = field(repr=False)
    gate_b: np.ndarray = field(repr=False)

    @property
    def n_q(self) -> int:
        return self.circuit.n_q

    @property
    def depth(self) -> int:
        return self.circuit.depth

    @property
    def n_gate_edges(self) -> int:
        return len(self.gate_layer)

    @property
    def n_state_edges(self) -> int:
        return self.n_phys * max(self.depth - 1, 0)

    @cached_property
    def state_weight(self) -> np.ndarray:
        """1 for logical slots, 0 for padding: moving an idle slot is free."""
        w = np.zeros(self.n_phys, dtype=np.int64)
        w[: self.n_q] = 1
        return w

    @cached_property
    def gate_at(self) -> np.ndarray:
        """``gate_at[layer, slot]`` is the gate edge touching that node, or -1."""
        out = np.full((self.depth, self.n_phys), -1, dtype=np.int64)
        k = np.arange(self.n_gate_edges)
        out[self.gate_layer, self.gate_a] = k
        out[self.gate_layer, self.gate_b] = k
        return out

    @cached_property
    def gate_group(self) -> np.ndarray:
        out = np.empty(self.n_gate_edges, dtype=np.int64)
        for gi, grp in enumerate(self.groups):
            for k, _, _ in grp.members:
                out[k] = gi
        return out

    @cached_property
    def members(self) -> dict[str, np.ndarray]:
        """Flattened member arrays, grouped and ordered by layer within a group."""
        rows = [
            (gi, grp.lead, grp.control_layer, layer, partner)
            for gi, grp in enumerate(self.groups)
            for _, layer, partner in grp.members
        ]
        arr = np.array(rows, dtype=np.int64).reshape(-1, 5)
        first = np.ones(len(arr), dtype=bool)
        first[1:] = arr[1:, 0] != arr[:-1, 0]
        return {
            "group": arr[:, 0],
            "lead": arr[:, 1],
            "control_layer": arr[:, 2],
            "layer": arr[:, 3],
            "partner": arr[:, 4],
            "first": first,
        }

    def static_weights(self) -> np.ndarray:
        """Summed gate counts per slot pair: the static interaction graph."""
        s = np.zeros((self.n_phys, self.n_phys), dtype=np.int64)
        np.add.at(s, (self.gate_a, self.gate_b), 1)
        return s + s.T

    def to_dot(self) -> str:
        lines = ["graph circuit {", "  node [shape=circle, fontsize=8];"]
        for l in range(self.depth):
            for q in range(self.n_phys):
                style = "" if q < self.n_q else ", style=dashed"
                lines.append(f'  "q{q}@l{l}" [label="q{q}@l{l}"{style}];')
        for l in range(self.depth - 1):
            for q in range(self.n_phys):
                lines.append(f'  "q{q}@l{l}" -- "q{q}@l{l + 1}" [color=gray];')
        for gi, grp in enumerate(self.groups):
            merged = self.mode is Mode.EXTENDED and len(grp) > 1
            src = f"q{grp.lead}@l{grp.control_layer}"
            for _, layer, partner in grp.members:
                if merged:
                    lines.append(f'  "{src}" -- "q{partner}@l{layer}" [color=red, label="g{gi}"];')
                else:
                    lines.append(f'  "q{grp.lead}@l{layer}" -- "q{partner}@l{layer}" [color=black];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_graph(circuit: Circuit, net: QpuNetwork, mode: Mode | str = Mode.EXTENDED) -> InteractionGraph:
    mode = Mode(mode)
    if circuit.n_q > net.n_phys:
        raise GraphError(
            f"circuit needs {circuit.n_q} qubits but the network only holds {net.n_phys}"
        )
    two_q = circuit.two_qubit_gates
    layer = np.array([g.layer for g in two_q], dtype=np.int64)
    a = np.array([g.qubits[0] for g in two_q], dtype=np.int64)
    b = np.array([g.qubits[1] for g in two_q], dtype=np.int64)
    groups = group_gates(circuit) if mode is Mode.EXTENDED else singleton_groups(circuit)
    return InteractionGraph(circuit, net.n_phys, mode, tuple(groups), layer, a, b)
