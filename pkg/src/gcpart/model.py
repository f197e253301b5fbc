"""Assignments, e-bit cost functions and the exhaustive oracle.

An assignment is an integer matrix of shape ``(depth, n_phys)`` whose entry
``[layer, slot]`` is the QPU holding that slot during that layer. All cost
functions accept either one matrix or a stacked population of shape
``(P, depth, n_phys)``.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import InteractionGraph, Mode
from .network import QpuNetwork

CSV_COLUMNS = (
    "family", "n_q", "d", "p", "method", "seed", "ebits",
    "two_qubit_gates", "ratio", "wall_ms", "config_hash", "error",
)


class AssignmentError(ValueError):
    pass


class SearchSpaceTooLarge(ValueError):
    pass


def validate_assignment(a: np.ndarray, graph: InteractionGraph, net: QpuNetwork) -> None:
    """Raise unless ``a`` (or every member of a population) fills each QPU exactly per layer."""
    a = np.asarray(a)
    pop = a[None] if a.ndim == 2 else a
    want = (graph.depth, graph.n_phys)
    if pop.ndim != 3 or pop.shape[1:] != want:
        raise AssignmentError(f"assignment shape {a.shape} does not match (depth, n_phys) = {want}")
    if pop.size == 0:
        return
    if pop.min() < 0 or pop.max() >= net.qpu_count:
        raise AssignmentError("assignment uses an unknown QPU label")
    counts = (pop[..., None] == np.arange(net.qpu_count)).sum(axis=2)
    bad = np.argwhere(np.any(counts != np.asarray(net.capacities), axis=2))
    if len(bad):
        p, layer = bad[0]
        raise AssignmentError(
            f"layer {layer} has QPU occupancy {counts[p, layer].tolist()}, expected {list(net.capacities)}"
        )


def is_valid(a: np.ndarray, graph: InteractionGraph, net: QpuNetwork) -> bool:
    try:
        validate_assignment(a, graph, net)
    except AssignmentError:
        return False
    return True


def _as_population(graph: InteractionGraph, a: np.ndarray) -> tuple[np.ndarray, bool]:
    a = np.asarray(a)
    single = a.ndim == 2
    pop = a[None] if single else a
    if pop.ndim != 3 or pop.shape[1:] != (graph.depth, graph.n_phys):
        raise AssignmentError(
            f"assignment shape {a.shape} does not match (depth, n_phys) = {(graph.depth, graph.n_phys)}"
        )
    return pop, single


def _unwrap(costs: np.ndarray, single: bool):
    if single:
        c = costs[0]
        return int(c) if np.issubdtype(costs.dtype, np.integer) else float(c)
    return costs


def _state_costs(graph: InteractionGraph, pop: np.ndarray, w: np.ndarray) -> np.ndarray:
    if graph.depth < 2:
        return np.zeros(len(pop), dtype=w.dtype)
    if _uniform(w):
        n_q = graph.n_q
        return np.count_nonzero(pop[:, :-1, :n_q] != pop[:, 1:, :n_q], axis=(1, 2)).astype(w.dtype)
    moved = w[pop[:, :-1, :], pop[:, 1:, :]]
    return (moved * graph.state_weight).sum(axis=(1, 2))


def _uniform(w: np.ndarray) -> bool:
    return bool(np.all(w == 1 - np.eye(len(w), dtype=w.dtype)))


def _gate_costs(graph: InteractionGraph, pop: np.ndarray, w: np.ndarray) -> np.ndarray:
    if graph.n_gate_edges == 0:
        return np.zeros(len(pop), dtype=w.dtype)
    qa = pop[:, graph.gate_layer, graph.gate_a]
    qb = pop[:, graph.gate_layer, graph.gate_b]
    return w[qa, qb].sum(axis=1)


def _link_hits(graph: InteractionGraph, pop: np.ndarray, net: QpuNetwork):
    """Locate every (link, remote QPU) pair used by the grouped gate edges.

    A link is a stretch of a group during which the lead qubit stays on one
    QPU; if the lead is teleported between two members the group is split
    there. Returns ``(pop_idx, link, control_qpu, remote_qpu)`` arrays where
    ``link`` is the member index that opened the link.
    """
    m = graph.members
    p = len(pop)
    new_link = _new_links(graph, pop)
    # each member is keyed by the index of the member that opened its link
    link = np.maximum.accumulate(np.where(new_link, np.arange(new_link.shape[1]), 0), axis=1)
    ctrl = pop[:, m["layer"], m["lead"]]
    partner = pop[:, m["layer"], m["partner"]]
    hits = np.zeros((p, len(m["layer"]), net.qpu_count), dtype=bool)
    rows = np.broadcast_to(np.arange(p)[:, None], link.shape)
    ext = ctrl != partner
    hits[rows[ext], link[ext], partner[ext]] = True
    link_ctrl = np.zeros_like(link)
    link_ctrl[rows, link] = ctrl
    pi, li, qi = np.nonzero(hits)
    return pi, li, link_ctrl[pi, li], qi


def _new_links(graph: InteractionGraph, pop: np.ndarray) -> np.ndarray:
    """``[p, i]`` is True where member ``i`` opens a link (group start or lead moved)."""
    m = graph.members
    # running count of moves per slot; int16 halves memory traffic when depth allows
    dtype = np.int16 if graph.depth < np.iinfo(np.int16).max else np.int32
    changes = np.zeros((len(pop), graph.depth, graph.n_phys), dtype=dtype)
    if graph.depth > 1:
        np.cumsum(pop[:, 1:, :] != pop[:, :-1, :], axis=1, out=changes[:, 1:, :])
    moves = changes[:, m["layer"], m["lead"]]
    new_link = np.empty(moves.shape, dtype=bool)
    new_link[:, 0] = True
    new_link[:, 1:] = (moves[:, 1:] != moves[:, :-1]) | m["first"][None, 1:]
    return new_link


def _group_costs(graph: InteractionGraph, pop: np.ndarray, net: QpuNetwork) -> np.ndarray:
    w = net.weights
    if graph.n_gate_edges == 0:
        return np.zeros(len(pop), dtype=w.dtype)
    if net.qpu_count > 63:
        pi, _, ctrl, remote = _link_hits(graph, pop, net)
        return np.bincount(pi, weights=w[ctrl, remote], minlength=len(pop)).astype(w.dtype)
    # OR together one bit per remote QPU over the members of each link
    m = graph.members
    n_members = len(m["layer"])
    ctrl = pop[:, m["layer"], m["lead"]]
    partner = pop[:, m["layer"], m["partner"]]
    bits = np.where(ctrl != partner, np.left_shift(np.uint64(1), partner.astype(np.uint64)), np.uint64(0))
    starts = np.flatnonzero(_new_links(graph, pop).ravel())
    remote = np.bitwise_or.reduceat(bits.ravel(), starts)
    owner = starts // n_members
    if _uniform(w):
        per_link = np.bitwise_count(remote).astype(w.dtype)
    else:
        link_ctrl = ctrl.ravel()[starts]
        per_link = np.zeros(len(starts), dtype=w.dtype)
        for q in range(net.qpu_count):
            has_q = (remote >> np.uint64(q)) & np.uint64(1)
            per_link += has_q.astype(w.dtype) * w[link_ctrl, q]
    return np.bincount(owner, weights=per_link, minlength=len(pop)).astype(w.dtype)


def cost_simple(graph: InteractionGraph, a: np.ndarray, net: QpuNetwork):
    """Every cut edge costs its hop-scaled weight: one e-bit per teleport."""
    pop, single = _as_population(graph, a)
    w = net.weights
    return _unwrap(_state_costs(graph, pop, w) + _gate_costs(graph, pop, w), single)


def cost_extended(graph: InteractionGraph, a: np.ndarray, net: QpuNetwork):
    """State edges as in :func:`cost_simple`; each gate group pays once per remote QPU it reaches."""
    pop, single = _as_population(graph, a)
    w = net.weights
    return _unwrap(_state_costs(graph, pop, w) + _group_costs(graph, pop, net), single)


def cost(graph: InteractionGraph, a: np.ndarray, net: QpuNetwork):
    """Cost under the graph's own mode."""
    if graph.mode is Mode.EXTENDED:
        return cost_extended(graph, a, net)
    return cost_simple(graph, a, net)


def group_external_degree(graph: InteractionGraph, group: int, a: np.ndarray, net: QpuNetwork) -> int:
    """Number of links (remote QPUs) the given group needs under ``a``."""
    pop, _ = _as_population(graph, a)
    pi, li, _, _ = _link_hits(graph, pop, net)
    member_group = graph.members["group"]
    return int(np.count_nonzero(member_group[li] == group))


@dataclass(frozen=True)
class StateTeleport:
    qubit: int
    layer: int
    from_qpu: int
    to_qpu: int


@dataclass(frozen=True)
class GroupLink:
    group: int
    lead: int
    layer: int
    control_qpu: int
    external_qpus: tuple[int, ...]


@dataclass
class EbitReport:
    total: float
    two_qubit_gates: int
    mode: str
    state_teleports: list[StateTeleport] = field(default_factory=list)
    group_links: list[GroupLink] = field(default_factory=list)
    assignment: np.ndarray | None = field(default=None, repr=False)

    @property
    def ratio(self) -> float:
        return self.total / self.two_qubit_gates if self.two_qubit_gates else 0.0

    def to_dict(self) -> dict:
        out = {
            "total": self.total,
            "two_qubit_gates": self.two_qubit_gates,
            "ratio": self.ratio,
            "mode": self.mode,
            "state_teleports": [asdict(e) for e in self.state_teleports],
            "group_links": [asdict(e) for e in self.group_links],
        }
        if self.assignment is not None:
            out["assignment"] = np.asarray(self.assignment).tolist()
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def csv_row(self, **cells) -> dict:
        row = {k: "" for k in CSV_COLUMNS}
        row.update(ebits=self.total, two_qubit_gates=self.two_qubit_gates, ratio=round(self.ratio, 6))
        row.update(cells)
        return row

    def to_csv(self, **cells) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerow(self.csv_row(**cells))
        return buf.getvalue()


def extract_schedule(graph: InteractionGraph, a: np.ndarray, net: QpuNetwork) -> EbitReport:
    """List every teleport and group link implied by ``a``; totals match :func:`cost`."""
    a = np.asarray(a)
    validate_assignment(a, graph, net)
    w = net.weights
    teleports = []
    for layer in range(graph.depth - 1):
        for q in np.flatnonzero((a[layer] != a[layer + 1]) & (graph.state_weight > 0)):
            teleports.append(StateTeleport(int(q), layer, int(a[layer, q]), int(a[layer + 1, q])))
    links: list[GroupLink] = []
    if graph.n_gate_edges:
        m = graph.members
        _, li, ctrl, remote = _link_hits(graph, a[None], net)
        by_link: dict[int, tuple[int, list[int]]] = {}
        for mi, c, r in zip(li.tolist(), ctrl.tolist(), remote.tolist()):
            by_link.setdefault(mi, (c, []))[1].append(r)
        for mi, (c, remotes) in sorted(by_link.items()):
            links.append(
                GroupLink(int(m["group"][mi]), int(m["lead"][mi]), int(m["layer"][mi]), c, tuple(sorted(remotes)))
            )
    total = sum(w[t.from_qpu, t.to_qpu] for t in teleports)
    total += sum(w[link.control_qpu, r] for link in links for r in link.external_qpus)
    total = int(total) if np.issubdtype(w.dtype, np.integer) else float(total)
    return EbitReport(total, graph.n_gate_edges, graph.mode.value, teleports, links, a.copy())


def schedule_simple(graph: InteractionGraph, a: np.ndarray, net: QpuNetwork) -> EbitReport:
    """Schedule of the per-gate (ungrouped) cost model, whatever the graph's mode."""
    if graph.mode is Mode.SIMPLE:
        return extract_schedule(graph, a, net)
    from .graph import build_graph

    return extract_schedule(build_graph(graph.circuit, net, Mode.SIMPLE), a, net)


def layer_arrangements(net: QpuNetwork) -> np.ndarray:
    """All distinct slot-to-QPU rows that fill every QPU exactly."""
    n = net.n_phys
    rows: list[np.ndarray] = []

    def place(row: np.ndarray, free: tuple[int, ...], qpu: int) -> None:
        if qpu == net.qpu_count:
            rows.append(row.copy())
            return
        for chosen in itertools.combinations(free, net.capacities[qpu]):
            row[list(chosen)] = qpu
            rest = tuple(s for s in free if s not in chosen)
            place(row, rest, qpu + 1)

    place(np.zeros(n, dtype=np.int64), tuple(range(n)), 0)
    return np.array(rows, dtype=np.int64).reshape(-1, n)


def arrangement_count(net: QpuNetwork) -> int:
    count, left = 1, net.n_phys
    for c in net.capacities:
        count *= math.comb(left, c)
        left -= c
    return count


def brute_force_optimum(
    graph: InteractionGraph, net: QpuNetwork, bound: int = 10**6, chunk: int = 4096
) -> tuple[float, np.ndarray]:
    """Exhaustive minimum over every valid assignment (up to within-QPU slot order)."""
    per_layer = arrangement_count(net)
    total = per_layer ** graph.depth
    if total > bound:
        raise SearchSpaceTooLarge(
            f"{per_layer}^{graph.depth} = {total} assignments exceeds the bound {bound}; use a smaller instance"
        )
    rows = layer_arrangements(net)
    if graph.depth == 0:
        empty = np.zeros((0, net.n_phys), dtype=np.int64)
        return cost(graph, empty, net), empty
    best_cost, best = None, None
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = np.stack(np.unravel_index(idx, (per_layer,) * graph.depth), axis=1)
        pop = rows[digits]
        costs = cost(graph, pop, net)
        k = int(np.argmin(costs))
        if best_cost is None or costs[k] < best_cost:
            best_cost, best = costs[k], pop[k].copy()
    best_cost = int(best_cost) if np.issubdtype(type(best_cost), np.integer) else float(best_cost)
    return best_cost, best
